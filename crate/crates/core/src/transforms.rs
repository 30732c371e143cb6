//! Free-probability transforms of the laws entering `p + iq`.
//!
//! Conventions: `G(z) = ∫ dμ(t)/(z - t)`, `ψ(z) = ∫ tz/(1 - tz) dμ(t)`,
//! `χ` is the inverse of `ψ` near 0 and `S(w) = χ(w)(1 + w)/w`.
//! For free projections `p`, `q` with traces `a`, `b` the law of `pqp` has
//! `S_pqp = S_p S_q`; its `ψ` involves the square root of the quadratic
//! `f(z) = 1 + (4ab - 2(a + b))z + (a - b)²z²`, see [`FPoly`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TwoAtomLaw;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients of `f(z) = c0 + c1 z + c2 z²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FPoly {
    pub a: f64,
    pub b: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Real roots of `f`, all in `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FRoots {
    /// `a = b`: `f` is linear.
    Single(f64),
    /// `a ≠ b`: two distinct roots `r1 < r2`.
    Pair(f64, f64),
}

impl FPoly {
    pub fn new(a: f64, b: f64) -> Self {
        FPoly {
            a,
            b,
            c0: 1.0,
            c1: 4.0 * a * b - 2.0 * (a + b),
            c2: (a - b) * (a - b),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c0 + x * (self.c1 + x * self.c2)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        (z * self.c2 + self.c1) * z + self.c0
    }

    /// `16ab(1-a)(1-b)`, evaluated without cancellation.
    pub fn discriminant(&self) -> f64 {
        16.0 * self.a * self.b * (1.0 - self.a) * (1.0 - self.b)
    }

    pub fn roots(&self) -> FRoots {
        if self.c2 == 0.0 {
            return FRoots::Single(-self.c0 / self.c1);
        }
        // c1 < 0 on (0,1)², so the stable pairing is q = (√D - c1)/2 > 0.
        let q = 0.5 * (self.discriminant().sqrt() - self.c1);
        let (x1, x2) = (self.c0 / q, q / self.c2);
        if x1 <= x2 {
            FRoots::Pair(x1, x2)
        } else {
            FRoots::Pair(x2, x1)
        }
    }
}

/// Branch of `√f` analytic on `ℂ ∖ [r1, r2] ⊂ ℂ ∖ [1, ∞)` with value `+1` at 0.
///
/// For `a ≠ b` this is `-|a - b| √(z - r1) √(z - r2)` with principal roots;
/// the two cuts along `(-∞, r1]` cancel. For `a = b` it is the principal
/// root of the linear polynomial.
pub fn sqrt_f(fp: &FPoly, z: Complex64) -> Complex64 {
    match fp.roots() {
        FRoots::Single(_) => (ONE + z * fp.c1).sqrt(),
        FRoots::Pair(r1, r2) => {
            let scale = -(fp.a - fp.b).abs();
            (z - r1).sqrt() * (z - r2).sqrt() * scale
        }
    }
}

/// `G(z) = a/(z - α) + (1 - a)/(z - α′)`.
pub fn stieltjes_two_atom(law: &TwoAtomLaw, z: Complex64) -> Result<Complex64> {
    let mut g = Complex64::new(0.0, 0.0);
    let weight_high = 1.0 - law.weight_low;
    for (pos, w) in [(law.pos_low, law.weight_low), (law.pos_high, weight_high)] {
        if w == 0.0 {
            continue;
        }
        let d = z - pos;
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::Pole {
                transform: "stieltjes_two_atom",
                z,
            });
        }
        g += w / d;
    }
    Ok(g)
}

/// `ψ_p(z) = az/(1 - z)` for a projection of trace `a`.
pub fn psi_projection(trace: f64, z: Complex64) -> Result<Complex64> {
    if z == ONE {
        return Err(Error::Pole {
            transform: "psi_projection",
            z,
        });
    }
    Ok(z * trace / (ONE - z))
}

/// `χ_p(w) = w/(w + a)`, the inverse of [`psi_projection`] near 0.
pub fn chi_projection(trace: f64, w: Complex64) -> Result<Complex64> {
    let d = w + trace;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            transform: "chi_projection",
            z: w,
        });
    }
    Ok(w / d)
}

/// `S_p(w) = (1 + w)/(w + a)`.
pub fn s_projection(trace: f64, w: Complex64) -> Result<Complex64> {
    let d = w + trace;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            transform: "s_projection",
            z: w,
        });
    }
    Ok((ONE + w) / d)
}

/// `χ_pqp(w) = w(1 + w)/((w + a)(w + b))`.
pub fn chi_pqp(a: f64, b: f64, w: Complex64) -> Result<Complex64> {
    let d = (w + a) * (w + b);
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            transform: "chi_pqp",
            z: w,
        });
    }
    Ok(w * (ONE + w) / d)
}

/// `S_pqp(w) = χ_pqp(w)(1 + w)/w`, continued to `w = 0`.
pub fn s_pqp(a: f64, b: f64, w: Complex64) -> Result<Complex64> {
    let d = (w + a) * (w + b);
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            transform: "s_pqp",
            z: w,
        });
    }
    Ok((ONE + w) * (ONE + w) / d)
}

/// `ψ_pqp(z) = (1 - (a + b)z - √f(z)) / (2(z - 1))` on `ℂ ∖ [1, ∞)`.
pub fn psi_pqp(a: f64, b: f64, z: Complex64) -> Complex64 {
    psi_pqp_with(&FPoly::new(a, b), a + b, z)
}

/// `ψ` of `(1 - p)(1 - q)(1 - p)`: same root, linear term `2 - a - b`.
pub fn psi_complement(a: f64, b: f64, z: Complex64) -> Complex64 {
    psi_pqp_with(&FPoly::new(a, b), 2.0 - a - b, z)
}

fn psi_pqp_with(fp: &FPoly, linear: f64, z: Complex64) -> Complex64 {
    let root = sqrt_f(fp, z);
    (ONE - z * linear - root) / ((z - 1.0) * 2.0)
}

fn require_off_unit_interval(transform: &'static str, z: Complex64) -> Result<()> {
    if z.im == 0.0 && (0.0..=1.0).contains(&z.re) {
        return Err(Error::Pole { transform, z });
    }
    Ok(())
}

/// `G_pqp(z) = (z + (a + b - 2) + z√f(1/z)) / (2z(z - 1))` on `ℂ ∖ [0, 1]`.
pub fn g_pqp(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    require_off_unit_interval("g_pqp", z)?;
    let fp = FPoly::new(a, b);
    let root = sqrt_f(&fp, z.inv());
    Ok((z + (a + b - 2.0) + z * root) / (z * (z - 1.0) * 2.0))
}

/// Stieltjes transform of `ν*`, the law of `t = cos²θ` on `(0, 1)`:
///
/// `G(z) = √f(1/z)/(ε(z - 1)) - 1/(εz) - m/(εz(z - 1)) + 1/z`
///
/// with `m = |a + b - 1|` the combined mass of `p∧q` and `(1-p)∧(1-q)`.
/// The trailing `1/z` comes from `G(z) = (ψ(1/z) + 1)/z`.
pub fn g_nu_star(a: f64, b: f64, eps: f64, z: Complex64) -> Result<Complex64> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::invalid("eps", format!("{eps} must be positive")));
    }
    require_off_unit_interval("g_nu_star", z)?;
    let fp = FPoly::new(a, b);
    let root = sqrt_f(&fp, z.inv());
    let corner_mass = (a + b - 1.0).abs();
    let zm1 = z - 1.0;
    Ok(root / (zm1 * eps) - ONE / (z * eps) - corner_mass / (z * zm1 * eps) + ONE / z)
}

/// Atom mass recovered from a Stieltjes transform, with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomMass {
    pub mass: f64,
    pub error: f64,
}

/// Tolerance on the extrapolated limit in [`atom_mass_at`].
pub const ATOM_LIMIT_TOL: f64 = 1e-8;

/// `μ({s}) = lim (z - s) G(z)` along the vertical approach `z = s + i 2^{-k}`,
/// `k = 10..=40`.
///
/// The raw sequence converges like `C y^p` (`p = 1` for smooth background,
/// `p = 1/2` next to a square-root edge), so each consecutive triple is
/// extrapolated with Aitken's Δ² (Richardson with the exponent estimated from
/// the data). The reported value is the estimate where consecutive
/// extrapolations agree best.
pub fn atom_mass_at<G>(g: G, s: f64) -> Result<AtomMass>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let mut raw = Vec::with_capacity(31);
    for k in 10..=40 {
        let y = (-(k as f64)).exp2();
        let z = Complex64::new(s, y);
        let v = g(z)? * Complex64::new(0.0, y);
        if !v.is_finite() {
            return Err(Error::NonConvergent(format!(
                "non-finite (z - s)G(z) at s = {s}, height 2^-{k}"
            )));
        }
        raw.push(v);
    }
    let aitken: Vec<Complex64> = raw
        .windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            let denom = d2 - d1;
            if denom.norm() <= 1e-14 * (w[2].norm() + 1.0) {
                w[2]
            } else {
                w[2] - d2 * d2 / denom
            }
        })
        .collect();
    let (best, err) = aitken
        .windows(2)
        .map(|w| (w[1], (w[1] - w[0]).norm()))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("at least two extrapolations");
    if err > ATOM_LIMIT_TOL {
        return Err(Error::NonConvergent(format!(
            "(z - s)G(z) at s = {s} still varies by {err:.3e}"
        )));
    }
    Ok(AtomMass {
        mass: best.re.clamp(0.0, 1.0),
        error: err.max(best.im.abs()),
    })
}

/// First `count` Taylor coefficients at 0 of a function analytic on the
/// closed disk of the given radius, via the trapezoid rule on the circle
/// (a discrete Cauchy integral).
pub fn taylor_coefficients<F>(f: F, count: usize, radius: f64, points: usize) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let samples: Vec<Complex64> = (0..points)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / points as f64;
            f(Complex64::from_polar(radius, t))
        })
        .collect();
    (0..count)
        .map(|k| {
            let acc: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = -std::f64::consts::TAU * (j * k) as f64 / points as f64;
                    v * Complex64::from_polar(1.0, t)
                })
                .sum();
            acc / (points as f64 * radius.powi(k as i32))
        })
        .collect()
}
