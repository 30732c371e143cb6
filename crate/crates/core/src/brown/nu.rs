//! The angular law `ν` on `[0, π/2]` carrying the continuous part.
//!
//! Its density is `(2/(πε)) √(-f(sec²θ)) cot θ` where the root is positive.
//! Multiplying through by `cot²θ` gives the form used here,
//! `-(f(1) cot²θ + (c1 + 2c2) + c2 tan²θ)` under the root, which stays finite
//! at both ends when `f(1) = 0` or `c2 = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::lambda::check_theta;
use super::weights::{snap, weights};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::transforms::{FPoly, FRoots};

/// Number of table cells; the grid has one more row.
pub const NU_TABLE_CELLS: usize = 16_384;
const CELL_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
struct NuKernel {
    f1: f64,
    lin: f64,
    c2: f64,
    scale: f64,
}

impl NuKernel {
    fn new(a: f64, b: f64, eps: f64) -> Self {
        let s = snap(a + b - 1.0);
        let d = snap(a - b);
        let fp = FPoly::new(a, b);
        let c2 = d * d;
        NuKernel {
            f1: s * s,
            lin: fp.c1 + 2.0 * c2,
            c2,
            scale: 2.0 / (PI * eps),
        }
    }

    /// `f(sec²θ) cot²θ`; negative exactly on the support.
    fn g(&self, theta: f64) -> f64 {
        let t = theta.tan();
        let mut v = self.lin;
        if self.f1 != 0.0 {
            v += self.f1 / (t * t);
        }
        if self.c2 != 0.0 {
            v += self.c2 * t * t;
        }
        v
    }

    fn density(&self, theta: f64) -> f64 {
        self.scale * (-self.g(theta)).max(0.0).sqrt()
    }
}

/// Density of `ν` at `θ ∈ [0, π/2]`, with the one-sided limits at the ends.
pub fn nu_density(a: f64, b: f64, theta: f64) -> Result<f64> {
    let w = weights(a, b)?;
    check_theta(theta)?;
    Ok(NuKernel::new(a, b, w.w_cont).density(theta))
}

/// `[θ_lo, θ_hi]`, the closure of `{θ : f(sec²θ) < 0}`.
pub fn nu_support(a: f64, b: f64) -> Result<[f64; 2]> {
    let w = weights(a, b)?;
    Ok(support_of(&NuKernel::new(a, b, w.w_cont), a, b))
}

fn support_of(k: &NuKernel, a: f64, b: f64) -> [f64; 2] {
    let to_theta = |x: f64| (x - 1.0).max(0.0).sqrt().atan();
    let (r1, r2) = match FPoly::new(a, b).roots() {
        FRoots::Single(r) => (r, f64::INFINITY),
        FRoots::Pair(r1, r2) => (r1, r2),
    };
    let mut mid = if k.c2 == 0.0 || r2.is_infinite() {
        to_theta(2.0 * r1)
    } else {
        to_theta((r1 * r2).sqrt())
    };
    if k.g(mid) >= 0.0 {
        // fall back to the most negative point of a coarse scan
        mid = (1..1024)
            .map(|i| FRAC_PI_2 * i as f64 / 1024.0)
            .min_by(|x, y| k.g(*x).total_cmp(&k.g(*y)))
            .expect("nonempty scan");
    }
    let lo = if k.f1 == 0.0 { 0.0 } else { bisect_edge(k, 0.0, mid) };
    let hi = if k.c2 == 0.0 { FRAC_PI_2 } else { bisect_edge(k, FRAC_PI_2, mid) };
    [lo, hi]
}

/// Bisection for the sign change of `g` between `outside` (g ≥ 0) and
/// `inside` (g < 0); returns the last point with `g ≥ 0`.
fn bisect_edge(k: &NuKernel, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (outside + inside);
        if m == outside || m == inside {
            break;
        }
        if k.g(m) < 0.0 {
            inside = m;
        } else {
            outside = m;
        }
    }
    outside
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NuDensityRepr {
    a: f64,
    b: f64,
    eps: f64,
    support: [f64; 2],
    grid: Vec<[f64; 3]>,
}

/// Tabulated `ν`: density, CDF and quantile.
///
/// The table lives on `θ(s) = lo + (hi - lo) sin²(πs/2)`, `s ∈ [0, 1]`, which
/// clusters rows at the support edges where the density has square-root
/// behaviour. Each cell carries an 8-point Gauss–Legendre integral; partial
/// cells are integrated the same way, so the CDF is accurate to rounding.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NuDensityRepr")]
pub struct NuDensity {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub support: [f64; 2],
    /// Rows `[θ, density, cdf]`.
    pub grid: Vec<[f64; 3]>,
    #[serde(skip_serializing)]
    kernel: NuKernel,
    #[serde(skip_serializing)]
    total: f64,
    #[serde(skip_serializing)]
    nodes: ([f64; CELL_NODES], [f64; CELL_NODES]),
}

impl TryFrom<NuDensityRepr> for NuDensity {
    type Error = Error;

    fn try_from(r: NuDensityRepr) -> Result<Self> {
        let nu = NuDensity::new(r.a, r.b)?;
        if (nu.eps - r.eps).abs() > 1e-12 {
            return Err(Error::Inconsistent(format!(
                "eps = {} does not match weights of (a, b) = ({}, {})",
                r.eps, r.a, r.b
            )));
        }
        Ok(nu)
    }
}

impl PartialEq for NuDensity {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl NuDensity {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let eps = weights(a, b)?.w_cont;
        let kernel = NuKernel::new(a, b, eps);
        let support = support_of(&kernel, a, b);
        let (x, w) = gauss_legendre(CELL_NODES);
        let nodes = (
            x.try_into().expect("fixed rule size"),
            w.try_into().expect("fixed rule size"),
        );
        let mut nu = NuDensity {
            a,
            b,
            eps,
            support,
            grid: Vec::with_capacity(NU_TABLE_CELLS + 1),
            kernel,
            total: 1.0,
            nodes,
        };
        let mut cum = Vec::with_capacity(NU_TABLE_CELLS + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for k in 0..NU_TABLE_CELLS {
            let s0 = k as f64 / NU_TABLE_CELLS as f64;
            let s1 = (k + 1) as f64 / NU_TABLE_CELLS as f64;
            acc += nu.integrate_s(s0, s1);
            cum.push(acc);
        }
        nu.total = acc;
        nu.grid = cum
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let theta = nu.theta_of_s(k as f64 / NU_TABLE_CELLS as f64);
                [theta, nu.kernel.density(theta), c / acc]
            })
            .collect();
        Ok(nu)
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.kernel.density(theta)
    }

    /// `∫ν` from the table before normalization; 1 up to quadrature error.
    pub fn raw_total(&self) -> f64 {
        self.total
    }

    pub fn cdf(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        let [lo, hi] = self.support;
        if theta <= lo {
            return Ok(0.0);
        }
        if theta >= hi {
            return Ok(1.0);
        }
        let s = self.s_of_theta(theta);
        let k = ((s * NU_TABLE_CELLS as f64) as usize).min(NU_TABLE_CELLS - 1);
        let s0 = k as f64 / NU_TABLE_CELLS as f64;
        let v = self.grid[k][2] + self.integrate_s(s0, s) / self.total;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfRange(format!("u = {u} is not in [0, 1]")));
        }
        let [lo, hi] = self.support;
        if u == 0.0 {
            return Ok(lo);
        }
        if u == 1.0 {
            return Ok(hi);
        }
        // last row with cdf <= u
        let k = self.grid.partition_point(|row| row[2] <= u).saturating_sub(1).min(NU_TABLE_CELLS - 1);
        let c0 = self.grid[k][2];
        let (mut left, mut right) = (k as f64 / NU_TABLE_CELLS as f64, (k + 1) as f64 / NU_TABLE_CELLS as f64);
        let s0 = left;
        let span = self.grid[k + 1][2] - c0;
        let mut s = if span > 0.0 {
            left + (right - left) * ((u - c0) / span)
        } else {
            0.5 * (left + right)
        };
        for _ in 0..60 {
            let resid = c0 + self.integrate_s(s0, s) / self.total - u;
            if resid > 0.0 {
                right = s;
            } else {
                left = s;
            }
            let slope = self.h(s) / self.total;
            let mut next = if slope > 0.0 { s - resid / slope } else { f64::NAN };
            if !(next > left && next < right) {
                next = 0.5 * (left + right);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s.max(1e-300) || right - left <= f64::EPSILON {
                s = next;
                break;
            }
            s = next;
        }
        Ok(self.theta_of_s(s).clamp(lo, hi))
    }

    fn theta_of_s(&self, s: f64) -> f64 {
        let [lo, hi] = self.support;
        let r = (0.5 * PI * s).sin();
        lo + (hi - lo) * r * r
    }

    fn s_of_theta(&self, theta: f64) -> f64 {
        let [lo, hi] = self.support;
        let t = ((theta - lo) / (hi - lo)).clamp(0.0, 1.0);
        (2.0 / PI) * t.sqrt().asin()
    }

    /// `dν/ds`.
    fn h(&self, s: f64) -> f64 {
        let [lo, hi] = self.support;
        let dtheta = (hi - lo) * PI * (0.5 * PI * s).sin() * (0.5 * PI * s).cos();
        self.kernel.density(self.theta_of_s(s)) * dtheta
    }

    fn integrate_s(&self, s0: f64, s1: f64) -> f64 {
        if s1 <= s0 {
            return 0.0;
        }
        let (c, r) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
        let (x, w) = &self.nodes;
        r * x.iter().zip(w).map(|(x, w)| w * self.h(c + r * x)).sum::<f64>()
    }
}
