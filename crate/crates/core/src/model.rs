//! Shared domain types: two-atom laws, model parameters, the hyperbola and
//! rectangle carrying the support, and atom weights.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx;
use crate::error::{Error, Result};

/// A probability law `weight_low δ_{pos_low} + (1 - weight_low) δ_{pos_high}`.
///
/// Constructed through [`TwoAtomLaw::new`], which orders the atoms so that
/// `pos_low < pos_high` whenever both atoms carry mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomLaw {
    pub pos_low: f64,
    pub pos_high: f64,
    pub weight_low: f64,
}

impl TwoAtomLaw {
    pub fn new(pos_low: f64, pos_high: f64, weight_low: f64) -> Result<Self> {
        if !pos_low.is_finite() {
            return Err(Error::invalid("pos_low", format!("{pos_low} is not finite")));
        }
        if !pos_high.is_finite() {
            return Err(Error::invalid("pos_high", format!("{pos_high} is not finite")));
        }
        if !weight_low.is_finite() || !(0.0..=1.0).contains(&weight_low) {
            return Err(Error::invalid(
                "weight_low",
                format!("{weight_low} is not in [0, 1]"),
            ));
        }
        let interior = weight_low > 0.0 && weight_low < 1.0;
        if interior && pos_low == pos_high {
            return Err(Error::invalid(
                "pos_high",
                "atom positions coincide while both carry mass",
            ));
        }
        if pos_low > pos_high {
            return Ok(TwoAtomLaw {
                pos_low: pos_high,
                pos_high: pos_low,
                weight_low: 1.0 - weight_low,
            });
        }
        Ok(TwoAtomLaw {
            pos_low,
            pos_high,
            weight_low,
        })
    }

    /// Point mass at `x`.
    pub fn constant(x: f64) -> Result<Self> {
        Self::new(x, x, 1.0)
    }

    /// True when the law is a point mass (weight 0 or 1, or a single position).
    pub fn is_degenerate(&self) -> bool {
        self.weight_low <= 0.0 || self.weight_low >= 1.0 || self.pos_low == self.pos_high
    }

    pub fn gap(&self) -> f64 {
        self.pos_high - self.pos_low
    }

    pub fn mean(&self) -> f64 {
        self.weight_low * self.pos_low + (1.0 - self.weight_low) * self.pos_high
    }
}

/// Laws of `p` (real part) and `q` (imaginary part).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub law_p: TwoAtomLaw,
    pub law_q: TwoAtomLaw,
}

impl ModelParams {
    pub fn new(law_p: TwoAtomLaw, law_q: TwoAtomLaw) -> Self {
        ModelParams { law_p, law_q }
    }

    /// Mass of `p` at its lower atom.
    pub fn a(&self) -> f64 {
        self.law_p.weight_low
    }

    /// Mass of `q` at its lower atom.
    pub fn b(&self) -> f64 {
        self.law_q.weight_low
    }

    pub fn is_degenerate(&self) -> bool {
        self.law_p.is_degenerate() || self.law_q.is_degenerate()
    }

    pub(crate) fn require_non_degenerate(&self) -> Result<()> {
        if self.law_p.is_degenerate() {
            return Err(Error::NormalCase("law of p is a point mass".into()));
        }
        if self.law_q.is_degenerate() {
            return Err(Error::NormalCase("law of q is a point mass".into()));
        }
        Ok(())
    }

    /// The rectangle corners in the order `α+iβ, α+iβ′, α′+iβ, α′+iβ′`.
    pub fn corners(&self) -> [Complex64; 4] {
        let (al, ah) = (self.law_p.pos_low, self.law_p.pos_high);
        let (bl, bh) = (self.law_q.pos_low, self.law_q.pos_high);
        [
            Complex64::new(al, bl),
            Complex64::new(al, bh),
            Complex64::new(ah, bl),
            Complex64::new(ah, bh),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `|gap_a| >= |gap_b|`: the curve splits into a left and a right arc.
    WideOrSquare,
    /// `|gap_a| < |gap_b|`: the curve splits into a bottom and a top arc.
    Tall,
}

/// Center and side lengths of the rectangle `R`, which also fix the hyperbola
/// `(x - α)(x - α′) = (y - β)(y - β′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportGeometry {
    #[serde(with = "cplx")]
    pub center: Complex64,
    pub gap_a: f64,
    pub gap_b: f64,
    pub orientation: Orientation,
}

impl SupportGeometry {
    pub fn from_parts(center: Complex64, gap_a: f64, gap_b: f64) -> Result<Self> {
        if gap_a == 0.0 || !gap_a.is_finite() {
            return Err(Error::invalid("gap_a", "must be finite and nonzero"));
        }
        if gap_b == 0.0 || !gap_b.is_finite() {
            return Err(Error::invalid("gap_b", "must be finite and nonzero"));
        }
        let orientation = if gap_a.abs() >= gap_b.abs() {
            Orientation::WideOrSquare
        } else {
            Orientation::Tall
        };
        Ok(SupportGeometry {
            center,
            gap_a,
            gap_b,
            orientation,
        })
    }

    /// Centered form `x′² - 𝒜²/4 - (y′² - ℬ²/4)`; zero exactly on the hyperbola.
    pub fn hyperbola_residual(&self, z: Complex64) -> f64 {
        let w = z - self.center;
        (w.re * w.re - 0.25 * self.gap_a * self.gap_a) - (w.im * w.im - 0.25 * self.gap_b * self.gap_b)
    }

    /// Corner form `(x - α)(x - α′) - (y - β)(y - β′)`.
    pub fn corner_form_residual(&self, z: Complex64) -> f64 {
        let [lo, hi] = self.x_range();
        let [blo, bhi] = self.y_range();
        (z.re - lo) * (z.re - hi) - (z.im - blo) * (z.im - bhi)
    }

    pub fn x_range(&self) -> [f64; 2] {
        let h = 0.5 * self.gap_a.abs();
        [self.center.re - h, self.center.re + h]
    }

    pub fn y_range(&self) -> [f64; 2] {
        let h = 0.5 * self.gap_b.abs();
        [self.center.im - h, self.center.im + h]
    }

    pub fn in_rectangle(&self, z: Complex64, tol: f64) -> bool {
        let w = z - self.center;
        w.re.abs() <= 0.5 * self.gap_a.abs() + tol && w.im.abs() <= 0.5 * self.gap_b.abs() + tol
    }

    /// Corners in the order `α+iβ, α+iβ′, α′+iβ, α′+iβ′` for positive gaps.
    pub fn corners(&self) -> [Complex64; 4] {
        let [xl, xh] = self.x_range();
        let [yl, yh] = self.y_range();
        [
            Complex64::new(xl, yl),
            Complex64::new(xl, yh),
            Complex64::new(xh, yl),
            Complex64::new(xh, yh),
        ]
    }

    /// Smallest distance between two distinct corners.
    pub fn min_corner_separation(&self) -> f64 {
        self.gap_a.abs().min(self.gap_b.abs())
    }
}

/// Hyperbola/rectangle geometry attached to `p + iq`.
pub fn geometry(params: &ModelParams) -> Result<SupportGeometry> {
    params.require_non_degenerate()?;
    let p = &params.law_p;
    let q = &params.law_q;
    let center = Complex64::new(0.5 * (p.pos_low + p.pos_high), 0.5 * (q.pos_low + q.pos_high));
    SupportGeometry::from_parts(center, p.gap(), q.gap())
}

/// Masses of the four corner atoms and of the continuous part.
///
/// `wij` sits at the corner whose real part is the `i`-th atom of `p` and
/// whose imaginary part is the `j`-th atom of `q` (0 = low, 1 = high).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomWeights {
    pub w00: f64,
    pub w01: f64,
    pub w10: f64,
    pub w11: f64,
    pub w_cont: f64,
}

impl AtomWeights {
    pub fn corner_masses(&self) -> [f64; 4] {
        [self.w00, self.w01, self.w10, self.w11]
    }

    pub fn total(&self) -> f64 {
        self.w00 + self.w01 + self.w10 + self.w11 + self.w_cont
    }

    pub fn atom_count(&self) -> usize {
        self.corner_masses().iter().filter(|&&w| w > 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "cplx")]
    pub position: Complex64,
    pub mass: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn law(lo: f64, hi: f64, w: f64) -> TwoAtomLaw {
        TwoAtomLaw::new(lo, hi, w).unwrap()
    }

    #[test]
    fn make_two_atom_examples() {
        let l = law(0.0, 1.0, 0.5);
        assert_eq!((l.pos_low, l.pos_high, l.weight_low), (0.0, 1.0, 0.5));

        let l = law(1.0, 0.0, 0.8);
        assert_eq!((l.pos_low, l.pos_high), (0.0, 1.0));
        assert_relative_eq!(l.weight_low, 0.2, epsilon = 1e-15);

        let l = law(0.0, 0.9, 0.8);
        assert_eq!((l.pos_low, l.pos_high, l.weight_low), (0.0, 0.9, 0.8));
    }

    #[test]
    fn make_two_atom_rejects_bad_input() {
        assert!(TwoAtomLaw::new(f64::NAN, 1.0, 0.5).is_err());
        assert!(TwoAtomLaw::new(0.0, f64::INFINITY, 0.5).is_err());
        assert!(TwoAtomLaw::new(0.0, 1.0, 1.5).is_err());
        assert!(TwoAtomLaw::new(0.0, 1.0, -0.1).is_err());
        assert!(TwoAtomLaw::new(2.0, 2.0, 0.3).is_err());
        // point masses are representable
        assert!(TwoAtomLaw::new(2.0, 2.0, 1.0).unwrap().is_degenerate());
        assert!(TwoAtomLaw::new(0.0, 1.0, 0.0).unwrap().is_degenerate());
    }

    #[test]
    fn geometry_examples() {
        let fig1 = ModelParams::new(law(0.0, 1.0, 0.5), law(0.0, 0.8, 0.5));
        let g = geometry(&fig1).unwrap();
        assert_relative_eq!(g.center.re, 0.5);
        assert_relative_eq!(g.center.im, 0.4);
        assert_eq!(g.gap_a, 1.0);
        assert_eq!(g.gap_b, 0.8);
        assert_eq!(g.orientation, Orientation::WideOrSquare);

        let square = ModelParams::new(law(0.0, 1.0, 0.5), law(0.0, 1.0, 0.5));
        let g = geometry(&square).unwrap();
        assert_eq!(g.center, Complex64::new(0.5, 0.5));
        assert_eq!(g.orientation, Orientation::WideOrSquare);

        let fig2 = ModelParams::new(law(0.0, 0.9, 0.8), law(0.0, 1.0, 0.2));
        let g = geometry(&fig2).unwrap();
        assert_eq!(g.gap_a, 0.9);
        assert_eq!(g.gap_b, 1.0);
        assert_eq!(g.orientation, Orientation::Tall);
    }

    #[test]
    fn geometry_rejects_point_mass() {
        let p = ModelParams::new(law(0.0, 1.0, 1.0), law(0.0, 1.0, 0.5));
        assert!(matches!(geometry(&p), Err(Error::NormalCase(_))));
    }

    #[test]
    fn corners_lie_on_both_hyperbola_forms() {
        let p = ModelParams::new(law(-0.3, 1.7, 0.4), law(0.2, 0.5, 0.9));
        let g = geometry(&p).unwrap();
        for c in p.corners() {
            assert!(g.hyperbola_residual(c).abs() < 1e-14);
            assert!(g.corner_form_residual(c).abs() < 1e-14);
        }
    }

    #[test]
    fn json_uses_re_im_objects() {
        let g = SupportGeometry::from_parts(Complex64::new(0.5, 0.4), 1.0, 0.8).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"center\":{\"re\":0.5,\"im\":0.4}"), "{s}");
        assert!(s.contains("\"orientation\":\"WideOrSquare\""));
        let back: SupportGeometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(lo in -5.0..5.0f64, hi in -5.0..5.0f64, w in 0.0..=1.0f64) {
            prop_assume!(lo != hi);
            let once = TwoAtomLaw::new(lo, hi, w).unwrap();
            let twice = TwoAtomLaw::new(once.pos_low, once.pos_high, once.weight_low).unwrap();
            prop_assert_eq!(once, twice);
            prop_assert!(once.pos_low < once.pos_high);
        }

        #[test]
        fn hyperbola_forms_agree(
            al in -3.0..3.0f64, da in 0.1..3.0f64,
            bl in -3.0..3.0f64, db in 0.1..3.0f64,
            x in -5.0..5.0f64, y in -5.0..5.0f64,
        ) {
            let p = ModelParams::new(law(al, al + da, 0.5), law(bl, bl + db, 0.5));
            let g = geometry(&p).unwrap();
            let z = Complex64::new(x, y);
            prop_assert!((g.hyperbola_residual(z) - g.corner_form_residual(z)).abs() < 1e-11);
        }
    }
}
