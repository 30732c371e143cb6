use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Orientation, SupportGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchIndex {
    /// Left component (wide/square) or bottom component (tall).
    One,
    /// Right component (wide/square) or top component (tall).
    Two,
}

impl BranchIndex {
    pub const BOTH: [BranchIndex; 2] = [BranchIndex::One, BranchIndex::Two];

    pub fn slot(self) -> usize {
        match self {
            BranchIndex::One => 0,
            BranchIndex::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBranch {
    pub index: BranchIndex,
    pub geometry: SupportGeometry,
}

impl LambdaBranch {
    pub fn new(index: BranchIndex, geometry: SupportGeometry) -> Self {
        LambdaBranch { index, geometry }
    }

    pub fn eval(&self, theta: f64) -> Result<Complex64> {
        lambda(self, theta)
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta = {theta} is not in [0, pi/2]")));
    }
    Ok(())
}

/// Half the branch separation, `(λ₂ - λ₁)/2`.
pub(crate) fn half_offset(g: &SupportGeometry, theta: f64) -> Complex64 {
    let (ga, gb) = (g.gap_a, g.gap_b);
    let cos2 = (2.0 * theta).cos();
    match g.orientation {
        Orientation::WideOrSquare => {
            Complex64::new(ga * ga - gb * gb, 2.0 * ga * gb * cos2).sqrt() * 0.5
        }
        Orientation::Tall => {
            Complex64::new(gb * gb - ga * ga, -2.0 * ga * gb * cos2).sqrt() * Complex64::new(0.0, 0.5)
        }
    }
}

/// `(λ₁(θ), λ₂(θ))` without range checking.
pub(crate) fn lambda_pair(g: &SupportGeometry, theta: f64) -> (Complex64, Complex64) {
    let d = half_offset(g, theta);
    (g.center - d, g.center + d)
}

/// Point `λ_i(θ)` of `H ∩ R` for `θ ∈ [0, π/2]`.
pub fn lambda(branch: &LambdaBranch, theta: f64) -> Result<Complex64> {
    check_theta(theta)?;
    let (l1, l2) = lambda_pair(&branch.geometry, theta);
    Ok(match branch.index {
        BranchIndex::One => l1,
        BranchIndex::Two => l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{geometry, ModelParams, TwoAtomLaw};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn params(al: f64, ah: f64, a: f64, bl: f64, bh: f64, b: f64) -> ModelParams {
        ModelParams::new(TwoAtomLaw::new(al, ah, a).unwrap(), TwoAtomLaw::new(bl, bh, b).unwrap())
    }

    fn fig1() -> SupportGeometry {
        geometry(&params(0.0, 1.0, 0.5, 0.0, 0.8, 0.5)).unwrap()
    }

    #[test]
    fn fig1_midpoint() {
        let z = lambda(&LambdaBranch::new(BranchIndex::Two, fig1()), FRAC_PI_4).unwrap();
        assert_relative_eq!(z.re, 0.8, epsilon = 1e-15);
        assert_relative_eq!(z.im, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn endpoints_are_corners() {
        for p in [
            params(0.0, 1.0, 0.5, 0.0, 0.8, 0.5),
            params(0.0, 0.9, 0.8, 0.0, 1.0, 0.2),
            params(0.0, 1.0, 0.5, 0.0, 1.0, 0.5),
            params(-1.0, 2.0, 0.3, 0.5, 0.7, 0.6),
        ] {
            let g = geometry(&p).unwrap();
            let [c00, c01, c10, c11] = p.corners();
            let (l1_0, l2_0) = lambda_pair(&g, 0.0);
            let (l1_1, l2_1) = lambda_pair(&g, FRAC_PI_2);
            assert!((l2_0 - c11).norm() < 1e-14);
            assert!((l1_0 - c00).norm() < 1e-14);
            match g.orientation {
                Orientation::WideOrSquare => {
                    assert!((l1_1 - c01).norm() < 1e-14);
                    assert!((l2_1 - c10).norm() < 1e-14);
                }
                Orientation::Tall => {
                    assert!((l1_1 - c10).norm() < 1e-14);
                    assert!((l2_1 - c01).norm() < 1e-14);
                }
            }
            for z in [l1_1, l2_1] {
                assert!(g.corner_form_residual(z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_theta_outside_quarter_turn() {
        let b = LambdaBranch::new(BranchIndex::One, fig1());
        assert!(lambda(&b, -1e-9).is_err());
        assert!(lambda(&b, 1.6).is_err());
    }

    #[test]
    fn branches_stay_on_their_side() {
        let g = fig1();
        for k in 0..=200 {
            let (l1, l2) = lambda_pair(&g, FRAC_PI_2 * k as f64 / 200.0);
            assert!(l1.re <= g.center.re + 1e-15 && l2.re >= g.center.re - 1e-15);
        }
        let tall = geometry(&params(0.0, 0.9, 0.8, 0.0, 1.0, 0.2)).unwrap();
        for k in 0..=200 {
            let (l1, l2) = lambda_pair(&tall, FRAC_PI_2 * k as f64 / 200.0);
            assert!(l1.im <= tall.center.im + 1e-15 && l2.im >= tall.center.im - 1e-15);
        }
    }

    proptest! {
        #[test]
        fn lambda_lies_on_hyperbola_inside_rectangle(
            al in -2.0..2.0f64, da in 0.05..3.0f64,
            bl in -2.0..2.0f64, db in 0.05..3.0f64,
            theta in 0.0..=FRAC_PI_2,
        ) {
            let g = geometry(&params(al, al + da, 0.5, bl, bl + db, 0.5)).unwrap();
            let (l1, l2) = lambda_pair(&g, theta);
            for z in [l1, l2] {
                prop_assert!(g.hyperbola_residual(z).abs() < 1e-12 * (1.0 + da * da + db * db));
                prop_assert!(g.corner_form_residual(z).abs() < 1e-12 * (1.0 + da * da + db * db + al * al + bl * bl));
                prop_assert!(g.in_rectangle(z, 1e-12));
            }
        }
    }
}
