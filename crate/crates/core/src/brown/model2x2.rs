use num_complex::Complex64;

use super::lambda::check_theta;
use crate::error::Result;
use crate::model::ModelParams;

pub type Mat2 = [[Complex64; 2]; 2];

/// `p = α + 𝒜 R_θ diag(1, 0) R_θ⁻¹` and `q = diag(β′, β)`: the two-projection
/// model at angle `θ`, lifted to the given atom positions.
pub fn two_by_two_model(params: &ModelParams, theta: f64) -> Result<(Mat2, Mat2)> {
    params.require_non_degenerate()?;
    check_theta(theta)?;
    let (alpha, gap_a) = (params.law_p.pos_low, params.law_p.gap());
    let (c, s) = (theta.cos(), theta.sin());
    let r = |x: f64| Complex64::new(x, 0.0);
    let p = [
        [r(alpha + gap_a * c * c), r(gap_a * c * s)],
        [r(gap_a * c * s), r(alpha + gap_a * s * s)],
    ];
    let q = [
        [r(params.law_q.pos_high), r(0.0)],
        [r(0.0), r(params.law_q.pos_low)],
    ];
    Ok((p, q))
}

/// Singular values `s1 ≥ s2 ≥ 0` of `z - (p + iq)` in the 2×2 model.
pub fn hz_singular_values(params: &ModelParams, z: Complex64, theta: f64) -> Result<(f64, f64)> {
    let (p, q) = two_by_two_model(params, theta)?;
    let i = Complex64::i();
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let diag = if r == c { z } else { Complex64::new(0.0, 0.0) };
            m[r][c] = diag - p[r][c] - i * q[r][c];
        }
    }
    let frob2: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    // s1 + s2 = √(F² + 2|det|), s1 - s2 = √(F² - 2|det|)
    let sum = (frob2 + 2.0 * det).sqrt();
    let diff = (frob2 - 2.0 * det).max(0.0).sqrt();
    let s1 = 0.5 * (sum + diff);
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    Ok((s1, s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brown::lambda::lambda_pair;
    use crate::model::{geometry, TwoAtomLaw};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
        let al = rng.random_range(-2.0..2.0);
        let bl = rng.random_range(-2.0..2.0);
        ModelParams::new(
            TwoAtomLaw::new(al, al + rng.random_range(0.1..2.0), rng.random_range(0.05..0.95)).unwrap(),
            TwoAtomLaw::new(bl, bl + rng.random_range(0.1..2.0), rng.random_range(0.05..0.95)).unwrap(),
        )
    }

    /// Roots of `λ² - tr λ + det` by the textbook formula.
    fn eig2(m: &Mat2) -> [Complex64; 2] {
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr - det * 4.0).sqrt();
        [(tr - disc) / 2.0, (tr + disc) / 2.0]
    }

    fn sum(p: &Mat2, q: &Mat2) -> Mat2 {
        let i = Complex64::i();
        [[p[0][0] + i * q[0][0], p[0][1] + i * q[0][1]], [p[1][0] + i * q[1][0], p[1][1] + i * q[1][1]]]
    }

    #[test]
    fn projection_case_at_quarter_turn() {
        let params = ModelParams::new(TwoAtomLaw::new(0.0, 1.0, 0.5).unwrap(), TwoAtomLaw::new(0.0, 1.0, 0.5).unwrap());
        let (p, _) = two_by_two_model(&params, FRAC_PI_4).unwrap();
        for v in p.iter().flatten() {
            assert_relative_eq!(v.re, 0.5, epsilon = 1e-15);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn p_has_the_atoms_as_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let params = random_params(&mut rng);
            let (p, _) = two_by_two_model(&params, rng.random_range(0.0..FRAC_PI_2)).unwrap();
            let [e1, e2] = eig2(&p);
            assert!((e1.re - params.law_p.pos_low).abs() < 1e-12);
            assert!((e2.re - params.law_p.pos_high).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_are_lambda_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..10 {
            let params = random_params(&mut rng);
            let g = geometry(&params).unwrap();
            for _ in 0..100 {
                let theta = rng.random_range(0.0..FRAC_PI_2);
                let (p, q) = two_by_two_model(&params, theta).unwrap();
                let [e1, e2] = eig2(&sum(&p, &q));
                let (l1, l2) = lambda_pair(&g, theta);
                let direct = (e1 - l1).norm().max((e2 - l2).norm());
                let swapped = (e1 - l2).norm().max((e2 - l1).norm());
                assert!(direct.min(swapped) < 1e-12, "{direct} {swapped}");
            }
        }
    }

    #[test]
    fn singular_values_against_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..500 {
            let params = random_params(&mut rng);
            let theta = rng.random_range(0.01..1.56);
            let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let (s1, s2) = hz_singular_values(&params, z, theta).unwrap();
            assert!(s1 >= s2 && s2 >= 0.0);
            let (p, q) = two_by_two_model(&params, theta).unwrap();
            let x = sum(&p, &q);
            let m = [[z - x[0][0], -x[0][1]], [-x[1][0], z - x[1][1]]];
            // Gram matrix M*M is Hermitian; its eigenvalues are s².
            let mut gram = [[Complex64::new(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    gram[r][c] = m[0][r].conj() * m[0][c] + m[1][r].conj() * m[1][c];
                }
            }
            let [g2, g1] = eig2(&gram);
            assert!((s1 * s1 - g1.re).abs() < 1e-10 * (1.0 + g1.re));
            assert!((s2 * s2 - g2.re).abs() < 1e-10 * (1.0 + g1.re));
            let g = geometry(&params).unwrap();
            let (l1, l2) = lambda_pair(&g, theta);
            let prod = (z - l1).norm_sqr() * (z - l2).norm_sqr();
            assert!((s1 * s1 * s2 * s2 - prod).abs() < 1e-10 * (1.0 + prod));
        }
    }

    #[test]
    fn singular_on_the_curve() {
        let params = ModelParams::new(TwoAtomLaw::new(0.0, 1.0, 0.5).unwrap(), TwoAtomLaw::new(0.0, 0.8, 0.5).unwrap());
        let g = geometry(&params).unwrap();
        let (l1, _) = lambda_pair(&g, 0.7);
        let (_, s2) = hz_singular_values(&params, l1, 0.7).unwrap();
        assert!(s2 < 1e-12);
    }
}
