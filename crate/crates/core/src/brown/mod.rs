//! The Brown measure of `p + iq`: four corner atoms plus `ε μ′`, where
//! `μ′ = ((λ₁)_*ν + (λ₂)_*ν)/2` lives on the hyperbola inside the rectangle
//! spanned by the atom positions.

mod lambda;
mod model2x2;
mod nu;
mod recover;
mod support;
mod weights;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{geometry, Atom, AtomWeights, ModelParams, Orientation, SupportGeometry};
use crate::quadrature::{integrate_with_breaks, Tolerance};

pub use lambda::{lambda, BranchIndex, LambdaBranch};
pub use model2x2::{hz_singular_values, two_by_two_model, Mat2};
pub use nu::{nu_density, nu_support, NuDensity, NU_TABLE_CELLS};
pub use recover::{recover_laws, RecoveryInput};
pub use support::{closest_point, CurvePoint};
pub use weights::weights;

pub(crate) use lambda::lambda_pair;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownDescriptor {
    pub params: ModelParams,
    pub geometry: SupportGeometry,
    pub weights: AtomWeights,
    /// All four corners in the order `α+iβ, α+iβ′, α′+iβ, α′+iβ′`; masses may be 0.
    pub atoms: Vec<Atom>,
    pub nu: NuDensity,
}

pub fn brown_measure(params: &ModelParams) -> Result<BrownDescriptor> {
    params.require_non_degenerate()?;
    let geometry = geometry(params)?;
    let (a, b) = (params.a(), params.b());
    let weights = weights(a, b)?;
    let atoms = params
        .corners()
        .into_iter()
        .zip(weights.corner_masses())
        .map(|(position, mass)| Atom { position, mass })
        .collect();
    Ok(BrownDescriptor {
        params: *params,
        geometry,
        weights,
        atoms,
        nu: NuDensity::new(a, b)?,
    })
}

impl BrownDescriptor {
    pub fn branch(&self, index: BranchIndex) -> LambdaBranch {
        LambdaBranch::new(index, self.geometry)
    }

    /// Atoms with positive mass.
    pub fn nonzero_atoms(&self) -> Vec<Atom> {
        self.atoms.iter().copied().filter(|a| a.mass > 0.0).collect()
    }

    pub fn corners(&self) -> [Complex64; 4] {
        self.params.corners()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.total()
    }
}

/// Where a draw from [`sample_brown_labeled`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleOrigin {
    /// Index into [`BrownDescriptor::atoms`].
    Atom(usize),
    Curve { branch: BranchIndex, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownSample {
    pub z: Complex64,
    pub origin: SampleOrigin,
}

/// `n` i.i.d. draws from `μ`, deterministic in `seed`.
pub fn sample_brown(desc: &BrownDescriptor, n: usize, seed: u64) -> Vec<Complex64> {
    sample_brown_labeled(desc, n, seed).into_iter().map(|s| s.z).collect()
}

pub fn sample_brown_labeled(desc: &BrownDescriptor, n: usize, seed: u64) -> Vec<BrownSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses = desc.weights.corner_masses();
    (0..n)
        .map(|_| {
            let mut u: f64 = rng.random();
            for (i, &m) in masses.iter().enumerate() {
                if u < m {
                    return BrownSample {
                        z: desc.atoms[i].position,
                        origin: SampleOrigin::Atom(i),
                    };
                }
                u -= m;
            }
            draw_curve(desc, &mut rng)
        })
        .collect()
}

/// `n` i.i.d. draws from the continuous part `μ′` alone.
pub fn sample_mu_prime(desc: &BrownDescriptor, n: usize, seed: u64) -> Vec<BrownSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| draw_curve(desc, &mut rng)).collect()
}

fn draw_curve(desc: &BrownDescriptor, rng: &mut ChaCha8Rng) -> BrownSample {
    let theta = desc.nu.quantile(rng.random()).expect("u in [0, 1)");
    let branch = if rng.random::<bool>() { BranchIndex::Two } else { BranchIndex::One };
    let (l1, l2) = lambda_pair(&desc.geometry, theta);
    BrownSample {
        z: if branch == BranchIndex::One { l1 } else { l2 },
        origin: SampleOrigin::Curve { branch, theta },
    }
}

/// Tolerance of the `ν` integral in [`log_fk_determinant`].
pub const LOG_DET_TOL: Tolerance = Tolerance::new(1e-12, 1e-12);

/// `log Δ(z - X)`; `-∞` at an atom of positive mass.
pub fn log_fk_determinant(desc: &BrownDescriptor, z: Complex64) -> f64 {
    let mut acc = 0.0;
    for atom in &desc.atoms {
        if atom.mass > 0.0 {
            let d = (z - atom.position).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += atom.mass * d.ln();
        }
    }
    let [lo, hi] = desc.nu.support;
    let g = &desc.geometry;
    // The integrand is log-singular where z meets the curve; break there.
    let cp = closest_point(g, z);
    let mut breaks = vec![0.0, 1.0];
    if cp.theta > lo && cp.theta < hi {
        breaks.push((2.0 / std::f64::consts::PI) * ((cp.theta - lo) / (hi - lo)).sqrt().asin());
        breaks.sort_by(f64::total_cmp);
    }
    let span = hi - lo;
    let integrand = |s: f64| {
        let half = 0.5 * std::f64::consts::PI * s;
        let theta = lo + span * half.sin().powi(2);
        let jac = span * std::f64::consts::PI * half.sin() * half.cos();
        let rho = desc.nu.density(theta) * jac;
        if rho == 0.0 {
            return 0.0;
        }
        let (l1, l2) = lambda_pair(g, theta);
        let log = |d: f64| if d > 0.0 { d.ln() } else { 0.0 };
        0.5 * (log((z - l1).norm()) + log((z - l2).norm())) * rho
    };
    let r = integrate_with_breaks(integrand, &breaks, LOG_DET_TOL);
    acc + desc.weights.w_cont * r.value
}

/// Nearest point of `H ∩ R` to `z`; corners are matched exactly.
pub fn support_distance(desc: &BrownDescriptor, z: Complex64) -> CurvePoint {
    let mut cp = closest_point(&desc.geometry, z);
    let corner_theta = |i: usize| -> (BranchIndex, f64) {
        match (desc.geometry.orientation, i) {
            (_, 0) => (BranchIndex::One, 0.0),
            (_, 3) => (BranchIndex::Two, 0.0),
            (Orientation::WideOrSquare, 1) | (Orientation::Tall, 2) => (BranchIndex::One, FRAC_PI_2),
            _ => (BranchIndex::Two, FRAC_PI_2),
        }
    };
    for (i, c) in desc.corners().into_iter().enumerate() {
        let d = (z - c).norm();
        if d < cp.distance {
            let (branch, theta) = corner_theta(i);
            cp = CurvePoint {
                branch,
                theta,
                distance: d,
            };
        }
    }
    cp
}

pub fn in_support(desc: &BrownDescriptor, z: Complex64, tol: f64) -> bool {
    support_distance(desc, z).distance <= tol
}

/// Total mass (atoms included) of the left/bottom and right/top components.
pub fn component_masses(desc: &BrownDescriptor) -> (f64, f64) {
    let w = &desc.weights;
    let half = 0.5 * w.w_cont;
    match desc.geometry.orientation {
        Orientation::WideOrSquare => (w.w00 + w.w01 + half, w.w10 + w.w11 + half),
        Orientation::Tall => (w.w00 + w.w10 + half, w.w01 + w.w11 + half),
    }
}
