//! Haar-rotated two-atom matrix model `X_n = P_n + i Q_n` and its eigenvalues.

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cplx;
use crate::error::{Error, Result};
use crate::model::{ModelParams, TwoAtomLaw};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub params: ModelParams,
    pub seed: u64,
    pub trials: usize,
}

impl EnsembleConfig {
    pub fn new(n: usize, params: ModelParams, seed: u64, trials: usize) -> Result<Self> {
        let cfg = EnsembleConfig {
            n,
            params,
            seed,
            trials,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", format!("{} is below 2", self.n)));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials", "at least one trial is required"));
        }
        Ok(())
    }
}

/// Independent stream for `(seed, trial)`; the result does not depend on
/// which trials run or in what order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Haar unitary from the QR factorization of a complex Ginibre matrix, with
/// columns rephased so that `R` has a positive diagonal.
pub fn haar_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<Complex64> {
    let g = Mat::<Complex64>::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Number of diagonal entries placed at the low atom: `round(n · weight_low)`.
pub fn low_count(n: usize, law: &TwoAtomLaw) -> usize {
    ((n as f64) * law.weight_low).round().clamp(0.0, n as f64) as usize
}

/// `U D U*` with `D = diag(low × count_low, high × rest)`, computed as
/// `low·I + gap · U_h U_h*` over the high-atom columns `U_h`.
fn rotate_diagonal(u: &Mat<Complex64>, law: &TwoAtomLaw, count_low: usize) -> Mat<Complex64> {
    let n = u.nrows();
    let uh = u.subcols(count_low, n - count_low);
    let mut m = &uh * uh.adjoint();
    let gap = law.gap();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] *= gap;
        }
        m[(j, j)] += law.pos_low;
    }
    m
}

/// `(P, Q)` for one trial; the spectra are exact by construction.
pub fn rotated_pair(cfg: &EnsembleConfig, trial: u64) -> Result<(Mat<Complex64>, Mat<Complex64>)> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let u = haar_unitary(cfg.n, &mut rng);
    let v = haar_unitary(cfg.n, &mut rng);
    Ok(pair_from_rotations(&cfg.params, cfg.n, &u, &v))
}

fn pair_from_rotations(
    params: &ModelParams,
    n: usize,
    u: &Mat<Complex64>,
    v: &Mat<Complex64>,
) -> (Mat<Complex64>, Mat<Complex64>) {
    let p = rotate_diagonal(u, &params.law_p, low_count(n, &params.law_p));
    let q = rotate_diagonal(v, &params.law_q, low_count(n, &params.law_q));
    (p, q)
}

/// Eigenvalues of `P + iQ`, sorted by real then imaginary part.
pub fn eigenvalues_of_sum(p: &Mat<Complex64>, q: &Mat<Complex64>) -> Option<Vec<Complex64>> {
    let n = p.nrows();
    let x = Mat::<Complex64>::from_fn(n, n, |i, j| p[(i, j)] + Complex64::i() * q[(i, j)]);
    let mut ev = x.eigenvalues().ok()?;
    if ev.len() != n || ev.iter().any(|z| !z.is_finite()) {
        return None;
    }
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Some(ev)
}

/// Eigenvalues of `U D_p U* + i V D_q V*` for explicit rotations.
pub fn rotated_eigenvalues(
    params: &ModelParams,
    u: &Mat<Complex64>,
    v: &Mat<Complex64>,
) -> Result<Vec<Complex64>> {
    let n = u.nrows();
    if u.ncols() != n || v.nrows() != n || v.ncols() != n {
        return Err(Error::invalid("rotation", "U and V must be square of equal size"));
    }
    let (p, q) = pair_from_rotations(params, n, u, v);
    eigenvalues_of_sum(&p, &q).ok_or(Error::Eigensolver { n, seed: 0, trial: 0 })
}

/// Eigenvalues of one realization of `X_n`, with the model metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsdCloud {
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub params: ModelParams,
    /// Diagonal entries of `D_p` at the low atom; `count_p_low / n` is the
    /// realized weight, off from `a` by at most `1/(2n)`.
    pub count_p_low: usize,
    pub count_q_low: usize,
    #[serde(with = "cplx::vec")]
    pub eigenvalues: Vec<Complex64>,
}

impl EsdCloud {
    /// Cloud of points that did not come from the matrix model, such as
    /// exact draws from the Brown measure; counts are the nominal roundings.
    pub fn from_points(params: ModelParams, seed: u64, trial: u64, eigenvalues: Vec<Complex64>) -> Self {
        let n = eigenvalues.len();
        EsdCloud {
            n,
            seed,
            trial,
            params,
            count_p_low: low_count(n, &params.law_p),
            count_q_low: low_count(n, &params.law_q),
            eigenvalues,
        }
    }

    pub fn realized_weights(&self) -> (f64, f64) {
        let n = self.n as f64;
        (self.count_p_low as f64 / n, self.count_q_low as f64 / n)
    }
}

pub fn esd(cfg: &EnsembleConfig, trial: u64) -> Result<EsdCloud> {
    let (p, q) = rotated_pair(cfg, trial)?;
    let eigenvalues = eigenvalues_of_sum(&p, &q).ok_or(Error::Eigensolver {
        n: cfg.n,
        seed: cfg.seed,
        trial,
    })?;
    Ok(EsdCloud {
        n: cfg.n,
        seed: cfg.seed,
        trial,
        params: cfg.params,
        count_p_low: low_count(cfg.n, &cfg.params.law_p),
        count_q_low: low_count(cfg.n, &cfg.params.law_q),
        eigenvalues,
    })
}

/// All trials `0..cfg.trials`, in trial order.
pub fn esd_trials(cfg: &EnsembleConfig) -> Result<Vec<EsdCloud>> {
    cfg.validate()?;
    (0..cfg.trials as u64).into_par_iter().map(|t| esd(cfg, t)).collect()
}
