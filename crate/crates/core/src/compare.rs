//! Reconciles eigenvalue clouds with the analytic Brown measure.
//!
//! The cloud is split into corner atoms (points within `atom_radius` of a
//! corner) and curve points. Each curve point is pulled back to `(branch, θ)`
//! by nearest-point search, so the 2D comparison reduces to one KS test of
//! the `θ` values against `ν` per component.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::brown::{component_masses, support_distance, BranchIndex, BrownDescriptor, NuDensity};
use crate::cplx;
use crate::error::{Error, Result};
use crate::model::Orientation;
use crate::rmt::{esd_trials, EnsembleConfig, EsdCloud};

pub const DEFAULT_ATOM_RADIUS: f64 = 1e-6;

/// Floor for the outlier cut, which is otherwise `10 × p99` of the support
/// distances and collapses to rounding level on exact samples.
pub const OUTLIER_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomRow {
    #[serde(with = "cplx")]
    pub corner: Complex64,
    pub analytic_mass: f64,
    pub empirical_mass: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassPair {
    pub analytic: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Pass/fail limits. None of these come from a convergence theorem; they are
/// engineering choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub atom_mass: f64,
    pub support_p99: f64,
    pub ks: f64,
    pub component_mass: f64,
    pub outlier_fraction: f64,
}

impl Thresholds {
    /// Limits for matrix-model clouds at `n = 1000`, a handful of trials.
    pub const RMT: Thresholds = Thresholds {
        atom_mass: 0.01,
        support_p99: 0.03,
        ks: 0.05,
        component_mass: 0.03,
        outlier_fraction: 0.01,
    };

    /// Limits for exact draws from the analytic measure (the control arm),
    /// sized for about 10⁵ points.
    pub const CONTROL: Thresholds = Thresholds {
        atom_mass: 0.008,
        support_p99: 1e-9,
        ks: 0.02,
        component_mass: 0.01,
        outlier_fraction: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub atom_radius: f64,
    pub thresholds: Thresholds,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            atom_radius: DEFAULT_ATOM_RADIUS,
            thresholds: Thresholds::RMT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub atom_table: Vec<AtomRow>,
    pub support_p99: f64,
    pub support_max: f64,
    pub ks_by_component: [f64; 2],
    pub mass_by_component: [MassPair; 2],
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub points_by_component: [usize; 2],
    pub outliers: usize,
    pub thresholds: Thresholds,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check_radius(desc: &BrownDescriptor, radius: f64) -> Result<()> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::invalid("atom_radius", format!("{radius} must be finite and non-negative")));
    }
    let sep = desc.geometry.min_corner_separation();
    if 2.0 * radius >= sep {
        return Err(Error::invalid(
            "atom_radius",
            format!("{radius} makes corner balls overlap (corner separation {sep})"),
        ));
    }
    Ok(())
}

fn near_corner(desc: &BrownDescriptor, z: Complex64, radius: f64) -> Option<usize> {
    desc.corners().iter().position(|c| (z - c).norm() <= radius)
}

/// Fraction of points within `radius` of each corner.
pub fn detect_atoms_in(points: &[Complex64], desc: &BrownDescriptor, radius: f64) -> Result<Vec<AtomRow>> {
    check_radius(desc, radius)?;
    let mut counts = [0usize; 4];
    for z in points {
        if let Some(i) = near_corner(desc, *z, radius) {
            counts[i] += 1;
        }
    }
    let total = points.len();
    Ok(desc
        .atoms
        .iter()
        .zip(counts)
        .map(|(atom, c)| AtomRow {
            corner: atom.position,
            analytic_mass: atom.mass,
            empirical_mass: if total == 0 { 0.0 } else { c as f64 / total as f64 },
            radius,
        })
        .collect())
}

pub fn detect_atoms(cloud: &EsdCloud, desc: &BrownDescriptor, radius: f64) -> Result<Vec<AtomRow>> {
    detect_atoms_in(&cloud.eigenvalues, desc, radius)
}

/// Role of one point in the pullback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointClass {
    Atom(usize),
    Curve { branch: BranchIndex, theta: f64 },
    Outlier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub re: f64,
    pub im: f64,
    pub component: String,
    pub theta: f64,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pullback {
    pub thetas: [Vec<f64>; 2],
    pub outliers: Vec<Complex64>,
    pub classes: Vec<PointClass>,
    pub distances: Vec<f64>,
    pub support_p99: f64,
    pub support_max: f64,
}

fn percentile_99(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let k = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[k]
}

pub fn pullback_points(points: &[Complex64], desc: &BrownDescriptor, atom_radius: f64) -> Result<Pullback> {
    check_radius(desc, atom_radius)?;
    let nearest: Vec<_> = points.iter().map(|z| support_distance(desc, *z)).collect();
    let distances: Vec<f64> = nearest.iter().map(|c| c.distance).collect();
    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    let support_p99 = percentile_99(&sorted);
    let support_max = sorted.last().copied().unwrap_or(0.0);
    let cut = (10.0 * support_p99).max(OUTLIER_FLOOR);
    let mut thetas = [Vec::new(), Vec::new()];
    let mut outliers = Vec::new();
    let classes = points
        .iter()
        .zip(&nearest)
        .map(|(z, cp)| {
            if let Some(i) = near_corner(desc, *z, atom_radius) {
                PointClass::Atom(i)
            } else if cp.distance > cut {
                outliers.push(*z);
                PointClass::Outlier
            } else {
                thetas[cp.branch.slot()].push(cp.theta);
                PointClass::Curve {
                    branch: cp.branch,
                    theta: cp.theta,
                }
            }
        })
        .collect();
    Ok(Pullback {
        thetas,
        outliers,
        classes,
        distances,
        support_p99,
        support_max,
    })
}

/// `θ` values of non-atom eigenvalues, split by nearest branch.
pub fn theta_pullback(cloud: &EsdCloud, desc: &BrownDescriptor, atom_radius: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let [one, two] = pullback_points(&cloud.eigenvalues, desc, atom_radius)?.thetas;
    Ok((one, two))
}

/// Per-point rows `(re, im, component, theta, dist)` for CSV export.
pub fn point_rows(points: &[Complex64], pullback: &Pullback) -> Vec<PointRow> {
    points
        .iter()
        .zip(&pullback.classes)
        .zip(&pullback.distances)
        .map(|((z, class), d)| {
            let (component, theta) = match class {
                PointClass::Atom(i) => (format!("atom{i}"), f64::NAN),
                PointClass::Curve { branch, theta } => (format!("branch{}", branch.slot() + 1), *theta),
                PointClass::Outlier => ("outlier".to_string(), f64::NAN),
            };
            PointRow {
                re: z.re,
                im: z.im,
                component,
                theta,
                dist: *d,
            }
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the empirical law of `thetas` and `ν`.
pub fn ks_statistic(thetas: &[f64], nu: &NuDensity) -> Result<f64> {
    if thetas.is_empty() {
        return Err(Error::Empty("theta sample"));
    }
    let mut sorted = thetas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, t) in sorted.iter().enumerate() {
        let f = nu.cdf(t.clamp(0.0, FRAC_PI_2))?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS distance of `{π/2 - θ}` against `ν`; the mirror image of the law with
/// `a ↦ 1 - a` is compared this way.
pub fn ks_statistic_mirrored(thetas: &[f64], nu: &NuDensity) -> Result<f64> {
    let mirrored: Vec<f64> = thetas.iter().map(|t| FRAC_PI_2 - t).collect();
    ks_statistic(&mirrored, nu)
}

/// Whether the corner with index `i` (order `α+iβ, α+iβ′, α′+iβ, α′+iβ′`)
/// sits on the first component.
fn corner_on_first(orientation: Orientation, i: usize) -> bool {
    match orientation {
        Orientation::WideOrSquare => i < 2,
        Orientation::Tall => i % 2 == 0,
    }
}

/// Compares pooled clouds with `desc`.
pub fn report_from_clouds(clouds: &[EsdCloud], desc: &BrownDescriptor, opts: &CompareOptions) -> Result<ComparisonReport> {
    for c in clouds {
        if c.params != desc.params {
            return Err(Error::Mismatch(format!(
                "cloud (seed {}, trial {}) was generated with {:?}, descriptor has {:?}",
                c.seed, c.trial, c.params, desc.params
            )));
        }
    }
    let points: Vec<Complex64> = clouds.iter().flat_map(|c| c.eigenvalues.iter().copied()).collect();
    let total = points.len();
    let atom_table = detect_atoms_in(&points, desc, opts.atom_radius)?;
    let pb = pullback_points(&points, desc, opts.atom_radius)?;
    let t = opts.thresholds;

    let ks_by_component = [0, 1].map(|k| ks_statistic(&pb.thetas[k], &desc.nu).unwrap_or(1.0));
    let analytic = component_masses(desc);
    let frac = |x: f64| if total == 0 { 0.0 } else { x / total as f64 };
    let mut empirical = [pb.thetas[0].len() as f64, pb.thetas[1].len() as f64];
    for (i, row) in atom_table.iter().enumerate() {
        let slot = if corner_on_first(desc.geometry.orientation, i) { 0 } else { 1 };
        empirical[slot] += row.empirical_mass * total as f64;
    }
    let mass_by_component = [
        MassPair {
            analytic: analytic.0,
            empirical: frac(empirical[0]),
        },
        MassPair {
            analytic: analytic.1,
            empirical: frac(empirical[1]),
        },
    ];

    let mut checks = Vec::new();
    let mut push = |name: String, value: f64, threshold: f64| {
        checks.push(Check {
            name,
            value,
            threshold,
            passed: value <= threshold,
        });
    };
    for (i, row) in atom_table.iter().enumerate() {
        push(format!("atom_mass_error[{i}]"), (row.empirical_mass - row.analytic_mass).abs(), t.atom_mass);
    }
    push("support_p99".into(), pb.support_p99, t.support_p99);
    for k in 0..2 {
        push(format!("ks[{}]", k + 1), ks_by_component[k], t.ks);
    }
    for k in 0..2 {
        let m = mass_by_component[k];
        push(format!("component_mass_error[{}]", k + 1), (m.empirical - m.analytic).abs(), t.component_mass);
    }
    push("outlier_fraction".into(), frac(pb.outliers.len() as f64), t.outlier_fraction);

    let first = clouds.first();
    Ok(ComparisonReport {
        atom_table,
        support_p99: pb.support_p99,
        support_max: pb.support_max,
        ks_by_component,
        mass_by_component,
        n: first.map_or(0, |c| c.n),
        seed: first.map_or(0, |c| c.seed),
        trials: clouds.len(),
        points_by_component: [pb.thetas[0].len(), pb.thetas[1].len()],
        outliers: pb.outliers.len(),
        thresholds: t,
        checks,
        notes: vec![
            "thresholds are engineering choices; no convergence rate for ESD to Brown measure is assumed".into(),
            format!("atom radius {}; outlier cut max(10 * p99, {OUTLIER_FLOOR})", opts.atom_radius),
        ],
    })
}

/// Simulates `cfg.trials` matrices and compares them with `desc`.
pub fn full_report(cfg: &EnsembleConfig, desc: &BrownDescriptor) -> Result<ComparisonReport> {
    full_report_with(cfg, desc, &CompareOptions::default())
}

pub fn full_report_with(cfg: &EnsembleConfig, desc: &BrownDescriptor, opts: &CompareOptions) -> Result<ComparisonReport> {
    if cfg.params != desc.params {
        return Err(Error::Mismatch(format!(
            "ensemble params {:?} differ from descriptor params {:?}",
            cfg.params, desc.params
        )));
    }
    let clouds = esd_trials(cfg)?;
    report_from_clouds(&clouds, desc, opts)
}
