use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lambda::{lambda_pair, BranchIndex};
use crate::model::SupportGeometry;

const GRID: usize = 256;
const GOLDEN_ITERS: usize = 90;

/// Nearest point of `H ∩ R` to a query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub branch: BranchIndex,
    pub theta: f64,
    pub distance: f64,
}

fn dist(g: &SupportGeometry, branch: BranchIndex, z: Complex64, theta: f64) -> f64 {
    let (l1, l2) = lambda_pair(g, theta);
    match branch {
        BranchIndex::One => (z - l1).norm(),
        BranchIndex::Two => (z - l2).norm(),
    }
}

fn golden(g: &SupportGeometry, branch: BranchIndex, z: Complex64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = dist(g, branch, z, x1);
    let mut f2 = dist(g, branch, z, x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = dist(g, branch, z, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = dist(g, branch, z, x2);
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes `|z - λ_i(θ)|` over both branches: a 256-step grid, golden-section
/// refinement around the best grid node, and the angle at which a point of
/// the hyperbola itself would sit (`cos 2θ = 2 Im((z - c)²)/(𝒜ℬ)`).
pub fn closest_point(g: &SupportGeometry, z: Complex64) -> CurvePoint {
    let step = FRAC_PI_2 / GRID as f64;
    let w = z - g.center;
    let cos2 = (2.0 * (w * w).im / (g.gap_a * g.gap_b)).clamp(-1.0, 1.0);
    let analytic = 0.5 * cos2.acos();
    let mut best = CurvePoint {
        branch: BranchIndex::One,
        theta: 0.0,
        distance: f64::INFINITY,
    };
    for branch in BranchIndex::BOTH {
        let mut consider = |theta: f64, d: f64| {
            if d < best.distance {
                best = CurvePoint {
                    branch,
                    theta,
                    distance: d,
                };
            }
        };
        let (k_best, _) = (0..=GRID)
            .map(|k| (k, dist(g, branch, z, k as f64 * step)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty grid");
        let lo = k_best.saturating_sub(1) as f64 * step;
        let hi = ((k_best + 1).min(GRID)) as f64 * step;
        let (t, d) = golden(g, branch, z, lo, hi);
        consider(t, d);
        for t in [lo, hi, k_best as f64 * step, analytic] {
            consider(t, dist(g, branch, z, t));
        }
        let (t, d) = golden(g, branch, z, (analytic - step).max(0.0), (analytic + step).min(FRAC_PI_2));
        consider(t, d);
    }
    best
}
