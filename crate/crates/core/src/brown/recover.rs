use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx;
use crate::error::{Error, Result};
use crate::model::{Atom, ModelParams, TwoAtomLaw};

/// Observed Brown measure: its atoms and a sample of the continuous part.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecoveryInput {
    pub atoms: Vec<Atom>,
    #[serde(with = "cplx::vec")]
    pub cloud: Vec<Complex64>,
    /// Bound on the displacement of cloud points from the curve.
    #[serde(default)]
    pub noise: f64,
}

impl RecoveryInput {
    /// Splits raw draws from `μ` into atoms (values drawn more than once,
    /// weighted by frequency) and the continuous cloud.
    pub fn from_samples(samples: &[Complex64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let n = samples.len() as f64;
        let mut atoms = Vec::new();
        let mut cloud = Vec::new();
        for run in sorted.chunk_by(|x, y| x == y) {
            if run.len() > 1 {
                atoms.push(Atom {
                    position: run[0],
                    mass: run.len() as f64 / n,
                });
            } else {
                cloud.push(run[0]);
            }
        }
        RecoveryInput {
            atoms,
            cloud,
            noise: 0.0,
        }
    }
}

/// Recovers the laws of `p` and `q` from their Brown measure.
///
/// The conic `x² - y² = Sx x - Sy y + C` is fitted by least squares through
/// all points; `(Sx/2, Sy/2)` is the rectangle centre. Half side lengths come
/// from a corner atom if there is one, otherwise from the extent of the
/// cloud. With `ε = 1 - Σ atoms`, `a` is the atom mass on the line `x = α`
/// plus `ε/2`, and likewise `b` on `y = β`.
pub fn recover_laws(input: &RecoveryInput) -> Result<ModelParams> {
    for atom in &input.atoms {
        if !(atom.mass > 0.0 && atom.mass <= 1.0 + 1e-12) || !atom.position.is_finite() {
            return Err(Error::Inconsistent(format!("bad atom {atom:?}")));
        }
    }
    if input.cloud.is_empty() {
        return recover_atomic(&input.atoms);
    }
    let points: Vec<Complex64> = input
        .cloud
        .iter()
        .copied()
        .chain(input.atoms.iter().map(|a| a.position))
        .collect();
    if points.len() < 3 {
        return Err(Error::Inconsistent("fewer than three points to fit the hyperbola".into()));
    }
    let (sx, sy, scale, max_resid) = fit_conic(&points)?;
    let tol = 1e-9 * (1.0 + scale * scale) + 8.0 * input.noise * scale;
    if max_resid > tol {
        return Err(Error::Inconsistent(format!(
            "points do not lie on a rectangular hyperbola (residual {max_resid:.3e} > {tol:.3e})"
        )));
    }
    let (cx, cy) = (0.5 * sx, 0.5 * sy);
    let (ha, hb) = match input.atoms.first() {
        Some(a) => ((a.position.re - cx).abs(), (a.position.im - cy).abs()),
        None => points.iter().fold((0.0f64, 0.0f64), |(h1, h2), z| {
            (h1.max((z.re - cx).abs()), h2.max((z.im - cy).abs()))
        }),
    };
    let corner_tol = 1e-7 * (1.0 + scale) + 4.0 * input.noise;
    for atom in &input.atoms {
        let (dx, dy) = ((atom.position.re - cx).abs(), (atom.position.im - cy).abs());
        if (dx - ha).abs() > corner_tol || (dy - hb).abs() > corner_tol {
            return Err(Error::Inconsistent(format!(
                "atom at {} is not a corner of the fitted rectangle",
                atom.position
            )));
        }
    }
    let atom_mass: f64 = input.atoms.iter().map(|a| a.mass).sum();
    let eps = 1.0 - atom_mass;
    if eps <= 0.0 {
        return Err(Error::Inconsistent("atoms carry all the mass but a continuous part was given".into()));
    }
    let low_x: f64 = input.atoms.iter().filter(|a| a.position.re < cx).map(|a| a.mass).sum();
    let low_y: f64 = input.atoms.iter().filter(|a| a.position.im < cy).map(|a| a.mass).sum();
    let law_p = TwoAtomLaw::new(cx - ha, cx + ha, (low_x + 0.5 * eps).clamp(0.0, 1.0))?;
    let law_q = TwoAtomLaw::new(cy - hb, cy + hb, (low_y + 0.5 * eps).clamp(0.0, 1.0))?;
    Ok(ModelParams::new(law_p, law_q))
}

/// Returns `(Sx, Sy, scale, max |residual|)`.
fn fit_conic(points: &[Complex64]) -> Result<(f64, f64, f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|z| z.re).sum::<f64>() / n;
    let my = points.iter().map(|z| z.im).sum::<f64>() / n;
    let scale = points
        .iter()
        .map(|z| (z.re - mx).abs().max((z.im - my).abs()))
        .fold(0.0, f64::max)
        + mx.abs().max(my.abs());
    // features (u, -v, 1) with u = x - mx, v = y - my; target x² - y²
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for z in points {
        let f = [z.re - mx, -(z.im - my), 1.0];
        let t = z.re * z.re - z.im * z.im;
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += f[r] * f[c];
            }
            atb[r] += f[r] * t;
        }
    }
    let [sx, sy, c0] = solve3(ata, atb)
        .ok_or_else(|| Error::Inconsistent("points do not determine a hyperbola".into()))?;
    let max_resid = points
        .iter()
        .map(|z| {
            let t = z.re * z.re - z.im * z.im;
            (t - (sx * (z.re - mx) - sy * (z.im - my) + c0)).abs()
        })
        .fold(0.0, f64::max);
    Ok((sx, sy, scale, max_resid))
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    let norm = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-13 * norm {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    Some(x)
}

/// Purely atomic `μ`: one leg is constant and `μ` is the law of the other
/// leg shifted by it.
fn recover_atomic(atoms: &[Atom]) -> Result<ModelParams> {
    if atoms.is_empty() {
        return Err(Error::Empty("atoms and cloud"));
    }
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    let same_re = atoms.iter().all(|a| a.position.re == atoms[0].position.re);
    let same_im = atoms.iter().all(|a| a.position.im == atoms[0].position.im);
    let two_atom = |values: Vec<(f64, f64)>| -> Result<TwoAtomLaw> {
        let mut distinct: Vec<(f64, f64)> = Vec::new();
        for (x, m) in values {
            match distinct.iter_mut().find(|(y, _)| *y == x) {
                Some(entry) => entry.1 += m,
                None => distinct.push((x, m)),
            }
        }
        match distinct.as_slice() {
            [(x, _)] => TwoAtomLaw::constant(*x),
            [(x1, m1), (x2, _)] => TwoAtomLaw::new(*x1, *x2, m1 / total),
            _ => Err(Error::Inconsistent(format!("{} distinct atom positions on one leg", distinct.len()))),
        }
    };
    let z0 = atoms[0].position;
    match (same_re, same_im) {
        (_, true) => Ok(ModelParams::new(
            two_atom(atoms.iter().map(|a| (a.position.re, a.mass)).collect())?,
            TwoAtomLaw::constant(z0.im)?,
        )),
        (true, false) => Ok(ModelParams::new(
            TwoAtomLaw::constant(z0.re)?,
            two_atom(atoms.iter().map(|a| (a.position.im, a.mass)).collect())?,
        )),
        (false, false) => Err(Error::Inconsistent(
            "atomic measure without a continuous part must have a constant leg".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brown::{brown_measure, sample_brown};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(al: f64, ah: f64, a: f64, bl: f64, bh: f64, b: f64) -> ModelParams {
        ModelParams::new(TwoAtomLaw::new(al, ah, a).unwrap(), TwoAtomLaw::new(bl, bh, b).unwrap())
    }

    fn assert_close(got: &ModelParams, want: &ModelParams, wtol: f64, ptol: f64) {
        for (g, w) in [(got.law_p, want.law_p), (got.law_q, want.law_q)] {
            assert!((g.weight_low - w.weight_low).abs() < wtol, "{got:?} vs {want:?}");
            assert!((g.pos_low - w.pos_low).abs() < ptol, "{got:?} vs {want:?}");
            assert!((g.pos_high - w.pos_high).abs() < ptol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn round_trip_figure_params() {
        for p in [params(0.0, 1.0, 0.5, 0.0, 0.8, 0.5), params(0.0, 0.9, 0.8, 0.0, 1.0, 0.2)] {
            let d = brown_measure(&p).unwrap();
            let samples = sample_brown(&d, 100_000, 13);
            let got = recover_laws(&RecoveryInput::from_samples(&samples)).unwrap();
            assert_close(&got, &p, 0.01, 1e-3);
        }
    }

    #[test]
    fn exact_atoms_give_exact_positions() {
        let p = params(0.0, 0.9, 0.8, 0.0, 1.0, 0.2);
        let d = brown_measure(&p).unwrap();
        let cloud = crate::brown::sample_mu_prime(&d, 2000, 1).into_iter().map(|s| s.z).collect();
        let input = RecoveryInput {
            atoms: d.nonzero_atoms(),
            cloud,
            noise: 0.0,
        };
        let got = recover_laws(&input).unwrap();
        assert_close(&got, &p, 1e-12, 1e-6);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for seed in 0..5 {
            let al = rng.random_range(-1.0..1.0);
            let bl = rng.random_range(-1.0..1.0);
            let p = params(
                al,
                al + rng.random_range(0.2..2.0),
                rng.random_range(0.05..0.95),
                bl,
                bl + rng.random_range(0.2..2.0),
                rng.random_range(0.05..0.95),
            );
            let d = brown_measure(&p).unwrap();
            let got = recover_laws(&RecoveryInput::from_samples(&sample_brown(&d, 50_000, seed))).unwrap();
            assert_close(&got, &p, 0.01, 1e-3);
        }
    }

    #[test]
    fn atomic_only_input_gives_constant_leg() {
        let atoms = vec![
            Atom { position: Complex64::new(0.0, 2.0), mass: 0.3 },
            Atom { position: Complex64::new(1.5, 2.0), mass: 0.7 },
        ];
        let got = recover_laws(&RecoveryInput { atoms, ..Default::default() }).unwrap();
        assert!(got.law_q.is_degenerate());
        assert_eq!(got.law_q.pos_low, 2.0);
        assert_eq!(got.law_p, TwoAtomLaw::new(0.0, 1.5, 0.3).unwrap());

        let atoms = vec![
            Atom { position: Complex64::new(1.0, 0.0), mass: 0.5 },
            Atom { position: Complex64::new(1.0, 3.0), mass: 0.5 },
        ];
        let got = recover_laws(&RecoveryInput { atoms, ..Default::default() }).unwrap();
        assert!(got.law_p.is_degenerate());
        assert_eq!(got.law_q, TwoAtomLaw::new(0.0, 3.0, 0.5).unwrap());
    }

    #[test]
    fn inconsistent_inputs_are_rejected() {
        let atoms = vec![
            Atom { position: Complex64::new(0.0, 0.0), mass: 0.5 },
            Atom { position: Complex64::new(1.0, 1.0), mass: 0.5 },
        ];
        assert!(matches!(
            recover_laws(&RecoveryInput { atoms, ..Default::default() }),
            Err(Error::Inconsistent(_))
        ));
        // points on a circle are not on a rectangular hyperbola
        let cloud = (0..50).map(|k| Complex64::from_polar(1.0, k as f64 * 0.1)).collect();
        assert!(matches!(
            recover_laws(&RecoveryInput { cloud, ..Default::default() }),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(recover_laws(&RecoveryInput::default()), Err(Error::Empty(_))));
    }
}
