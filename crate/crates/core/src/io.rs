//! File formats: point clouds as CSV with header `re,im`, JSON sidecars and
//! reports. Every write goes to a temporary file in the target directory and
//! is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rmt::EsdCloud;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

#[derive(Serialize, Deserialize)]
struct Row {
    re: f64,
    im: f64,
}

pub fn cloud_csv_bytes(points: &[Complex64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for z in points {
        w.serialize(Row { re: z.re, im: z.im })?;
    }
    if points.is_empty() {
        w.write_record(["re", "im"])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_cloud_csv(path: &Path, points: &[Complex64]) -> Result<()> {
    write_atomic(path, &cloud_csv_bytes(points)?)
}

pub fn read_cloud_csv(path: &Path) -> Result<Vec<Complex64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["re", "im"] {
        return Err(Error::Inconsistent(format!(
            "{} has header {:?}, expected re,im",
            path.display(),
            headers
        )));
    }
    r.deserialize::<Row>()
        .map(|row| row.map(|Row { re, im }| Complex64::new(re, im)).map_err(Error::from))
        .collect()
}

pub fn write_rows_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloudKind {
    /// Eigenvalues of the Haar-rotated matrix model.
    Esd,
    /// Exact draws from the analytic Brown measure.
    Exact,
}

/// JSON sidecar written next to every cloud CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudSidecar {
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub params: ModelParams,
    pub count_p_low: usize,
    pub count_q_low: usize,
    pub kind: CloudKind,
    /// File name of the CSV, relative to the sidecar.
    pub csv: String,
}

pub fn cloud_stem(kind: CloudKind, trial: u64) -> String {
    let prefix = match kind {
        CloudKind::Esd => "esd",
        CloudKind::Exact => "exact",
    };
    format!("{prefix}_trial_{trial:04}")
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`; returns the CSV path.
pub fn write_cloud(dir: &Path, cloud: &EsdCloud, kind: CloudKind) -> Result<PathBuf> {
    let stem = cloud_stem(kind, cloud.trial);
    let csv_path = dir.join(format!("{stem}.csv"));
    write_cloud_csv(&csv_path, &cloud.eigenvalues)?;
    let sidecar = CloudSidecar {
        n: cloud.n,
        seed: cloud.seed,
        trial: cloud.trial,
        params: cloud.params,
        count_p_low: cloud.count_p_low,
        count_q_low: cloud.count_q_low,
        kind,
        csv: format!("{stem}.csv"),
    };
    write_json(&dir.join(format!("{stem}.json")), &sidecar)?;
    Ok(csv_path)
}

/// Every cloud in `dir` that has a sidecar, sorted by file name.
pub fn read_clouds(dir: &Path) -> Result<Vec<(EsdCloud, CloudKind)>> {
    let mut sidecars: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    sidecars.sort();
    let mut out = Vec::new();
    for path in sidecars {
        let Ok(meta) = read_json::<CloudSidecar>(&path) else {
            continue;
        };
        let eigenvalues = read_cloud_csv(&dir.join(&meta.csv))?;
        if eigenvalues.len() != meta.n {
            return Err(Error::Inconsistent(format!(
                "{} lists n = {} but {} has {} rows",
                path.display(),
                meta.n,
                meta.csv,
                eigenvalues.len()
            )));
        }
        out.push((
            EsdCloud {
                n: meta.n,
                seed: meta.seed,
                trial: meta.trial,
                params: meta.params,
                count_p_low: meta.count_p_low,
                count_q_low: meta.count_q_low,
                eigenvalues,
            },
            meta.kind,
        ));
    }
    if out.is_empty() {
        return Err(Error::Empty("no cloud sidecars in directory"));
    }
    Ok(out)
}
