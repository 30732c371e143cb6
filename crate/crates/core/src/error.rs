use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// One of the laws is a point mass, so X is normal.
    #[error("normal case: Brown measure equals spectral measure ({0})")]
    NormalCase(String),

    #[error("{transform} has a pole at z = {z}")]
    Pole {
        transform: &'static str,
        z: Complex64,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("limit did not converge: {0}")]
    NonConvergent(String),

    #[error("eigensolver failed (n = {n}, seed = {seed}, trial = {trial})")]
    Eigensolver { n: usize, seed: u64, trial: u64 },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
