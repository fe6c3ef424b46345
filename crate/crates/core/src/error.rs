use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("metric is not symmetric positive-definite at node {node}: {reason}")]
    NotSpd { node: usize, reason: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no root of the fibering map in [{lo:e}, {hi:e}]: {reason}")]
    NoRoot { lo: f64, hi: f64, reason: String },

    #[error("not on Nehari manifold: |psi| = {psi:e} exceeds {tolerance:e}")]
    NotOnNehari { psi: f64, tolerance: f64 },

    #[error("branch empty: {0}")]
    BranchEmpty(String),

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
