use thiserror::Error;

use crate::basis::Basis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible atom count: requested {requested}, lattice holds {available}")]
    InfeasibleCount { requested: usize, available: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis mismatch: expected {expected} basis, found {found}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The eigenvector matrix is too close to singular for the modal expansion
    /// to be trusted. Never silently replaced by another solver.
    #[error(
        "degenerate spectrum: eigenvector condition number {condition:.3e} exceeds {limit:.0e}; use the rk4 solver"
    )]
    DegenerateSpectrum { condition: f64, limit: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("matrix exponential out of range: {0}")]
    Range(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("precondition violated: {0}")]
    InvalidPrecondition(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
