//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Endpoints of two path segments differ by more than the glue tolerance.
    #[error("glue error: endpoint gap {gap:.6e} exceeds tolerance {tol:.6e}")]
    Glue { gap: f64, tol: f64 },

    /// A rejection/inversion sampler detected an internal inconsistency.
    #[error("sampler error: {0}")]
    Sampler(String),

    /// Malformed path or histogram data.
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidData(msg.into())
    }
}
