//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (odd swarm size, empty range, bad architecture, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An operation required an evaluated fitness value that was missing.
    #[error("particle fitness has not been evaluated")]
    UnevaluatedFitness,

    /// The fitness function returned a non-finite or negative value.
    #[error("fitness evaluation failed for particle {index}: got {value}")]
    Evaluation { index: usize, value: f64 },

    /// Training produced a non-finite loss.
    #[error("training diverged (non-finite loss) at batch {batch}")]
    Divergence { batch: usize },

    /// A file did not match the expected format (magic bytes, version, header).
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    /// A file ended before its declared payload.
    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: String, reason: String },

    /// File contents failed a semantic validation (e.g. label out of range).
    #[error("validation error in {path}: {reason}")]
    Validation { path: String, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dim(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            actual,
        }
    }
}
