//! Error types shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors emitted by tensor IO, quantizers, and the simulation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input violated a documented precondition (shape mismatch, non-finite
    /// payload, inconsistent config, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// A byte stream does not match its declared format (bad magic, truncated
    /// payload, malformed header).
    #[error("format: {0}")]
    Format(String),

    /// The format was recognised but the variant is not handled (Fortran
    /// order, exotic dtype, future container version).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// I/O failure, annotated with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
