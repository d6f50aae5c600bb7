//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by cardioquant operations.
///
/// Variants are grouped to match the process exit-code contract used by the
/// CLI: format problems map to exit 2, shape/dimension problems to exit 3 and
/// empty inputs to exit 4.
#[derive(Debug, Error)]
pub enum CqError {
    /// Malformed or unreadable file content, unknown kinds, bad headers.
    #[error("format error: {0}")]
    Format(String),

    /// Mismatched dimensions, lengths or shapes between inputs.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An input that must be non-empty (mask, point set, batch) is empty.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Invalid parameter or data value (non-positive spacing, sigma <= 0, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CqError>;

impl CqError {
    /// Process exit code for this error class (CLI contract).
    pub fn exit_code(&self) -> i32 {
        match self {
            CqError::Format(_) | CqError::Io(_) => 2,
            CqError::Shape(_) => 3,
            CqError::EmptyInput(_) => 4,
            CqError::InvalidArgument(_) => 2,
        }
    }
}
