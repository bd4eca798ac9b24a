//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain (e.g. `Im mu <= 0`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or iteration did not reach the requested accuracy.
    #[error("precision error: {0}")]
    Precision(String),
    /// Evaluation at a pole.
    #[error("pole: {0}")]
    Pole(String),
    /// Coincident or nearly coincident branch data.
    #[error("degenerate input: {0}")]
    Degeneracy(String),
    /// Matrix too badly conditioned for the requested check.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// Malformed user input (CLI literals, unknown names).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
