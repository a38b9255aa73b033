//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, allocators, and the detector.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural problem: mismatched dimensions, wrong antenna count,
    /// or otherwise inconsistent inputs.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
