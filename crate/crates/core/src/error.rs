//! Library-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad matrix shape, unknown ids, …).
    #[error("invalid input: {0}")]
    Input(String),
    /// Structural precondition not met (graph not simple, not 3-edge-connected,
    /// fractional vector outside the polytope, …), with a certificate when one
    /// is cheap to produce.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A requested covering/partition does not exist.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Problem size exceeds what the exact paths are willing to enumerate.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub fn too_large(msg: impl Into<String>) -> Self {
        Error::TooLarge(msg.into())
    }
}
