//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by game construction, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A block of a point does not match the dimension expected by a game or norm.
    #[error("dimension mismatch in block `{block}`: expected {expected}, got {got}")]
    DimensionMismatch {
        block: String,
        expected: usize,
        got: usize,
    },

    /// A matrix that must be symmetric is not.
    #[error("matrix `{name}` is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { name: String, asymmetry: f64 },

    /// A matrix that must be positive definite has a non-positive eigenvalue.
    #[error("matrix `{name}` is not positive definite: smallest eigenvalue {eigenvalue:.6e}")]
    NotPositiveDefinite { name: String, eigenvalue: f64 },

    /// An invalid scalar parameter (negative variance, non-positive stepsize, ...).
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: String, message: String },

    /// Iterates left the finite range: the run diverged.
    ///
    /// `round` is 1-based, `step` is the local step within the round (0-based).
    #[error("divergence at round {round}, local step {step}: non-finite iterate")]
    Divergence { round: usize, step: usize },

    /// Grid search found no stepsize with a finite run.
    #[error("all {cells} stepsizes in the grid diverged")]
    AllStepsizesDiverged { cells: usize },

    /// Operation needs a capability the given game does not have.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
