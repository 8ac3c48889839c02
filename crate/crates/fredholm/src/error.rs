//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by discretization, audit and solver routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A vector or matrix had the wrong extent.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A scalar argument violated a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function or kernel evaluated to NaN/inf.
    #[error("non-finite value encountered {0}")]
    NonFinite(String),

    /// A pivot in a factorization or recursion vanished.
    #[error("singular system: zero pivot at index {index} ({context})")]
    SingularPivot { index: usize, context: &'static str },

    /// Power iteration failed to settle within the iteration budget.
    #[error("eigensolver did not converge after {iterations} iterations (last estimate {last_estimate:e})")]
    NoConvergence {
        iterations: usize,
        last_estimate: f64,
    },

    /// Bisection was started on a bracket without a sign change.
    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// An order fit had fewer than two error samples above the noise floor.
    #[error("order fit saturated: fewer than 2 error samples above the rounding floor")]
    Saturated,
}

pub type Result<T> = std::result::Result<T, Error>;
