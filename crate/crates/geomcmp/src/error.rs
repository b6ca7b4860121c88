//! Error taxonomy shared by every module of the crate.
//!
//! The variants are deliberately coarse: callers dispatch on *category*
//! (bad input, focal obstruction, numerical breakdown), while the payload
//! carries enough detail to print a useful one-line diagnosis.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied data failed (dimension mismatch,
    /// non-symmetric operator, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point was evaluated outside the domain an object was built for.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two sampled objects were combined on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The ODE integration produced non-finite values; `t` is the first
    /// grid time at which they appeared.
    #[error("integration diverged: non-finite values at t = {t}")]
    Divergence { t: f64 },

    /// An operation that requires an invertible Jacobi matrix ran into a
    /// vanishing determinant. `t` locates the obstruction.
    #[error("focal point at t = {t}: {context}")]
    FocalPoint { t: f64, context: String },

    /// The discretised index form was not positive definite, which is the
    /// discrete signature of a focal point inside the interval.
    #[error("quadratic form not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A scalar root solve could not bracket or reach its target.
    #[error("root solve failed: {0}")]
    RootSolve(String),

    /// Two redundant computation routes disagreed beyond tolerance; this
    /// indicates a defect in the caller's data or in this crate, never a
    /// property of the mathematical objects themselves.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
