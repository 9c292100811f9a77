//! Error type shared across the crate.
//!
//! Every fallible operation returns [`Result`]. Variants are coarse on
//! purpose: callers branch on the kind of failure (bad input, geometric
//! conflict, resource limit), while the message carries the specifics.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A lattice edit collides with existing structure (overlapping gadget
    /// regions, anchor too close to a boundary, duplicate insertion).
    #[error("conflict: {0}")]
    Conflict(String),

    /// The requested state space exceeds the configured dimension cap.
    #[error("state space too large: {0}")]
    TooLarge(String),

    /// A circuit design has no stable operating point (for example a
    /// negative dressed inductive energy).
    #[error("unphysical design: {0}")]
    UnphysicalDesign(String),

    /// A root or feature that was searched for does not exist in the
    /// scanned range.
    #[error("not found: {0}")]
    NotFound(String),

    /// A numeric result did not converge at the requested basis size;
    /// retry with more levels.
    #[error("increase levels: {0}")]
    IncreaseLevels(String),

    /// An iterative numeric routine failed to converge (step-size
    /// underflow, rejection budget exhausted, singular system).
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Internal invariant violated; indicates a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn conflict(msg: impl Into<String>) -> Self {
        Error::Conflict(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
