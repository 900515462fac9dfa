use alloc::string::String;

use thiserror::Error;

/// Errors raised by the computations in this crate.
///
/// Structural problems with a tower are *not* errors: they are reported as
/// data by [`crate::tower::validate_tower`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A weight vector broke `a_1 > 0`, `a_i >= 0` or was empty.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    /// The operation needs a symbolic tower but got a cube tower, or vice versa.
    #[error("tower kind mismatch: {0}")]
    KindMismatch(String),
    /// A point window does not fit the level-1 system of the tower.
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    /// A distance enclosure straddles the threshold, so a strict comparison
    /// cannot be decided at the current support radius.
    #[error("unresolved comparison between points {i} and {j} at threshold {threshold}")]
    Unresolved {
        /// First point index.
        i: usize,
        /// Second point index.
        j: usize,
        /// The threshold as a `p/q` string.
        threshold: String,
    },
    /// A numeric argument was outside the accepted range.
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    /// A box cover is malformed or does not cover its ambient cube.
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    /// No refinement scale could be certified below the configured cap.
    #[error("no certified refinement scale up to 1/{0}")]
    RefinementScale(u64),
    /// A join would exceed the configured ambient dimension cap.
    #[error("join ambient dimension {dim} exceeds cap {cap}")]
    DimensionCap {
        /// Dimension that would be needed.
        dim: usize,
        /// Configured cap.
        cap: usize,
    },
    /// A graph has no cycle, so orbit capacity is undefined.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    /// An independent cross-check disagreed with the main computation.
    #[error("cross-check mismatch: {0}")]
    CrossCheck(String),
    /// A regression had no spread in its abscissae.
    #[error("degenerate regression: {0}")]
    Degenerate(String),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
