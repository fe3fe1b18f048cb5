//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by parsing, validation, and guarded computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input text did not describe a valid permutation.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// Input text did not describe a valid segment set.
    #[error("invalid segment set: {0}")]
    InvalidSegmentSet(String),

    /// A set of adjacency pairs is not a disjoint union of simple paths.
    #[error("not a segment set: node {node} {reason}")]
    NotSegmentSet { node: u32, reason: String },

    /// Two segment sets cannot be merged into one.
    #[error("segment sets are not consistent: {0}")]
    InconsistentSegments(String),

    /// Operands live on different ground sets.
    #[error("length mismatch: expected permutations of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A required containment (e.g. I within the adjacencies of the host) failed.
    #[error("containment violated: {0}")]
    NotContained(String),

    /// A gap profile does not fit the segment set it is paired with.
    #[error("inconsistent gap profile: {0}")]
    InconsistentProfile(String),

    /// A computation would exceed the configured size guard.
    #[error("size limit exceeded: {what} needs {needed}, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    /// Generic precondition failure.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
