//! Exact combinatorics for breakpoint medians of permutations.
//!
//! A permutation of `1..=n` models a unichromosomal genome; the breakpoint
//! distance between two permutations is `n - 1` minus their number of shared
//! adjacencies. This crate computes, at desk scale and with exact arithmetic:
//!
//! * distances, medians and geodesics ([`median`]),
//! * segment sets, gap decompositions and run-placement counts ([`segment`]),
//! * the number of permutations sharing exactly a given adjacency set with a
//!   host permutation, three independent ways ([`counting`]),
//! * exact cardinalities and probabilities of cover-inverse and median-inverse
//!   tuple sets ([`inverse`]),
//! * closed-form moments of the distance to a uniform random permutation and
//!   seeded Monte-Carlo estimators ([`randstats`]).
//!
//! Every closed form is cross-checked against brute-force enumeration; the
//! [`verify`] module bundles those checks into a pass/fail suite.

pub mod counting;
pub mod error;
pub mod inverse;
pub mod median;
pub mod perm;
pub mod randstats;
pub mod segment;
pub mod verify;

mod slots;

pub use error::{Error, Result};
pub use perm::{AdjacencySet, PermClass, Permutation};

/// Size guards for enumeration-backed operations.
///
/// `max_enum_n` caps full scans of the symmetric group (the default 9 keeps
/// streams under 9! = 362,880 items). `max_free_bits` caps the number of free
/// adjacency slots an inclusion-exclusion sum may range over, and
/// `max_cover_bits` caps the total bit width `(n-1)*k` of cover-tuple
/// enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_enum_n: usize,
    pub max_free_bits: usize,
    pub max_cover_bits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum_n: 9,
            max_free_bits: 30,
            max_cover_bits: 24,
        }
    }
}

impl Limits {
    /// Default limits with a different cap on symmetric-group scans.
    pub fn with_max_n(max_enum_n: usize) -> Self {
        Limits {
            max_enum_n,
            ..Limits::default()
        }
    }
}
