//! Bitmask view of adjacency subsets of a fixed host permutation.
//!
//! Slot `i` (0-based) is the adjacency between positions `i` and `i + 1` of
//! the host, so any subset of the host's adjacencies is a mask over `n - 1`
//! bits and two set bits are in the same segment iff they are consecutive.

use crate::perm::{AdjacencySet, Permutation};
use crate::segment::SegmentSet;

pub(crate) struct HostSlots<'a> {
    host: &'a Permutation,
    pos: Vec<u32>,
}

impl<'a> HostSlots<'a> {
    pub fn new(host: &'a Permutation) -> Self {
        let pos = host.positions();
        HostSlots { host, pos }
    }

    pub fn slot_count(&self) -> usize {
        self.host.n() - 1
    }

    pub fn full_mask(&self) -> u64 {
        if self.slot_count() == 64 {
            u64::MAX
        } else {
            (1u64 << self.slot_count()) - 1
        }
    }

    /// Slot index of the pair `{a, b}`, or None when it is not an adjacency
    /// of the host.
    pub fn slot_of(&self, a: u32, b: u32) -> Option<usize> {
        let (pa, pb) = (self.pos[a as usize], self.pos[b as usize]);
        if pa.abs_diff(pb) == 1 {
            Some(pa.min(pb) as usize)
        } else {
            None
        }
    }

    /// Mask of an adjacency set, or None if it is not contained in the host.
    pub fn mask_of(&self, set: &AdjacencySet) -> Option<u64> {
        let mut mask = 0u64;
        for (a, b) in set.iter() {
            mask |= 1u64 << self.slot_of(a, b)?;
        }
        Some(mask)
    }

    pub fn mask_of_segments(&self, set: &SegmentSet) -> Option<u64> {
        self.mask_of(&set.adjacencies())
    }

    pub fn set_of_mask(&self, mask: u64) -> AdjacencySet {
        let elems = self.host.elements();
        let mut set = AdjacencySet::empty(self.host.n());
        for i in 0..self.slot_count() {
            if mask >> i & 1 == 1 {
                set.insert(elems[i], elems[i + 1]);
            }
        }
        set
    }

    pub fn segments_of_mask(&self, mask: u64) -> SegmentSet {
        SegmentSet::from_adjacencies(&self.set_of_mask(mask))
            .expect("subset of a permutation's adjacencies is always a segment set")
    }
}

/// Number of maximal runs of set bits, i.e. segments of the subset.
pub(crate) fn runs(mask: u64) -> usize {
    (mask & !(mask >> 1)).count_ones() as usize
}
