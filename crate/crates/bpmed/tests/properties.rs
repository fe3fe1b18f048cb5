//! Randomized invariants over the public API.

use num_bigint::BigUint;
use proptest::prelude::*;

use bpmed::counting::{
    count_exact_common_inclusion_exclusion, count_exact_common_profiled, factorial,
};
use bpmed::inverse::cover_inverse_count;
use bpmed::perm::{bp_distance, Permutation};
use bpmed::segment::{enumerate_profiles, GapDecomposition, PlacementRule, SegmentSet};
use bpmed::Limits;

fn perm_of(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).expect("shuffled range is a permutation"))
}

fn perm_any(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n).prop_flat_map(perm_of)
}

fn perm_pair(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (2..=max_n).prop_flat_map(|n| (perm_of(n), perm_of(n)))
}

fn host_and_base(max_n: usize) -> impl Strategy<Value = (Permutation, SegmentSet)> {
    (2..=max_n).prop_flat_map(|n| {
        (perm_of(n), 0u64..(1 << (n - 1))).prop_map(|(p, mask)| {
            let adj = p.adjacencies();
            let mut subset = bpmed::perm::AdjacencySet::empty(p.n());
            for (i, (a, b)) in adj.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    subset.insert(a, b);
                }
            }
            let base = SegmentSet::from_adjacencies(&subset).expect("subset of adjacencies");
            (p, base)
        })
    })
}

proptest! {
    #[test]
    fn parse_display_roundtrip(p in perm_any(12)) {
        let shown = p.to_string();
        prop_assert_eq!(Permutation::parse(&shown).unwrap(), p);
    }

    #[test]
    fn adjacency_count_is_n_minus_one(p in perm_any(12)) {
        prop_assert_eq!(p.adjacencies().len(), p.n() - 1);
    }

    #[test]
    fn distance_is_a_reversal_blind_pseudometric((x, y) in perm_pair(8)) {
        let d = bp_distance(&x, &y).unwrap();
        prop_assert_eq!(d, bp_distance(&y, &x).unwrap());
        prop_assert!(d < x.n());
        prop_assert_eq!(bp_distance(&x.reverse(), &y).unwrap(), d);
    }

    #[test]
    fn segment_set_display_roundtrip((_, base) in host_and_base(9)) {
        let shown = base.to_string();
        let text = if shown == "(empty)" { String::new() } else { shown };
        prop_assert_eq!(SegmentSet::parse(&text, base.ambient()).unwrap(), base);
    }

    /// Placement counts over all profiles tile the superset lattice, also
    /// above the exhaustively tested sizes.
    #[test]
    fn profile_placements_tile_supersets((p, base) in host_and_base(9)) {
        let gd = GapDecomposition::new(&p, &base).unwrap();
        let total: BigUint = enumerate_profiles(&gd)
            .iter()
            .map(|prof| prof.placements(PlacementRule::EndAware))
            .sum();
        let free = (p.n() - 1) - base.adjacency_count();
        prop_assert_eq!(total, BigUint::from(1u64) << free);
    }

    /// The profile-sum count stays equal to the inclusion-exclusion count on
    /// random hosts beyond the exhaustive range.
    #[test]
    fn profile_sum_matches_inclusion_exclusion((p, base) in host_and_base(8)) {
        let limits = Limits::default();
        let ie = count_exact_common_inclusion_exclusion(&p, &base, &limits).unwrap();
        let prof = count_exact_common_profiled(&p, &base, PlacementRule::EndAware).unwrap();
        prop_assert_eq!(ie, prof);
    }

    #[test]
    fn cover_inverse_bounded_and_monotone(p in perm_of(4), k in 1usize..=2) {
        let limits = Limits::default();
        let mut prev = BigUint::from(0u8);
        for c in 0..=3usize {
            let count = cover_inverse_count(&p, k, c, &limits).unwrap();
            prop_assert!(count >= prev);
            prop_assert!(count <= factorial(4).pow(k as u32));
            prev = count;
        }
    }
}
