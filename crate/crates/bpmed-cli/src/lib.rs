//! Shared pieces of the `bpmed` binary that its tests inspect.

/// Which library operations each subcommand exercises. The coverage test
/// asserts that every public operation appears under exactly one
/// subcommand.
pub const DISPATCH: &[(&str, &[&str])] = &[
    (
        "adj",
        &[
            "Permutation::parse",
            "Permutation::adjacencies",
            "common_adjacencies",
            "segment::consistent",
            "segment::union_segment_sets",
        ],
    ),
    ("dist", &["bp_distance", "total_distance"]),
    (
        "median",
        &[
            "median::medians_brute",
            "median::is_median",
            "enumerate_classes",
            "PermClass::of",
            "Permutation::reverse",
        ],
    ),
    ("geodesic", &["median::is_geodesic"]),
    (
        "bdecomp",
        &[
            "inverse::shared_adjacency_table",
            "SharedAdjacencyTable::overlap",
        ],
    ),
    (
        "bound",
        &[
            "inverse::median_excess",
            "inverse::within_slack",
            "SharedAdjacencyTable::excess_bound_tight",
            "SharedAdjacencyTable::excess_bound_set",
        ],
    ),
    (
        "hcount",
        &[
            "counting::count_exact_common_brute",
            "counting::count_exact_common_inclusion_exclusion",
            "counting::count_exact_common_profiled",
            "counting::permutations_containing",
            "counting::permutations_containing_profiled",
            "counting::factorial",
            "counting::binomial",
            "SegmentSet::parse",
            "SegmentSet::from_adjacencies",
            "segment::GapDecomposition::new",
            "segment::gap_profile",
            "segment::enumerate_profiles",
            "segment::run_placements",
            "segment::run_placements_flag_only",
            "enumerate_permutations",
        ],
    ),
    ("covers", &["inverse::cover_tuples"]),
    (
        "linv-count",
        &[
            "inverse::cover_inverse_count",
            "inverse::cover_inverse_count_brute",
        ],
    ),
    ("linv-prob", &["inverse::cover_inverse_probability"]),
    (
        "minv-brute",
        &[
            "inverse::median_inverse_count_brute",
            "inverse::inverse_counts_on_max_distance",
        ],
    ),
    (
        "moments",
        &[
            "randstats::moments_closed",
            "randstats::expected_distance_closed",
            "randstats::variance_distance_closed",
        ],
    ),
    (
        "mc",
        &[
            "randstats::mc_moments",
            "randstats::mc_median_probability",
            "randstats::uniform_permutation",
        ],
    ),
    ("tail", &["randstats::tail_fraction"]),
    (
        "verify",
        &[
            "verify::run_with",
            "median::extreme_median_check",
            "median::coverage_criterion",
            "is_max_distance_set",
        ],
    ),
];
