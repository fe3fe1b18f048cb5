//! Segments, segment sets, gap decompositions, and the per-gap usage
//! profiles that classify how a superset sits inside a host permutation.
//!
//! A segment is a run of consecutive adjacencies `[n0, n1, ..., nk]`,
//! identified with its reversal. A segment set is a union of pairwise
//! strongly disjoint segments, i.e. exactly the subsets of some
//! permutation's adjacency set. Removing a segment set `I` from the
//! adjacencies of a host permutation leaves `‖I‖ + 1` gaps (the outer two
//! possibly empty); a superset `J` with `I ⊆ J ⊆ A_host` is classified per
//! gap by how many adjacencies it takes, in how many runs, and whether it
//! touches the gap ends that border a component of `I`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::counting::binomial;
use crate::error::{Error, Result};
use crate::perm::{AdjacencySet, Permutation};
use crate::slots::{runs as mask_runs, HostSlots};

/// A run of consecutive adjacencies, stored with the smaller endpoint first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Segment {
    nodes: Vec<u32>,
}

impl Segment {
    /// At least two distinct nodes; orientation is canonicalized.
    pub fn new(mut nodes: Vec<u32>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidSegmentSet(
                "a segment needs at least two nodes".into(),
            ));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSegmentSet(format!(
                "repeated node in segment {nodes:?}"
            )));
        }
        if nodes.first() > nodes.last() {
            nodes.reverse();
        }
        Ok(Segment { nodes })
    }

    /// Number of adjacencies (one less than the node count).
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn adjacency_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A union of pairwise strongly disjoint segments over the ground set
/// `1..=n`; equivalently, a subset of some permutation's adjacencies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SegmentSet {
    n: usize,
    components: Vec<Segment>,
}

impl SegmentSet {
    pub fn empty(n: usize) -> Self {
        SegmentSet {
            n,
            components: Vec::new(),
        }
    }

    /// Validates node range and strong disjointness.
    pub fn new(n: usize, mut components: Vec<Segment>) -> Result<Self> {
        let mut used = vec![false; n + 1];
        for seg in &components {
            for &v in seg.nodes() {
                if v == 0 || v as usize > n {
                    return Err(Error::InvalidSegmentSet(format!(
                        "node {v} outside 1..={n}"
                    )));
                }
                if used[v as usize] {
                    return Err(Error::NotSegmentSet {
                        node: v,
                        reason: "is shared by two segments".into(),
                    });
                }
                used[v as usize] = true;
            }
        }
        components.sort();
        Ok(SegmentSet { n, components })
    }

    /// Decomposes a set of pairs into maximal path components. Fails when
    /// some node has degree three or more, or the pairs close a cycle.
    pub fn from_adjacencies(pairs: &AdjacencySet) -> Result<Self> {
        let n = pairs.ambient();
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for (a, b) in pairs.iter() {
            neighbors[a as usize].push(b);
            neighbors[b as usize].push(a);
            for &v in &[a, b] {
                if neighbors[v as usize].len() > 2 {
                    return Err(Error::NotSegmentSet {
                        node: v,
                        reason: "has degree 3 or more".into(),
                    });
                }
            }
        }
        let mut visited = vec![false; n + 1];
        let mut components = Vec::new();
        for start in 1..=n as u32 {
            let deg = neighbors[start as usize].len();
            if deg != 1 || visited[start as usize] {
                continue;
            }
            let mut nodes = vec![start];
            visited[start as usize] = true;
            let mut prev = 0u32;
            let mut cur = start;
            loop {
                let next = neighbors[cur as usize].iter().copied().find(|&v| v != prev);
                match next {
                    Some(v) => {
                        visited[v as usize] = true;
                        nodes.push(v);
                        prev = cur;
                        cur = v;
                        if neighbors[cur as usize].len() == 1 {
                            break;
                        }
                    }
                    None => break,
                }
            }
            components.push(Segment::new(nodes)?);
        }
        for v in 1..=n as u32 {
            if !visited[v as usize] && !neighbors[v as usize].is_empty() {
                return Err(Error::NotSegmentSet {
                    node: v,
                    reason: "lies on a cycle".into(),
                });
            }
        }
        components.sort();
        Ok(SegmentSet { n, components })
    }

    /// Parses `"[1,2,3] [5,6]"` (bracketed node runs) and/or
    /// `"{1,2} {2,3}"` (single adjacencies); the forms may be mixed.
    /// An empty string is the empty segment set.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut raw_pairs: Vec<(u32, u32)> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let close = match rest.as_bytes()[0] {
                b'[' => ']',
                b'{' => '}',
                c => {
                    return Err(Error::InvalidSegmentSet(format!(
                        "expected '[' or '{{', found '{}'",
                        c as char
                    )))
                }
            };
            let end = rest
                .find(close)
                .ok_or_else(|| Error::InvalidSegmentSet(format!("missing closing '{close}'")))?;
            let inner = &rest[1..end];
            let mut nodes = Vec::new();
            for tok in inner
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| Error::InvalidSegmentSet(format!("bad token '{tok}'")))?;
                nodes.push(v);
            }
            match close {
                ']' => {
                    if nodes.len() == 1 {
                        return Err(Error::InvalidSegmentSet(
                            "a segment needs at least two nodes".into(),
                        ));
                    }
                    for w in nodes.windows(2) {
                        raw_pairs.push((w[0], w[1]));
                    }
                }
                _ => {
                    if nodes.len() != 2 {
                        return Err(Error::InvalidSegmentSet(format!(
                            "an adjacency has exactly two nodes, got {nodes:?}"
                        )));
                    }
                    raw_pairs.push((nodes[0], nodes[1]));
                }
            }
            rest = rest[end + 1..].trim_start();
        }
        let mut set = AdjacencySet::empty(n);
        for (a, b) in raw_pairs {
            if a == b {
                return Err(Error::InvalidSegmentSet(format!(
                    "degenerate adjacency {{{a},{a}}}"
                )));
            }
            if a == 0 || b == 0 || a as usize > n || b as usize > n {
                return Err(Error::InvalidSegmentSet(format!(
                    "pair {{{a},{b}}} outside 1..={n}"
                )));
            }
            set.insert(a, b);
        }
        SegmentSet::from_adjacencies(&set)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Number of segments.
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Total number of adjacencies.
    pub fn adjacency_count(&self) -> usize {
        self.components.iter().map(Segment::len).sum()
    }

    pub fn components(&self) -> &[Segment] {
        &self.components
    }

    pub fn adjacencies(&self) -> AdjacencySet {
        let mut set = AdjacencySet::empty(self.n);
        for seg in &self.components {
            for (a, b) in seg.adjacency_pairs() {
                set.insert(a, b);
            }
        }
        set
    }

    pub fn is_subset_of(&self, adj: &AdjacencySet) -> bool {
        self.adjacencies().is_subset(adj)
    }
}

impl fmt::Display for SegmentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, seg) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

/// True iff the union of the two sets is again a segment set (and hence
/// extends to a full permutation's adjacency set).
pub fn consistent(a: &SegmentSet, b: &SegmentSet) -> Result<bool> {
    if a.ambient() != b.ambient() {
        return Err(Error::LengthMismatch {
            expected: a.ambient(),
            got: b.ambient(),
        });
    }
    Ok(SegmentSet::from_adjacencies(&a.adjacencies().union(&b.adjacencies())).is_ok())
}

/// Union of two consistent segment sets.
pub fn union_segment_sets(a: &SegmentSet, b: &SegmentSet) -> Result<SegmentSet> {
    if a.ambient() != b.ambient() {
        return Err(Error::LengthMismatch {
            expected: a.ambient(),
            got: b.ambient(),
        });
    }
    SegmentSet::from_adjacencies(&a.adjacencies().union(&b.adjacencies()))
        .map_err(|e| Error::InconsistentSegments(format!("union of {a} and {b} failed: {e}")))
}

/// The gaps a segment set leaves in a host permutation's adjacencies:
/// `‖I‖ + 1` maximal runs of non-`I` slots in left-to-right order, the first
/// and last possibly empty.
#[derive(Clone, Debug)]
pub struct GapDecomposition {
    host: Permutation,
    base: SegmentSet,
    base_mask: u64,
    /// Half-open slot ranges, one per gap.
    gaps: Vec<(usize, usize)>,
}

impl GapDecomposition {
    pub fn new(host: &Permutation, base: &SegmentSet) -> Result<Self> {
        if base.ambient() != host.n() {
            return Err(Error::LengthMismatch {
                expected: host.n(),
                got: base.ambient(),
            });
        }
        let slots = HostSlots::new(host);
        let base_mask = slots.mask_of_segments(base).ok_or_else(|| {
            Error::NotContained(format!(
                "segment set {base} is not contained in the adjacencies of {host}"
            ))
        })?;
        let slot_count = slots.slot_count();
        let mut gaps = Vec::new();
        let mut i = 0usize;
        let mut gap_start = 0usize;
        while i < slot_count {
            if base_mask >> i & 1 == 1 {
                gaps.push((gap_start, i));
                while i < slot_count && base_mask >> i & 1 == 1 {
                    i += 1;
                }
                gap_start = i;
            } else {
                i += 1;
            }
        }
        gaps.push((gap_start, slot_count));
        debug_assert_eq!(gaps.len(), base.component_count() + 1);
        Ok(GapDecomposition {
            host: host.clone(),
            base: base.clone(),
            base_mask,
            gaps,
        })
    }

    pub fn host(&self) -> &Permutation {
        &self.host
    }

    pub fn base(&self) -> &SegmentSet {
        &self.base
    }

    pub(crate) fn base_mask(&self) -> u64 {
        self.base_mask
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn gap_len(&self, i: usize) -> usize {
        let (s, e) = self.gaps[i];
        e - s
    }

    pub fn gap_lens(&self) -> Vec<usize> {
        (0..self.gap_count()).map(|i| self.gap_len(i)).collect()
    }

    pub fn gap_slots(&self, i: usize) -> std::ops::Range<usize> {
        let (s, e) = self.gaps[i];
        s..e
    }

    /// The i-th gap as a segment of the host, or None when empty.
    pub fn gap_segment(&self, i: usize) -> Option<Segment> {
        let (s, e) = self.gaps[i];
        if s == e {
            return None;
        }
        let nodes = self.host.elements()[s..=e].to_vec();
        Some(Segment::new(nodes).expect("host slice is a valid segment"))
    }
}

/// How a superset uses one gap: adjacencies taken, runs formed, and whether
/// the runs touch the gap ends that border a base component.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GapUsage {
    pub taken: usize,
    pub runs: usize,
    pub touches_left: bool,
    pub touches_right: bool,
}

impl GapUsage {
    pub const ZERO: GapUsage = GapUsage {
        taken: 0,
        runs: 0,
        touches_left: false,
        touches_right: false,
    };

    pub fn flag_count(&self) -> usize {
        usize::from(self.touches_left) + usize::from(self.touches_right)
    }
}

/// Per-gap usage of a superset `J` with `I ⊆ J ⊆ A_host`, together with the
/// gap lengths it was measured against.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GapProfile {
    entries: Vec<GapUsage>,
    gap_lens: Vec<usize>,
}

/// How run placements inside a gap are counted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PlacementRule {
    /// Ends at the host permutation's boundary are free: a run may or may
    /// not touch them. Validated against exhaustive enumeration.
    EndAware,
    /// Counts with the flag-driven binomial only, treating permutation ends
    /// like component ends with flag 0. Undercounts runs that touch the
    /// host's outer boundary; retained for auditing the discrepancy.
    BoundaryFlags,
}

/// Constraint on the free space between a gap end and the nearest run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EndMode {
    /// The run must touch this end (zero space).
    Touch,
    /// The run must not touch this end (at least one free slot).
    Strict,
    /// No constraint; used at the host permutation's outer ends.
    Free,
}

impl GapProfile {
    pub fn new(entries: Vec<GapUsage>, gap_lens: Vec<usize>) -> Result<Self> {
        let profile = GapProfile { entries, gap_lens };
        profile.validate()?;
        Ok(profile)
    }

    pub fn entries(&self) -> &[GapUsage] {
        &self.entries
    }

    pub fn gap_lens(&self) -> &[usize] {
        &self.gap_lens
    }

    pub fn taken_total(&self) -> usize {
        self.entries.iter().map(|e| e.taken).sum()
    }

    pub fn runs_total(&self) -> usize {
        self.entries.iter().map(|e| e.runs).sum()
    }

    pub fn flag_total(&self) -> usize {
        self.entries.iter().map(|e| e.flag_count()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.gap_lens.len() || self.entries.is_empty() {
            return Err(Error::InconsistentProfile(format!(
                "{} entries against {} gaps",
                self.entries.len(),
                self.gap_lens.len()
            )));
        }
        let last = self.entries.len() - 1;
        for (i, (e, &m)) in self.entries.iter().zip(&self.gap_lens).enumerate() {
            if e.taken > m {
                return Err(Error::InconsistentProfile(format!(
                    "gap {i} takes {} of {m} adjacencies",
                    e.taken
                )));
            }
            if (e.runs == 0) != (e.taken == 0) {
                return Err(Error::InconsistentProfile(format!(
                    "gap {i}: runs {} inconsistent with taken {}",
                    e.runs, e.taken
                )));
            }
            if e.taken > 0 && e.runs > e.taken.min(m + 1 - e.taken) {
                return Err(Error::InconsistentProfile(format!(
                    "gap {i}: {} runs cannot carry {} of {m} adjacencies",
                    e.runs, e.taken
                )));
            }
            if e.taken == 0 && (e.touches_left || e.touches_right) {
                return Err(Error::InconsistentProfile(format!(
                    "gap {i}: empty usage cannot touch an end"
                )));
            }
            if i == 0 && e.touches_left {
                return Err(Error::InconsistentProfile(
                    "first gap has no left component to touch".into(),
                ));
            }
            if i == last && e.touches_right {
                return Err(Error::InconsistentProfile(
                    "last gap has no right component to touch".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number of supersets realizing this profile: the product over gaps of
    /// per-gap run-placement counts.
    pub fn placements(&self, rule: PlacementRule) -> BigUint {
        let last = self.entries.len() - 1;
        let mut total = BigUint::one();
        for (i, (e, &m)) in self.entries.iter().zip(&self.gap_lens).enumerate() {
            let count = match rule {
                PlacementRule::EndAware => {
                    let left = if i == 0 {
                        EndMode::Free
                    } else if e.touches_left {
                        EndMode::Touch
                    } else {
                        EndMode::Strict
                    };
                    let right = if i == last {
                        EndMode::Free
                    } else if e.touches_right {
                        EndMode::Touch
                    } else {
                        EndMode::Strict
                    };
                    run_placements(m, e.taken, e.runs, left, right)
                }
                PlacementRule::BoundaryFlags => {
                    run_placements_flag_only(m, e.taken, e.runs, e.touches_left, e.touches_right)
                }
            };
            if count.is_zero() {
                return BigUint::zero();
            }
            total *= count;
        }
        total
    }
}

/// Number of ways to place `runs` disjoint non-adjacent runs totalling
/// `taken` adjacencies inside a gap of `len` adjacencies, with the stated
/// constraints at the two gap ends. `taken = runs = 0` has exactly one
/// placement (take nothing).
pub fn run_placements(
    len: usize,
    taken: usize,
    runs: usize,
    left: EndMode,
    right: EndMode,
) -> BigUint {
    if taken == 0 && runs == 0 {
        return BigUint::one();
    }
    if taken == 0 || runs == 0 || taken > len {
        return BigUint::zero();
    }
    let compositions = binomial(taken as i64 - 1, runs as i64 - 1);
    // Distribute len - taken free slots into the space before the first run,
    // between runs (at least one each), and after the last run.
    let free = (len - taken) as i64;
    let mut lower = (runs - 1) as i64;
    let mut vars = (runs - 1) as i64;
    for mode in [left, right] {
        match mode {
            EndMode::Touch => {}
            EndMode::Strict => {
                lower += 1;
                vars += 1;
            }
            EndMode::Free => {
                vars += 1;
            }
        }
    }
    let arrangements = if vars == 0 {
        if free == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        }
    } else {
        binomial(free - lower + vars - 1, vars - 1)
    };
    compositions * arrangements
}

/// The flag-only placement count `C(taken-1, runs-1) * C(len-taken-1,
/// runs-flags)`; see [`PlacementRule::BoundaryFlags`].
pub fn run_placements_flag_only(
    len: usize,
    taken: usize,
    runs: usize,
    left_flag: bool,
    right_flag: bool,
) -> BigUint {
    if taken == 0 && runs == 0 {
        return BigUint::one();
    }
    if taken == 0 || runs == 0 || taken > len {
        return BigUint::zero();
    }
    let flags = i64::from(left_flag) + i64::from(right_flag);
    binomial(taken as i64 - 1, runs as i64 - 1)
        * binomial(len as i64 - taken as i64 - 1, runs as i64 - flags)
}

/// The profile of `J` with respect to the decomposition's host and base.
/// Requires `base ⊆ J ⊆ A_host`.
pub fn gap_profile(gd: &GapDecomposition, j: &SegmentSet) -> Result<GapProfile> {
    let slots = HostSlots::new(gd.host());
    let j_mask = slots.mask_of_segments(j).ok_or_else(|| {
        Error::NotContained(format!(
            "{j} is not contained in the adjacencies of {}",
            gd.host()
        ))
    })?;
    if gd.base_mask() & j_mask != gd.base_mask() {
        return Err(Error::NotContained(format!(
            "{} is not contained in {j}",
            gd.base()
        )));
    }
    let last = gd.gap_count() - 1;
    let mut entries = Vec::with_capacity(gd.gap_count());
    for i in 0..gd.gap_count() {
        let range = gd.gap_slots(i);
        if range.is_empty() {
            entries.push(GapUsage::ZERO);
            continue;
        }
        let width = range.end - range.start;
        let sub = (j_mask >> range.start) & ((1u64 << width) - 1);
        let taken = sub.count_ones() as usize;
        entries.push(GapUsage {
            taken,
            runs: mask_runs(sub),
            touches_left: i > 0 && sub & 1 == 1,
            touches_right: i < last && sub >> (width - 1) & 1 == 1,
        });
    }
    GapProfile::new(entries, gd.gap_lens())
}

/// Every profile satisfying the per-gap invariants, each exactly once.
/// Profiles whose placement count is zero are included; they classify no
/// superset and contribute nothing to sums.
pub fn enumerate_profiles(gd: &GapDecomposition) -> Vec<GapProfile> {
    let gap_lens = gd.gap_lens();
    let last = gap_lens.len() - 1;
    let per_gap: Vec<Vec<GapUsage>> = gap_lens
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let mut opts = vec![GapUsage::ZERO];
            for taken in 1..=m {
                for runs in 1..=taken.min(m + 1 - taken) {
                    for &left in left_options(i) {
                        for &right in right_options(i, last) {
                            opts.push(GapUsage {
                                taken,
                                runs,
                                touches_left: left,
                                touches_right: right,
                            });
                        }
                    }
                }
            }
            opts
        })
        .collect();

    let mut out = Vec::new();
    let mut picks = vec![0usize; per_gap.len()];
    loop {
        let entries: Vec<GapUsage> = picks
            .iter()
            .zip(&per_gap)
            .map(|(&idx, opts)| opts[idx])
            .collect();
        out.push(GapProfile {
            entries,
            gap_lens: gap_lens.clone(),
        });
        // odometer over the per-gap option lists
        let mut i = 0;
        loop {
            if i == picks.len() {
                return out;
            }
            picks[i] += 1;
            if picks[i] < per_gap[i].len() {
                break;
            }
            picks[i] = 0;
            i += 1;
        }
    }
}

fn left_options(i: usize) -> &'static [bool] {
    if i == 0 {
        &[false]
    } else {
        &[false, true]
    }
}

fn right_options(i: usize, last: usize) -> &'static [bool] {
    if i == last {
        &[false]
    } else {
        &[false, true]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::enumerate_permutations;
    use crate::Limits;

    fn seg_set(text: &str, n: usize) -> SegmentSet {
        SegmentSet::parse(text, n).unwrap()
    }

    #[test]
    fn from_adjacencies_examples() {
        let mut pairs = AdjacencySet::empty(4);
        pairs.insert(1, 2);
        pairs.insert(3, 4);
        let s = SegmentSet::from_adjacencies(&pairs).unwrap();
        assert_eq!(s.component_count(), 2);
        assert_eq!(s.adjacency_count(), 2);

        let mut pairs = AdjacencySet::empty(3);
        pairs.insert(1, 2);
        pairs.insert(2, 3);
        let s = SegmentSet::from_adjacencies(&pairs).unwrap();
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.components()[0].nodes(), &[1, 2, 3]);

        let mut pairs = AdjacencySet::empty(4);
        pairs.insert(1, 2);
        pairs.insert(1, 3);
        pairs.insert(1, 4);
        assert!(matches!(
            SegmentSet::from_adjacencies(&pairs),
            Err(Error::NotSegmentSet { node: 1, .. })
        ));

        let mut pairs = AdjacencySet::empty(3);
        pairs.insert(1, 2);
        pairs.insert(2, 3);
        pairs.insert(1, 3);
        assert!(matches!(
            SegmentSet::from_adjacencies(&pairs),
            Err(Error::NotSegmentSet { .. })
        ));
    }

    #[test]
    fn consistency_examples() {
        let a = seg_set("[3,7,10,2,5]", 10);
        let b = seg_set("[2,5,8,1]", 10);
        assert!(consistent(&a, &b).unwrap());
        let u = union_segment_sets(&a, &b).unwrap();
        assert_eq!(u.component_count(), 1);
        assert_eq!(u.components()[0].nodes(), &[1, 8, 5, 2, 10, 7, 3]);

        let c = seg_set("[2,6,3,8,1]", 10);
        let d = seg_set("[8,1,4,7,6,3,5]", 10);
        assert!(!consistent(&c, &d).unwrap());
        assert!(union_segment_sets(&c, &d).is_err());

        let e = SegmentSet::empty(10);
        assert!(consistent(&a, &e).unwrap());
        assert_eq!(union_segment_sets(&a, &e).unwrap(), a);
    }

    #[test]
    fn segment_canonical_orientation() {
        let s = Segment::new(vec![3, 2, 1]).unwrap();
        assert_eq!(s.nodes(), &[1, 2, 3]);
        assert_eq!(s, Segment::new(vec![1, 2, 3]).unwrap());
    }

    #[test]
    fn parse_accepts_both_forms() {
        let a = seg_set("[1,2,3] [5,6]", 6);
        assert_eq!(a.component_count(), 2);
        let b = seg_set("{1,2} {2,3} {5,6}", 6);
        assert_eq!(a, b);
        assert_eq!(seg_set("", 6), SegmentSet::empty(6));
        assert!(SegmentSet::parse("[1]", 6).is_err());
        assert!(SegmentSet::parse("{1,2,3}", 6).is_err());
        assert!(SegmentSet::parse("[1,2", 6).is_err());
        assert!(SegmentSet::parse("{1,7}", 6).is_err());
    }

    #[test]
    fn gap_decomposition_on_identity() {
        let id5 = Permutation::identity(5);

        let gd = GapDecomposition::new(&id5, &seg_set("[1,2]", 5)).unwrap();
        assert_eq!(gd.gap_count(), 2);
        assert_eq!(gd.gap_len(0), 0);
        assert!(gd.gap_segment(0).is_none());
        assert_eq!(gd.gap_segment(1).unwrap().nodes(), &[2, 3, 4, 5]);

        let gd = GapDecomposition::new(&id5, &seg_set("[2,3]", 5)).unwrap();
        assert_eq!(gd.gap_count(), 2);
        assert_eq!(gd.gap_segment(0).unwrap().nodes(), &[1, 2]);
        assert_eq!(gd.gap_segment(1).unwrap().nodes(), &[3, 4, 5]);

        let gd = GapDecomposition::new(&id5, &SegmentSet::empty(5)).unwrap();
        assert_eq!(gd.gap_count(), 1);
        assert_eq!(gd.gap_segment(0).unwrap().nodes(), &[1, 2, 3, 4, 5]);

        assert!(GapDecomposition::new(&id5, &seg_set("[1,3]", 5)).is_err());
    }

    #[test]
    fn gap_reconstruction_invariant() {
        let limits = Limits::default();
        for n in 2..=6 {
            for p in enumerate_permutations(n, &limits).unwrap() {
                let slots = crate::slots::HostSlots::new(&p);
                let full = p.adjacencies();
                for mask in 0u64..1 << (n - 1) {
                    let base = slots.segments_of_mask(mask);
                    let gd = GapDecomposition::new(&p, &base).unwrap();
                    let mut union = base.adjacencies();
                    let mut total = base.adjacency_count();
                    for i in 0..gd.gap_count() {
                        if let Some(seg) = gd.gap_segment(i) {
                            total += seg.len();
                            for (a, b) in seg.adjacency_pairs() {
                                assert!(!union.contains(a, b), "gap overlaps base");
                                union.insert(a, b);
                            }
                        }
                    }
                    assert_eq!(total, n - 1);
                    assert_eq!(union, full);
                }
            }
        }
    }

    #[test]
    fn profile_examples() {
        let id5 = Permutation::identity(5);
        let base = seg_set("[1,2]", 5);
        let gd = GapDecomposition::new(&id5, &base).unwrap();

        let j = seg_set("[1,2,3]", 5);
        let prof = gap_profile(&gd, &j).unwrap();
        assert_eq!(
            prof.entries()[1],
            GapUsage {
                taken: 1,
                runs: 1,
                touches_left: true,
                touches_right: false
            }
        );

        let j = seg_set("[1,2] [3,4]", 5);
        let prof = gap_profile(&gd, &j).unwrap();
        assert_eq!(
            prof.entries()[1],
            GapUsage {
                taken: 1,
                runs: 1,
                touches_left: false,
                touches_right: false
            }
        );

        let prof = gap_profile(&gd, &base).unwrap();
        assert!(prof.entries().iter().all(|e| *e == GapUsage::ZERO));

        // containment violations
        assert!(gap_profile(&gd, &SegmentSet::empty(5)).is_err());
        assert!(gap_profile(&gd, &seg_set("[2,4]", 5)).is_err());
    }

    #[test]
    fn enumerate_profiles_small_cases() {
        let id3 = Permutation::identity(3);
        let gd = GapDecomposition::new(&id3, &SegmentSet::empty(3)).unwrap();
        let profs = enumerate_profiles(&gd);
        assert_eq!(profs.len(), 3);
        let usages: Vec<GapUsage> = profs.iter().map(|p| p.entries()[0]).collect();
        assert!(usages.contains(&GapUsage::ZERO));
        assert!(usages.contains(&GapUsage {
            taken: 1,
            runs: 1,
            touches_left: false,
            touches_right: false
        }));
        assert!(usages.contains(&GapUsage {
            taken: 2,
            runs: 1,
            touches_left: false,
            touches_right: false
        }));

        // base = all adjacencies: a single all-zero profile
        let id5 = Permutation::identity(5);
        let all = seg_set("[1,2,3,4,5]", 5);
        let gd = GapDecomposition::new(&id5, &all).unwrap();
        let profs = enumerate_profiles(&gd);
        assert_eq!(profs.len(), 1);
        assert!(profs[0].entries().iter().all(|e| *e == GapUsage::ZERO));
    }

    #[test]
    fn run_placement_examples() {
        use EndMode::*;
        // gap [2,3,4,5] behind [1,2] in the identity of length 5
        assert_eq!(run_placements(3, 1, 1, Strict, Free), BigUint::from(2u32));
        assert_eq!(run_placements(1, 1, 1, Free, Touch), BigUint::from(1u32));
        assert_eq!(run_placements(2, 2, 1, Strict, Strict), BigUint::zero());
        assert_eq!(run_placements(4, 0, 0, Free, Free), BigUint::one());
        assert_eq!(run_placements(3, 3, 1, Touch, Touch), BigUint::one());
        assert_eq!(run_placements(3, 1, 1, Touch, Touch), BigUint::zero());
    }

    #[test]
    fn flag_only_placements_undercount_at_host_ends() {
        // gap of length 3 at the right end of the host: profile (1,1,·,0)
        // has two end-aware placements but one flag-only placement.
        assert_eq!(
            run_placements(3, 1, 1, EndMode::Strict, EndMode::Free),
            BigUint::from(2u32)
        );
        assert_eq!(
            run_placements_flag_only(3, 1, 1, false, false),
            BigUint::one()
        );
    }

    /// Summing end-aware placements over all profiles must count every
    /// superset of the base exactly once.
    #[test]
    fn placements_partition_all_supersets() {
        let limits = Limits::default();
        for n in 2..=6 {
            for p in enumerate_permutations(n, &limits).unwrap() {
                let slots = crate::slots::HostSlots::new(&p);
                for base_mask in 0u64..1 << (n - 1) {
                    let base = slots.segments_of_mask(base_mask);
                    let gd = GapDecomposition::new(&p, &base).unwrap();
                    let total: BigUint = enumerate_profiles(&gd)
                        .iter()
                        .map(|prof| prof.placements(PlacementRule::EndAware))
                        .sum();
                    let free = (n - 1) - base.adjacency_count();
                    assert_eq!(total, BigUint::from(1u64 << free), "host {p}, base {base}");
                }
            }
        }
    }

    /// Grouping supersets by profile and counting must agree with the
    /// placement formula profile by profile.
    #[test]
    fn placements_match_bruteforce_grouping() {
        let limits = Limits::default();
        for n in 2..=5 {
            for p in enumerate_permutations(n, &limits).unwrap() {
                check_grouping(&p, n);
            }
        }
        // reversal classes suffice at n = 6: the gap structure mirrors
        for class in crate::perm::enumerate_classes(6, &limits).unwrap() {
            check_grouping(class.representative(), 6);
        }
    }

    fn check_grouping(p: &Permutation, n: usize) {
        let slots = crate::slots::HostSlots::new(p);
        let full = slots.full_mask();
        for base_mask in 0u64..1 << (n - 1) {
            let base = slots.segments_of_mask(base_mask);
            let gd = GapDecomposition::new(p, &base).unwrap();
            let mut observed: Vec<(GapProfile, u64)> = Vec::new();
            let free = full & !base_mask;
            let mut sub = free;
            loop {
                let j_mask = base_mask | sub;
                let j = slots.segments_of_mask(j_mask);
                let prof = gap_profile(&gd, &j).unwrap();
                // the segment-count identity for the profile
                assert_eq!(
                    j.component_count(),
                    base.component_count() + prof.runs_total() - prof.flag_total()
                );
                match observed.iter_mut().find(|(q, _)| *q == prof) {
                    Some((_, c)) => *c += 1,
                    None => observed.push((prof, 1)),
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
            for prof in enumerate_profiles(&gd) {
                let expected = observed
                    .iter()
                    .find(|(q, _)| *q == prof)
                    .map(|(_, c)| *c)
                    .unwrap_or(0);
                assert_eq!(
                    prof.placements(PlacementRule::EndAware),
                    BigUint::from(expected),
                    "host {p}, base {base}, profile {prof:?}"
                );
            }
            // and every observed profile is enumerated
            let enumerated = enumerate_profiles(&gd);
            for (prof, _) in &observed {
                assert!(enumerated.contains(prof));
            }
        }
    }
}
