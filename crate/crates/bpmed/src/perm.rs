//! Permutations of `1..=n`, adjacency sets, breakpoint distance, and
//! enumeration of the symmetric group and its reversal classes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Limits;

/// A permutation of `1..=n`, stored one-line: `elems[i]` is the value at
/// position `i + 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    elems: Vec<u32>,
}

impl Permutation {
    /// Validates that `elems` uses every value in `1..=n` exactly once.
    pub fn new(elems: Vec<u32>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidPermutation("empty input".into()));
        }
        let n = elems.len();
        let mut seen = vec![false; n + 1];
        for &v in &elems {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if seen[v as usize] {
                return Err(Error::InvalidPermutation(format!("duplicate value {v}")));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { elems })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            elems: (1..=n as u32).collect(),
        }
    }

    /// Parses whitespace- or comma-separated integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elems = Vec::new();
        for tok in text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::InvalidPermutation(format!("bad token '{tok}'")))?;
            elems.push(v);
        }
        Permutation::new(elems)
    }

    pub fn n(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    /// The left-right mirror image, which is at breakpoint distance zero.
    pub fn reverse(&self) -> Self {
        let mut elems = self.elems.clone();
        elems.reverse();
        Permutation { elems }
    }

    /// Function composition `(self ∘ inner)(i) = self(inner(i))`.
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation> {
        if self.n() != inner.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: inner.n(),
            });
        }
        let elems = inner
            .elems
            .iter()
            .map(|&v| self.elems[v as usize - 1])
            .collect();
        Ok(Permutation { elems })
    }

    /// `positions()[v]` is the 0-based position of value `v` (index 0 unused).
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.n() + 1];
        for (i, &v) in self.elems.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        pos
    }

    /// The `n - 1` unordered pairs of consecutive values.
    pub fn adjacencies(&self) -> AdjacencySet {
        let mut set = AdjacencySet::empty(self.n());
        for w in self.elems.windows(2) {
            set.insert(w[0], w[1]);
        }
        set
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.elems {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse(s)
    }
}

/// A set of unordered pairs `{a, b}` over the ground set `1..=n`.
///
/// Pairs are stored with `a < b`; iteration order is sorted and deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdjacencySet {
    n: usize,
    pairs: BTreeSet<(u32, u32)>,
}

impl AdjacencySet {
    pub fn empty(n: usize) -> Self {
        AdjacencySet {
            n,
            pairs: BTreeSet::new(),
        }
    }

    /// Ground-set size `n`.
    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Inserts `{a, b}` in canonical order. Panics on `a == b` or values
    /// outside the ground set; callers validate user input first.
    pub fn insert(&mut self, a: u32, b: u32) {
        assert!(a != b, "degenerate pair {{{a},{a}}}");
        assert!(
            a >= 1 && b >= 1 && a as usize <= self.n && b as usize <= self.n,
            "pair {{{a},{b}}} outside 1..={}",
            self.n
        );
        self.pairs.insert((a.min(b), a.max(b)));
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn intersection(&self, other: &AdjacencySet) -> AdjacencySet {
        assert_eq!(self.n, other.n, "ground-set mismatch");
        AdjacencySet {
            n: self.n,
            pairs: self.pairs.intersection(&other.pairs).copied().collect(),
        }
    }

    pub fn union(&self, other: &AdjacencySet) -> AdjacencySet {
        assert_eq!(self.n, other.n, "ground-set mismatch");
        AdjacencySet {
            n: self.n,
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn difference(&self, other: &AdjacencySet) -> AdjacencySet {
        assert_eq!(self.n, other.n, "ground-set mismatch");
        AdjacencySet {
            n: self.n,
            pairs: self.pairs.difference(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &AdjacencySet) -> bool {
        assert_eq!(self.n, other.n, "ground-set mismatch");
        self.pairs.is_subset(&other.pairs)
    }
}

impl fmt::Display for AdjacencySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "(empty)");
        }
        let mut first = true;
        for (a, b) in &self.pairs {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{{{a},{b}}}")?;
            first = false;
        }
        Ok(())
    }
}

/// A permutation identified with its reversal; the representative is the
/// lexicographically smaller of the two.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PermClass {
    rep: Permutation,
}

impl PermClass {
    pub fn of(p: &Permutation) -> Self {
        let rev = p.reverse();
        let rep = if *p <= rev { p.clone() } else { rev };
        PermClass { rep }
    }

    pub fn representative(&self) -> &Permutation {
        &self.rep
    }

    /// Both orientations; a single entry for the degenerate `n = 1` class.
    pub fn members(&self) -> Vec<Permutation> {
        let rev = self.rep.reverse();
        if rev == self.rep {
            vec![self.rep.clone()]
        } else {
            vec![self.rep.clone(), rev]
        }
    }
}

/// Intersection of the adjacency sets of a nonempty list of permutations.
pub fn common_adjacencies(ps: &[Permutation]) -> Result<AdjacencySet> {
    let first = ps
        .first()
        .ok_or_else(|| Error::InvalidInput("empty permutation list".into()))?;
    let mut acc = first.adjacencies();
    for p in &ps[1..] {
        if p.n() != first.n() {
            return Err(Error::LengthMismatch {
                expected: first.n(),
                got: p.n(),
            });
        }
        acc = acc.intersection(&p.adjacencies());
    }
    Ok(acc)
}

/// Breakpoint distance `n - 1 - |common adjacencies|`.
pub fn bp_distance(x: &Permutation, y: &Permutation) -> Result<usize> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch {
            expected: x.n(),
            got: y.n(),
        });
    }
    let pos = y.positions();
    let mut shared = 0usize;
    for w in x.elements().windows(2) {
        let (pa, pb) = (pos[w[0] as usize], pos[w[1] as usize]);
        if pa.abs_diff(pb) == 1 {
            shared += 1;
        }
    }
    Ok(x.n() - 1 - shared)
}

/// Sum of breakpoint distances from `x` to every element of `xs`.
pub fn total_distance(x: &Permutation, xs: &[Permutation]) -> Result<usize> {
    let mut total = 0;
    for y in xs {
        total += bp_distance(x, y)?;
    }
    Ok(total)
}

/// True iff every pair in `xs` is at the maximum distance `n - 1`.
pub fn is_max_distance_set(xs: &[Permutation]) -> Result<bool> {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if bp_distance(&xs[i], &xs[j])? != xs[i].n() - 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_enum_guard(n: usize, limits: &Limits) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "permutation length must be >= 1".into(),
        ));
    }
    if n > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "symmetric-group enumeration",
            needed: n,
            limit: limits.max_enum_n,
        });
    }
    Ok(())
}

/// All `n!` permutations in lexicographic order.
pub fn enumerate_permutations(n: usize, limits: &Limits) -> Result<PermIter> {
    check_enum_guard(n, limits)?;
    Ok(PermIter {
        next: Some((1..=n as u32).collect()),
    })
}

/// All `n!/2` reversal classes (one for `n = 1`), by lexicographically
/// smallest representative, in lexicographic order.
pub fn enumerate_classes(n: usize, limits: &Limits) -> Result<ClassIter> {
    check_enum_guard(n, limits)?;
    Ok(ClassIter {
        inner: PermIter {
            next: Some((1..=n as u32).collect()),
        },
    })
}

/// Lexicographic stream over the symmetric group.
pub struct PermIter {
    next: Option<Vec<u32>>,
}

impl Iterator for PermIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let out = Permutation { elems: cur.clone() };
        let mut buf = cur;
        if next_permutation(&mut buf) {
            self.next = Some(buf);
        }
        Some(out)
    }
}

/// Stream over reversal-class representatives.
pub struct ClassIter {
    inner: PermIter,
}

impl Iterator for ClassIter {
    type Item = PermClass;

    fn next(&mut self) -> Option<PermClass> {
        for p in self.inner.by_ref() {
            let rev = p.reverse();
            if p <= rev {
                return Some(PermClass { rep: p });
            }
        }
        None
    }
}

/// In-place lexicographic successor; false when `a` was the last permutation.
fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Visits every permutation of `1..=n` through a reusable buffer, avoiding a
/// fresh allocation per item. Used by the brute-force scans.
pub(crate) fn for_each_permutation<F: FnMut(&[u32])>(n: usize, mut f: F) {
    let mut buf: Vec<u32> = (1..=n as u32).collect();
    loop {
        f(&buf);
        if !next_permutation(&mut buf) {
            return;
        }
    }
}

/// Visits one representative per reversal class (the lexicographically
/// smaller orientation).
pub(crate) fn for_each_class<F: FnMut(&[u32])>(n: usize, mut f: F) {
    for_each_permutation(n, |p| {
        if n == 1 || lex_le_reversed(p) {
            f(p);
        }
    });
}

fn lex_le_reversed(p: &[u32]) -> bool {
    let n = p.len();
    for i in 0..n {
        match p[i].cmp(&p[n - 1 - i]) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

/// Parses a permutation file: one permutation per line, `#` starts a comment
/// line, blank lines ignored.
pub fn parse_permutation_lines(text: &str) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(Permutation::parse(line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    #[test]
    fn parse_accepts_spaces_and_commas() {
        assert_eq!(p("1 2 3").elements(), &[1, 2, 3]);
        assert_eq!(p("4,6,5,1,3,2").elements(), &[4, 6, 5, 1, 3, 2]);
        assert_eq!(p(" 2 , 1 ").elements(), &[2, 1]);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            Permutation::parse("1 1 2"),
            Err(Error::InvalidPermutation(m)) if m.contains("duplicate value 1")
        ));
        assert!(matches!(
            Permutation::parse("1 5 2"),
            Err(Error::InvalidPermutation(m)) if m.contains('5')
        ));
        assert!(matches!(
            Permutation::parse(""),
            Err(Error::InvalidPermutation(m)) if m.contains("empty")
        ));
        assert!(matches!(
            Permutation::parse("1 x 2"),
            Err(Error::InvalidPermutation(m)) if m.contains("'x'")
        ));
    }

    #[test]
    fn adjacencies_of_small_permutations() {
        let a = p("1 2 3").adjacencies();
        assert_eq!(a.len(), 2);
        assert!(a.contains(1, 2) && a.contains(2, 3));
        let b = p("2 1").adjacencies();
        assert_eq!(b.len(), 1);
        assert!(b.contains(1, 2));
        assert!(p("1").adjacencies().is_empty());
    }

    #[test]
    fn common_adjacencies_of_example_triple() {
        let id = Permutation::identity(6);
        let x = p("4 6 5 1 3 2");
        let y = p("4 2 6 5 1 3");

        let idx = common_adjacencies(&[id.clone(), x.clone()]).unwrap();
        assert_eq!(idx.len(), 2);
        assert!(idx.contains(2, 3) && idx.contains(5, 6));

        let idy = common_adjacencies(&[id.clone(), y.clone()]).unwrap();
        assert_eq!(idy.len(), 1);
        assert!(idy.contains(5, 6));

        let xy = common_adjacencies(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(xy.len(), 3);
        assert!(xy.contains(5, 6) && xy.contains(1, 5) && xy.contains(1, 3));

        let all = common_adjacencies(&[id, x.clone(), y]).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all.contains(5, 6));

        let single = common_adjacencies(std::slice::from_ref(&x)).unwrap();
        assert_eq!(single, x.adjacencies());
    }

    #[test]
    fn distances_match_fixtures() {
        let id9 = Permutation::identity(9);
        let x9 = p("2 7 5 6 8 3 9 4 1");
        assert_eq!(bp_distance(&id9, &x9).unwrap(), 7);

        let id6 = Permutation::identity(6);
        let x6 = p("4 6 5 1 3 2");
        assert_eq!(bp_distance(&id6, &x6).unwrap(), 3);

        let q = p("3 1 4 2 5");
        assert_eq!(bp_distance(&q, &q.reverse()).unwrap(), 0);
    }

    #[test]
    fn total_distance_of_example_triple() {
        let id = Permutation::identity(6);
        let x = p("4 6 5 1 3 2");
        let y = p("4 2 6 5 1 3");
        let set = [id.clone(), x.clone(), y.clone()];
        assert_eq!(total_distance(&id, &set).unwrap(), 7);
        assert_eq!(total_distance(&x, &set).unwrap(), 5);
        assert_eq!(total_distance(&y, &set).unwrap(), 6);
        assert_eq!(total_distance(&x, std::slice::from_ref(&x)).unwrap(), 0);
    }

    #[test]
    fn mixed_lengths_are_rejected() {
        let a = p("1 2 3");
        let b = p("1 2");
        assert!(bp_distance(&a, &b).is_err());
        assert!(common_adjacencies(&[a.clone(), b.clone()]).is_err());
        assert!(total_distance(&a, std::slice::from_ref(&b)).is_err());
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn reversal_and_classes() {
        assert_eq!(p("1 2 3").reverse(), p("3 2 1"));
        assert_eq!(*PermClass::of(&p("3 2 1")).representative(), p("1 2 3"));
        let q = p("2 3 1");
        assert_eq!(PermClass::of(&q), PermClass::of(&q.reverse()));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let limits = Limits::default();
        let all: Vec<_> = enumerate_permutations(3, &limits).unwrap().collect();
        assert_eq!(all.len(), 6);
        let shown: Vec<String> = all.iter().map(|q| q.to_string()).collect();
        assert_eq!(
            shown,
            ["1 2 3", "1 3 2", "2 1 3", "2 3 1", "3 1 2", "3 2 1"]
        );

        assert_eq!(enumerate_classes(3, &limits).unwrap().count(), 3);
        assert_eq!(enumerate_permutations(1, &limits).unwrap().count(), 1);
        assert_eq!(enumerate_classes(1, &limits).unwrap().count(), 1);
        assert_eq!(enumerate_classes(4, &limits).unwrap().count(), 12);
    }

    #[test]
    fn enumeration_guard_fires() {
        let limits = Limits::with_max_n(5);
        assert!(matches!(
            enumerate_permutations(6, &limits),
            Err(Error::SizeLimit { .. })
        ));
        assert!(enumerate_permutations(0, &limits).is_err());
    }

    #[test]
    fn max_distance_sets() {
        let id = Permutation::identity(3);
        assert!(is_max_distance_set(std::slice::from_ref(&id)).unwrap());
        assert!(!is_max_distance_set(&[id.clone(), p("2 1 3")]).unwrap());
        // the n = 6 example triple shares adjacencies pairwise
        let x = p("4 6 5 1 3 2");
        let y = p("4 2 6 5 1 3");
        assert!(!is_max_distance_set(&[Permutation::identity(6), x, y]).unwrap());
        // a genuinely extreme pair
        assert!(is_max_distance_set(&[Permutation::identity(4), p("2 4 1 3")]).unwrap());
    }

    #[test]
    fn metric_properties_exhaustive_small_n() {
        let limits = Limits::default();
        for n in 1..=5 {
            let perms: Vec<_> = enumerate_permutations(n, &limits).unwrap().collect();
            for x in &perms {
                for y in &perms {
                    let dxy = bp_distance(x, y).unwrap();
                    assert_eq!(dxy, bp_distance(y, x).unwrap());
                    let zero = dxy == 0;
                    let equiv = y == x || *y == x.reverse();
                    assert_eq!(zero, equiv, "d = 0 must mark exactly the reversal class");
                }
            }
            // triangle inequality on a coarser grid to keep n = 5 quick
            if n <= 4 {
                for x in &perms {
                    for y in &perms {
                        for z in &perms {
                            assert!(
                                bp_distance(x, z).unwrap()
                                    <= bp_distance(x, y).unwrap() + bp_distance(y, z).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn left_invariance_sampled() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..=7 {
            for _ in 0..40 {
                let x = crate::randstats::uniform_permutation(n, &mut rng);
                let y = crate::randstats::uniform_permutation(n, &mut rng);
                let z = crate::randstats::uniform_permutation(n, &mut rng);
                let zx = z.compose(&x).unwrap();
                let zy = z.compose(&y).unwrap();
                assert_eq!(bp_distance(&x, &y).unwrap(), bp_distance(&zx, &zy).unwrap());
            }
        }
    }

    #[test]
    fn common_adjacencies_monotone() {
        let id = Permutation::identity(6);
        let x = p("4 6 5 1 3 2");
        let y = p("4 2 6 5 1 3");
        let two = common_adjacencies(&[id.clone(), x.clone()]).unwrap();
        let three = common_adjacencies(&[id, x, y]).unwrap();
        assert!(three.is_subset(&two));
    }

    #[test]
    fn permutation_file_parsing() {
        let text = "# a comment\n1 2 3\n\n3,2,1\n";
        let ps = parse_permutation_lines(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1], p("3 2 1"));
    }
}
