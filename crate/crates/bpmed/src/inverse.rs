//! Inverse counting: which k-tuples of permutations admit a given
//! permutation as a breakpoint median, and the tractable cover-based
//! superset of that tuple set.
//!
//! The shared-adjacency table splits the common adjacencies of a set `X`
//! into the parts shared by exactly each subset; the excess bounds derived
//! from it limit how many adjacencies a median may take outside the union
//! of the input adjacencies. Cover-inverse counts enumerate, exactly, the
//! tuples whose united adjacencies cover a target's adjacencies up to a
//! slack `c`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::counting::{exact_common_table, factorial};
use crate::error::{Error, Result};
use crate::median::median_value;
use crate::perm::{bp_distance, common_adjacencies, total_distance, AdjacencySet, Permutation};
use crate::segment::SegmentSet;
use crate::slots::HostSlots;
use crate::Limits;

/// For a labelled set `X = (x_1, ..., x_k)`, maps every subset with at
/// least two elements to the adjacencies shared by exactly that subset
/// (common to it, minus anything claimed by a strict superset).
#[derive(Clone, Debug)]
pub struct SharedAdjacencyTable {
    n: usize,
    k: usize,
    sets: BTreeMap<u32, AdjacencySet>,
    totals: Vec<usize>,
    /// Original index of the minimal-total-distance element (lowest index on
    /// ties); the relabelling puts it last.
    min_index: usize,
}

/// Builds the table top-down from the full subset. Requires at least two
/// permutations of equal length.
pub fn shared_adjacency_table(xs: &[Permutation]) -> Result<SharedAdjacencyTable> {
    let k = xs.len();
    if k < 2 {
        return Err(Error::InvalidInput(
            "shared-adjacency table needs at least two permutations".into(),
        ));
    }
    if k > 16 {
        return Err(Error::SizeLimit {
            what: "shared-adjacency subsets",
            needed: k,
            limit: 16,
        });
    }
    let n = xs[0].n();
    for x in xs {
        if x.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.n(),
            });
        }
    }
    let full: u32 = (1 << k) - 1;
    let mut sets: BTreeMap<u32, AdjacencySet> = BTreeMap::new();
    let mut masks: Vec<u32> = (0..=full).filter(|m| m.count_ones() >= 2).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    for mask in masks {
        let members: Vec<Permutation> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| xs[i].clone())
            .collect();
        let mut shared = common_adjacencies(&members)?;
        for (&other, set) in &sets {
            if other != mask && other & mask == mask {
                shared = shared.difference(set);
            }
        }
        sets.insert(mask, shared);
    }
    let totals: Vec<usize> = xs.iter().map(|x| total_distance(x, xs).unwrap()).collect();
    let min_index = totals
        .iter()
        .enumerate()
        .min_by_key(|(i, &t)| (t, *i))
        .map(|(i, _)| i)
        .unwrap();
    Ok(SharedAdjacencyTable {
        n,
        k,
        sets,
        totals,
        min_index,
    })
}

impl SharedAdjacencyTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Subset masks over the original labels, with their exactly-shared
    /// adjacency sets; only subsets of size two or more are materialized.
    pub fn subsets(&self) -> impl Iterator<Item = (u32, &AdjacencySet)> {
        self.sets.iter().map(|(&m, s)| (m, s))
    }

    pub fn get(&self, mask: u32) -> Option<&AdjacencySet> {
        self.sets.get(&mask)
    }

    pub fn totals(&self) -> &[usize] {
        &self.totals
    }

    pub fn min_index(&self) -> usize {
        self.min_index
    }

    /// The relabelling as a map from new position (0-based) to original
    /// index: the minimal-total-distance element moves to the end, the rest
    /// keep their relative order.
    pub fn relabelling(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.k).filter(|&i| i != self.min_index).collect();
        order.push(self.min_index);
        order
    }

    /// Size of the intersection of `p`'s adjacencies with the exactly-shared
    /// set of the given subset.
    pub fn overlap(&self, p: &Permutation, mask: u32) -> Result<usize> {
        if p.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        let set = self.sets.get(&mask).ok_or_else(|| {
            Error::InvalidInput(format!("subset mask {mask:#b} not in the table"))
        })?;
        Ok(p.adjacencies().intersection(set).len())
    }

    /// Upper bound on the excess of a median `p` of the table's input set:
    /// per subset size r, `(r - 1)` times the overlaps of `p` minus the
    /// shared-set sizes of subsets containing the relabelled last element.
    pub fn excess_bound_tight(&self, p: &Permutation) -> Result<i64> {
        let mut bound = 0i64;
        for (&mask, set) in &self.sets {
            let r = mask.count_ones() as i64;
            let weight = r - 1;
            bound += weight * self.overlap(p, mask)? as i64;
            if mask >> self.min_index & 1 == 1 {
                bound -= weight * set.len() as i64;
            }
        }
        Ok(bound)
    }

    /// Upper bound depending on the input set only: the weighted sizes of
    /// the shared sets avoiding the relabelled last element.
    pub fn excess_bound_set(&self) -> usize {
        self.sets
            .iter()
            .filter(|(&mask, _)| mask >> self.min_index & 1 == 0)
            .map(|(&mask, set)| (mask.count_ones() as usize - 1) * set.len())
            .sum()
    }
}

/// Number of adjacencies of `p` outside the union of the adjacency sets of
/// `xs`.
pub fn median_excess(p: &Permutation, xs: &[Permutation]) -> Result<usize> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty permutation list".into()));
    }
    let mut union = AdjacencySet::empty(p.n());
    for x in xs {
        if x.n() != p.n() {
            return Err(Error::LengthMismatch {
                expected: p.n(),
                got: x.n(),
            });
        }
        union = union.union(&x.adjacencies());
    }
    Ok(p.adjacencies().difference(&union).len())
}

/// See [`SharedAdjacencyTable::excess_bound_tight`].
pub fn excess_bound_tight(p: &Permutation, xs: &[Permutation]) -> Result<i64> {
    shared_adjacency_table(xs)?.excess_bound_tight(p)
}

/// See [`SharedAdjacencyTable::excess_bound_set`].
pub fn excess_bound_set(xs: &[Permutation]) -> Result<usize> {
    Ok(shared_adjacency_table(xs)?.excess_bound_set())
}

/// Whether the adjacency union of `xs` covers `A_p` up to `c` leftovers.
pub fn within_slack(p: &Permutation, xs: &[Permutation], c: usize) -> Result<bool> {
    Ok(median_excess(p, xs)? <= c)
}

fn cover_guard(n: usize, k: usize, limits: &Limits) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("need n >= 1 and k >= 1".into()));
    }
    // k = 1 still builds the 2^(n-1) table, hence the floor of 2
    let needed = (n - 1) * k.max(2);
    if needed > limits.max_cover_bits {
        return Err(Error::SizeLimit {
            what: "cover-tuple enumeration",
            needed,
            limit: limits.max_cover_bits,
        });
    }
    Ok(())
}

/// Stream of all k-tuples of segment sets within `A_p` whose union misses at
/// most `c` of `p`'s adjacencies.
pub struct CoverTuples {
    host: Permutation,
    slack: usize,
    masks: Vec<u64>,
    size: u64,
    full: u64,
    done: bool,
}

/// Enumerates the qualifying tuples. Tuples are restricted to subsets of
/// `A_p`: a component outside `A_p` would make the tuple's exact-common
/// product zero, so nothing is lost.
pub fn cover_tuples(p: &Permutation, k: usize, c: usize, limits: &Limits) -> Result<CoverTuples> {
    cover_guard(p.n(), k, limits)?;
    let bits = p.n() - 1;
    Ok(CoverTuples {
        host: p.clone(),
        slack: c,
        masks: vec![0; k],
        size: 1u64 << bits,
        full: if bits == 0 { 0 } else { (1u64 << bits) - 1 },
        done: false,
    })
}

impl CoverTuples {
    fn qualifies(&self) -> bool {
        let union = self.masks.iter().fold(0u64, |acc, &m| acc | m);
        (self.full & !union).count_ones() as usize <= self.slack
    }

    fn advance(&mut self) -> bool {
        for slot in self.masks.iter_mut() {
            *slot += 1;
            if *slot < self.size {
                return true;
            }
            *slot = 0;
        }
        false
    }

    fn materialize(&self) -> Vec<SegmentSet> {
        let slots = HostSlots::new(&self.host);
        self.masks
            .iter()
            .map(|&m| slots.segments_of_mask(m))
            .collect()
    }
}

impl Iterator for CoverTuples {
    type Item = Vec<SegmentSet>;

    fn next(&mut self) -> Option<Vec<SegmentSet>> {
        while !self.done {
            let hit = self.qualifies();
            let out = if hit { Some(self.materialize()) } else { None };
            self.done = !self.advance();
            if out.is_some() {
                return out;
            }
        }
        None
    }
}

/// Exact number of k-tuples `(x_1, ..., x_k)` with at most `c` adjacencies
/// of `p` outside the union of the `A_{x_i}`: the sum over qualifying cover
/// tuples of the products of exact-common counts.
pub fn cover_inverse_count(
    p: &Permutation,
    k: usize,
    c: usize,
    limits: &Limits,
) -> Result<BigUint> {
    cover_guard(p.n(), k, limits)?;
    let bits = p.n() - 1;
    let table = exact_common_table(p);
    let full: u64 = if bits == 0 { 0 } else { (1u64 << bits) - 1 };
    let mut sum = ProductSum {
        k,
        full,
        slack: c,
        table: &table,
        acc: BigUint::zero(),
    };
    sum.descend(0, 0, BigUint::one());
    Ok(sum.acc)
}

/// Depth-first product over the k mask choices, skipping zero factors.
struct ProductSum<'a> {
    k: usize,
    full: u64,
    slack: usize,
    table: &'a [BigUint],
    acc: BigUint,
}

impl ProductSum<'_> {
    fn descend(&mut self, depth: usize, union: u64, partial: BigUint) {
        if depth == self.k {
            if (self.full & !union).count_ones() as usize <= self.slack {
                self.acc += partial;
            }
            return;
        }
        for mask in 0..self.table.len() {
            if self.table[mask].is_zero() {
                continue;
            }
            let product = &partial * &self.table[mask];
            self.descend(depth + 1, union | mask as u64, product);
        }
    }
}

/// `cover_inverse_count / (n!)^k` as a reduced exact rational.
pub fn cover_inverse_probability(
    p: &Permutation,
    k: usize,
    c: usize,
    limits: &Limits,
) -> Result<BigRational> {
    let count = cover_inverse_count(p, k, c, limits)?;
    let denom = factorial(p.n()).pow(k as u32);
    let prob = BigRational::new(BigInt::from(count), BigInt::from(denom));
    debug_assert!(prob >= BigRational::zero() && prob <= BigRational::one());
    Ok(prob)
}

fn tuple_scan_guard(n: usize, k: usize, limits: &Limits) -> Result<u128> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("need n >= 1 and k >= 1".into()));
    }
    if n > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "symmetric-group enumeration",
            needed: n,
            limit: limits.max_enum_n,
        });
    }
    let fact: u128 = (2..=n as u128).product();
    let mut work: u128 = 1;
    for _ in 0..k {
        work = work.saturating_mul(fact);
    }
    let budget: u128 = 1 << 24;
    if work > budget {
        return Err(Error::SizeLimit {
            what: "brute-force tuple scan",
            needed: work.min(usize::MAX as u128) as usize,
            limit: budget as usize,
        });
    }
    Ok(fact)
}

/// Adjacency masks of `p` shared with each permutation of the group, in
/// enumeration order.
fn shared_masks(p: &Permutation) -> Vec<u64> {
    let elems = p.elements();
    let mut masks = Vec::new();
    crate::perm::for_each_permutation(p.n(), |x| {
        let mut xpos = vec![0u32; x.len() + 1];
        for (i, &v) in x.iter().enumerate() {
            xpos[v as usize] = i as u32;
        }
        let mut mask = 0u64;
        for i in 0..elems.len() - 1 {
            let (a, b) = (elems[i], elems[i + 1]);
            if xpos[a as usize].abs_diff(xpos[b as usize]) == 1 {
                mask |= 1 << i;
            }
        }
        masks.push(mask);
    });
    masks
}

/// Oracle: counts the cover-inverse tuples by scanning all of `S_n^k`.
pub fn cover_inverse_count_brute(
    p: &Permutation,
    k: usize,
    c: usize,
    limits: &Limits,
) -> Result<BigUint> {
    tuple_scan_guard(p.n(), k, limits)?;
    let masks = shared_masks(p);
    let full: u64 = if p.n() == 1 {
        0
    } else {
        (1u64 << (p.n() - 1)) - 1
    };
    let mut count = 0u64;
    let mut idx = vec![0usize; k];
    loop {
        let union = idx.iter().fold(0u64, |acc, &i| acc | masks[i]);
        if (full & !union).count_ones() as usize <= c {
            count += 1;
        }
        let mut bumped = false;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < masks.len() {
                bumped = true;
                break;
            }
            *slot = 0;
        }
        if !bumped {
            break;
        }
    }
    Ok(BigUint::from(count))
}

/// Oracle: counts the k-tuples whose element set has `p` as a breakpoint
/// median, scanning all of `S_n^k`. Tuples are reduced to their set of
/// distinct permutations before the median test.
pub fn median_inverse_count_brute(p: &Permutation, k: usize, limits: &Limits) -> Result<BigUint> {
    tuple_scan_guard(p.n(), k, limits)?;
    let perms: Vec<Permutation> = crate::perm::enumerate_permutations(p.n(), limits)?.collect();
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut count = 0u64;
    let mut idx = vec![0usize; k];
    loop {
        let mut key: Vec<usize> = idx.clone();
        key.sort_unstable();
        key.dedup();
        let hit = *memo.entry(key.clone()).or_insert_with(|| {
            let set: Vec<Permutation> = key.iter().map(|&i| perms[i].clone()).collect();
            let mu = median_value(&set, limits).expect("guarded above");
            total_distance(p, &set).expect("same length") == mu
        });
        if hit {
            count += 1;
        }
        let mut bumped = false;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < perms.len() {
                bumped = true;
                break;
            }
            *slot = 0;
        }
        if !bumped {
            break;
        }
    }
    Ok(BigUint::from(count))
}

/// Counts, over tuples whose entries are pairwise at maximum distance, the
/// median-inverse tuples and the slack-`c` cover-inverse tuples. At `c = 0`
/// the two counts coincide.
pub fn inverse_counts_on_max_distance(
    p: &Permutation,
    k: usize,
    c: usize,
    limits: &Limits,
) -> Result<(BigUint, BigUint)> {
    tuple_scan_guard(p.n(), k, limits)?;
    let n = p.n();
    let perms: Vec<Permutation> = crate::perm::enumerate_permutations(n, limits)?.collect();
    let masks = shared_masks(p);
    let full: u64 = if n == 1 { 0 } else { (1u64 << (n - 1)) - 1 };
    // pairwise distances, so the inner loop is a lookup
    let dist: Vec<Vec<u8>> = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| bp_distance(a, b).unwrap() as u8)
                .collect()
        })
        .collect();
    let max = (n - 1) as u8;
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut median_count = 0u64;
    let mut cover_count = 0u64;
    let mut idx = vec![0usize; k];
    loop {
        let extreme = (0..k).all(|a| (a + 1..k).all(|b| dist[idx[a]][idx[b]] == max));
        if extreme {
            let union = idx.iter().fold(0u64, |acc, &i| acc | masks[i]);
            if (full & !union).count_ones() as usize <= c {
                cover_count += 1;
            }
            let mut key: Vec<usize> = idx.clone();
            key.sort_unstable();
            key.dedup();
            let hit = *memo.entry(key.clone()).or_insert_with(|| {
                let set: Vec<Permutation> = key.iter().map(|&i| perms[i].clone()).collect();
                let mu = median_value(&set, limits).expect("guarded above");
                total_distance(p, &set).expect("same length") == mu
            });
            if hit {
                median_count += 1;
            }
        }
        let mut bumped = false;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < perms.len() {
                bumped = true;
                break;
            }
            *slot = 0;
        }
        if !bumped {
            break;
        }
    }
    Ok((BigUint::from(median_count), BigUint::from(cover_count)))
}
