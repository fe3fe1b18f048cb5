//! Exact big-integer counting: permutations containing a segment set, and
//! the number of permutations sharing exactly a given adjacency set with a
//! host — by brute force, by inclusion-exclusion over supersets, and by the
//! closed form summed over gap profiles.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::perm::{for_each_permutation, Permutation};
use crate::segment::{enumerate_profiles, GapDecomposition, GapProfile, PlacementRule, SegmentSet};
use crate::slots::{runs as mask_runs, HostSlots};
use crate::Limits;

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n as u64 {
        acc *= i;
    }
    acc
}

/// Binomial coefficient with the out-of-range convention `C(n, k) = 0` for
/// `k < 0`, `n < 0`, or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if k < 0 || n < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// Number of permutations of `1..=n` whose adjacencies contain the segment
/// set: `2^components * (n - adjacencies)!`.
pub fn permutations_containing(j: &SegmentSet, n: usize) -> Result<BigUint> {
    if j.ambient() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: j.ambient(),
        });
    }
    if n == 0 || j.adjacency_count() > n - 1 {
        return Err(Error::InvalidInput(format!(
            "segment set with {} adjacencies cannot fit a permutation of length {n}",
            j.adjacency_count()
        )));
    }
    Ok((BigUint::one() << j.component_count() as u32) * factorial(n - j.adjacency_count()))
}

/// The same count computed from a gap profile of a superset `J` of `base`:
/// `2^{‖base‖ + runs - flags} * (n - |base| - taken)!`, since the superset
/// has `‖base‖ + runs - flags` segments and `|base| + taken` adjacencies.
/// Must agree with [`permutations_containing`] applied to any `J` realizing
/// the profile.
pub fn permutations_containing_profiled(
    base: &SegmentSet,
    profile: &GapProfile,
    n: usize,
) -> Result<BigUint> {
    profile.validate()?;
    if profile.entries().len() != base.component_count() + 1 {
        return Err(Error::InconsistentProfile(format!(
            "{} entries for a base with {} components",
            profile.entries().len(),
            base.component_count()
        )));
    }
    let gap_total: usize = profile.gap_lens().iter().sum();
    if n == 0 || base.adjacency_count() + gap_total != n - 1 {
        return Err(Error::InconsistentProfile(format!(
            "gap lengths sum to {gap_total}, expected {}",
            n - 1 - base.adjacency_count().min(n - 1)
        )));
    }
    let exponent = base.component_count() + profile.runs_total() - profile.flag_total();
    let remaining = n - base.adjacency_count() - profile.taken_total();
    Ok((BigUint::one() << exponent as u32) * factorial(remaining))
}

fn host_mask_of<'a>(p: &'a Permutation, base: &SegmentSet) -> Result<(HostSlots<'a>, u64)> {
    if base.ambient() != p.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            got: base.ambient(),
        });
    }
    let slots = HostSlots::new(p);
    let mask = slots.mask_of_segments(base).ok_or_else(|| {
        Error::NotContained(format!("{base} is not contained in the adjacencies of {p}"))
    })?;
    Ok((slots, mask))
}

/// Number of permutations `x` with `common_adjacencies(host, x)` exactly
/// equal to `base`, by scanning the whole symmetric group.
pub fn count_exact_common_brute(
    host: &Permutation,
    base: &SegmentSet,
    limits: &Limits,
) -> Result<BigUint> {
    let n = host.n();
    host_mask_of(host, base)?;
    if n > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "symmetric-group enumeration",
            needed: n,
            limit: limits.max_enum_n,
        });
    }
    let target = base.adjacencies();
    let pos = host.positions();
    let mut count = 0u64;
    for_each_permutation(n, |x| {
        let mut shared = 0usize;
        let mut all_in_target = true;
        for w in x.windows(2) {
            if pos[w[0] as usize].abs_diff(pos[w[1] as usize]) == 1 {
                shared += 1;
                if !target.contains(w[0], w[1]) {
                    all_in_target = false;
                    break;
                }
            }
        }
        if all_in_target && shared == target.len() {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// The same count as an alternating sum over all supersets `J` of `base`
/// inside the host's adjacencies.
pub fn count_exact_common_inclusion_exclusion(
    host: &Permutation,
    base: &SegmentSet,
    limits: &Limits,
) -> Result<BigUint> {
    let n = host.n();
    let (_, base_mask) = host_mask_of(host, base)?;
    let free_bits = (n - 1) - base.adjacency_count();
    if free_bits > limits.max_free_bits {
        return Err(Error::SizeLimit {
            what: "superset sum",
            needed: free_bits,
            limit: limits.max_free_bits,
        });
    }
    let slots = HostSlots::new(host);
    let free = slots.full_mask() & !base_mask;
    let mut acc = BigInt::zero();
    let mut sub = free;
    loop {
        let j_mask = base_mask | sub;
        let term = BigInt::from(
            (BigUint::one() << mask_runs(j_mask) as u32)
                * factorial(n - j_mask.count_ones() as usize),
        );
        if sub.count_ones().is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    debug_assert!(!acc.is_negative());
    acc.to_biguint()
        .ok_or_else(|| Error::InvalidInput("alternating sum went negative".into()))
}

/// The same count via the closed form: an alternating sum over gap profiles
/// of placement counts times superset-containment counts.
///
/// With [`PlacementRule::EndAware`] this equals the brute-force count on
/// every input. [`PlacementRule::BoundaryFlags`] evaluates the flag-only
/// placement formula instead and disagrees wherever a counted run touches an
/// outer end of the host (e.g. host `1 2 3 4 5` with base `[1,2]`).
pub fn count_exact_common_profiled(
    host: &Permutation,
    base: &SegmentSet,
    rule: PlacementRule,
) -> Result<BigUint> {
    let n = host.n();
    let gd = GapDecomposition::new(host, base)?;
    let mut acc = BigInt::zero();
    for profile in enumerate_profiles(&gd) {
        let placements = profile.placements(rule);
        if placements.is_zero() {
            continue;
        }
        let contained = permutations_containing_profiled(base, &profile, n)?;
        let term = BigInt::from(placements * contained);
        if profile.taken_total() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.to_biguint().ok_or_else(|| {
        Error::InvalidInput(format!(
            "profile sum for host {host}, base {base} went negative ({acc})"
        ))
    })
}

/// Exact-common counts for every subset of the host's adjacencies at once,
/// indexed by slot mask: the superset Mobius transform of the containment
/// counts. Entry `m` equals `count_exact_common(host, subset m)`.
pub(crate) fn exact_common_table(host: &Permutation) -> Vec<BigUint> {
    let bits = host.n() - 1;
    let size = 1usize << bits;
    let mut table: Vec<BigInt> = (0..size)
        .map(|mask| {
            BigInt::from(
                (BigUint::one() << mask_runs(mask as u64) as u32)
                    * factorial(host.n() - (mask as u64).count_ones() as usize),
            )
        })
        .collect();
    for bit in 0..bits {
        for mask in 0..size {
            if mask >> bit & 1 == 0 {
                let upper = table[mask | (1 << bit)].clone();
                table[mask] -= upper;
            }
        }
    }
    table
        .into_iter()
        .map(|v| {
            debug_assert!(!v.is_negative());
            v.to_biguint().expect("exact-common counts are nonnegative")
        })
        .collect()
}

/// Fixed-precision decimal rendering of an exact nonnegative rational.
pub fn decimal_string(num: &BigUint, den: &BigUint, digits: usize) -> String {
    assert!(!den.is_zero());
    let int = num / den;
    let mut rem = num - &int * den;
    let mut out = int.to_string();
    if digits == 0 {
        return out;
    }
    out.push('.');
    let ten = BigUint::from(10u8);
    for _ in 0..digits {
        rem *= &ten;
        let digit = &rem / den;
        out.push_str(&digit.to_string());
        rem -= &digit * den;
    }
    out
}

/// Convenience wrapper: both parts of a reduced ratio as decimal text.
pub fn ratio_decimal(r: &num_rational::BigRational, digits: usize) -> String {
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let text = decimal_string(&num, &den, digits);
    if r.numer().is_negative() {
        format!("-{text}")
    } else {
        text
    }
}

/// Used by tests and the CLI to compare counts without bigint plumbing.
pub fn to_u128(v: &BigUint) -> Option<u128> {
    v.to_u128()
}
