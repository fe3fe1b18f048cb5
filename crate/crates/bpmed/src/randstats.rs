//! Exact moments of the breakpoint distance to a uniform random
//! permutation, and seeded Monte-Carlo estimators with deterministic
//! per-trial substreams.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::median::median_value;
use crate::perm::{for_each_permutation, total_distance, Permutation};
use crate::Limits;

/// Exact closed-form moments for one uniform draw at size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSummary {
    pub n: usize,
    /// Expected number of adjacencies shared with a fixed permutation.
    pub expected_common: BigRational,
    /// Expected breakpoint distance, `n - 1 - expected_common`.
    pub expected_distance: BigRational,
    /// Variance of the distance (equals the variance of the shared count).
    pub variance: BigRational,
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// exact in BigInt so very large n cannot overflow the products
fn require_n_at_least_two(n: usize) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "closed-form moments need n >= 2".into(),
        ));
    }
    Ok(BigInt::from(n))
}

/// `2(n-1)/n`, the expected number of shared adjacencies.
pub fn expected_common_closed(n: usize) -> Result<BigRational> {
    let n = require_n_at_least_two(n)?;
    Ok(BigRational::new(2 * (&n - 1), n))
}

/// `n - 1 - 2(n-1)/n`.
pub fn expected_distance_closed(n: usize) -> Result<BigRational> {
    let n_int = require_n_at_least_two(n)?;
    Ok(BigRational::from(n_int - 1) - expected_common_closed(n)?)
}

/// `(2 - 2/n)(-1 + 2/n) + 4(n-2)^2 / (n(n-1))`.
pub fn variance_distance_closed(n: usize) -> Result<BigRational> {
    let n = require_n_at_least_two(n)?;
    let inv2 = BigRational::new(BigInt::from(2), n.clone());
    let first = (ratio(2, 1) - inv2.clone()) * (ratio(-1, 1) + inv2);
    let second = BigRational::new(4 * (&n - 2) * (&n - 2), (&n - 1) * &n);
    Ok(first + second)
}

/// The expanded variance form `E(1 - E) + 4(n-2)(n-3)/(n(n-1)) +
/// 4(n-2)/(n(n-1))`; algebraically equal to the closed form.
pub(crate) fn variance_distance_expanded(n: usize) -> Result<BigRational> {
    let n = require_n_at_least_two(n)?;
    let e = BigRational::new(2 * (&n - 1), n.clone());
    let den: BigInt = (&n - 1) * &n;
    Ok(e.clone() * (BigRational::one() - e)
        + BigRational::new(4 * (&n - 2) * (&n - 3), den.clone())
        + BigRational::new(4 * (&n - 2), den))
}

pub fn moments_closed(n: usize) -> Result<MomentSummary> {
    Ok(MomentSummary {
        n,
        expected_common: expected_common_closed(n)?,
        expected_distance: expected_distance_closed(n)?,
        variance: variance_distance_closed(n)?,
    })
}

/// Exact population mean and variance of the shared-adjacency count by
/// enumerating the whole group. Independent oracle for the closed forms.
pub fn moments_exhaustive(n: usize, limits: &Limits) -> Result<(BigRational, BigRational)> {
    if n > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "symmetric-group enumeration",
            needed: n,
            limit: limits.max_enum_n,
        });
    }
    let mut s1: u128 = 0;
    let mut s2: u128 = 0;
    let mut count: u128 = 0;
    for_each_permutation(n, |x| {
        let a = x.windows(2).filter(|w| w[0].abs_diff(w[1]) == 1).count() as u128;
        s1 += a;
        s2 += a * a;
        count += 1;
    });
    let total = BigInt::from(count);
    let mean = BigRational::new(BigInt::from(s1), total.clone());
    let second = BigRational::new(BigInt::from(s2), total);
    let variance = second - mean.clone() * mean.clone();
    Ok((mean, variance))
}

/// Deterministic RNG for one trial: the stream index rides on a fixed seed,
/// so results do not depend on how trials are scheduled across workers.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Exactly uniform sample from the symmetric group (Fisher-Yates with
/// unbiased bounded sampling).
pub fn uniform_permutation(n: usize, rng: &mut impl Rng) -> Permutation {
    let mut elems: Vec<u32> = (1..=n as u32).collect();
    shuffle(&mut elems, rng);
    Permutation::new(elems).expect("shuffle preserves validity")
}

fn shuffle(elems: &mut [u32], rng: &mut impl Rng) {
    for i in (1..elems.len()).rev() {
        let j = rng.gen_range(0..=i);
        elems.swap(i, j);
    }
}

/// Number of adjacencies a fresh uniform draw shares with the identity.
fn sample_shared_count(n: usize, rng: &mut impl Rng) -> u64 {
    let mut elems: Vec<u32> = (1..=n as u32).collect();
    shuffle(&mut elems, rng);
    elems
        .windows(2)
        .filter(|w| w[0].abs_diff(w[1]) == 1)
        .count() as u64
}

/// Seeded Monte-Carlo run description. Identical configs give bit-identical
/// results regardless of the worker count.
#[derive(Clone, Copy, Debug)]
pub struct TrialConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidInput("need at least one trial".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("need n >= 1".into()));
        }
        Ok(TrialConfig { n, trials, seed })
    }
}

/// Monte-Carlo estimates of the shared-adjacency moments with standard
/// errors and z-scores against the closed forms.
#[derive(Clone, Debug)]
pub struct McMoments {
    pub config: TrialConfig,
    pub mean: f64,
    pub variance: f64,
    pub closed_mean: f64,
    pub closed_variance: f64,
    pub stderr_mean: Option<f64>,
    pub z_mean: Option<f64>,
    pub stderr_variance: Option<f64>,
    pub z_variance: Option<f64>,
}

pub fn mc_moments(config: &TrialConfig) -> Result<McMoments> {
    let closed_mean_rat = expected_common_closed(config.n)?;
    let closed_var_rat = variance_distance_closed(config.n)?;
    let (n, trials, seed) = (config.n, config.trials, config.seed);

    // exact integer power sums, order-independent under any partitioning
    let sums = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let a = sample_shared_count(n, &mut rng) as u128;
            [a, a * a, a * a * a, a * a * a * a]
        })
        .reduce(
            || [0u128; 4],
            |x, y| [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]],
        );

    let t = trials as f64;
    let s1 = sums[0] as f64;
    let s2 = sums[1] as f64;
    let s3 = sums[2] as f64;
    let s4 = sums[3] as f64;
    let mean = s1 / t;
    let closed_mean = closed_mean_rat.to_f64().unwrap();
    let closed_variance = closed_var_rat.to_f64().unwrap();

    let (variance, stderr_mean, z_mean, stderr_variance, z_variance) = if trials > 1 {
        let sample_var = (s2 - t * mean * mean) / (t - 1.0);
        let se_mean = (sample_var / t).sqrt();
        let z_mean = if se_mean > 0.0 {
            Some((mean - closed_mean) / se_mean)
        } else if mean == closed_mean {
            Some(0.0)
        } else {
            None
        };
        // fourth central moment for the large-sample variance of s^2
        let m4 = (s4 - 4.0 * mean * s3 + 6.0 * mean * mean * s2 - 3.0 * t * mean.powi(4)) / t;
        let var_of_var = (m4 - sample_var * sample_var * (t - 3.0) / (t - 1.0)) / t;
        let se_var = if var_of_var > 0.0 {
            Some(var_of_var.sqrt())
        } else {
            None
        };
        let z_var = se_var.map(|se| (sample_var - closed_variance) / se);
        (sample_var, Some(se_mean), z_mean, se_var, z_var)
    } else {
        (f64::NAN, None, None, None, None)
    };

    Ok(McMoments {
        config: *config,
        mean,
        variance,
        closed_mean,
        closed_variance,
        stderr_mean,
        z_mean,
        stderr_variance,
        z_variance,
    })
}

/// Empirical tail of the shared-adjacency count against a threshold, with
/// the Chebyshev bound from the exact moments.
#[derive(Clone, Debug)]
pub struct TailReport {
    pub config: TrialConfig,
    pub threshold: f64,
    pub hits: u64,
    pub fraction: f64,
    pub stderr: Option<f64>,
    /// `min(1, var / (threshold - mean)^2)` when the threshold exceeds the
    /// mean, else the trivial bound 1.
    pub chebyshev_bound: f64,
}

/// Fraction of trials whose shared-adjacency count reaches
/// `epsilon * a_n`.
pub fn tail_fraction(config: &TrialConfig, epsilon: f64, a_n: f64) -> Result<TailReport> {
    if a_n.is_nan() || a_n <= 0.0 {
        return Err(Error::InvalidInput(
            "threshold sequence must be positive".into(),
        ));
    }
    let threshold = epsilon * a_n;
    let (n, trials, seed) = (config.n, config.trials, config.seed);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let a = sample_shared_count(n, &mut rng) as f64;
            u64::from(a >= threshold)
        })
        .sum();
    let fraction = hits as f64 / trials as f64;
    let stderr = if trials > 1 {
        Some((fraction * (1.0 - fraction) / trials as f64).sqrt())
    } else {
        None
    };
    let mean = expected_common_closed(n)?.to_f64().unwrap();
    let var = variance_distance_closed(n)?.to_f64().unwrap();
    let chebyshev_bound = if threshold > mean {
        (var / ((threshold - mean) * (threshold - mean))).min(1.0)
    } else {
        1.0
    };
    Ok(TailReport {
        config: *config,
        threshold,
        hits,
        fraction,
        stderr,
        chebyshev_bound,
    })
}

/// Monte-Carlo estimate of the probability that `p` is a median of `k`
/// uniform independent draws.
#[derive(Clone, Debug)]
pub struct McMedianEstimate {
    pub config: TrialConfig,
    pub k: usize,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    /// Largest number of adjacencies of `p` outside the sampled union seen
    /// across trials.
    pub max_observed_excess: usize,
}

/// Per trial, draws `k` permutations, reduces them to their set of distinct
/// values, and tests `p` for medianness exactly.
pub fn mc_median_probability(
    p: &Permutation,
    k: usize,
    config: &TrialConfig,
    limits: &Limits,
) -> Result<McMedianEstimate> {
    if k == 0 {
        return Err(Error::InvalidInput("need k >= 1".into()));
    }
    if config.n != p.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            got: config.n,
        });
    }
    if p.n() > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "median scan",
            needed: p.n(),
            limit: limits.max_enum_n,
        });
    }
    let (n, trials, seed) = (config.n, config.trials, config.seed);
    let (hits, max_excess) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut xs: Vec<Permutation> =
                (0..k).map(|_| uniform_permutation(n, &mut rng)).collect();
            xs.sort();
            xs.dedup();
            let excess = crate::inverse::median_excess(p, &xs).expect("same length");
            let mu = median_value(&xs, limits).expect("guarded above");
            let hit = total_distance(p, &xs).expect("same length") == mu;
            (u64::from(hit), excess)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    let estimate = hits as f64 / trials as f64;
    let stderr = if trials > 1 {
        Some((estimate * (1.0 - estimate) / trials as f64).sqrt())
    } else {
        None
    };
    Ok(McMedianEstimate {
        config: *config,
        k,
        hits,
        estimate,
        stderr,
        max_observed_excess: max_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::{cover_inverse_probability, median_inverse_count_brute};

    #[test]
    fn closed_forms_small_n() {
        assert_eq!(expected_common_closed(3).unwrap(), ratio(4, 3));
        assert_eq!(variance_distance_closed(3).unwrap(), ratio(2, 9));
        assert_eq!(expected_common_closed(2).unwrap(), ratio(1, 1));
        assert_eq!(variance_distance_closed(2).unwrap(), ratio(0, 1));
        assert_eq!(
            expected_distance_closed(3).unwrap(),
            ratio(2, 1) - ratio(4, 3)
        );
        assert!(expected_common_closed(1).is_err());
        assert!(variance_distance_closed(0).is_err());
    }

    #[test]
    fn closed_forms_match_exhaustive_enumeration() {
        let limits = Limits::default();
        for n in 2..=6 {
            let (mean, var) = moments_exhaustive(n, &limits).unwrap();
            assert_eq!(mean, expected_common_closed(n).unwrap(), "n={n}");
            assert_eq!(var, variance_distance_closed(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn variance_forms_agree() {
        for n in 2..=50 {
            assert_eq!(
                variance_distance_closed(n).unwrap(),
                variance_distance_expanded(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn limits_approached_at_large_n() {
        let n = 1_000_000;
        let mean = expected_common_closed(n).unwrap().to_f64().unwrap();
        let var = variance_distance_closed(n).unwrap().to_f64().unwrap();
        assert!((mean - 2.0).abs() < 1e-4);
        assert!((var - 2.0).abs() < 1e-4);
    }

    #[test]
    fn substreams_are_deterministic() {
        let a = uniform_permutation(6, &mut trial_rng(42, 7));
        let b = uniform_permutation(6, &mut trial_rng(42, 7));
        assert_eq!(a, b);
        let c = uniform_permutation(6, &mut trial_rng(42, 8));
        assert_ne!(a, c, "distinct trial indices should rarely collide here");
        assert_eq!(
            uniform_permutation(1, &mut trial_rng(1, 1)).elements(),
            &[1]
        );
    }

    #[test]
    fn chi_square_uniformity_over_s4() {
        // Lehmer-code ranks of a million draws against the uniform law;
        // dof = 23, upper critical value at significance 1e-3 is 49.728.
        let draws = 1_000_000u64;
        let mut counts = [0u64; 24];
        for i in 0..draws {
            let mut rng = trial_rng(12345, i);
            let p = uniform_permutation(4, &mut rng);
            let e = p.elements();
            let mut rank = 0usize;
            let factorials = [6, 2, 1];
            for pos in 0..3 {
                let smaller = e[pos + 1..].iter().filter(|&&v| v < e[pos]).count();
                rank += smaller * factorials[pos];
            }
            counts[rank] += 1;
        }
        let expected = draws as f64 / 24.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 49.728, "chi-square statistic {chi2} too large");
    }

    #[test]
    fn mc_moments_hit_closed_forms() {
        let cfg = TrialConfig::new(3, 100_000, 2024).unwrap();
        let m = mc_moments(&cfg).unwrap();
        assert!(m.z_mean.unwrap().abs() < 4.0, "z = {:?}", m.z_mean);

        let cfg = TrialConfig::new(100, 100_000, 2024).unwrap();
        let m = mc_moments(&cfg).unwrap();
        assert!(m.z_mean.unwrap().abs() < 4.0, "z = {:?}", m.z_mean);
        assert!((m.closed_mean - 1.98).abs() < 1e-12);
    }

    #[test]
    fn single_trial_has_no_stderr() {
        let cfg = TrialConfig::new(5, 1, 9).unwrap();
        let m = mc_moments(&cfg).unwrap();
        assert!(m.stderr_mean.is_none());
        assert!(m.z_mean.is_none());
    }

    #[test]
    fn mc_results_independent_of_worker_count() {
        let cfg = TrialConfig::new(8, 20_000, 77).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_moments(&cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mc_moments(&cfg).unwrap());
        assert_eq!(single.mean.to_bits(), many.mean.to_bits());
        assert_eq!(single.variance.to_bits(), many.variance.to_bits());
    }

    #[test]
    fn tail_edge_cases() {
        let cfg = TrialConfig::new(6, 500, 5).unwrap();
        // threshold above the maximum possible count
        let r = tail_fraction(&cfg, 1.0, 100.0).unwrap();
        assert_eq!(r.hits, 0);
        // non-positive threshold: every trial qualifies
        let r = tail_fraction(&cfg, -1.0, 3.0).unwrap();
        assert_eq!(r.hits, 500);
        assert_eq!(r.fraction, 1.0);
        assert!(tail_fraction(&cfg, 1.0, 0.0).is_err());
    }

    #[test]
    fn tail_fractions_shrink_with_n() {
        let mut last = u64::MAX;
        for n in [64usize, 256, 1024] {
            let cfg = TrialConfig::new(n, 20_000, 314).unwrap();
            let a_n = (n as f64).log2();
            let r = tail_fraction(&cfg, 1.0, a_n).unwrap();
            assert!(r.hits < last, "n={n}: {} !< {last}", r.hits);
            last = r.hits;
        }
    }

    #[test]
    fn mc_median_probability_matches_brute_force() {
        let limits = Limits::default();
        let id3 = Permutation::identity(3);
        let cfg = TrialConfig::new(3, 100_000, 99).unwrap();
        let est = mc_median_probability(&id3, 2, &cfg, &limits).unwrap();
        let exact = median_inverse_count_brute(&id3, 2, &limits).unwrap();
        let exact = crate::counting::to_u128(&exact).unwrap() as f64 / 36.0;
        let se = est.stderr.unwrap();
        assert!(
            (est.estimate - exact).abs() <= 4.0 * se,
            "estimate {} vs exact {exact}",
            est.estimate
        );
        // the cover-inverse probability dominates the median probability
        let cover = cover_inverse_probability(&id3, 2, 0, &limits)
            .unwrap()
            .to_f64()
            .unwrap();
        assert!(est.estimate <= cover + 4.0 * se);
    }

    #[test]
    fn mc_median_k1_reduces_to_reversal_class() {
        let limits = Limits::default();
        let id4 = Permutation::identity(4);
        let cfg = TrialConfig::new(4, 50_000, 17).unwrap();
        let est = mc_median_probability(&id4, 1, &cfg, &limits).unwrap();
        let exact = 2.0 / 24.0;
        assert!((est.estimate - exact).abs() <= 4.0 * est.stderr.unwrap());
        assert!(est.max_observed_excess > 0);
    }
}
