//! Brute-force breakpoint medians, geodesic tests, and the coverage
//! criterion that characterizes medians of pairwise maximum-distance sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{
    bp_distance, common_adjacencies, for_each_class, is_max_distance_set, total_distance,
    AdjacencySet, Permutation,
};
use crate::Limits;

/// Exact median scan result. `medians` lists every minimizer of the total
/// distance, closed under reversal; `excess[i]` counts adjacencies of
/// `medians[i]` outside the union of the input adjacencies.
#[derive(Clone, Debug)]
pub struct MedianReport {
    pub mu: usize,
    pub medians: Vec<Permutation>,
    pub excess: Vec<usize>,
}

/// Evaluates total distances against a fixed target set without rebuilding
/// adjacency structures per candidate.
struct DistanceOracle {
    n: usize,
    positions: Vec<Vec<u32>>,
}

impl DistanceOracle {
    fn new(xs: &[Permutation]) -> Result<Self> {
        let first = xs
            .first()
            .ok_or_else(|| Error::InvalidInput("empty permutation list".into()))?;
        let n = first.n();
        for x in xs {
            if x.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: x.n(),
                });
            }
        }
        Ok(DistanceOracle {
            n,
            positions: xs.iter().map(Permutation::positions).collect(),
        })
    }

    fn total_distance(&self, candidate: &[u32]) -> usize {
        let mut total = self.positions.len() * (self.n - 1);
        for pos in &self.positions {
            for w in candidate.windows(2) {
                if pos[w[0] as usize].abs_diff(pos[w[1] as usize]) == 1 {
                    total -= 1;
                }
            }
        }
        total
    }
}

fn check_median_guard(n: usize, limits: &Limits) -> Result<()> {
    if n > limits.max_enum_n {
        return Err(Error::SizeLimit {
            what: "median scan",
            needed: n,
            limit: limits.max_enum_n,
        });
    }
    Ok(())
}

/// Minimum total distance to `xs` over the whole symmetric group.
pub fn median_value(xs: &[Permutation], limits: &Limits) -> Result<usize> {
    let oracle = DistanceOracle::new(xs)?;
    check_median_guard(oracle.n, limits)?;
    let mut best = usize::MAX;
    for_each_class(oracle.n, |cand| {
        let d = oracle.total_distance(cand);
        if d < best {
            best = d;
        }
    });
    Ok(best)
}

/// Scans reversal classes (distance is reversal-blind), then expands each
/// minimizing class to both orientations.
pub fn medians_brute(xs: &[Permutation], limits: &Limits) -> Result<MedianReport> {
    let oracle = DistanceOracle::new(xs)?;
    check_median_guard(oracle.n, limits)?;
    let mut best = usize::MAX;
    let mut reps: Vec<Permutation> = Vec::new();
    for_each_class(oracle.n, |cand| {
        let d = oracle.total_distance(cand);
        if d < best {
            best = d;
            reps.clear();
        }
        if d == best {
            reps.push(Permutation::new(cand.to_vec()).expect("scan yields valid permutations"));
        }
    });

    let union = union_adjacencies(xs)?;
    let mut medians = Vec::with_capacity(reps.len() * 2);
    for rep in reps {
        let rev = rep.reverse();
        if rev == rep {
            medians.push(rep);
        } else {
            medians.push(rep);
            medians.push(rev);
        }
    }
    let excess = medians
        .iter()
        .map(|m| m.adjacencies().difference(&union).len())
        .collect();
    Ok(MedianReport {
        mu: best,
        medians,
        excess,
    })
}

fn union_adjacencies(xs: &[Permutation]) -> Result<AdjacencySet> {
    let first = xs
        .first()
        .ok_or_else(|| Error::InvalidInput("empty permutation list".into()))?;
    let mut acc = AdjacencySet::empty(first.n());
    for x in xs {
        acc = acc.union(&x.adjacencies());
    }
    Ok(acc)
}

/// Whether `p` attains the median value of `xs`.
pub fn is_median(p: &Permutation, xs: &[Permutation], limits: &Limits) -> Result<bool> {
    let mu = median_value(xs, limits)?;
    Ok(total_distance(p, xs)? == mu)
}

/// Outcome of a geodesic test, with the adjacency-containment certificate.
#[derive(Clone, Debug)]
pub struct GeodesicCheck {
    pub geodesic: bool,
    /// `d(x, y) == d(x, z) + d(z, y)`.
    pub distance_identity: bool,
    /// Common adjacencies of the endpoints all appear in `z`.
    pub lower_ok: bool,
    /// Every adjacency of `z` appears in an endpoint.
    pub upper_ok: bool,
    /// Endpoint-common adjacencies missing from `z`.
    pub missing: AdjacencySet,
    /// Adjacencies of `z` outside both endpoints.
    pub extra: AdjacencySet,
}

impl fmt::Display for GeodesicCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.geodesic {
            return write!(f, "geodesic");
        }
        write!(f, "not geodesic:")?;
        if !self.lower_ok {
            write!(f, " endpoint-common adjacencies missing: {}", self.missing)?;
        }
        if !self.upper_ok {
            write!(f, " adjacencies outside both endpoints: {}", self.extra)?;
        }
        Ok(())
    }
}

/// Tests `d(x, y) = d(x, z) + d(z, y)` and, independently, the containment
/// characterization; the two must agree, which is asserted.
pub fn is_geodesic(z: &Permutation, x: &Permutation, y: &Permutation) -> Result<GeodesicCheck> {
    let dxy = bp_distance(x, y)?;
    let dxz = bp_distance(x, z)?;
    let dzy = bp_distance(z, y)?;
    let distance_identity = dxy == dxz + dzy;

    let az = z.adjacencies();
    let common = common_adjacencies(&[x.clone(), y.clone()])?;
    let union = x.adjacencies().union(&y.adjacencies());
    let missing = common.difference(&az);
    let extra = az.difference(&union);
    let lower_ok = missing.is_empty();
    let upper_ok = extra.is_empty();
    let by_containment = lower_ok && upper_ok;

    assert_eq!(
        distance_identity, by_containment,
        "geodesic characterizations disagree for z={z}, x={x}, y={y}"
    );
    Ok(GeodesicCheck {
        geodesic: distance_identity,
        distance_identity,
        lower_ok,
        upper_ok,
        missing,
        extra,
    })
}

/// `A_p` contained in the union of the adjacency sets of `xs`.
pub fn coverage_criterion(p: &Permutation, xs: &[Permutation]) -> Result<bool> {
    let union = union_adjacencies(xs)?;
    if p.n() != union.ambient() {
        return Err(Error::LengthMismatch {
            expected: union.ambient(),
            got: p.n(),
        });
    }
    Ok(p.adjacencies().is_subset(&union))
}

/// Comparison of the coverage-criterion set against the brute-force median
/// set for a pairwise maximum-distance input.
#[derive(Clone, Debug)]
pub struct ExtremeMedianCheck {
    pub coverage_set: Vec<Permutation>,
    pub medians: Vec<Permutation>,
    pub agree: bool,
}

/// Requires `xs` pairwise at distance `n - 1`; collects every permutation
/// satisfying the coverage criterion and every brute-force median, and
/// compares the two sets.
pub fn extreme_median_check(xs: &[Permutation], limits: &Limits) -> Result<ExtremeMedianCheck> {
    if !is_max_distance_set(xs)? {
        return Err(Error::InvalidInput(
            "input set is not pairwise at maximum distance".into(),
        ));
    }
    let oracle = DistanceOracle::new(xs)?;
    check_median_guard(oracle.n, limits)?;
    let union = union_adjacencies(xs)?;
    let mut coverage_set = Vec::new();
    crate::perm::for_each_permutation(oracle.n, |cand| {
        let covered = cand.windows(2).all(|w| union.contains(w[0], w[1]));
        if covered {
            coverage_set
                .push(Permutation::new(cand.to_vec()).expect("scan yields valid permutations"));
        }
    });
    let mut medians = medians_brute(xs, limits)?.medians;
    medians.sort();
    coverage_set.sort();
    let agree = coverage_set == medians;
    Ok(ExtremeMedianCheck {
        coverage_set,
        medians,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::enumerate_permutations;

    fn p(s: &str) -> Permutation {
        Permutation::parse(s).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn singleton_medians() {
        let q = p("2 3 1");
        let report = medians_brute(std::slice::from_ref(&q), &limits()).unwrap();
        assert_eq!(report.mu, 0);
        let mut medians = report.medians.clone();
        medians.sort();
        assert_eq!(medians, vec![p("1 3 2"), p("2 3 1")]);
        assert!(report.excess.iter().all(|&e| e == 0));
    }

    #[test]
    fn pair_medians_match_fixture() {
        let x = p("1 2 3");
        let y = p("1 3 2");
        let report = medians_brute(&[x, y], &limits()).unwrap();
        assert_eq!(report.mu, 1);
        assert_eq!(
            report.medians,
            vec![p("1 2 3"), p("3 2 1"), p("1 3 2"), p("2 3 1")]
        );
    }

    #[test]
    fn is_median_consistency() {
        let x = p("1 2 3 4");
        let y = p("2 4 1 3");
        let report = medians_brute(&[x.clone(), y.clone()], &limits()).unwrap();
        for m in &report.medians {
            assert!(is_median(m, &[x.clone(), y.clone()], &limits()).unwrap());
        }
        assert!(is_median(&x, std::slice::from_ref(&x), &limits()).unwrap());
    }

    #[test]
    fn geodesic_trivial_cases() {
        let x = p("3 1 4 2 5");
        let y = p("1 2 3 4 5");
        assert!(is_geodesic(&x, &x, &y).unwrap().geodesic);
        assert!(is_geodesic(&x.reverse(), &x, &y).unwrap().geodesic);
    }

    #[test]
    fn length_nine_pair_is_not_geodesic() {
        let id9 = Permutation::identity(9);
        let x = p("2 7 5 6 8 3 9 4 1");
        let z = p("6 8 9 3 4 1 2 7 5");
        assert_eq!(bp_distance(&id9, &x).unwrap(), 7);
        assert_eq!(bp_distance(&id9, &z).unwrap(), 5);
        assert_eq!(bp_distance(&z, &x).unwrap(), 3);

        let check = is_geodesic(&z, &id9, &x).unwrap();
        assert!(!check.geodesic);
        assert!(!check.lower_ok, "the {{5,6}} adjacency must be missing");
        assert!(check.missing.contains(5, 6));
        assert!(check.upper_ok, "every adjacency of z lies in an endpoint");

        // coverage holds even though z is not a median of the pair
        assert!(coverage_criterion(&z, &[id9.clone(), x.clone()]).unwrap());
        assert!(!is_median(&z, &[id9, x], &limits()).unwrap());

        // a permutation always covers itself
        assert!(coverage_criterion(&z, std::slice::from_ref(&z)).unwrap());
    }

    #[test]
    fn pair_medians_are_exactly_geodesics() {
        let lims = limits();
        for n in 2..=5 {
            let perms: Vec<_> = enumerate_permutations(n, &lims).unwrap().collect();
            for (i, x) in perms.iter().enumerate() {
                // unordered pairs; the two roles are symmetric
                for y in &perms[i..] {
                    let mut medians = medians_brute(&[x.clone(), y.clone()], &lims)
                        .unwrap()
                        .medians;
                    medians.sort();
                    let mut geos: Vec<_> = perms
                        .iter()
                        .filter(|z| is_geodesic(z, x, y).unwrap().geodesic)
                        .cloned()
                        .collect();
                    geos.sort();
                    assert_eq!(medians, geos, "x={x}, y={y}");
                }
            }
        }
    }

    #[test]
    fn median_translation_invariance() {
        use rand::SeedableRng;
        let lims = limits();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5 {
            for _ in 0..8 {
                let x = crate::randstats::uniform_permutation(n, &mut rng);
                let y = crate::randstats::uniform_permutation(n, &mut rng);
                let z = crate::randstats::uniform_permutation(n, &mut rng);
                let xs = [x.clone(), y.clone()];
                let translated: Vec<_> = xs.iter().map(|q| z.compose(q).unwrap()).collect();
                let before = medians_brute(&xs, &lims).unwrap();
                let after = medians_brute(&translated, &lims).unwrap();
                assert_eq!(before.mu, after.mu);
                let mut mapped: Vec<_> = before
                    .medians
                    .iter()
                    .map(|m| z.compose(m).unwrap())
                    .collect();
                mapped.sort();
                let mut got = after.medians.clone();
                got.sort();
                assert_eq!(mapped, got);
            }
        }
    }

    #[test]
    fn median_beats_every_input_point() {
        use rand::SeedableRng;
        let lims = limits();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for n in 2..=5 {
            for _ in 0..10 {
                let xs: Vec<_> = (0..3)
                    .map(|_| crate::randstats::uniform_permutation(n, &mut rng))
                    .collect();
                let report = medians_brute(&xs, &lims).unwrap();
                let best_input = xs
                    .iter()
                    .map(|x| total_distance(x, &xs).unwrap())
                    .min()
                    .unwrap();
                assert!(report.mu <= best_input);
                for m in &report.medians {
                    assert_eq!(total_distance(m, &xs).unwrap(), report.mu);
                }
            }
        }
    }

    #[test]
    fn extreme_check_requires_max_distance() {
        let xs = [p("1 2 3"), p("2 1 3")];
        assert!(matches!(
            extreme_median_check(&xs, &limits()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn extreme_check_on_a_max_distance_pair() {
        let xs = [p("1 2 3 4"), p("2 4 1 3")];
        let check = extreme_median_check(&xs, &limits()).unwrap();
        assert!(check.agree);
        assert!(!check.medians.is_empty());
    }

    #[test]
    fn guard_rejects_large_scans() {
        let lims = Limits::with_max_n(4);
        let xs = [Permutation::identity(5)];
        assert!(matches!(
            medians_brute(&xs, &lims),
            Err(Error::SizeLimit { .. })
        ));
    }
}
