//! `bpmed` — exact breakpoint-median combinatorics on permutations.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use bpmed::counting::{
    count_exact_common_brute, count_exact_common_inclusion_exclusion, count_exact_common_profiled,
    ratio_decimal,
};
use bpmed::error::Error;
use bpmed::inverse::{
    cover_inverse_count, cover_inverse_count_brute, cover_inverse_probability, cover_tuples,
    inverse_counts_on_max_distance, median_excess, median_inverse_count_brute,
    shared_adjacency_table, within_slack,
};
use bpmed::median::{is_geodesic, is_median, medians_brute};
use bpmed::perm::{
    bp_distance, common_adjacencies, parse_permutation_lines, total_distance, AdjacencySet,
    Permutation,
};
use bpmed::randstats::{
    mc_median_probability, mc_moments, moments_closed, tail_fraction, TrialConfig,
};
use bpmed::segment::{consistent, union_segment_sets, PlacementRule, SegmentSet};
use bpmed::verify::{run_with, CriterionResult, Level, VerifyOptions};
use bpmed::Limits;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 2;
const EXIT_SIZE_LIMIT: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bpmed",
    version,
    about = "Exact breakpoint-median combinatorics: distances, medians, inverse counts, probabilities",
    after_help = "Permutations are written as space- or comma-separated integers (\"2 7 5 6 8 3 9 4 1\"). \
Segment sets use bracketed runs and/or braced pairs (\"[1,2,3] [5,6]\", \"{1,2} {2,3}\"). \
Files hold one permutation per line; '#' starts a comment. \
BPMED_MAX_N overrides the default enumeration guard (9)."
)]
struct Cli {
    /// Cap for full symmetric-group scans (overrides BPMED_MAX_N)
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Worker threads for data-parallel operations
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adjacency set of one permutation, common adjacencies of several, or
    /// consistency/union of two segment sets
    Adj {
        /// Permutations (one or more)
        perms: Vec<String>,
        /// Two segment sets to test for consistency and merge
        #[arg(long, num_args = 2, conflicts_with = "perms")]
        segments: Option<Vec<String>>,
        /// Ground-set size for --segments
        #[arg(long)]
        n: Option<usize>,
    },
    /// Breakpoint distance of two permutations, or total distance to a set
    Dist {
        /// Two permutations
        perms: Vec<String>,
        /// Base permutation for total distance
        #[arg(long, requires = "x_file", conflicts_with = "perms")]
        pi: Option<String>,
        /// File of permutations
        #[arg(long = "X", value_name = "FILE")]
        x_file: Option<String>,
    },
    /// Exact medians of a set of permutations by exhaustive scan
    Median {
        /// Permutations (alternative to --X)
        perms: Vec<String>,
        /// File of permutations
        #[arg(long = "X", value_name = "FILE")]
        x_file: Option<String>,
        /// Also report whether this permutation is a median
        #[arg(long)]
        pi: Option<String>,
    },
    /// Test whether Z lies on a geodesic between X and Y
    Geodesic { z: String, x: String, y: String },
    /// Split common adjacencies of a set by the subset sharing them exactly
    Bdecomp {
        /// File of permutations (at least two)
        #[arg(long = "X", value_name = "FILE", required = true)]
        x_file: String,
        /// Also report overlaps of this permutation with each cell
        #[arg(long)]
        pi: Option<String>,
    },
    /// Excess of a permutation over a set's adjacency union, with bounds
    Bound {
        #[arg(long, required = true)]
        pi: String,
        #[arg(long = "X", value_name = "FILE", required = true)]
        x_file: String,
        /// Also report whether the excess stays within this slack
        #[arg(long)]
        c: Option<usize>,
    },
    /// Count permutations sharing exactly a given adjacency set with --pi
    Hcount {
        #[arg(long, required = true)]
        pi: String,
        /// The exact shared set (segment-set syntax)
        #[arg(long = "I", default_value = "")]
        base: String,
        #[arg(long, value_enum, default_value_t = HcountMethod::All)]
        method: HcountMethod,
        /// Use the flag-only placement rule in the profile-sum route
        /// (audit mode; undercounts runs touching the host's outer ends)
        #[arg(long)]
        boundary_flags: bool,
    },
    /// Enumerate k-tuples of segment sets covering --pi up to slack c
    Covers {
        #[arg(long, required = true)]
        pi: String,
        #[arg(long, required = true)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Print at most this many tuples (all are always counted)
        #[arg(long, default_value_t = 50)]
        list_limit: usize,
    },
    /// Exact size of the slack-c cover-inverse tuple set
    LinvCount {
        #[arg(long, required = true)]
        pi: String,
        #[arg(long, required = true)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Recompute by scanning all tuples instead of the closed form
        #[arg(long)]
        brute: bool,
    },
    /// Probability that k uniform draws land in the slack-c cover-inverse set
    LinvProb {
        #[arg(long, required = true)]
        pi: String,
        #[arg(long, required = true)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Expected length (checked against --pi)
        #[arg(long)]
        n: Option<usize>,
    },
    /// Brute-force size of the k-median-inverse tuple set
    MinvBrute {
        #[arg(long, required = true)]
        pi: String,
        #[arg(long, required = true)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Restrict to pairwise maximum-distance tuples and report both the
        /// median-inverse and cover-inverse counts
        #[arg(long)]
        restrict_v: bool,
    },
    /// Closed-form moments of the distance to a uniform random permutation
    Moments {
        #[arg(long, required = true)]
        n: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Monte-Carlo estimators: shared-adjacency moments, or (with --pi and
    /// --k) the probability that --pi is a median of k uniform draws
    Mc {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, requires = "pi")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        pi: Option<String>,
        /// Slack for the exact cover-probability comparison row
        #[arg(long, default_value_t = 0)]
        c: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Empirical tail of the shared-adjacency count against epsilon * a_n
    Tail {
        /// One or more sizes (repeat the flag)
        #[arg(long = "n", required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Threshold sequence value; defaults to log2(n) per size
        #[arg(long)]
        a_n: Option<f64>,
        #[arg(long)]
        csv: bool,
    },
    /// Run the cross-validation suite
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
        level: VerifyLevel,
        /// Force the flag-only placement rule to demonstrate the documented
        /// boundary undercount (the suite then fails)
        #[arg(long)]
        boundary_flags: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HcountMethod {
    Brute,
    Ie,
    Type,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // best effort; a second initialization in-process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::SizeLimit { .. } => EXIT_SIZE_LIMIT,
                _ => EXIT_INVALID,
            })
        }
    }
}

fn limits_for(cli: &Cli) -> Limits {
    let env_max = std::env::var("BPMED_MAX_N")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    match cli.max_n.or(env_max) {
        Some(n) => Limits::with_max_n(n),
        None => Limits::default(),
    }
}

fn parse_perm(text: &str) -> Result<Permutation, Error> {
    Permutation::parse(text)
}

fn read_perm_file(path: &str) -> Result<Vec<Permutation>, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
    parse_permutation_lines(&text)
}

fn gather_perms(perms: &[String], x_file: &Option<String>) -> Result<Vec<Permutation>, Error> {
    let mut out = Vec::new();
    for s in perms {
        out.push(parse_perm(s)?);
    }
    if let Some(path) = x_file {
        out.extend(read_perm_file(path)?);
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(
            "no permutations given (positional or --X file)".into(),
        ));
    }
    Ok(out)
}

fn adjacency_json(set: &AdjacencySet) -> Value {
    Value::Array(set.iter().map(|(a, b)| json!([a, b])).collect())
}

fn segset_json(set: &SegmentSet) -> Value {
    Value::Array(
        set.components()
            .iter()
            .map(|s| Value::Array(s.nodes().iter().map(|&v| json!(v)).collect()))
            .collect(),
    )
}

fn emit(json_mode: bool, human: &[String], value: Value) {
    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else {
        for line in human {
            println!("{line}");
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let limits = limits_for(cli);
    match &cli.command {
        Command::Adj { perms, segments, n } => cmd_adj(cli, perms, segments, *n),
        Command::Dist { perms, pi, x_file } => cmd_dist(cli, perms, pi, x_file),
        Command::Median { perms, x_file, pi } => cmd_median(cli, &limits, perms, x_file, pi),
        Command::Geodesic { z, x, y } => cmd_geodesic(cli, z, x, y),
        Command::Bdecomp { x_file, pi } => cmd_bdecomp(cli, x_file, pi),
        Command::Bound { pi, x_file, c } => cmd_bound(cli, pi, x_file, *c),
        Command::Hcount {
            pi,
            base,
            method,
            boundary_flags,
        } => cmd_hcount(cli, &limits, pi, base, *method, *boundary_flags),
        Command::Covers {
            pi,
            k,
            c,
            list_limit,
        } => cmd_covers(cli, &limits, pi, *k, *c, *list_limit),
        Command::LinvCount { pi, k, c, brute } => cmd_linv_count(cli, &limits, pi, *k, *c, *brute),
        Command::LinvProb { pi, k, c, n } => cmd_linv_prob(cli, &limits, pi, *k, *c, *n),
        Command::MinvBrute {
            pi,
            k,
            c,
            restrict_v,
        } => cmd_minv_brute(cli, &limits, pi, *k, *c, *restrict_v),
        Command::Moments { n, csv } => cmd_moments(cli, *n, *csv),
        Command::Mc {
            n,
            trials,
            seed,
            k,
            pi,
            c,
            csv,
        } => cmd_mc(cli, &limits, *n, *trials, *seed, *k, pi, *c, *csv),
        Command::Tail {
            sizes,
            trials,
            seed,
            epsilon,
            a_n,
            csv,
        } => cmd_tail(cli, sizes, *trials, *seed, *epsilon, *a_n, *csv),
        Command::Verify {
            level,
            boundary_flags,
        } => cmd_verify(cli, &limits, *level, *boundary_flags),
    }
}

fn cmd_adj(
    cli: &Cli,
    perms: &[String],
    segments: &Option<Vec<String>>,
    n: Option<usize>,
) -> Result<u8, Error> {
    if let Some(segs) = segments {
        let n = n.ok_or_else(|| {
            Error::InvalidInput("--segments needs --n for the ground-set size".into())
        })?;
        let a = SegmentSet::parse(&segs[0], n)?;
        let b = SegmentSet::parse(&segs[1], n)?;
        let ok = consistent(&a, &b)?;
        let union = if ok {
            Some(union_segment_sets(&a, &b)?)
        } else {
            None
        };
        let mut human = vec![format!("consistent: {ok}")];
        if let Some(u) = &union {
            human.push(format!("union: {u}"));
        }
        emit(
            cli.json,
            &human,
            json!({
                "consistent": ok,
                "union": union.as_ref().map(segset_json),
            }),
        );
        return Ok(EXIT_OK);
    }
    let xs = gather_perms(perms, &None)?;
    let set = common_adjacencies(&xs)?;
    let label = if xs.len() == 1 {
        "adjacencies"
    } else {
        "common"
    };
    emit(
        cli.json,
        &[format!("{set}")],
        json!({ "n": set.ambient(), label: adjacency_json(&set) }),
    );
    Ok(EXIT_OK)
}

fn cmd_dist(
    cli: &Cli,
    perms: &[String],
    pi: &Option<String>,
    x_file: &Option<String>,
) -> Result<u8, Error> {
    if let Some(pi) = pi {
        let p = parse_perm(pi)?;
        let xs = gather_perms(&[], x_file)?;
        let total = total_distance(&p, &xs)?;
        emit(
            cli.json,
            &[total.to_string()],
            json!({ "n": p.n(), "total_distance": total, "set_size": xs.len() }),
        );
        return Ok(EXIT_OK);
    }
    if perms.len() != 2 {
        return Err(Error::InvalidInput(
            "dist needs exactly two permutations (or --pi with --X)".into(),
        ));
    }
    let x = parse_perm(&perms[0])?;
    let y = parse_perm(&perms[1])?;
    let d = bp_distance(&x, &y)?;
    emit(
        cli.json,
        &[d.to_string()],
        json!({ "n": x.n(), "distance": d }),
    );
    Ok(EXIT_OK)
}

fn cmd_median(
    cli: &Cli,
    limits: &Limits,
    perms: &[String],
    x_file: &Option<String>,
    pi: &Option<String>,
) -> Result<u8, Error> {
    let xs = gather_perms(perms, x_file)?;
    let report = medians_brute(&xs, limits)?;
    let mut human = vec![format!("mu: {}", report.mu)];
    for (m, e) in report.medians.iter().zip(&report.excess) {
        human.push(format!("median: {m}  (excess {e})"));
    }
    let mut value = json!({
        "mu": report.mu,
        "medians": report.medians.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "excess": report.excess,
    });
    if let Some(pi) = pi {
        let p = parse_perm(pi)?;
        let hit = is_median(&p, &xs, limits)?;
        human.push(format!("is_median({p}): {hit}"));
        value["query"] = json!({ "pi": p.to_string(), "is_median": hit });
    }
    emit(cli.json, &human, value);
    Ok(EXIT_OK)
}

fn cmd_geodesic(cli: &Cli, z: &str, x: &str, y: &str) -> Result<u8, Error> {
    let z = parse_perm(z)?;
    let x = parse_perm(x)?;
    let y = parse_perm(y)?;
    let check = is_geodesic(&z, &x, &y)?;
    emit(
        cli.json,
        &[format!("{check}")],
        json!({
            "geodesic": check.geodesic,
            "distance_identity": check.distance_identity,
            "endpoint_common_contained": check.lower_ok,
            "within_endpoint_union": check.upper_ok,
            "missing": adjacency_json(&check.missing),
            "extra": adjacency_json(&check.extra),
        }),
    );
    Ok(EXIT_OK)
}

fn subset_label(mask: u32, k: usize) -> String {
    let ids: Vec<String> = (0..k)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", ids.join(","))
}

fn cmd_bdecomp(cli: &Cli, x_file: &str, pi: &Option<String>) -> Result<u8, Error> {
    let xs = read_perm_file(x_file)?;
    let table = shared_adjacency_table(&xs)?;
    let p = pi.as_deref().map(parse_perm).transpose()?;
    let mut human = vec![
        format!("total distances: {:?}", table.totals()),
        format!(
            "relabelling (new -> original, 1-based): {:?}",
            table
                .relabelling()
                .iter()
                .map(|i| i + 1)
                .collect::<Vec<_>>()
        ),
    ];
    let mut cells = Vec::new();
    for (mask, set) in table.subsets() {
        let mut line = format!("exactly {} share: {set}", subset_label(mask, table.k()));
        let overlap = p.as_ref().map(|q| table.overlap(q, mask)).transpose()?;
        if let Some(o) = overlap {
            line.push_str(&format!("  (overlap with pi: {o})"));
        }
        human.push(line);
        cells.push(json!({
            "subset": (0..table.k()).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect::<Vec<_>>(),
            "adjacencies": adjacency_json(set),
            "overlap": overlap,
        }));
    }
    emit(
        cli.json,
        &human,
        json!({
            "n": table.n(),
            "k": table.k(),
            "totals": table.totals(),
            "relabelling": table.relabelling().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "cells": cells,
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_bound(cli: &Cli, pi: &str, x_file: &str, c: Option<usize>) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    let xs = read_perm_file(x_file)?;
    let table = shared_adjacency_table(&xs)?;
    let excess = median_excess(&p, &xs)?;
    let tight = table.excess_bound_tight(&p)?;
    let set_bound = table.excess_bound_set();
    let mut human = vec![
        format!("excess: {excess}"),
        format!("tight bound: {tight}"),
        format!("set bound: {set_bound}"),
    ];
    let within = c.map(|c| within_slack(&p, &xs, c)).transpose()?;
    if let (Some(c), Some(w)) = (c, within) {
        human.push(format!("within slack {c}: {w}"));
    }
    emit(
        cli.json,
        &human,
        json!({
            "excess": excess,
            "tight_bound": tight,
            "set_bound": set_bound,
            "within_slack": within,
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_hcount(
    cli: &Cli,
    limits: &Limits,
    pi: &str,
    base_text: &str,
    method: HcountMethod,
    boundary_flags: bool,
) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    let base = SegmentSet::parse(base_text, p.n())?;
    let rule = if boundary_flags {
        PlacementRule::BoundaryFlags
    } else {
        PlacementRule::EndAware
    };
    let mut human = Vec::new();
    let mut values = serde_json::Map::new();
    let mut results = Vec::new();
    let wants = |m: HcountMethod| method == HcountMethod::All || method == m;
    if wants(HcountMethod::Brute) {
        let v = count_exact_common_brute(&p, &base, limits)?;
        human.push(format!("brute: {v}"));
        values.insert("brute".into(), json!(v.to_string()));
        results.push(v);
    }
    if wants(HcountMethod::Ie) {
        let v = count_exact_common_inclusion_exclusion(&p, &base, limits)?;
        human.push(format!("inclusion-exclusion: {v}"));
        values.insert("ie".into(), json!(v.to_string()));
        results.push(v);
    }
    if wants(HcountMethod::Type) {
        let v = count_exact_common_profiled(&p, &base, rule)?;
        human.push(format!("profile sum: {v}"));
        values.insert("type".into(), json!(v.to_string()));
        results.push(v);
    }
    let agree = results.windows(2).all(|w| w[0] == w[1]);
    if method == HcountMethod::All {
        human.push(format!("agreement: {agree}"));
    }
    emit(
        cli.json,
        &human,
        json!({
            "pi": p.to_string(),
            "I": base.to_string(),
            "methods": Value::Object(values),
            "agree": if method == HcountMethod::All { json!(agree) } else { Value::Null },
        }),
    );
    if method == HcountMethod::All && !agree {
        eprintln!("counterexample: pi={p}, I={base}: methods disagree (see output above)");
        return Ok(EXIT_VERIFY_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_covers(
    cli: &Cli,
    limits: &Limits,
    pi: &str,
    k: usize,
    c: usize,
    list_limit: usize,
) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    let mut count = 0u64;
    let mut listed: Vec<Vec<SegmentSet>> = Vec::new();
    for tuple in cover_tuples(&p, k, c, limits)? {
        if listed.len() < list_limit {
            listed.push(tuple);
        }
        count += 1;
    }
    let mut human = vec![format!("count: {count}")];
    for tuple in &listed {
        human.push(
            tuple
                .iter()
                .map(|s| format!("({s})"))
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    if count as usize > listed.len() {
        human.push(format!("... and {} more", count as usize - listed.len()));
    }
    emit(
        cli.json,
        &human,
        json!({
            "params": { "n": p.n(), "k": k, "c": c },
            "count": count.to_string(),
            "tuples": listed
                .iter()
                .map(|t| Value::Array(t.iter().map(segset_json).collect()))
                .collect::<Vec<_>>(),
            "listed": listed.len(),
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_linv_count(
    cli: &Cli,
    limits: &Limits,
    pi: &str,
    k: usize,
    c: usize,
    brute: bool,
) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    let count = if brute {
        cover_inverse_count_brute(&p, k, c, limits)?
    } else {
        cover_inverse_count(&p, k, c, limits)?
    };
    emit(
        cli.json,
        &[count.to_string()],
        json!({
            "params": { "n": p.n(), "k": k, "c": c },
            "method": if brute { "brute" } else { "closed" },
            "count": count.to_string(),
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_linv_prob(
    cli: &Cli,
    limits: &Limits,
    pi: &str,
    k: usize,
    c: usize,
    n: Option<usize>,
) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    if let Some(n) = n {
        if n != p.n() {
            return Err(Error::LengthMismatch {
                expected: p.n(),
                got: n,
            });
        }
    }
    let count = cover_inverse_count(&p, k, c, limits)?;
    let prob = cover_inverse_probability(&p, k, c, limits)?;
    let decimal = ratio_decimal(&prob, 12);
    emit(
        cli.json,
        &[
            format!("count: {count}"),
            format!("probability: {}/{}", prob.numer(), prob.denom()),
            format!("decimal: {decimal}"),
        ],
        json!({
            "params": { "n": p.n(), "k": k, "c": c },
            "count": count.to_string(),
            "probability": {
                "num": prob.numer().to_string(),
                "den": prob.denom().to_string(),
                "decimal": decimal,
            },
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_minv_brute(
    cli: &Cli,
    limits: &Limits,
    pi: &str,
    k: usize,
    c: usize,
    restrict_v: bool,
) -> Result<u8, Error> {
    let p = parse_perm(pi)?;
    if restrict_v {
        let (m, l) = inverse_counts_on_max_distance(&p, k, c, limits)?;
        emit(
            cli.json,
            &[
                format!("median-inverse within max-distance tuples: {m}"),
                format!("cover-inverse within max-distance tuples: {l}"),
                format!("equal: {}", m == l),
            ],
            json!({
                "params": { "n": p.n(), "k": k, "c": c },
                "median_inverse_in_v": m.to_string(),
                "cover_inverse_in_v": l.to_string(),
                "equal": m == l,
            }),
        );
        return Ok(EXIT_OK);
    }
    let count = median_inverse_count_brute(&p, k, limits)?;
    emit(
        cli.json,
        &[count.to_string()],
        json!({
            "params": { "n": p.n(), "k": k },
            "count": count.to_string(),
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_moments(cli: &Cli, n: usize, csv: bool) -> Result<u8, Error> {
    let m = moments_closed(n)?;
    let rows = [
        ("expected_common", &m.expected_common),
        ("expected_distance", &m.expected_distance),
        ("variance", &m.variance),
    ];
    if csv {
        println!("n,setting,estimate,stderr,closed_form,z");
        for (name, v) in &rows {
            println!(
                "{n},{name},{},,{}/{},",
                ratio_decimal(v, 12),
                v.numer(),
                v.denom()
            );
        }
        return Ok(EXIT_OK);
    }
    let human: Vec<String> = rows
        .iter()
        .map(|(name, v)| {
            format!(
                "{name}: {}/{} = {}",
                v.numer(),
                v.denom(),
                ratio_decimal(v, 12)
            )
        })
        .collect();
    emit(
        cli.json,
        &human,
        json!({
            "n": n,
            "expected_common": { "num": m.expected_common.numer().to_string(), "den": m.expected_common.denom().to_string(), "decimal": ratio_decimal(&m.expected_common, 12) },
            "expected_distance": { "num": m.expected_distance.numer().to_string(), "den": m.expected_distance.denom().to_string(), "decimal": ratio_decimal(&m.expected_distance, 12) },
            "variance": { "num": m.variance.numer().to_string(), "den": m.variance.denom().to_string(), "decimal": ratio_decimal(&m.variance, 12) },
        }),
    );
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    cli: &Cli,
    limits: &Limits,
    n: Option<usize>,
    trials: u64,
    seed: u64,
    k: Option<usize>,
    pi: &Option<String>,
    c: usize,
    csv: bool,
) -> Result<u8, Error> {
    if let (Some(k), Some(pi)) = (k, pi.as_ref()) {
        let p = parse_perm(pi)?;
        if let Some(n) = n {
            if n != p.n() {
                return Err(Error::LengthMismatch {
                    expected: p.n(),
                    got: n,
                });
            }
        }
        let cfg = TrialConfig::new(p.n(), trials, seed)?;
        let est = mc_median_probability(&p, k, &cfg, limits)?;
        let bound = cover_inverse_probability(&p, k, c, limits)?;
        let bound_f = bound.to_f64().unwrap_or(f64::NAN);
        if csv {
            println!("n,setting,estimate,stderr,closed_form,z");
            println!(
                "{},median_probability,{},{},{},",
                p.n(),
                est.estimate,
                est.stderr.map(|s| s.to_string()).unwrap_or_default(),
                bound_f
            );
            return Ok(EXIT_OK);
        }
        emit(
            cli.json,
            &[
                format!(
                    "estimate: {} ({} of {} trials)",
                    est.estimate, est.hits, trials
                ),
                format!(
                    "stderr: {}",
                    est.stderr
                        .map(|s| s.to_string())
                        .unwrap_or_else(|| "n/a".into())
                ),
                format!("max observed excess: {}", est.max_observed_excess),
                format!(
                    "cover-inverse probability at c={c}: {}/{} = {}",
                    bound.numer(),
                    bound.denom(),
                    ratio_decimal(&bound, 12)
                ),
            ],
            json!({
                "params": { "n": p.n(), "k": k, "c": c, "trials": trials, "seed": seed },
                "estimate": est.estimate,
                "stderr": est.stderr,
                "hits": est.hits,
                "max_observed_excess": est.max_observed_excess,
                "cover_probability": {
                    "num": bound.numer().to_string(),
                    "den": bound.denom().to_string(),
                    "decimal": ratio_decimal(&bound, 12),
                },
            }),
        );
        return Ok(EXIT_OK);
    }

    let n = n.ok_or_else(|| Error::InvalidInput("mc needs --n (or --k with --pi)".into()))?;
    let cfg = TrialConfig::new(n, trials, seed)?;
    let m = mc_moments(&cfg)?;
    if csv {
        println!("n,setting,estimate,stderr,closed_form,z");
        println!(
            "{n},mean,{},{},{},{}",
            m.mean,
            m.stderr_mean.map(|v| v.to_string()).unwrap_or_default(),
            m.closed_mean,
            m.z_mean.map(|v| v.to_string()).unwrap_or_default()
        );
        println!(
            "{n},variance,{},{},{},{}",
            m.variance,
            m.stderr_variance.map(|v| v.to_string()).unwrap_or_default(),
            m.closed_variance,
            m.z_variance.map(|v| v.to_string()).unwrap_or_default()
        );
        return Ok(EXIT_OK);
    }
    emit(
        cli.json,
        &[
            format!(
                "mean shared adjacencies: {} (closed {})",
                m.mean, m.closed_mean
            ),
            format!(
                "z: {}",
                m.z_mean
                    .map(|v| format!("{v:.3}"))
                    .unwrap_or_else(|| "n/a".into())
            ),
            format!("variance: {} (closed {})", m.variance, m.closed_variance),
        ],
        json!({
            "params": { "n": n, "trials": trials, "seed": seed },
            "mean": m.mean,
            "stderr_mean": m.stderr_mean,
            "z_mean": m.z_mean,
            "closed_mean": m.closed_mean,
            "variance": m.variance,
            "stderr_variance": m.stderr_variance,
            "z_variance": m.z_variance,
            "closed_variance": m.closed_variance,
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_tail(
    cli: &Cli,
    sizes: &[usize],
    trials: u64,
    seed: u64,
    epsilon: f64,
    a_n: Option<f64>,
    csv: bool,
) -> Result<u8, Error> {
    let mut rows = Vec::new();
    for &n in sizes {
        let cfg = TrialConfig::new(n, trials, seed)?;
        let a = a_n.unwrap_or_else(|| (n as f64).log2());
        let r = tail_fraction(&cfg, epsilon, a)?;
        rows.push((n, a, r));
    }
    if csv {
        println!("n,setting,estimate,stderr,closed_form,z");
        for (n, _a, r) in &rows {
            println!(
                "{n},tail,{},{},{},",
                r.fraction,
                r.stderr.map(|v| v.to_string()).unwrap_or_default(),
                r.chebyshev_bound
            );
        }
        return Ok(EXIT_OK);
    }
    let human: Vec<String> = rows
        .iter()
        .map(|(n, a, r)| {
            format!(
                "n={n}: threshold {:.4} (epsilon {epsilon} * a_n {a:.4}), fraction {} ({} hits), chebyshev bound {:.6}",
                r.threshold, r.fraction, r.hits, r.chebyshev_bound
            )
        })
        .collect();
    emit(
        cli.json,
        &human,
        json!({
            "params": { "trials": trials, "seed": seed, "epsilon": epsilon },
            "rows": rows
                .iter()
                .map(|(n, a, r)| json!({
                    "n": n,
                    "a_n": a,
                    "threshold": r.threshold,
                    "fraction": r.fraction,
                    "hits": r.hits,
                    "stderr": r.stderr,
                    "chebyshev_bound": r.chebyshev_bound,
                }))
                .collect::<Vec<_>>(),
        }),
    );
    Ok(EXIT_OK)
}

fn cmd_verify(
    cli: &Cli,
    limits: &Limits,
    level: VerifyLevel,
    boundary_flags: bool,
) -> Result<u8, Error> {
    let opts = VerifyOptions {
        level: match level {
            VerifyLevel::Quick => Level::Quick,
            VerifyLevel::Full => Level::Full,
        },
        boundary_flags,
        limits: *limits,
    };
    let mut results: Vec<CriterionResult> = Vec::new();
    if cli.json {
        results = run_with(&opts, |_| {});
    } else {
        run_with(&opts, |r| {
            println!(
                "criterion {} ({}): {} — {}",
                r.id,
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            );
            results.push(r.clone());
        });
    }
    let passed = results.iter().all(|r| r.passed);
    if cli.json {
        let value = json!({
            "level": match level { VerifyLevel::Quick => "quick", VerifyLevel::Full => "full" },
            "passed": passed,
            "criteria": results
                .iter()
                .map(|r| json!({
                    "id": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                }))
                .collect::<Vec<_>>(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else {
        println!(
            "{}",
            if passed {
                "all criteria passed"
            } else {
                "FAILURES present"
            }
        );
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
