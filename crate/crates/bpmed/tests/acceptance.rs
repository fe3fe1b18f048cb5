//! Full cross-validation suite as an integration test: one pass/fail line
//! per criterion, all required to pass.

use bpmed::verify::{run_with, Level, VerifyOptions};
use bpmed::Limits;

#[test]
fn full_suite_passes() {
    let opts = VerifyOptions {
        level: Level::Full,
        boundary_flags: false,
        limits: Limits::default(),
    };
    let results = run_with(&opts, |r| {
        println!(
            "criterion {} ({}): {} — {}",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    });
    assert_eq!(results.len(), 9);
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {} ({}): {}", r.id, r.name, r.detail))
        .collect();
    assert!(
        failures.is_empty(),
        "failed criteria:\n{}",
        failures.join("\n")
    );
}
