//! Acceptance gate. One test per verification criterion, each printing a
//! single pass/fail line, plus an end-to-end determinism run of the built
//! binary. These are the same criteria `qsl verify` executes; here every one
//! must pass inside its runtime budget for the suite to go green.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use qsl_cli::verify::{criteria, run_criterion};

const MASTER_SEED: u64 = 42;

fn check_criterion(number: usize) {
    let list = criteria(MASTER_SEED);
    let criterion = list
        .iter()
        .find(|c| c.number == number)
        .expect("criterion number is registered");
    let outcome = run_criterion(criterion, 0).expect("criterion runs to completion");
    println!(
        "criterion {} ({}): {}",
        outcome.number,
        outcome.name,
        if outcome.pass { "PASS" } else { "FAIL" }
    );
    assert!(
        !outcome.records.is_empty(),
        "criterion {number} produced no records"
    );
    assert!(
        outcome.pass,
        "criterion {number} ({}) failed, min slack {:?}",
        criterion.name, outcome.min_slack
    );
    assert!(
        outcome.seconds < criterion.budget_seconds,
        "criterion {number} took {:.1} s, budget {:.0} s",
        outcome.seconds,
        criterion.budget_seconds
    );
}

#[test]
fn criterion_1_finite_difference_oracle() {
    check_criterion(1);
}

#[test]
fn criterion_2_trade_off_bounds() {
    check_criterion(2);
}

#[test]
fn criterion_3_nonreality_identities() {
    check_criterion(3);
}

#[test]
fn criterion_4_distribution_functional_cap() {
    check_criterion(4);
}

#[test]
fn criterion_5_qubit_closed_forms() {
    check_criterion(5);
}

#[test]
fn criterion_6_minimum_time_bounds() {
    check_criterion(6);
}

#[test]
fn criterion_7_correlation_witness() {
    check_criterion(7);
}

#[test]
fn criterion_8_athermality() {
    check_criterion(8);
}

#[test]
fn criterion_9_purification_bound() {
    check_criterion(9);
}

/// Runs the real binary twice with the same seed and demands byte-identical
/// report bodies. Timing data lives in the meta sidecar, which is exactly why
/// it is excluded here.
#[test]
fn criterion_10_verifier_deterministic_end_to_end() {
    let start = Instant::now();
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-verify");
    let dirs = [base.join("first"), base.join("second")];
    for dir in &dirs {
        let output = Command::new(env!("CARGO_BIN_EXE_qsl"))
            .arg("verify")
            .arg("--out")
            .arg(dir)
            .output()
            .expect("verify subcommand launches");
        assert!(
            output.status.success(),
            "qsl verify exited with {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        );
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(
            stdout.contains("verify: PASS"),
            "verdict line missing from output:\n{stdout}"
        );
    }
    let csv_first = std::fs::read(dirs[0].join("verify.csv")).expect("first csv");
    let csv_second = std::fs::read(dirs[1].join("verify.csv")).expect("second csv");
    let json_first = std::fs::read(dirs[0].join("verify.json")).expect("first json");
    let json_second = std::fs::read(dirs[1].join("verify.json")).expect("second json");
    assert!(!csv_first.is_empty());
    assert_eq!(csv_first, csv_second, "verify.csv differs between runs");
    assert_eq!(json_first, json_second, "verify.json differs between runs");
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 10 (deterministic verifier): {}",
        if elapsed < 900.0 { "PASS" } else { "FAIL" }
    );
    assert!(
        elapsed < 900.0,
        "two full verify runs took {elapsed:.0} s, budget 900 s"
    );
}
