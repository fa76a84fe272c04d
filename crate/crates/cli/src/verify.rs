//! The built-in acceptance suite behind `qsl verify`: nine fixed criterion
//! runs over the scenario machinery. Each criterion is an ordinary scenario
//! config (or two) with a frozen seed, so a verify run is exactly as
//! reproducible as any other run, and its report bodies are byte-identical
//! across repeats.

use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{OutputConfig, RunConfig, Tolerances};
use crate::report::{csv_body, raw_float, Record};
use crate::scenario;
use crate::{CliError, CliResult};

/// One acceptance criterion: a named bundle of scenario configs with a
/// wall-clock budget it is expected to fit comfortably.
pub struct Criterion {
    pub number: usize,
    pub name: &'static str,
    pub configs: Vec<RunConfig>,
    pub budget_seconds: f64,
}

fn base(scenario: &str, dims: &[usize], seed: u64, ensemble: usize, steps: usize) -> RunConfig {
    RunConfig {
        scenario: scenario.to_owned(),
        dim: None,
        dims: Some(dims.to_vec()),
        seed: Some(seed),
        ensemble,
        steps,
        beta: 1.0,
        tau: 1.0,
        restarts: 8,
        iterations: 300,
        epsilon: 1e-5,
        tolerances: Tolerances::default(),
        protocol: None,
        output: OutputConfig::default(),
    }
}

/// The fixed criterion list. Each criterion mixes the master seed with its
/// number so the ensembles do not share instances.
pub fn criteria(seed: u64) -> Vec<Criterion> {
    let mix = |n: usize| seed.wrapping_add(1000 * n as u64);
    vec![
        Criterion {
            number: 1,
            name: "finite-difference oracle",
            configs: vec![base("speed", &[2, 3, 4, 5, 6], mix(1), 100, 50)],
            budget_seconds: 30.0,
        },
        Criterion {
            number: 2,
            name: "trade-off bounds",
            configs: vec![base("bounds", &[2, 3, 4, 5, 6], mix(2), 500, 1000)],
            budget_seconds: 30.0,
        },
        Criterion {
            number: 3,
            name: "nonreality identities",
            configs: {
                // At dimension 4 the default climb effort leaves a few of
                // the 600 searches a hair over the 1e-3 envelope; this
                // setting drives the worst observed gap to 2e-4 and still
                // finishes in a tenth of the budget.
                let mut config = base("kd-verify", &[2, 3, 4, 5], mix(3), 200, 1000);
                config.restarts = 20;
                config.iterations = 500;
                vec![config]
            },
            budget_seconds: 120.0,
        },
        Criterion {
            number: 4,
            name: "distribution-functional cap",
            configs: vec![base("bounds", &[2, 3, 4, 5, 6], mix(4), 200, 1000)],
            budget_seconds: 60.0,
        },
        Criterion {
            number: 5,
            name: "qubit closed forms",
            configs: vec![base("qubit-complementarity", &[2], mix(5), 1000, 1000)],
            budget_seconds: 10.0,
        },
        Criterion {
            number: 6,
            name: "minimum-time bounds",
            configs: vec![base("qsl-time", &[2, 3, 4], mix(6), 50, 1000)],
            budget_seconds: 120.0,
        },
        Criterion {
            number: 7,
            name: "correlation witness",
            configs: vec![
                base("correlation-witness", &[2, 2], mix(7), 50, 1000),
                base("correlation-witness", &[2, 3], mix(7), 50, 1000),
            ],
            budget_seconds: 300.0,
        },
        Criterion {
            number: 8,
            name: "athermality",
            configs: vec![
                base("athermality", &[2], mix(8), 25, 1000),
                base("athermality", &[3], mix(8), 25, 1000),
            ],
            budget_seconds: 180.0,
        },
        Criterion {
            number: 9,
            name: "purification bound",
            configs: vec![base("bounds", &[2, 3], mix(9), 100, 1000)],
            budget_seconds: 60.0,
        },
    ]
}

/// Result of executing one criterion.
pub struct CriterionOutcome {
    pub number: usize,
    pub name: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub records: Vec<Record>,
    pub min_slack: Option<f64>,
}

/// Runs every config of a criterion and merges the records.
pub fn run_criterion(criterion: &Criterion, workers: usize) -> CliResult<CriterionOutcome> {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut pass = true;
    let mut min_slack: Option<f64> = None;
    for config in &criterion.configs {
        let report = scenario::run(config, workers)?;
        pass &= report.pass;
        min_slack = match (min_slack, report.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        records.extend(report.records);
    }
    Ok(CriterionOutcome {
        number: criterion.number,
        name: criterion.name,
        pass,
        seconds: start.elapsed().as_secs_f64(),
        records,
        min_slack,
    })
}

pub struct VerifySummary {
    pub pass: bool,
    pub outcomes: Vec<CriterionOutcome>,
}

#[derive(Serialize)]
struct JsonCriterion<'a> {
    number: usize,
    name: &'a str,
    pass: bool,
    records: usize,
    min_slack: Option<Box<RawValue>>,
}

#[derive(Serialize)]
struct JsonVerify<'a> {
    seed: u64,
    pass: bool,
    criteria: Vec<JsonCriterion<'a>>,
}

#[derive(Serialize)]
struct VerifyMeta {
    timestamp_unix_seconds: u64,
    total_seconds: f64,
    criterion_seconds: Vec<f64>,
    workers: usize,
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Runs the whole suite, calling `progress` after each criterion, and writes
/// `verify.csv`, `verify.json` and a timing sidecar under `out_dir`. The two
/// report bodies carry no timing, so identical seeds give identical bytes.
pub fn run_verify(
    seed: u64,
    workers: usize,
    out_dir: &Path,
    mut progress: impl FnMut(&CriterionOutcome),
) -> CliResult<VerifySummary> {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    for criterion in criteria(seed) {
        let outcome = run_criterion(&criterion, workers)?;
        progress(&outcome);
        outcomes.push(outcome);
    }
    let pass = outcomes.iter().all(|o| o.pass);

    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_owned(),
        source,
    })?;
    let merged: Vec<Record> = outcomes.iter().flat_map(|o| o.records.clone()).collect();
    write(&out_dir.join("verify.csv"), &csv_body(&merged))?;

    let doc = JsonVerify {
        seed,
        pass,
        criteria: outcomes
            .iter()
            .map(|o| JsonCriterion {
                number: o.number,
                name: o.name,
                pass: o.pass,
                records: o.records.len(),
                min_slack: o.min_slack.map(raw_float),
            })
            .collect(),
    };
    let mut body = serde_json::to_string_pretty(&doc).expect("verify summary serializes");
    body.push('\n');
    write(&out_dir.join("verify.json"), &body)?;

    let meta = VerifyMeta {
        timestamp_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        total_seconds: start.elapsed().as_secs_f64(),
        criterion_seconds: outcomes.iter().map(|o| o.seconds).collect(),
        workers,
    };
    let mut meta_body = serde_json::to_string_pretty(&meta).expect("meta serializes");
    meta_body.push('\n');
    write(&out_dir.join("verify.meta.json"), &meta_body)?;

    Ok(VerifySummary { pass, outcomes })
}
