//! Report records and emission. The CSV column order and float formatting
//! are frozen so downstream diffs stay stable:
//!
//! ```text
//! scenario,trial,dim,quantity,value,bound,slack,eq_tag
//! ```
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), enough to
//! round-trip an f64 exactly. The JSON report mirrors the same records with
//! numbers rendered through the same formatter, so the two formats carry
//! identical values.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::RunConfig;
use crate::{CliError, CliResult};

/// One checked inequality or identity.
///
/// Two kinds of row share the schema. A bound row carries a physical
/// inequality: `value` is the measured quantity, `bound` the theoretical
/// ceiling, and `allowed` the numerical margin the slack may dip below zero.
/// An envelope row carries an identity or route-agreement check: `value` is
/// a nonnegative discrepancy, `bound` is the tolerance envelope it must stay
/// under, and `allowed` is zero because the envelope is the margin.
#[derive(Debug, Clone)]
pub struct Record {
    pub scenario: &'static str,
    pub trial: usize,
    pub dim: usize,
    pub quantity: &'static str,
    pub value: f64,
    pub bound: f64,
    /// `bound - value`.
    pub slack: f64,
    /// Opaque label tying the record to its bound family in the frozen
    /// report schema.
    pub eq_tag: &'static str,
    /// Numerical margin: the record passes when `slack >= -allowed`. Not a
    /// report column; it surfaces in the aggregates.
    pub allowed: f64,
}

impl Record {
    /// A physical inequality `value <= bound` checked to margin `allowed`.
    pub fn bound_check(
        scenario: &'static str,
        trial: usize,
        dim: usize,
        quantity: &'static str,
        eq_tag: &'static str,
        value: f64,
        bound: f64,
        allowed: f64,
    ) -> Record {
        Record {
            scenario,
            trial,
            dim,
            quantity,
            value,
            bound,
            slack: bound - value,
            eq_tag,
            allowed,
        }
    }

    /// An identity check: a discrepancy that must stay under an envelope.
    pub fn envelope(
        scenario: &'static str,
        trial: usize,
        dim: usize,
        quantity: &'static str,
        eq_tag: &'static str,
        discrepancy: f64,
        envelope: f64,
    ) -> Record {
        Record {
            scenario,
            trial,
            dim,
            quantity,
            value: discrepancy,
            bound: envelope,
            slack: envelope - discrepancy,
            eq_tag,
            allowed: 0.0,
        }
    }

    pub fn pass(&self) -> bool {
        self.slack >= -self.allowed
    }
}

/// Per-quantity rollup across all trials and dimensions.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub quantity: &'static str,
    pub eq_tag: &'static str,
    pub count: usize,
    pub min_slack: f64,
    pub allowed: f64,
    pub pass: bool,
}

/// A completed run: the canonical config echo, every record, per-quantity
/// aggregates, and the overall verdict. Wall time lives outside the report
/// body so identical configs produce identical bytes.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
    pub pass: bool,
    /// Smallest slack over all records; `None` for an empty ensemble.
    pub min_slack: Option<f64>,
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn new(config: RunConfig, records: Vec<Record>, wall_seconds: f64) -> RunReport {
        let aggregates = aggregate(&records);
        let pass = aggregates.iter().all(|a| a.pass);
        let min_slack = records
            .iter()
            .map(|r| r.slack)
            .fold(None, |acc: Option<f64>, s| {
                Some(acc.map_or(s, |m| m.min(s)))
            });
        RunReport {
            config,
            records,
            aggregates,
            pass,
            min_slack,
            wall_seconds,
        }
    }
}

fn aggregate(records: &[Record]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for r in records {
        match out
            .iter_mut()
            .find(|a| a.quantity == r.quantity && a.eq_tag == r.eq_tag)
        {
            Some(a) => {
                a.count += 1;
                a.min_slack = a.min_slack.min(r.slack);
                a.allowed = a.allowed.max(r.allowed);
                a.pass = a.pass && r.pass();
            }
            None => out.push(Aggregate {
                quantity: r.quantity,
                eq_tag: r.eq_tag,
                count: 1,
                min_slack: r.slack,
                allowed: r.allowed,
                pass: r.pass(),
            }),
        }
    }
    out
}

/// 17 significant digits, the frozen float format of both report bodies.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fails with a numerical-validation error if any record carries a
/// non-finite number; reports must never smuggle a NaN past the verdict.
pub fn require_finite(records: &[Record]) -> CliResult<()> {
    for r in records {
        if !(r.value.is_finite() && r.bound.is_finite() && r.slack.is_finite()) {
            return Err(CliError::NonFinite {
                trial: r.trial,
                quantity: r.quantity.to_owned(),
            });
        }
    }
    Ok(())
}

pub const CSV_HEADER: &str = "scenario,trial,dim,quantity,value,bound,slack,eq_tag";

/// The full CSV body, header first. An empty ensemble yields just the header.
pub fn csv_body(records: &[Record]) -> String {
    let mut body = String::with_capacity(64 + records.len() * 128);
    body.push_str(CSV_HEADER);
    body.push('\n');
    for r in records {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.scenario,
            r.trial,
            r.dim,
            r.quantity,
            float17(r.value),
            float17(r.bound),
            float17(r.slack),
            r.eq_tag
        ));
    }
    body
}

pub(crate) fn raw_float(x: f64) -> Box<RawValue> {
    RawValue::from_string(float17(x)).expect("a finite float in scientific notation is valid JSON")
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    scenario: &'a str,
    trial: usize,
    dim: usize,
    quantity: &'a str,
    value: Box<RawValue>,
    bound: Box<RawValue>,
    slack: Box<RawValue>,
    eq_tag: &'a str,
}

#[derive(Serialize)]
struct JsonAggregate<'a> {
    quantity: &'a str,
    eq_tag: &'a str,
    count: usize,
    min_slack: Box<RawValue>,
    allowed: Box<RawValue>,
    pass: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    records: Vec<JsonRecord<'a>>,
    aggregates: Vec<JsonAggregate<'a>>,
    pass: bool,
    min_slack: Option<Box<RawValue>>,
}

/// The full JSON body: the same records as the CSV plus the config echo and
/// aggregates.
pub fn json_body(report: &RunReport) -> String {
    let doc = JsonReport {
        config: &report.config,
        records: report
            .records
            .iter()
            .map(|r| JsonRecord {
                scenario: r.scenario,
                trial: r.trial,
                dim: r.dim,
                quantity: r.quantity,
                value: raw_float(r.value),
                bound: raw_float(r.bound),
                slack: raw_float(r.slack),
                eq_tag: r.eq_tag,
            })
            .collect(),
        aggregates: report
            .aggregates
            .iter()
            .map(|a| JsonAggregate {
                quantity: a.quantity,
                eq_tag: a.eq_tag,
                count: a.count,
                min_slack: raw_float(a.min_slack),
                allowed: raw_float(a.allowed),
                pass: a.pass,
            })
            .collect(),
        pass: report.pass,
        min_slack: report.min_slack.map(raw_float),
    };
    let mut body = serde_json::to_string_pretty(&doc).expect("report serializes");
    body.push('\n');
    body
}

#[derive(Serialize)]
struct Meta {
    timestamp_unix_seconds: u64,
    wall_seconds: f64,
    workers: usize,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes the report body under `dir` as `<stem>.csv` or `<stem>.json` per
/// the format, plus a `<stem>.meta.json` sidecar holding the timestamp and
/// wall time that are deliberately kept out of the body.
pub fn write_report(
    report: &RunReport,
    dir: &Path,
    format: &str,
    stem: &str,
    workers: usize,
) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let main = match format {
        "json" => {
            let path = dir.join(format!("{stem}.json"));
            write_file(&path, &json_body(report))?;
            path
        }
        _ => {
            let path = dir.join(format!("{stem}.csv"));
            write_file(&path, &csv_body(&report.records))?;
            path
        }
    };
    let timestamp_unix_seconds = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = Meta {
        timestamp_unix_seconds,
        wall_seconds: report.wall_seconds,
        workers,
    };
    let meta_path = dir.join(format!("{stem}.meta.json"));
    let mut meta_body = serde_json::to_string_pretty(&meta).expect("meta serializes");
    meta_body.push('\n');
    write_file(&meta_path, &meta_body)?;
    Ok(main)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(trial: usize, slack_sign: f64) -> Record {
        Record::bound_check(
            "speed",
            trial,
            3,
            "fisher",
            "Eq2",
            1.0,
            1.0 + slack_sign,
            1e-8,
        )
    }

    #[test]
    fn float_format_has_seventeen_significant_digits() {
        let s = float17(std::f64::consts::PI);
        let digits: usize = s
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(|c| c.is_ascii_digit())
            .count();
        assert_eq!(digits, 17);
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_header_is_frozen() {
        assert_eq!(
            csv_body(&[]),
            "scenario,trial,dim,quantity,value,bound,slack,eq_tag\n"
        );
    }

    #[test]
    fn one_row_per_record_and_raw_json_numbers() {
        let records = vec![sample(0, 0.5), sample(1, 0.25)];
        let csv = csv_body(&records);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("speed,0,3,fisher,"));

        let config =
            crate::config::RunConfig::parse("scenario = \"speed\"\nseed = 1\ndim = 2\n").unwrap();
        let report = RunReport::new(config, records, 0.1);
        let json = json_body(&report);
        assert_eq!(
            json.matches("\"quantity\"").count(),
            3,
            "2 records + 1 aggregate"
        );
        assert!(
            json.contains(&float17(0.5)),
            "slack printed through the same formatter"
        );
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["records"].as_array().unwrap().len(), 2);
        assert!(parsed["records"][0]["value"].is_f64());
    }

    #[test]
    fn margins_decide_the_verdict() {
        let fail = Record::envelope("speed", 0, 2, "fd-commutator-gap", "Eq3", 2e-6, 1e-6);
        assert!(!fail.pass());
        let squeak = sample(0, -0.5e-8);
        assert!(squeak.pass(), "slack within the allowed margin passes");
        let report = RunReport::new(
            crate::config::RunConfig::parse("scenario = \"speed\"\nseed = 1\ndim = 2\n").unwrap(),
            vec![squeak, fail],
            0.0,
        );
        assert!(!report.pass);
        assert_eq!(report.min_slack, Some(1e-6 - 2e-6));
    }

    #[test]
    fn non_finite_records_are_numerical_errors() {
        let mut r = sample(4, 0.1);
        r.value = f64::NAN;
        r.slack = f64::NAN;
        let err = require_finite(&[r]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("trial 4"));
    }
}
