use std::fs;
use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};

use qsl_cli::config::RunConfig;
use qsl_cli::{report, scenario, verify, CliError, CliResult};

/// Exit codes: 0 all inequalities hold, 1 at least one violated, 2 config
/// error, 3 numerical-validation error.
#[derive(Parser)]
#[command(
    name = "qsl",
    version,
    about = "Speed limits for measurement probabilities: \
scenario runner, report emitter, and built-in verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write its report
    Run {
        /// Path to a TOML config document
        config: PathBuf,
        /// Output directory (overrides `output.dir`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format: csv or json (overrides `output.format`)
        #[arg(long)]
        format: Option<String>,
        /// Worker threads; `QSL_WORKERS` is the fallback, 0 lets the pool pick
        #[arg(long)]
        workers: Option<usize>,
        /// Master seed (overrides `seed`)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in acceptance suite
    Verify {
        /// Output directory for verify.csv / verify.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; `QSL_WORKERS` is the fallback
        #[arg(long)]
        workers: Option<usize>,
        /// Master seed of the suite
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// List scenarios and the config schema
    Scenarios,
}

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => exit(code),
        Err(error) => {
            eprintln!("error: {error}");
            exit(error.exit_code());
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            workers,
            seed,
        } => {
            let text = fs::read_to_string(&config).map_err(|source| CliError::Io {
                path: config.clone(),
                source,
            })?;
            let mut run_config = RunConfig::parse(&text)?;
            if let Some(seed) = seed {
                run_config.seed = Some(seed);
            }
            if let Some(format) = format {
                match format.as_str() {
                    "csv" | "json" => run_config.output.format = format,
                    other => {
                        return Err(CliError::Config(format!(
                            "--format must be csv or json, got {other:?}"
                        )))
                    }
                }
            }
            let workers = scenario::resolve_workers(workers);
            let report = scenario::run(&run_config, workers)?;
            let dir = out
                .or_else(|| report.config.output.dir.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("qsl-out"));
            let main_path = report::write_report(
                &report,
                &dir,
                &report.config.output.format,
                "report",
                workers,
            )?;
            let slack = report
                .min_slack
                .map_or("n/a".to_owned(), |s| format!("{s:.3e}"));
            println!(
                "{}: {} records, min slack {}, {} ({:.2} s)",
                report.config.scenario,
                report.records.len(),
                slack,
                if report.pass { "PASS" } else { "FAIL" },
                report.wall_seconds,
            );
            println!("report: {}", main_path.display());
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Verify { out, workers, seed } => {
            let workers = scenario::resolve_workers(workers);
            let dir = out.unwrap_or_else(|| PathBuf::from("qsl-verify"));
            let summary = verify::run_verify(seed, workers, &dir, |outcome| {
                println!(
                    "criterion {} ({}): {} ({:.1} s, {} records, min slack {})",
                    outcome.number,
                    outcome.name,
                    if outcome.pass { "PASS" } else { "FAIL" },
                    outcome.seconds,
                    outcome.records.len(),
                    outcome
                        .min_slack
                        .map_or("n/a".to_owned(), |s| format!("{s:.3e}")),
                );
            })?;
            println!("verify: {}", if summary.pass { "PASS" } else { "FAIL" });
            Ok(if summary.pass { 0 } else { 1 })
        }
        Command::Scenarios => {
            print!("{}", scenario::schema_summary());
            Ok(0)
        }
    }
}
