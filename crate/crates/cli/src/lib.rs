//! Command-line runner for the speed-limit library: config ingestion, seeded
//! ensemble sweeps over the library's inequality checks, and CSV/JSON report
//! emission with a frozen record schema.

pub mod config;
pub mod report;
pub mod scenario;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the runner itself, as opposed to inequality failures,
/// which are ordinary report records.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("unknown scenario {0:?} (run `qsl scenarios` for the list)")]
    UnknownScenario(String),

    #[error("no seed: set `seed` in the config or pass --seed")]
    MissingSeed,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        source: qsl_core::Error,
    },

    #[error("trial {trial}: {quantity} produced a non-finite value")]
    NonFinite { trial: usize, quantity: String },

    #[error(transparent)]
    Numerical(#[from] qsl_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status for this error. Success and inequality violations
    /// (0 and 1) are decided from the report, not from an error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_)
            | CliError::UnknownScenario(_)
            | CliError::MissingSeed
            | CliError::Config(_)
            | CliError::Io { .. } => 2,
            CliError::Trial { .. } | CliError::NonFinite { .. } | CliError::Numerical(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
