//! Command-line front end: argument parsing, dispatch, and JSON reports.
//!
//! Exit status is 0 when the run succeeded (and its certificate, if any,
//! passed), 1 when a computation failed or did not certify, and 2 for
//! configuration errors. Configuration errors never write a report.

pub mod args;
pub mod commands;
pub mod golden;
pub mod report;
pub mod targets;

use std::time::Instant;

use serde_json::{json, Value};
use uat_topo_core::Error;

pub use args::Cli;
use report::{Certificate, RunReport, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    /// A computation ran and failed; a report is still written.
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::DegreeTooLarge { .. } | Error::OutOfDomain { .. } | Error::MissingFeature(_) => {
                CliError::Config(e.to_string())
            }
            Error::DegreeExhausted { .. } | Error::CertificationFailed { .. } | Error::SlackTooLarge { .. } => {
                CliError::Failed(e.to_string())
            }
        }
    }
}

/// What a subcommand produced, before timing and echo are attached.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub results: Value,
    pub certificate: Option<Certificate>,
    pub passed: bool,
}

/// Runs one command. `Err` only for configuration errors; computational
/// failures come back as a report with exit code 1.
pub fn run(command: &args::Command) -> Result<(RunReport, i32), CliError> {
    let start = Instant::now();
    let outcome = match commands::dispatch(command) {
        Ok(o) => o,
        Err(CliError::Failed(msg)) => Outcome { results: json!({ "error": msg }), certificate: None, passed: false },
        Err(e) => return Err(e),
    };
    let report = RunReport {
        schema_version: SCHEMA_VERSION.to_string(),
        command: commands::command_name(command).to_string(),
        inputs_echo: serde_json::to_value(command).expect("arguments are plain data"),
        results: outcome.results,
        certificate: outcome.certificate,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    Ok((report, if outcome.passed { 0 } else { 1 }))
}

/// Reads `UAT_TOPO_THREADS`; `None` when unset.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("UAT_TOPO_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("UAT_TOPO_THREADS must be a positive integer, got `{s}`"))),
        Err(e) => Err(CliError::Config(format!("UAT_TOPO_THREADS: {e}"))),
    }
}
