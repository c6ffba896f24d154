//! Experiment runner: JSON configs in, CSV and JSON reports out.
//!
//! Exit codes: 0 when the command ran (a diverging run still counts), 1 for
//! configuration or usage errors, 2 for numeric failures and failed
//! reproduction checks.

pub mod commands;
pub mod config;
pub mod report;

use std::path::Path;

use thiserror::Error;

pub use commands::{
    cmd_analyze, cmd_classify, cmd_reproduce, cmd_solve, cmd_sweep, Artifact, CommandOutput, RunContext, StepInputs,
    REPRODUCE_CASES,
};
pub use config::{ExperimentConfig, Format};
pub use report::{RunReport, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

/// Writes the artifacts whose format is listed in `formats` into `dir`.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact], formats: &[Format]) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in artifacts.iter().filter(|a| formats.contains(&a.format)) {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
        written.push(a.name.clone());
    }
    Ok(written)
}
