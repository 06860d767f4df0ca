//! Experiment runner behind the `bvlab` binary.

pub mod config;
pub mod experiments;
pub mod output;
pub mod reference;

use config::{Experiment, ExperimentConfig};
use output::Table;

/// Worker-count environment variable read by the binary.
pub const WORKERS_ENV: &str = "BVLAB_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(#[from] bv_noise::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) | CliError::Io(_) => 2,
        }
    }
}

/// Runs one experiment. Returns the table and, for `fit`, a text report.
pub fn run(cfg: &ExperimentConfig) -> Result<(Table, Option<String>), CliError> {
    match cfg.experiment {
        Experiment::Sweep => experiments::run_sweep(cfg).map(|t| (t, None)),
        Experiment::SqueezedSweep => experiments::run_squeezed_sweep(cfg).map(|t| (t, None)),
        Experiment::Advantage => experiments::run_advantage(cfg).map(|t| (t, None)),
        Experiment::Clt => experiments::run_clt(cfg).map(|t| (t, None)),
        Experiment::Fit => experiments::run_fit(cfg).map(|(t, r)| (t, Some(r))),
    }
}
