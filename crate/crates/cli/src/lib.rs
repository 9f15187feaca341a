//! Config-driven experiment runner. Each config expands into independent
//! jobs (one per temperature, `Gamma` or `hbar_eff` point) whose CSV
//! artifacts land in one directory next to a `manifest.json`.

pub mod config;
pub mod manifest;
pub mod presets;
pub mod runner;

use ratchet_core::classical::ClassicalError;
use ratchet_core::output::OutputError;
use ratchet_core::quantum::QuantumError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use runner::{resume, run, Outcome, RunOptions};

/// Output directory used when `--out` is absent.
pub const OUT_ENV: &str = "RATCHET_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::ComplexCurrent(_) | QuantumError::BasisOverflow { .. } | QuantumError::TraceDrift { .. } => {
                CliError::Numerical(e.to_string())
            }
            QuantumError::Io(e) => CliError::Io(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<ClassicalError> for CliError {
    fn from(e: ClassicalError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ratchet_core::ParamError> for CliError {
    fn from(e: ratchet_core::ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OutputError> for CliError {
    fn from(e: OutputError) -> Self {
        CliError::Io(e.to_string())
    }
}
