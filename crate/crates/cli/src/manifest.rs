//! `manifest.json`: what ran, with which settings, and whether it finished.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub label: String,
    pub complete: bool,
    /// Last period reached by a quantum job.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renormalizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substeps: Option<usize>,
}

impl JobRecord {
    pub fn pending(label: &str) -> Self {
        Self { label: label.to_string(), complete: false, step: None, renormalizations: None, substeps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub workers: usize,
    pub complete: bool,
    /// The config as resolved after command-line overrides.
    pub config: ExperimentConfig,
    pub jobs: Vec<JobRecord>,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub const FILE: &'static str = "manifest.json";

    pub fn new(config: &ExperimentConfig, started_unix: u64, workers: usize) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.params.seed,
            started_unix,
            wall_time_s: 0.0,
            workers,
            complete: false,
            config: config.clone(),
            jobs: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(dir.join(Self::FILE))?;
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", Self::FILE)))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        let tmp = dir.join("manifest.json.part");
        fs::write(&tmp, text + "\n")?;
        fs::rename(tmp, dir.join(Self::FILE))?;
        Ok(())
    }
}
