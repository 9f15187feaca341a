//! Experiment configuration, read from TOML.

use std::fmt;

use ratchet_core::classical::CellRegion;
use ratchet_core::observables::{HusimiOptions, PhaseWindow};
use ratchet_core::{CouplingRule, QuantumParams, SimulationParams, Splitting};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Classical,
    Quantum,
    Both,
}

impl Engine {
    pub fn classical(self) -> bool {
        matches!(self, Engine::Classical | Engine::Both)
    }

    pub fn quantum(self) -> bool {
        matches!(self, Engine::Quantum | Engine::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Retained momenta over a `Gamma` grid, one file per temperature.
    Bifurcation,
    /// `J(t)` for `protocol.steps` kicks.
    Current,
    /// `J_inf` over temperatures, or over `Gamma` when `protocol.gammas` is set.
    AsymptoticScan,
    /// Snapshot at `t = protocol.steps`: Poincaré histogram (classical) and
    /// Husimi distribution (quantum).
    Portrait,
    /// Husimi distribution at `t = protocol.steps`.
    Husimi,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::Bifurcation => "bifurcation",
            Experiment::Current => "current",
            Experiment::AsymptoticScan => "asymptotic-scan",
            Experiment::Portrait => "portrait",
            Experiment::Husimi => "husimi",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// Minutes on a desktop.
    #[default]
    Desk,
    /// Hours; quantum jobs checkpoint as they go.
    Extended,
}

/// A list of values, or `points` evenly spaced values from `start` to `stop`
/// inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Protocol {
    /// Kicks recorded by `current`; snapshot time of `portrait` and `husimi`.
    pub steps: usize,
    /// Kicks discarded before averaging or recording.
    pub transient: usize,
    /// Kicks averaged into `J_inf`.
    pub window: usize,
    /// Classical trajectories.
    pub count: usize,
    /// Kicks recorded per trajectory in a bifurcation scan.
    pub retained: usize,
    /// Most momenta written per `Gamma`.
    pub sample_cap: usize,
    /// Empty means `params.temperature` alone.
    pub temperatures: Vec<f64>,
    pub gammas: Option<Grid>,
    /// `J_inf` over `Gamma` next to a bifurcation diagram.
    pub inset: Option<Inset>,
    pub region: CellRegion,
    pub raster: PhaseWindow,
    pub husimi: HusimiOptions,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            steps: 100,
            transient: 100,
            window: 100,
            count: 100_000,
            retained: 5_000,
            sample_cap: 50_000,
            temperatures: Vec::new(),
            gammas: None,
            inset: None,
            region: CellRegion::default(),
            raster: PhaseWindow::default(),
            husimi: HusimiOptions::default(),
        }
    }
}

/// Asymptotic-current companion of a bifurcation scan, with its own protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inset {
    pub gammas: Grid,
    pub transient: usize,
    pub window: usize,
    pub count: usize,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn two() -> usize {
    2
}

fn tail_threshold() -> f64 {
    1e-6
}

fn ten() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    pub hbar_eff: Vec<f64>,
    /// Basis half-width per `hbar_eff`; empty picks the default span.
    #[serde(default)]
    pub n_max: Vec<usize>,
    /// Overrides `protocol.temperatures` for the quantum jobs.
    #[serde(default)]
    pub temperatures: Option<Vec<f64>>,
    #[serde(default)]
    pub substeps: Option<usize>,
    #[serde(default = "one")]
    pub temperature_scale: f64,
    #[serde(default)]
    pub coupling: CouplingRule,
    #[serde(default)]
    pub diagonal_dissipator: bool,
    #[serde(default = "yes")]
    pub kick_last: bool,
    #[serde(default)]
    pub splitting: Splitting,
    #[serde(default = "two")]
    pub tail_margin: usize,
    #[serde(default = "tail_threshold")]
    pub tail_threshold: f64,
    /// Periods between checkpoints.
    #[serde(default = "ten")]
    pub checkpoint_every: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub engine: Engine,
    pub experiment: Experiment,
    /// Artifact directory, relative to the output root.
    pub output: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub tier: Tier,
    /// Expected wall time, free text.
    #[serde(default)]
    pub runtime: Option<String>,
    pub params: SimulationParams,
    #[serde(default)]
    pub quantum: Option<QuantumSection>,
    #[serde(default)]
    pub protocol: Protocol,
}

fn invalid(field: &str, message: impl fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

fn check_temperatures(field: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        Some(t) => Err(invalid(field, format!("temperature must be finite and non-negative, got {t}"))),
        None => Ok(()),
    }
}

fn check_grid(field: &str, grid: &Grid) -> Result<Vec<f64>, CliError> {
    let values = grid.values();
    if values.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    if let Some(g) = values.iter().find(|g| !(g.is_finite() && **g > 0.0 && **g <= 1.0)) {
        return Err(invalid(field, format!("gamma must lie in (0, 1], got {g}")));
    }
    Ok(values)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that does not need a run: supported combinations,
    /// parameter ranges, and basis sizes.
    pub fn validate(&self) -> Result<(), CliError> {
        use Experiment::*;
        match (self.experiment, self.engine) {
            (Husimi, Engine::Classical | Engine::Both) => {
                return Err(invalid("engine", "husimi needs engine = \"quantum\""))
            }
            (Bifurcation, Engine::Quantum | Engine::Both) => {
                return Err(invalid("engine", "bifurcation needs engine = \"classical\""))
            }
            _ => {}
        }
        if self.output.trim().is_empty() || self.output.contains("..") {
            return Err(invalid("output", "must be a non-empty relative name"));
        }
        self.params.validate().map_err(|e| invalid("params", e))?;
        let p = &self.protocol;
        p.region.validate().map_err(|e| invalid("protocol.region", e))?;
        check_temperatures("protocol.temperatures", &p.temperatures)?;
        if p.raster.x_bins == 0 || p.raster.p_bins == 0 || !(p.raster.p_min < p.raster.p_max) {
            return Err(invalid("protocol.raster", "needs non-zero bins and p_min < p_max"));
        }
        if !(p.husimi.width_ratio > 0.0 && p.husimi.cutoff_sigmas > 0.0) {
            return Err(invalid("protocol.husimi", "width_ratio and cutoff_sigmas must be positive"));
        }
        if self.engine.classical() && p.count == 0 {
            return Err(invalid("protocol.count", "needs at least one trajectory"));
        }
        match self.experiment {
            Bifurcation => {
                check_grid("protocol.gammas", p.gammas.as_ref().ok_or_else(|| invalid("protocol.gammas", "required"))?)?;
                if p.retained == 0 {
                    return Err(invalid("protocol.retained", "must be at least 1"));
                }
                if let Some(inset) = &p.inset {
                    check_grid("protocol.inset.gammas", &inset.gammas)?;
                    if inset.count == 0 || inset.transient + inset.window == 0 {
                        return Err(invalid("protocol.inset", "needs trajectories and at least one kick"));
                    }
                }
            }
            Current | Portrait | Husimi => {
                if p.steps == 0 {
                    return Err(invalid("protocol.steps", "must be at least 1"));
                }
            }
            AsymptoticScan => {
                if p.transient + p.window == 0 {
                    return Err(invalid("protocol", "transient + window must be at least 1"));
                }
                if let Some(gammas) = &p.gammas {
                    check_grid("protocol.gammas", gammas)?;
                    if p.temperatures.len() > 1 {
                        return Err(invalid("protocol", "scan over gammas or over temperatures, not both"));
                    }
                }
            }
        }
        if self.engine.quantum() {
            let q = self.quantum.as_ref().ok_or_else(|| invalid("quantum", "required when the quantum engine runs"))?;
            if q.hbar_eff.is_empty() {
                return Err(invalid("quantum.hbar_eff", "needs at least one value"));
            }
            if !q.n_max.is_empty() && q.n_max.len() != q.hbar_eff.len() {
                return Err(invalid(
                    "quantum.n_max",
                    format!("expected {} entries (one per hbar_eff), found {}", q.hbar_eff.len(), q.n_max.len()),
                ));
            }
            if let Some(ts) = &q.temperatures {
                check_temperatures("quantum.temperatures", ts)?;
                if self.experiment == AsymptoticScan && p.gammas.is_some() && ts.len() > 1 {
                    return Err(invalid("quantum.temperatures", "a gamma scan takes a single temperature"));
                }
            }
            if q.checkpoint_every == 0 {
                return Err(invalid("quantum.checkpoint_every", "must be at least 1"));
            }
            for (i, &hbar) in q.hbar_eff.iter().enumerate() {
                let params = self.quantum_params(hbar, i, self.params.temperature, self.params.gamma);
                let params = params.validate().map_err(|e| invalid("quantum", e))?;
                let n_cell = (std::f64::consts::PI / hbar).floor() as usize;
                if n_cell > params.n_max {
                    return Err(invalid(
                        "quantum.n_max",
                        format!("basis n_max = {} is smaller than the initial cell ({n_cell}) at hbar_eff = {hbar}", params.n_max),
                    ));
                }
            }
        } else if self.quantum.is_some() {
            return Err(invalid("quantum", "given, but engine = \"classical\""));
        }
        Ok(())
    }

    /// Temperatures for the classical jobs.
    pub fn classical_temperatures(&self) -> Vec<f64> {
        if self.protocol.temperatures.is_empty() {
            vec![self.params.temperature]
        } else {
            self.protocol.temperatures.clone()
        }
    }

    pub fn quantum_temperatures(&self) -> Vec<f64> {
        match self.quantum.as_ref().and_then(|q| q.temperatures.clone()) {
            Some(ts) if !ts.is_empty() => ts,
            _ => self.classical_temperatures(),
        }
    }

    /// Quantum parameters for the `index`-th `hbar_eff` at the given bath.
    pub fn quantum_params(&self, hbar: f64, index: usize, temperature: f64, gamma: f64) -> QuantumParams {
        let q = self.quantum.as_ref().expect("quantum section checked by validate");
        let base = SimulationParams { temperature, gamma, ..self.params };
        let mut params = QuantumParams::new(base, hbar);
        if let Some(&n) = q.n_max.get(index) {
            params.n_max = n;
        }
        params.substeps = q.substeps;
        params.temperature_scale = q.temperature_scale;
        params.coupling = q.coupling;
        params.diagonal_dissipator = q.diagonal_dissipator;
        params.kick_last = q.kick_last;
        params.splitting = q.splitting;
        params.tail_margin = q.tail_margin;
        params.tail_threshold = q.tail_threshold;
        params
    }
}
