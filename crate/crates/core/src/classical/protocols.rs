use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evolve, sample_initial, CellRegion, ClassicalError};
use crate::observables::{blocked_mean, CurrentSeries};
use crate::params::SimulationParams;

/// Block length of the autocorrelation-aware standard error of `J_inf`.
pub const STDERR_BLOCK_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCurrent {
    pub j_inf: f64,
    /// Blocked standard error over the averaging window.
    pub stderr: f64,
    /// The full `J(t)` record from `t = 0`.
    pub series: CurrentSeries,
}

/// Runs `transient` kicks, then averages `J(t)` over the next `window` kicks
/// (or takes `J(transient)` alone when `window == 0`).
pub fn asymptotic_current(
    params: &SimulationParams,
    region: &CellRegion,
    transient: usize,
    window: usize,
    count: usize,
) -> Result<AsymptoticCurrent, ClassicalError> {
    if transient + window == 0 {
        return Err(ClassicalError::NoKicks);
    }
    let params = params.validate()?;
    let mut ensemble = sample_initial(count, region, params.seed)?;
    let series = evolve(&mut ensemble, &params, transient + window);
    let currents = series.currents();
    let tail = if window == 0 { &currents[transient..] } else { &currents[transient + 1..] };
    let (j_inf, stderr) = blocked_mean(tail, STDERR_BLOCK_LEN);
    Ok(AsymptoticCurrent { j_inf, stderr, series })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationProtocol {
    /// Kicks discarded before recording.
    pub transient: usize,
    /// Kicks recorded per trajectory.
    pub retained: usize,
    /// Trajectories per `Gamma`.
    pub count: usize,
    /// Most momenta kept per `Gamma`; larger records are thinned by a fixed stride.
    pub sample_cap: usize,
}

impl Default for BifurcationProtocol {
    fn default() -> Self {
        Self { transient: 140_000, retained: 5_000, count: 5_000, sample_cap: 50_000 }
    }
}

impl BifurcationProtocol {
    pub fn stride(&self) -> usize {
        let total = self.count * self.retained;
        total.div_ceil(self.sample_cap.max(1)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationScan {
    pub gamma_grid: Vec<f64>,
    /// Retained momenta per grid point, trajectory-major.
    pub samples: Vec<Vec<f64>>,
    pub protocol: BifurcationProtocol,
}

impl BifurcationScan {
    pub fn interquartile_ranges(&self) -> Vec<f64> {
        self.samples.iter().map(|s| interquartile_range(s)).collect()
    }
}

/// Seed for grid point `index`, decorrelated from neighbouring points.
fn grid_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// For each `Gamma`: a fresh ensemble in `region`, `transient` discarded kicks,
/// then the momentum of every trajectory at each of `retained` further kicks.
pub fn bifurcation_scan(
    gamma_grid: &[f64],
    template: &SimulationParams,
    protocol: &BifurcationProtocol,
    region: &CellRegion,
) -> Result<BifurcationScan, ClassicalError> {
    if gamma_grid.is_empty() {
        return Err(ClassicalError::EmptyGrid);
    }
    if protocol.retained == 0 {
        return Err(ClassicalError::NoKicks);
    }
    let params: Vec<SimulationParams> = gamma_grid
        .iter()
        .map(|&gamma| SimulationParams { gamma, ..*template }.validate())
        .collect::<Result<_, _>>()?;
    let stride = protocol.stride();
    let samples = params
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut ensemble = sample_initial(protocol.count, region, grid_seed(p.seed, i))?;
            ensemble.advance(p, protocol.transient);
            Ok(ensemble.collect_momenta(p, protocol.retained, stride))
        })
        .collect::<Result<Vec<_>, ClassicalError>>()?;
    Ok(BifurcationScan { gamma_grid: gamma_grid.to_vec(), samples, protocol: *protocol })
}

/// Interquartile range with linearly interpolated quantiles.
pub fn interquartile_range(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |f: f64| {
        let pos = f * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    q(0.75) - q(0.25)
}
