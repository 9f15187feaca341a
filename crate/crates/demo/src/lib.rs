//! Small classical experiments for the browser. Each export returns a flat
//! `Float64Array`; the plain functions underneath are what native code and
//! tests call.

use ratchet_core::classical::{bifurcation_scan, evolve, sample_initial, BifurcationProtocol, CellRegion};
use ratchet_core::observables::{poincare_histogram, PhaseWindow};
use ratchet_core::SimulationParams;
use wasm_bindgen::prelude::*;

/// Keeps a browser tab responsive.
pub const MAX_KICKS: usize = 20_000_000;

fn params(gamma: f64, temperature: f64, seed: u32) -> Result<SimulationParams, String> {
    SimulationParams::standard(gamma, temperature).with_seed(seed as u64).validate().map_err(|e| e.to_string())
}

fn budget(count: usize, steps: usize) -> Result<(), String> {
    match count.checked_mul(steps) {
        Some(n) if n <= MAX_KICKS => Ok(()),
        _ => Err(format!("{count} trajectories x {steps} kicks is over the demo limit of {MAX_KICKS}")),
    }
}

/// `J(t)` for `t = 0..=steps`, starting from the full circle.
pub fn current_curve(gamma: f64, temperature: f64, count: usize, steps: usize, seed: u32) -> Result<Vec<f64>, String> {
    budget(count, steps)?;
    let params = params(gamma, temperature, seed)?;
    let mut ensemble = sample_initial(count, &CellRegion::full_circle(), params.seed).map_err(|e| e.to_string())?;
    Ok(evolve(&mut ensemble, &params, steps).currents())
}

/// `(gamma, p)` pairs, flattened, for `points` values of `Gamma`.
#[allow(clippy::too_many_arguments)]
pub fn bifurcation_strip(
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
    temperature: f64,
    count: usize,
    transient: usize,
    retained: usize,
    seed: u32,
) -> Result<Vec<f64>, String> {
    if points < 2 {
        return Err("need at least two gamma values".into());
    }
    budget(count * points, transient + retained)?;
    let template = params(gamma_min, temperature, seed)?;
    let grid: Vec<f64> =
        (0..points).map(|i| gamma_min + (gamma_max - gamma_min) * i as f64 / (points - 1) as f64).collect();
    let protocol = BifurcationProtocol { transient, retained, count, sample_cap: count * retained };
    let scan = bifurcation_scan(&grid, &template, &protocol, &CellRegion::default()).map_err(|e| e.to_string())?;
    Ok(scan.gamma_grid.iter().zip(&scan.samples).flat_map(|(g, ps)| ps.iter().flat_map(move |p| [*g, *p])).collect())
}

/// Poincaré density after `steps` kicks, `p_bins` rows of `x_bins` values,
/// rows in ascending momentum.
#[allow(clippy::too_many_arguments)]
pub fn portrait(
    gamma: f64,
    temperature: f64,
    count: usize,
    steps: usize,
    x_bins: usize,
    p_bins: usize,
    p_min: f64,
    p_max: f64,
    seed: u32,
) -> Result<Vec<f64>, String> {
    budget(count, steps)?;
    if x_bins == 0 || p_bins == 0 || !(p_min < p_max) {
        return Err("raster needs bins and p_min < p_max".into());
    }
    let params = params(gamma, temperature, seed)?;
    let mut ensemble = sample_initial(count, &CellRegion::full_circle(), params.seed).map_err(|e| e.to_string())?;
    ensemble.advance(&params, steps);
    Ok(poincare_histogram(ensemble.points(), PhaseWindow { x_bins, p_bins, p_min, p_max }).values)
}

#[wasm_bindgen(js_name = currentCurve)]
pub fn current_curve_js(gamma: f64, temperature: f64, count: usize, steps: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    current_curve(gamma, temperature, count, steps, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bifurcationStrip)]
#[allow(clippy::too_many_arguments)]
pub fn bifurcation_strip_js(
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
    temperature: f64,
    count: usize,
    transient: usize,
    retained: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    bifurcation_strip(gamma_min, gamma_max, points, temperature, count, transient, retained, seed)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = portrait)]
#[allow(clippy::too_many_arguments)]
pub fn portrait_js(
    gamma: f64,
    temperature: f64,
    count: usize,
    steps: usize,
    x_bins: usize,
    p_bins: usize,
    p_min: f64,
    p_max: f64,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    portrait(gamma, temperature, count, steps, x_bins, p_bins, p_min, p_max, seed).map_err(|e| JsError::new(&e))
}
