//! Classical engine: the noisy dissipative kicked map
//!
//! ```text
//! p' = Gamma p + K [sin x + a sin(2x + Phi)] + xi
//! x' = x + p'
//! ```
//!
//! with `xi` Gaussian of variance `2 (1 - Gamma) T`.

mod ensemble;
mod protocols;

use std::f64::consts::TAU;

use thiserror::Error;

use crate::params::{ParamError, SimulationParams};

pub use ensemble::{evolve, sample_initial, CellRegion, Ensemble};
pub use protocols::{
    asymptotic_current, bifurcation_scan, interquartile_range, AsymptoticCurrent,
    BifurcationProtocol, BifurcationScan, STDERR_BLOCK_LEN,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("ensemble needs at least one trajectory")]
    EmptyEnsemble,
    #[error("gamma grid is empty")]
    EmptyGrid,
    #[error("protocol needs at least one kick")]
    NoKicks,
    #[error("invalid cell region: {0}")]
    BadRegion(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// A classical state. `x` is kept unwrapped; it is folded onto the circle only
/// when the force is evaluated or the point is plotted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

/// `K [sin x + a sin(2x + Phi)]`, evaluated at `x mod 2 pi`.
#[inline]
pub fn kick_force(x: f64, params: &SimulationParams) -> f64 {
    let x = x.rem_euclid(TAU);
    params.kick_strength * (x.sin() + params.asymmetry * (2.0 * x + params.phase).sin())
}

/// One application of the map with an externally drawn noise sample. The
/// position update uses the new momentum.
#[inline]
pub fn step(point: PhasePoint, params: &SimulationParams, noise: f64) -> PhasePoint {
    let p = params.gamma * point.p + kick_force(point.x, params) + noise;
    PhasePoint { x: point.x + p, p }
}
