//! Physical parameters shared by both engines.
//!
//! All quantities are in scaled map units with `k_B = 1`: the kick strength is
//! `K = hbar_eff * k`, temperatures are energies in units of `p^2`, and the
//! kicking period has been absorbed into the momentum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Momentum span used to size the default quantum basis.
pub const DEFAULT_MOMENTUM_SPAN: f64 = 40.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("gamma out of [0,1]: {0}")]
    GammaOutOfRange(f64),
    #[error("negative temperature: {0}")]
    NegativeTemperature(f64),
    #[error("kick_strength must be positive: {0}")]
    NonPositiveKick(f64),
    #[error("{field} must be finite")]
    NonFinite { field: &'static str },
    #[error("coupling diverges at gamma = {0} under the {1} rule")]
    DivergentCoupling(f64, &'static str),
    #[error("hbar_eff must be positive: {0}")]
    NonPositiveHbar(f64),
    #[error("n_max must be at least 1")]
    EmptyBasis,
    #[error("substeps must be at least 1")]
    ZeroSubsteps,
    #[error("temperature_scale must be finite and non-negative: {0}")]
    BadTemperatureScale(f64),
    #[error("derived kick k = K/hbar_eff is not finite")]
    NonFiniteKick,
}

/// Parameters of the noisy dissipative kicked map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationParams {
    /// Scaled kick strength `K`.
    pub kick_strength: f64,
    /// Amplitude `a` of the second harmonic.
    pub asymmetry: f64,
    /// Phase `Phi` of the second harmonic, radians.
    pub phase: f64,
    /// Per-kick momentum contraction `Gamma`; 1 is Hamiltonian.
    pub gamma: f64,
    /// Scaled temperature.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SimulationParams {
    /// The chaotic-transport parameter set (`K = 7`, `a = 0.7`, `Phi = pi/2`).
    pub fn standard(gamma: f64, temperature: f64) -> Self {
        Self {
            kick_strength: 7.0,
            asymmetry: 0.7,
            phase: std::f64::consts::FRAC_PI_2,
            gamma,
            temperature,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        validate(self)
    }

    /// Standard deviation of the per-kick thermal noise.
    pub fn noise_std(&self) -> f64 {
        noise_std(self.gamma, self.temperature)
    }
}

pub fn validate(params: SimulationParams) -> Result<SimulationParams, ParamError> {
    for (field, value) in [
        ("kick_strength", params.kick_strength),
        ("asymmetry", params.asymmetry),
        ("phase", params.phase),
        ("gamma", params.gamma),
        ("temperature", params.temperature),
    ] {
        if !value.is_finite() {
            return Err(ParamError::NonFinite { field });
        }
    }
    if !(0.0..=1.0).contains(&params.gamma) {
        return Err(ParamError::GammaOutOfRange(params.gamma));
    }
    if params.temperature < 0.0 {
        return Err(ParamError::NegativeTemperature(params.temperature));
    }
    if params.kick_strength <= 0.0 {
        return Err(ParamError::NonPositiveKick(params.kick_strength));
    }
    Ok(params)
}

/// Bath coupling `g = -ln(1 - Gamma)`.
pub fn coupling_constant(gamma: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ParamError::GammaOutOfRange(gamma));
    }
    if gamma == 1.0 {
        return Err(ParamError::DivergentCoupling(gamma, "log-complement"));
    }
    Ok(-(1.0 - gamma).ln())
}

/// Bath coupling for which the zero-temperature master equation contracts the
/// mean momentum by exactly `Gamma` per unit time, matching the classical map:
/// `g = -ln(Gamma) / 2`.
///
/// The factor one half compensates the doubled dissipator normalisation
/// (`[L, rho L^dag] + [L rho, L^dag] = 2 L rho L^dag - {L^dag L, rho}`).
pub fn momentum_decay_coupling(gamma: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ParamError::GammaOutOfRange(gamma));
    }
    if gamma == 0.0 {
        return Err(ParamError::DivergentCoupling(gamma, "momentum-decay"));
    }
    Ok(-0.5 * gamma.ln())
}

/// `sqrt(2 (1 - Gamma) T)`, the fluctuation-dissipation noise amplitude.
pub fn noise_std(gamma: f64, temperature: f64) -> f64 {
    (2.0 * (1.0 - gamma) * temperature).max(0.0).sqrt()
}

/// How the bath coupling `g` is derived from `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingRule {
    /// `g = -ln(Gamma)/2`: quantum momentum decay equals the classical `Gamma`.
    #[default]
    MomentumDecay,
    /// `g = -ln(1 - Gamma)`.
    LogComplement,
}

impl CouplingRule {
    pub fn coupling(self, gamma: f64) -> Result<f64, ParamError> {
        match self {
            CouplingRule::MomentumDecay => momentum_decay_coupling(gamma),
            CouplingRule::LogComplement => coupling_constant(gamma),
        }
    }
}

/// How free rotation and the bath share one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    /// Free rotation over the whole period, then the bath over unit time.
    /// The classical limit is the kicked map itself (`x' = x + p'`).
    #[default]
    Sequential,
    /// Free rotation and bath act together, Strang-split around every RK4
    /// substep. Momentum decays while the rotor turns, so the flight per
    /// period is `p (1 - Gamma) / ln(1/Gamma)` instead of `p`.
    Simultaneous,
}

/// Parameters of the quantum engine. `hbar_eff` plays the role of the kicking
/// period; the unscaled kick is `k = K / hbar_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub base: SimulationParams,
    pub hbar_eff: f64,
    /// Basis spans `n` in `[-n_max, n_max]`.
    pub n_max: usize,
    /// RK4 substeps per period; `None` picks a stable default from the
    /// dissipator's fastest rate.
    pub substeps: Option<usize>,
    /// Multiplier from the configured temperature to the bath temperature.
    pub temperature_scale: f64,
    pub coupling: CouplingRule,
    /// Keep only the `n = n'` terms of the dissipator double sum.
    pub diagonal_dissipator: bool,
    /// Apply the kick at the end of each period, right before the current is
    /// recorded (the classical map's measurement phase).
    pub kick_last: bool,
    pub splitting: Splitting,
    /// Levels counted by the truncation monitor.
    pub tail_margin: usize,
    /// Largest tail population tolerated after a period.
    pub tail_threshold: f64,
}

impl QuantumParams {
    pub fn new(base: SimulationParams, hbar_eff: f64) -> Self {
        Self {
            base,
            hbar_eff,
            n_max: default_n_max(hbar_eff),
            substeps: None,
            temperature_scale: 1.0,
            coupling: CouplingRule::default(),
            diagonal_dissipator: false,
            kick_last: true,
            splitting: Splitting::Sequential,
            tail_margin: 2,
            tail_threshold: 1e-6,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = Some(substeps);
        self
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        validate(self.base)?;
        if !(self.hbar_eff.is_finite() && self.hbar_eff > 0.0) {
            return Err(ParamError::NonPositiveHbar(self.hbar_eff));
        }
        if self.n_max < 1 {
            return Err(ParamError::EmptyBasis);
        }
        if self.substeps == Some(0) {
            return Err(ParamError::ZeroSubsteps);
        }
        if !(self.temperature_scale.is_finite() && self.temperature_scale >= 0.0) {
            return Err(ParamError::BadTemperatureScale(self.temperature_scale));
        }
        if !self.kick().is_finite() {
            return Err(ParamError::NonFiniteKick);
        }
        self.coupling.coupling(self.base.gamma)?;
        Ok(self)
    }

    /// Unscaled kick strength `k = K / hbar_eff`.
    pub fn kick(&self) -> f64 {
        self.base.kick_strength / self.hbar_eff
    }

    /// Kicking period `tau`, equal to `hbar_eff`.
    pub fn period(&self) -> f64 {
        self.hbar_eff
    }

    pub fn bath_temperature(&self) -> f64 {
        self.base.temperature * self.temperature_scale
    }

    pub fn coupling_constant(&self) -> Result<f64, ParamError> {
        self.coupling.coupling(self.base.gamma)
    }

    pub fn dimension(&self) -> usize {
        2 * self.n_max + 1
    }
}

pub fn default_n_max(hbar_eff: f64) -> usize {
    ((DEFAULT_MOMENTUM_SPAN / hbar_eff).ceil() as usize).max(1)
}
