use num_complex::Complex64;

use super::density::{quantum_current, tail_population, DensityMatrix, MomentumBasis};
use super::dissipator::DissipatorContext;
use super::kick::KickUnitary;
use super::QuantumError;
use crate::observables::CurrentSeries;
use crate::params::{QuantumParams, Splitting};

/// Trace drift above which the state is renormalised.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-10;
/// Trace drift of one dissipative stretch that aborts the run.
pub const STRETCH_DRIFT_LIMIT: f64 = 1e-6;

/// Per-level phases `exp(-i fraction hbar n^2 / 2)` of free rotation over a
/// fraction of one period.
fn free_phases(basis: MomentumBasis, hbar_eff: f64, fraction: f64) -> Vec<Complex64> {
    (0..basis.dim())
        .map(|i| {
            let n = basis.level(i) as f64;
            Complex64::from_polar(1.0, -fraction * hbar_eff * n * n / 2.0)
        })
        .collect()
}

fn apply_phases(data: &mut [Complex64], phases: &[Complex64]) {
    let d = phases.len();
    for (row, ph_i) in data.chunks_mut(d).zip(phases) {
        for (v, ph_j) in row.iter_mut().zip(phases) {
            *v *= ph_i * ph_j.conj();
        }
    }
}

/// Free rotor evolution over `fraction` of a period:
/// `rho_{nn'} *= exp(-i fraction hbar (n^2 - n'^2) / 2)`.
pub fn free_phase(rho: &mut DensityMatrix, fraction: f64) {
    let phases = free_phases(rho.basis(), rho.hbar_eff(), fraction);
    apply_phases(rho.as_mut_slice(), &phases);
}

/// What happened to the state during one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodReport {
    /// `|tr(rho) - 1|` at the end of the period, before renormalisation.
    pub trace_drift: f64,
    /// Trace divided out, when renormalisation was needed.
    pub renormalized: Option<f64>,
    pub tail: f64,
}

/// Integrates the master equation period by period: a delta kick, one period
/// of free rotation and one unit of time under the bath. Free rotation is
/// always applied exactly; only the bath goes through RK4.
pub struct QuantumEngine {
    params: QuantumParams,
    context: DissipatorContext,
    kick: KickUnitary,
    substeps: usize,
    half_step: Vec<Complex64>,
    full_step: Vec<Complex64>,
    period_step: Vec<Complex64>,
    k: Vec<Complex64>,
    tmp: Vec<Complex64>,
    acc: Vec<Complex64>,
    renormalizations: usize,
}

impl std::fmt::Debug for QuantumEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantumEngine")
            .field("params", &self.params)
            .field("substeps", &self.substeps)
            .finish_non_exhaustive()
    }
}

impl QuantumEngine {
    pub fn new(params: &QuantumParams) -> Result<Self, QuantumError> {
        let params = params.validate()?;
        let context = DissipatorContext::new(&params)?;
        Ok(Self::with_context(params, context))
    }

    pub fn with_context(params: QuantumParams, context: DissipatorContext) -> Self {
        let substeps = params.substeps.unwrap_or_else(|| context.default_substeps());
        let basis = context.basis();
        let dt = 1.0 / substeps as f64;
        let d2 = basis.dim() * basis.dim();
        let zero = Complex64::new(0.0, 0.0);
        Self {
            kick: KickUnitary::new(&params),
            half_step: free_phases(basis, params.hbar_eff, 0.5 * dt),
            full_step: free_phases(basis, params.hbar_eff, dt),
            period_step: free_phases(basis, params.hbar_eff, 1.0),
            params,
            context,
            substeps,
            k: vec![zero; d2],
            tmp: vec![zero; d2],
            acc: vec![zero; d2],
            renormalizations: 0,
        }
    }

    pub fn params(&self) -> &QuantumParams {
        &self.params
    }

    pub fn context(&self) -> &DissipatorContext {
        &self.context
    }

    pub fn kick(&self) -> &KickUnitary {
        &self.kick
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn renormalizations(&self) -> usize {
        self.renormalizations
    }

    pub fn initial_state(&self) -> Result<DensityMatrix, QuantumError> {
        DensityMatrix::initial_cell_state(self.context.basis(), self.params.hbar_eff)
    }

    fn rk4_substep(&mut self, y: &mut [Complex64]) {
        let dt = 1.0 / self.substeps as f64;
        let ctx = &self.context;
        ctx.apply_into(y, &mut self.k);
        self.acc.copy_from_slice(&self.k);
        for (stage, weight) in [(0.5 * dt, 2.0), (0.5 * dt, 2.0), (dt, 1.0)] {
            for ((t, yv), kv) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k) {
                *t = yv + kv * stage;
            }
            ctx.apply_into(&self.tmp, &mut self.k);
            for (a, kv) in self.acc.iter_mut().zip(&self.k) {
                *a += kv * weight;
            }
        }
        let f = dt / 6.0;
        for (yv, a) in y.iter_mut().zip(&self.acc) {
            *yv += a * f;
        }
    }

    /// One period of free rotation and one unit of time under the bath,
    /// combined as `params.splitting` says. Returns the trace drift.
    pub fn dissipative_stretch(&mut self, rho: &mut DensityMatrix) -> f64 {
        let before = rho.trace().re;
        let data = rho.as_mut_slice();
        match self.params.splitting {
            Splitting::Sequential => {
                apply_phases(data, &self.period_step);
                for _ in 0..self.substeps {
                    self.rk4_substep(data);
                }
            }
            Splitting::Simultaneous => {
                apply_phases(data, &self.half_step);
                for s in 0..self.substeps {
                    if s > 0 {
                        apply_phases(data, &self.full_step);
                    }
                    self.rk4_substep(data);
                }
                apply_phases(data, &self.half_step);
            }
        }
        (rho.trace().re - before).abs()
    }

    pub fn evolve_one_period(&mut self, rho: &mut DensityMatrix) -> Result<PeriodReport, QuantumError> {
        if !self.params.kick_last {
            self.kick.apply(rho);
        }
        let drift = self.dissipative_stretch(rho);
        if drift > STRETCH_DRIFT_LIMIT {
            return Err(QuantumError::TraceDrift { drift, substeps: self.substeps });
        }
        if self.params.kick_last {
            self.kick.apply(rho);
        }
        let tail = tail_population(rho, self.params.tail_margin);
        if tail > self.params.tail_threshold {
            return Err(QuantumError::BasisOverflow { tail, n_max: self.params.n_max });
        }
        let trace_drift = (rho.trace().re - 1.0).abs();
        let renormalized = (trace_drift > RENORMALIZE_THRESHOLD).then(|| {
            self.renormalizations += 1;
            rho.renormalize()
        });
        Ok(PeriodReport { trace_drift, renormalized, tail })
    }

    /// Evolves `periods` kicks from kick index `start`, recording `J(t)` at
    /// `start` and after each period. `on_period` sees every new state.
    pub fn evolve<F>(
        &mut self,
        rho: &mut DensityMatrix,
        start: u64,
        periods: usize,
        mut on_period: F,
    ) -> Result<CurrentSeries, QuantumError>
    where
        F: FnMut(u64, &DensityMatrix, &PeriodReport) -> Result<(), QuantumError>,
    {
        let mut series = CurrentSeries::new();
        series.push(start, quantum_current(rho)?, None);
        for s in 1..=periods as u64 {
            let report = self.evolve_one_period(rho)?;
            series.push(start + s, quantum_current(rho)?, None);
            on_period(start + s, rho, &report)?;
        }
        Ok(series)
    }
}
