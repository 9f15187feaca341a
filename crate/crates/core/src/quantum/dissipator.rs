//! Bath part of the master equation.
//!
//! For each momentum branch (`n >= 0` and its mirror `n <= 0`) the bath acts
//! through the lowering ladder
//!
//! ```text
//! A = sum_n sqrt(n+(Omega_n)) l(n) |n><n+1|,   B = sum_n sqrt(n-(Omega_n)) l(n) |n+1><n|
//! ```
//!
//! with `l(n) = sqrt(n + 1)`, and the generator is
//! `g sum_C {[C, rho C^dag] + [C rho, C^dag]} = 2g sum_C (C rho C^dag - {C^dag C, rho}/2)`.
//! Keeping `A` as a single operator per branch reproduces the full double sum
//! over `(n, n')`; the diagonal variant uses one operator per transition.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::density::{DensityMatrix, MomentumBasis};
use super::QuantumError;
use crate::params::QuantumParams;

/// Bose occupations `(n+, n-)` of a bath mode of frequency `omega` at
/// temperature `T`: `n- = 1 / (exp(omega / T) - 1)`, `n+ = n- + 1`.
pub fn thermal_occupations(omega: f64, temperature: f64) -> Result<(f64, f64), QuantumError> {
    if !(omega > 0.0) {
        return Err(QuantumError::NonPositiveFrequency(omega));
    }
    let minus = if temperature > 0.0 { 1.0 / (omega / temperature).exp_m1() } else { 0.0 };
    Ok((minus + 1.0, minus))
}

/// Ladder amplitude of the transition between `|n|` and `|n| + 1`.
#[inline]
pub fn ladder_amplitude(n: usize) -> f64 {
    ((n + 1) as f64).sqrt()
}

/// Sparse real matrix stored by nonempty rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    rows: Vec<(usize, Vec<(usize, f64)>)>,
}

impl SparseOp {
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut map: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
        for (r, c, w) in triplets {
            if w != 0.0 {
                *map.entry(r).or_default().entry(c).or_default() += w;
            }
        }
        let rows = map
            .into_iter()
            .map(|(r, cols)| (r, cols.into_iter().filter(|&(_, w)| w != 0.0).collect::<Vec<_>>()))
            .filter(|(_, cols)| !cols.is_empty())
            .collect();
        Self { dim, rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().flat_map(|(r, cols)| cols.iter().map(move |&(c, w)| (*r, c, w)))
    }

    /// `self^T self`, i.e. `C^dag C` for a real `C`.
    pub fn gram(&self) -> SparseOp {
        let mut triplets = Vec::new();
        for (_, cols) in &self.rows {
            for &(i, w) in cols {
                for &(j, v) in cols {
                    triplets.push((i, j, w * v));
                }
            }
        }
        SparseOp::from_triplets(self.dim, triplets)
    }

    pub fn scaled(&self, s: f64) -> SparseOp {
        SparseOp::from_triplets(self.dim, self.triplets().map(|(r, c, w)| (r, c, w * s)))
    }

    pub fn sum(dim: usize, ops: &[SparseOp]) -> SparseOp {
        SparseOp::from_triplets(dim, ops.iter().flat_map(|o| o.triplets()))
    }

    pub fn max_diagonal(&self) -> f64 {
        self.triplets().filter(|(r, c, _)| r == c).map(|(_, _, w)| w).fold(0.0, f64::max)
    }

    /// `out += scale * C rho C^T`.
    fn add_sandwich(&self, rho: &[Complex64], out: &mut [Complex64], scale: f64) {
        let d = self.dim;
        for (i, ri) in &self.rows {
            let out_row = &mut out[i * d..(i + 1) * d];
            for (j, rj) in &self.rows {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(k, w) in ri {
                    let rho_row = &rho[k * d..(k + 1) * d];
                    for &(l, v) in rj {
                        acc += rho_row[l] * (w * v);
                    }
                }
                out_row[*j] += acc * scale;
            }
        }
    }

    /// `out -= scale * (M rho + rho M)` for symmetric `M = self`.
    fn sub_anticommutator(&self, rho: &[Complex64], out: &mut [Complex64], scale: f64) {
        let d = self.dim;
        for (i, cols) in &self.rows {
            for &(k, w) in cols {
                let f = w * scale;
                let (src, dst) = (&rho[k * d..(k + 1) * d], *i * d);
                for (o, r) in out[dst..dst + d].iter_mut().zip(src) {
                    *o -= r * f;
                }
                for r in 0..d {
                    out[r * d + i] -= rho[r * d + k] * f;
                }
            }
        }
    }
}

/// Precomputed bath data for one parameter set.
#[derive(Debug, Clone)]
pub struct DissipatorContext {
    /// Coupling `g`.
    pub g: f64,
    /// `Omega_n = n + 1/2` for `n in [0, n_max)`.
    pub omegas: Vec<f64>,
    pub occ_plus: Vec<f64>,
    pub occ_minus: Vec<f64>,
    basis: MomentumBasis,
    /// Jump operators with the `sqrt(n+-)` factors folded in.
    channels: Vec<SparseOp>,
    /// `sum_C C^dag C`.
    decay: SparseOp,
    /// Prefactor `2g` of every channel.
    weight: f64,
}

impl DissipatorContext {
    pub fn new(params: &QuantumParams) -> Result<Self, QuantumError> {
        let g = params.coupling_constant()?;
        Self::with_coupling(params, g)
    }

    /// Context with an explicit coupling `g`, bypassing the `Gamma` rule.
    pub fn with_coupling(params: &QuantumParams, g: f64) -> Result<Self, QuantumError> {
        let basis = MomentumBasis::new(params.n_max);
        let temperature = params.bath_temperature();
        let omegas: Vec<f64> = (0..params.n_max).map(|n| n as f64 + 0.5).collect();
        let (occ_plus, occ_minus): (Vec<f64>, Vec<f64>) = omegas
            .iter()
            .map(|&w| thermal_occupations(w, temperature))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .unzip();

        let d = basis.dim();
        // (row level, column level, amplitude) per transition, for both branches.
        let mut lowering: [Vec<(usize, usize, f64)>; 2] = Default::default();
        let mut raising: [Vec<(usize, usize, f64)>; 2] = Default::default();
        for n in 0..params.n_max {
            let down = occ_plus[n].sqrt() * ladder_amplitude(n);
            let up = occ_minus[n].sqrt() * ladder_amplitude(n);
            for (b, sign) in [1i64, -1].into_iter().enumerate() {
                let inner = basis.index(sign * n as i64);
                let outer = basis.index(sign * (n as i64 + 1));
                lowering[b].push((inner, outer, down));
                raising[b].push((outer, inner, up));
            }
        }
        let heating = occ_minus.iter().any(|&m| m > 0.0);
        let mut channels = Vec::new();
        for transitions in lowering.iter().chain(if heating { raising.iter() } else { [].iter() }) {
            if params.diagonal_dissipator {
                channels.extend(transitions.iter().map(|&t| SparseOp::from_triplets(d, [t])));
            } else {
                channels.push(SparseOp::from_triplets(d, transitions.iter().copied()));
            }
        }
        channels.retain(|c| !c.is_empty());
        let decay = SparseOp::sum(d, &channels.iter().map(SparseOp::gram).collect::<Vec<_>>());
        Ok(Self { g, omegas, occ_plus, occ_minus, basis, channels, decay, weight: 2.0 * g })
    }

    pub fn basis(&self) -> MomentumBasis {
        self.basis
    }

    /// Jump operators, without the `2g` prefactor.
    pub fn channels(&self) -> &[SparseOp] {
        &self.channels
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Bound on the generator's field of values. The generator is strongly
    /// non-normal (each level feeds its neighbour at about its own decay
    /// rate), so the column-sum bound `2 * 2g max(M)` is used rather than the
    /// diagonal alone; with only the diagonal, RK4 blows up on large bases.
    pub fn fastest_rate(&self) -> f64 {
        2.0 * self.weight * self.decay.max_diagonal()
    }

    /// Default RK4 substeps per unit time: `100 max(1, ceil(g))`, raised if
    /// needed to keep `rate * dt` inside the RK4 stability interval.
    pub fn default_substeps(&self) -> usize {
        let base = 100 * (self.g.ceil() as usize).max(1);
        let stable = (self.fastest_rate() / 2.5).ceil() as usize;
        base.max(stable)
    }

    pub(crate) fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        if self.weight == 0.0 {
            return;
        }
        for c in &self.channels {
            c.add_sandwich(rho, out, self.weight);
        }
        self.decay.sub_anticommutator(rho, out, 0.5 * self.weight);
    }
}

/// Bath terms of the master equation (everything except `-i[H_S, rho]`).
pub fn dissipator_rhs(rho: &DensityMatrix, context: &DissipatorContext) -> DensityMatrix {
    assert_eq!(rho.basis(), context.basis(), "state and context bases differ");
    let mut out = DensityMatrix::zeros(rho.basis(), rho.hbar_eff());
    context.apply_into(rho.as_slice(), out.as_mut_slice());
    out
}
