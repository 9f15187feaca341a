use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::portrait::{PhaseGrid, PhaseWindow};
use crate::quantum::DensityMatrix;

/// Coherent-state shape. `width_ratio = sigma_x / sigma_p` with
/// `sigma_x sigma_p = hbar_eff / 2`; 1 is the unsqueezed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HusimiOptions {
    pub width_ratio: f64,
    /// Momentum amplitudes are dropped beyond this many `sigma_p` from `p0`.
    pub cutoff_sigmas: f64,
}

impl Default for HusimiOptions {
    fn default() -> Self {
        Self { width_ratio: 1.0, cutoff_sigmas: 12.0 }
    }
}

impl HusimiOptions {
    pub fn sigma_p(&self, hbar_eff: f64) -> f64 {
        (hbar_eff / (2.0 * self.width_ratio)).sqrt()
    }

    pub fn sigma_x(&self, hbar_eff: f64) -> f64 {
        (hbar_eff * self.width_ratio / 2.0).sqrt()
    }
}

/// `H(x0, p0) = <z|rho|z> / (2 pi hbar_eff)` on a [`PhaseWindow`], laid out
/// exactly like a Poincaré histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub grid: PhaseGrid,
    pub options: HusimiOptions,
}

/// Husimi distribution of `rho` at the window's cell centres.
///
/// The coherent state at `(x0, p0)` has momentum amplitudes
/// `c_n ~ exp(-(hbar n - p0)^2 / (4 sigma_p^2) - i n x0)`, normalised on the
/// truncated basis. Writing `a_n` for the real envelope,
/// `<z|rho|z> = sum_d e^{i d x0} sum_{n - n' = d} a_n a_n' rho_{n n'}`, so each
/// momentum row costs one pass over the envelope's support.
pub fn husimi(rho: &DensityMatrix, window: PhaseWindow, options: &HusimiOptions) -> HusimiGrid {
    let hbar = rho.hbar_eff();
    let basis = rho.basis();
    let sigma_p = options.sigma_p(hbar);
    let reach = options.cutoff_sigmas * sigma_p;
    let norm = 1.0 / (std::f64::consts::TAU * hbar);
    let n_max = basis.n_max() as i64;

    let mut values = vec![0.0; window.x_bins * window.p_bins];
    values.par_chunks_mut(window.x_bins).enumerate().for_each(|(row, out)| {
        let p0 = window.p_center(row);
        let lo = (((p0 - reach) / hbar).floor() as i64).max(-n_max);
        let hi = (((p0 + reach) / hbar).ceil() as i64).min(n_max);
        if lo > hi {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let env: Vec<f64> = (lo..=hi)
            .map(|n| {
                let dp = hbar * n as f64 - p0;
                (-dp * dp / (4.0 * sigma_p * sigma_p)).exp()
            })
            .collect();
        let env_norm: f64 = env.iter().map(|a| a * a).sum();
        if env_norm == 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let width = env.len();
        // f[d + width - 1] = sum_{n - n' = d} a_n a_n' rho_{n n'}
        let mut f = vec![Complex64::new(0.0, 0.0); 2 * width - 1];
        for (u, &an) in env.iter().enumerate() {
            let i = basis.index(lo + u as i64);
            for (v, &am) in env.iter().enumerate() {
                let j = basis.index(lo + v as i64);
                f[u + width - 1 - v] += rho.get(i, j) * (an * am);
            }
        }
        for (col, h) in out.iter_mut().enumerate() {
            let x0 = window.x_center(col);
            // The d and -d terms are conjugate, so the sum is 2 Re over d > 0.
            let mut acc = f[width - 1].re;
            for d in 1..width {
                acc += 2.0 * (f[d + width - 1] * Complex64::from_polar(1.0, d as f64 * x0)).re;
            }
            *h = acc / env_norm * norm;
        }
    });
    HusimiGrid { grid: PhaseGrid { window, values }, options: *options }
}
