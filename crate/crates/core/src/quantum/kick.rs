use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::density::{DensityMatrix, MomentumBasis};
use crate::params::QuantumParams;

/// The delta-kick propagator `exp(-i k [cos x + (a/2) cos(2x + Phi)])`,
/// applied on a position grid of `M` points (the next power of two at least
/// four times the basis dimension).
pub struct KickUnitary {
    basis: MomentumBasis,
    /// `exp(-i k V(x_j))` on the grid.
    phases: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for KickUnitary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KickUnitary").field("basis", &self.basis).field("grid", &self.phases.len()).finish()
    }
}

pub fn default_grid_size(dim: usize) -> usize {
    (4 * dim).next_power_of_two()
}

impl KickUnitary {
    pub fn new(params: &QuantumParams) -> Self {
        let basis = MomentumBasis::new(params.n_max);
        Self::with_grid(params, default_grid_size(basis.dim()))
    }

    pub fn with_grid(params: &QuantumParams, grid: usize) -> Self {
        let basis = MomentumBasis::new(params.n_max);
        assert!(grid >= basis.dim(), "position grid smaller than the basis");
        let k = params.kick();
        let (a, phi) = (params.base.asymmetry, params.base.phase);
        let phases = (0..grid)
            .map(|j| {
                let x = std::f64::consts::TAU * j as f64 / grid as f64;
                let v = x.cos() + 0.5 * a * (2.0 * x + phi).cos();
                Complex64::from_polar(1.0, -k * v)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Self { basis, phases, forward: planner.plan_fft_forward(grid), inverse: planner.plan_fft_inverse(grid) }
    }

    pub fn grid_size(&self) -> usize {
        self.phases.len()
    }

    /// Applies `U` (or `U^dag`) to a momentum-space vector in place.
    fn apply_vector(&self, v: &mut [Complex64], buf: &mut [Complex64], scratch: &mut [Complex64], adjoint: bool) {
        let m = self.phases.len();
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (i, &c) in v.iter().enumerate() {
            buf[self.basis.level(i).rem_euclid(m as i64) as usize] = c;
        }
        // Momentum amplitudes -> psi(x_j) = sum_n c_n e^{i n x_j}.
        self.inverse.process_with_scratch(buf, scratch);
        for (b, ph) in buf.iter_mut().zip(&self.phases) {
            *b *= if adjoint { ph.conj() } else { *ph };
        }
        self.forward.process_with_scratch(buf, scratch);
        let scale = 1.0 / m as f64;
        for (i, c) in v.iter_mut().enumerate() {
            *c = buf[self.basis.level(i).rem_euclid(m as i64) as usize] * scale;
        }
    }

    fn buffers(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = self.phases.len();
        let scratch = self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len());
        (vec![Complex64::new(0.0, 0.0); m], vec![Complex64::new(0.0, 0.0); scratch])
    }

    /// `U |psi>` for a vector of momentum amplitudes.
    pub fn apply_to_vector(&self, psi: &mut [Complex64]) {
        let (mut buf, mut scratch) = self.buffers();
        self.apply_vector(psi, &mut buf, &mut scratch, false);
    }

    /// `rho -> U rho U^dag`.
    pub fn apply(&self, rho: &mut DensityMatrix) {
        self.conjugate(rho, false);
    }

    /// `rho -> U^dag rho U`.
    pub fn apply_adjoint(&self, rho: &mut DensityMatrix) {
        self.conjugate(rho, true);
    }

    fn conjugate(&self, rho: &mut DensityMatrix, adjoint: bool) {
        assert_eq!(rho.basis(), self.basis, "state and kick bases differ");
        let d = self.basis.dim();
        let (mut buf, mut scratch) = self.buffers();
        let data = rho.as_mut_slice();
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        // Columns: X = U rho.
        for j in 0..d {
            for i in 0..d {
                col[i] = data[i * d + j];
            }
            self.apply_vector(&mut col, &mut buf, &mut scratch, adjoint);
            for i in 0..d {
                data[i * d + j] = col[i];
            }
        }
        // Rows: (X U^dag)_i = conj(U conj(X_i)).
        for row in data.chunks_mut(d) {
            row.iter_mut().for_each(|c| *c = c.conj());
            self.apply_vector(row, &mut buf, &mut scratch, adjoint);
            row.iter_mut().for_each(|c| *c = c.conj());
        }
    }
}
