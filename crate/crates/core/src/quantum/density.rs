use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::QuantumError;

/// Truncated momentum lattice `n in [-n_max, n_max]`; level `n` carries
/// momentum `hbar_eff * n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumBasis {
    n_max: usize,
}

impl MomentumBasis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Array index of level `n`.
    #[inline]
    pub fn index(&self, n: i64) -> usize {
        debug_assert!(n.unsigned_abs() as usize <= self.n_max);
        (n + self.n_max as i64) as usize
    }

    /// Level stored at array index `i`.
    #[inline]
    pub fn level(&self, i: usize) -> i64 {
        i as i64 - self.n_max as i64
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> {
        let n = self.n_max as i64;
        -n..=n
    }
}

/// Density matrix `rho_{n n'}` stored row-major over a [`MomentumBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: MomentumBasis,
    hbar_eff: f64,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(basis: MomentumBasis, hbar_eff: f64) -> Self {
        let d = basis.dim();
        Self { basis, hbar_eff, data: vec![Complex64::new(0.0, 0.0); d * d] }
    }

    pub fn from_raw(basis: MomentumBasis, hbar_eff: f64, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), basis.dim() * basis.dim(), "data does not match basis");
        Self { basis, hbar_eff, data }
    }

    /// `|n><n|`.
    pub fn pure_level(basis: MomentumBasis, hbar_eff: f64, n: i64) -> Self {
        let mut rho = Self::zeros(basis, hbar_eff);
        let i = basis.index(n);
        rho.set(i, i, Complex64::new(1.0, 0.0));
        rho
    }

    /// `|psi><psi|` for a normalised amplitude vector.
    pub fn pure_state(basis: MomentumBasis, hbar_eff: f64, psi: &[Complex64]) -> Self {
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut rho = Self::zeros(basis, hbar_eff);
        let d = basis.dim();
        for i in 0..d {
            for j in 0..d {
                rho.data[i * d + j] = psi[i] * psi[j].conj() / (norm * norm);
            }
        }
        rho
    }

    /// Equal populations on every level with `|hbar_eff n| <= pi`.
    pub fn initial_cell_state(basis: MomentumBasis, hbar_eff: f64) -> Result<Self, QuantumError> {
        let n_cell = (std::f64::consts::PI / hbar_eff * (1.0 + 1e-12)).floor() as usize;
        if n_cell > basis.n_max() {
            return Err(QuantumError::CellOutsideBasis { needed: n_cell, n_max: basis.n_max() });
        }
        let weight = 1.0 / (2 * n_cell + 1) as f64;
        let mut rho = Self::zeros(basis, hbar_eff);
        for n in -(n_cell as i64)..=(n_cell as i64) {
            let i = basis.index(n);
            rho.set(i, i, Complex64::new(weight, 0.0));
        }
        Ok(rho)
    }

    pub fn basis(&self) -> MomentumBasis {
        self.basis
    }

    pub fn hbar_eff(&self) -> f64 {
        self.hbar_eff
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn population(&self, n: i64) -> f64 {
        let i = self.basis.index(n);
        self.get(i, i).re
    }

    /// `max |rho_{ij} - conj(rho_{ji})|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Divides by the trace and returns the trace that was removed.
    pub fn renormalize(&mut self) -> f64 {
        let tr = self.trace().re;
        let inv = 1.0 / tr;
        self.data.iter_mut().for_each(|v| *v *= inv);
        tr
    }

    /// Smallest eigenvalue, by dense Hermitian diagonalisation.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |rho_{ij} - other_{ij}|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Mean momentum `tr(rho p) = sum_n hbar_eff n rho_{nn}`.
pub fn quantum_current(rho: &DensityMatrix) -> Result<f64, QuantumError> {
    let basis = rho.basis();
    let j: Complex64 = basis
        .levels()
        .map(|n| rho.get(basis.index(n), basis.index(n)) * (rho.hbar_eff() * n as f64))
        .sum();
    if j.im.abs() >= 1e-10 {
        return Err(QuantumError::ComplexCurrent(j.im));
    }
    Ok(j.re)
}

/// Population on the outermost levels, `|n| >= n_max - margin`.
pub fn tail_population(rho: &DensityMatrix, margin: usize) -> f64 {
    let basis = rho.basis();
    let edge = basis.n_max().saturating_sub(margin) as i64;
    basis
        .levels()
        .filter(|n| n.abs() >= edge)
        .map(|n| rho.population(n))
        .sum()
}
