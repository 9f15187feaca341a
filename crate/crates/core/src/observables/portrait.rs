use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classical::PhasePoint;

/// Phase-space raster over `x in [0, 2 pi)` and `p in [p_min, p_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseWindow {
    pub x_bins: usize,
    pub p_bins: usize,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for PhaseWindow {
    fn default() -> Self {
        Self { x_bins: 128, p_bins: 128, p_min: -4.0, p_max: 8.0 }
    }
}

impl PhaseWindow {
    pub fn x_width(&self) -> f64 {
        TAU / self.x_bins as f64
    }

    pub fn p_width(&self) -> f64 {
        (self.p_max - self.p_min) / self.p_bins as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.x_width() * self.p_width()
    }

    pub fn x_center(&self, col: usize) -> f64 {
        (col as f64 + 0.5) * self.x_width()
    }

    pub fn p_center(&self, row: usize) -> f64 {
        self.p_min + (row as f64 + 0.5) * self.p_width()
    }

    /// `(row, col)` of a point, or `None` outside the momentum range.
    pub fn bin(&self, x: f64, p: f64) -> Option<(usize, usize)> {
        if !(p >= self.p_min && p <= self.p_max) {
            return None;
        }
        let xw = x.rem_euclid(TAU);
        let col = ((xw / self.x_width()) as usize).min(self.x_bins - 1);
        let row = (((p - self.p_min) / self.p_width()) as usize).min(self.p_bins - 1);
        Some((row, col))
    }
}

/// A density raster, one row per momentum bin (ascending `p`), one column per
/// position bin. Shared by classical and quantum portraits.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub window: PhaseWindow,
    pub values: Vec<f64>,
}

impl PhaseGrid {
    pub fn zeros(window: PhaseWindow) -> Self {
        Self { window, values: vec![0.0; window.x_bins * window.p_bins] }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.window.x_bins + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.window.x_bins)
    }

    /// Integral of the density over the window.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.window.cell_area()
    }

    /// L1 distance between the two grids after normalising each to unit integral.
    pub fn l1_distance(&self, other: &PhaseGrid) -> f64 {
        assert_eq!(self.window, other.window, "grids must share a window");
        let (a, b) = (self.integral(), other.integral());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u / a - v / b).abs())
            .sum::<f64>()
            * self.window.cell_area()
    }
}

/// Poincaré density of an ensemble snapshot.
pub type PoincareHistogram = PhaseGrid;

/// Bins every point at `(x mod 2 pi, p)` and normalises counts by the total
/// ensemble size and cell area, so the integral equals the fraction of
/// points inside the window.
pub fn poincare_histogram(points: &[PhasePoint], window: PhaseWindow) -> PoincareHistogram {
    let mut grid = PhaseGrid::zeros(window);
    for pt in points {
        if let Some((row, col)) = window.bin(pt.x, pt.p) {
            grid.values[row * window.x_bins + col] += 1.0;
        }
    }
    let norm = 1.0 / (points.len().max(1) as f64 * window.cell_area());
    grid.values.iter_mut().for_each(|v| *v *= norm);
    grid
}
