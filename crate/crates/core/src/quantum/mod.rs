//! Quantum engine: a density matrix on a truncated momentum lattice, evolved
//! by a delta kick followed by free rotation and a thermal bath.

mod checkpoint;
mod density;
mod dissipator;
mod evolution;
mod kick;

use thiserror::Error;

use crate::params::ParamError;

pub use checkpoint::{params_hash, read_checkpoint, write_checkpoint, Checkpoint};
pub use density::{quantum_current, tail_population, DensityMatrix, MomentumBasis};
pub use dissipator::{dissipator_rhs, ladder_amplitude, thermal_occupations, DissipatorContext, SparseOp};
pub use evolution::{
    free_phase, PeriodReport, QuantumEngine, RENORMALIZE_THRESHOLD, STRETCH_DRIFT_LIMIT,
};
pub use kick::{default_grid_size, KickUnitary};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("initial cell needs |n| <= {needed} but the basis stops at {n_max}")]
    CellOutsideBasis { needed: usize, n_max: usize },
    #[error("current has imaginary part {0:e}")]
    ComplexCurrent(f64),
    #[error("bath frequency must be positive: {0}")]
    NonPositiveFrequency(f64),
    #[error("population {tail:e} reached the basis edge (n_max = {n_max}); enlarge the basis")]
    BasisOverflow { tail: f64, n_max: usize },
    #[error("trace drifted by {drift:e} in one period with {substeps} substeps; increase substeps")]
    TraceDrift { drift: f64, substeps: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint parameters do not match the configuration")]
    CheckpointMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
