//! Simulation engines for a kicked, asymmetric, dissipative rotor coupled to
//! a thermal bath.
//!
//! The classical engine iterates the noisy dissipative kicked map over large
//! trajectory ensembles. The quantum engine integrates the finite-temperature
//! master equation on a truncated momentum lattice. Both feed the shared
//! analysis layer in [`observables`].

pub mod classical;
pub mod output;
pub mod observables;
pub mod params;
pub mod quantum;
pub mod rng;

pub use params::{
    coupling_constant, momentum_decay_coupling, noise_std, CouplingRule, ParamError, QuantumParams,
    SimulationParams, Splitting,
};
