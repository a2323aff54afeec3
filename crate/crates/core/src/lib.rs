//! Environment-assisted transport in the FMO complex as realized on a
//! photonic waveguide chip.
//!
//! * [`model`] builds Hamiltonians (FMO block, sink chain, vibrational mode,
//!   static disorder) and maps couplings and detunings to fabrication
//!   parameters.
//! * [`noise`] draws per-site detuning sequences.
//! * [`dynamics`] evolves a single excitation under a piecewise-constant
//!   Hamiltonian.
//! * [`analysis`] holds the estimators and observables.
//! * [`experiments`] runs seeded ensemble studies and writes their tables.
//!
//! All quantities are in mm (propagation distance) and mm^-1 (couplings,
//! propagation constants) unless a field name says otherwise.

// `!(x > 0.0)` is the NaN-rejecting form used throughout parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod format;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod rng;

pub use analysis::{EfficiencyMode, LinearFitResult, SpectrumEstimate};
pub use dynamics::{EvolutionTrace, PiecewiseHamiltonian, Propagator};
pub use error::{Error, Result};
pub use experiments::{SweepConfig, SweepResult};
pub use model::{ChipPlan, CouplingCalibration, FmoSpec, Hamiltonian, SiteRole};
pub use noise::{NoiseConfig, NoiseKind, NoiseRealization};
