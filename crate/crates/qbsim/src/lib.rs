// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulator for collective-spin quantum batteries in a shared thermal
//! reservoir.
//!
//! Two ensembles of spin-1/2 particles — a charger (initially fully excited)
//! and a battery (initially in thermal equilibrium) — relax under a common
//! Markovian bath. Because both ensembles couple to the bath only through the
//! joint collective operators J⁻ = J_C⁻ + J_B⁻ and J⁺ = J_C⁺ + J_B⁺, the
//! generator has dark (subradiant) states in its kernel and the system
//! settles into an initial-condition-dependent steady state that retains
//! energy in the battery.
//!
//! Everything is built in the symmetric (maximal-spin) Dicke sector of each
//! ensemble, j = N/2, so an ensemble of N spins is an (N+1)-level ladder and
//! the joint space has dimension (N_C+1)(N_B+1). The collective jump
//! operators never leave a fixed (j_C, j_B) sector, and all initial states
//! used here live in the maximal one, so this reduction is exact.
//!
//! Units: ħ = k_B = 1, the damping rate γ sets the time unit (all times are
//! γt), energies are reported in units of the transition energy ω.
//!
//! Modules mirror the pipeline: [`spinops`] builds collective operators,
//! [`lindblad`] assembles the generator, [`dynamics`] integrates and finds
//! steady states, [`observables`] computes energies / power / ergotropy /
//! entanglement, [`oracle`] holds the exact two-spin solution used for
//! verification, and [`sweep`] orchestrates parameter scans and CSV output.

pub mod dynamics;
pub mod linalg;
pub mod lindblad;
pub mod observables;
pub mod oracle;
pub mod spinops;
pub mod sweep;

mod integrator;
mod sector;

use thiserror::Error;

/// Errors reported by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidSpec(String),
    /// Matrix dimensions do not match the expected joint space.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix violated a density-matrix invariant (Hermiticity or trace).
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
    /// The adaptive integrator could not proceed.
    #[error("integration failed: {0}")]
    Integration(String),
    /// A sweep configuration file could not be parsed.
    #[error("bad sweep config: {0}")]
    Config(String),
    /// Not enough data for a series operation (peaks, fits, rates).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use dynamics::{steady_state, DensityMatrix, SteadyStateResult, Trajectory};
pub use lindblad::{thermal_occupation, Generator, SystemSpec, TemperatureSpec};
pub use linalg::CMat;
pub use spinops::{CollectiveOps, JointOps};
