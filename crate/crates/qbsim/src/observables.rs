// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reported quantities: energy and power densities, capacity, extractable
//! work (open-system bound and ergotropy), and logarithmic negativity.
//!
//! Conventions: energies are densities per battery/charger spin in units of
//! the transition energy ω, so a fully polarized ensemble spans [0, 1];
//! power is in units of ωγ; negativity uses log base 2.
//!
//! Ref: Allahverdyan, Balian & Nieuwenhuizen (2004), Europhys. Lett. 67, 565
//!      (ergotropy); Vidal & Werner (2002), Phys. Rev. A 65, 032314
//!      (logarithmic negativity).

use crate::dynamics::{DensityMatrix, Trajectory};
use crate::linalg::{hermitian_eigenvalues, CMat};
use crate::lindblad::{Generator, SystemSpec};
use crate::{Error, Result};

/// Which ensemble an observable refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Charger,
    Battery,
}

/// One row of the per-sample observable series.
#[derive(Debug, Clone, Copy)]
pub struct ObservableRecord {
    /// Time in units of 1/γ.
    pub t: f64,
    /// Charger energy density (units of ω).
    pub e_c: f64,
    /// Battery energy density (units of ω).
    pub e_b: f64,
    /// Battery power density (units of ωγ).
    pub p_b: f64,
    /// Logarithmic negativity across the charger/battery cut (base 2).
    pub s_b: f64,
    /// Entanglement rate dS_B/dt (units of γ).
    pub sdot_b: f64,
    /// Ergotropy density (units of ω).
    pub w_closed: f64,
    /// Open-system extractable work density ℰ_B − ℰ_B^th (units of ω).
    pub w_open: f64,
}

fn check_dim(rho: &DensityMatrix, spec: &SystemSpec) -> Result<()> {
    if rho.dim() != spec.joint_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.joint_dim(),
            got: rho.dim(),
        });
    }
    Ok(())
}

/// m quantum number of the chosen subsystem at a joint basis index.
fn sub_m(idx: usize, which: Subsystem, spec: &SystemSpec) -> f64 {
    let db = spec.n_b() + 1;
    match which {
        Subsystem::Charger => spec.n_c() as f64 / 2.0 - (idx / db) as f64,
        Subsystem::Battery => spec.n_b() as f64 / 2.0 - (idx % db) as f64,
    }
}

/// ⟨J_i^z⟩ for one subsystem.
pub fn jz_expectation(rho: &DensityMatrix, which: Subsystem, spec: &SystemSpec) -> Result<f64> {
    check_dim(rho, spec)?;
    let m = rho.matrix();
    Ok((0..rho.dim())
        .map(|i| m[(i, i)].re * sub_m(i, which, spec))
        .sum())
}

/// Energy density ℰ_i = ⟨J_i^z⟩/N_i + 1/2 in units of ω.
pub fn energy_density(rho: &DensityMatrix, which: Subsystem, spec: &SystemSpec) -> Result<f64> {
    let n = match which {
        Subsystem::Charger => spec.n_c(),
        Subsystem::Battery => spec.n_b(),
    } as f64;
    Ok(jz_expectation(rho, which, spec)? / n + 0.5)
}

/// Battery capacity N_B·ℰ_B of a (steady) state, in units of ω.
pub fn capacity(rho_ss: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    Ok(spec.n_b() as f64 * energy_density(rho_ss, Subsystem::Battery, spec)?)
}

/// Battery power density Tr(J_B^z · dρ/dt)/N_B, in units of ωγ.
///
/// This is the exact time derivative of the energy density through the
/// generator, not a finite difference.
pub fn power_density(gen: &Generator, rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    check_dim(rho, spec)?;
    let drho = gen.apply(rho.matrix())?;
    Ok((0..rho.dim())
        .map(|i| drho[(i, i)].re * sub_m(i, Subsystem::Battery, spec))
        .sum::<f64>()
        / spec.n_b() as f64)
}

/// Reduced battery state, tracing out the charger.
pub fn partial_trace_charger(rho: &DensityMatrix, spec: &SystemSpec) -> Result<DensityMatrix> {
    check_dim(rho, spec)?;
    let db = spec.n_b() + 1;
    let m = rho.matrix();
    let mut out = CMat::zeros(db, db);
    for c in 0..=spec.n_c() {
        for b in 0..db {
            for bp in 0..db {
                out[(b, bp)] += m[(c * db + b, c * db + bp)];
            }
        }
    }
    DensityMatrix::new(out)
}

/// Battery Gibbs-state energy density at the configured temperature.
pub fn thermal_energy_density(spec: &SystemSpec) -> f64 {
    let x = {
        let n = spec.nbar();
        n / (n + 1.0)
    };
    let n_b = spec.n_b();
    let j = n_b as f64 / 2.0;
    let mut z = 0.0;
    let mut mean_m = 0.0;
    for b in 0..=n_b {
        let w = x.powi((n_b - b) as i32);
        z += w;
        mean_m += w * (j - b as f64);
    }
    mean_m / z / n_b as f64 + 0.5
}

/// Ergotropy density: the battery energy above its passive state,
/// max over cyclic unitaries of the extractable work per spin.
///
/// Populations of ρ_B sorted descending are paired with the battery energy
/// levels sorted ascending; equal populations contribute symmetrically, so
/// tie order is irrelevant.
pub fn ergotropy_density(rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    let rho_b = partial_trace_charger(rho, spec)?;
    let mut populations = hermitian_eigenvalues(rho_b.matrix());
    populations.reverse(); // descending
    let n_b = spec.n_b() as f64;
    let j = n_b / 2.0;
    // ladder energies ascending: m/N_B for m = −j … +j
    let passive_energy: f64 = populations
        .iter()
        .enumerate()
        .map(|(k, r)| r * (-j + k as f64) / n_b)
        .sum::<f64>()
        + 0.5;
    let e_b = energy_density(rho, Subsystem::Battery, spec)?;
    // exact result is nonnegative; guard against rounding only
    Ok((e_b - passive_energy).max(0.0))
}

/// Open-system extractable work density ℰ_B − ℰ_B^th. Equals ℰ_B at T = 0.
pub fn work_open(rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    Ok(energy_density(rho, Subsystem::Battery, spec)? - thermal_energy_density(spec))
}

/// Partial transpose with respect to the battery indices.
pub fn partial_transpose_battery(rho: &DensityMatrix, spec: &SystemSpec) -> Result<CMat> {
    check_dim(rho, spec)?;
    let db = spec.n_b() + 1;
    let dc = spec.n_c() + 1;
    let m = rho.matrix();
    let mut out = CMat::zeros(rho.dim(), rho.dim());
    for c in 0..dc {
        for cp in 0..dc {
            for b in 0..db {
                for bp in 0..db {
                    out[(c * db + b, cp * db + bp)] = m[(c * db + bp, cp * db + b)];
                }
            }
        }
    }
    Ok(out)
}

/// Logarithmic negativity S_B = log₂‖ρ^{Γ_B}‖₁ across the charger/battery
/// cut. Zero for every product state; nonnegative by construction.
pub fn log_negativity(rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    let pt = partial_transpose_battery(rho, spec)?;
    // the partial transpose of a Hermitian matrix is Hermitian, so its
    // singular values are |eigenvalues|
    let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    Ok(trace_norm.log2().max(0.0))
}

/// Centered finite-difference derivative on a uniform grid (one-sided at
/// the ends). Requires at least 3 samples.
pub fn finite_difference(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    if times.len() != values.len() {
        return Err(Error::DegenerateInput(
            "times and values must have equal length".into(),
        ));
    }
    let n = times.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!(
            "need at least 3 samples, got {n}"
        )));
    }
    let h = times[1] - times[0];
    if !(h > 0.0) {
        return Err(Error::DegenerateInput("grid must be increasing".into()));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::DegenerateInput("grid must be uniform".into()));
        }
    }
    let mut out = Vec::with_capacity(n);
    out.push((values[1] - values[0]) / h);
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]) / (2.0 * h));
    }
    out.push((values[n - 1] - values[n - 2]) / h);
    Ok(out)
}

/// Entanglement rate Ṡ_B along a trajectory, as (t, dS_B/dt) pairs.
pub fn entanglement_rate(traj: &Trajectory, spec: &SystemSpec) -> Result<Vec<(f64, f64)>> {
    let s: Vec<f64> = traj
        .states
        .iter()
        .map(|rho| log_negativity(rho, spec))
        .collect::<Result<_>>()?;
    let rates = finite_difference(&traj.times, &s)?;
    Ok(traj.times.iter().copied().zip(rates).collect())
}
