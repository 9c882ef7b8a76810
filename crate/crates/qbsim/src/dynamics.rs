// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution and steady-state location.
//!
//! The generator's kernel is degenerate (dark states), so the physical
//! steady state depends on the initial condition. Steady states are
//! therefore found by long-time integration with a residual stopping rule,
//! never by a kernel solve.
//!
//! Positivity of evolved states is monitored through per-sample diagnostics
//! and never repaired: a silently projected state would mask integrator
//! defects.

use crate::integrator::{Dopri5, StepControl};
use crate::linalg::{hermiticity_error, min_eigenvalue, CMat, C64};
use crate::lindblad::{Generator, SystemSpec};
use crate::sector::SectorRhs;
use crate::{Error, Result};

/// Dense Hermitian unit-trace state on the joint charger ⊗ battery space.
///
/// Construction enforces Hermiticity (entrywise within 1e−10) and unit trace
/// (within 1e−9). Positivity is *not* enforced — it is monitored via
/// [`DensityMatrix::min_eigenvalue`] and trajectory diagnostics.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;

    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidState(format!(
                "state must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = hermiticity_error(&mat);
        if herm > Self::HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max deviation {herm:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace must be 1, got {} + {}i",
                tr.re, tr.im
            )));
        }
        Ok(Self { mat })
    }

    /// Projector onto a pure state; the vector is normalized first.
    pub fn from_pure(psi: &CMat) -> Result<Self> {
        if psi.ncols() != 1 {
            return Err(Error::InvalidState(
                "pure state must be a column vector".into(),
            ));
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let psi = psi.scale(1.0 / norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// |Tr ρ − 1|.
    pub fn trace_error(&self) -> f64 {
        (self.mat.trace() - C64::new(1.0, 0.0)).norm()
    }

    /// Smallest eigenvalue (negative values signal positivity loss).
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.mat)
    }
}

/// Per-sample health indicators recorded along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    pub trace_error: f64,
    /// Smallest eigenvalue; `None` when positivity tracking was disabled.
    pub min_eigenvalue: Option<f64>,
}

/// Time-indexed record of the evolution on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times in units of 1/γ, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<Diagnostics>,
    /// Set when integration stopped early (step-size underflow); holds the
    /// reason. Samples past the failure are absent.
    pub truncated: Option<String>,
}

/// Result of the long-time steady-state search.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho_ss: DensityMatrix,
    /// Frobenius norm of the generator action at `rho_ss`.
    pub residual: f64,
    /// γt at which the search stopped.
    pub elapsed_time: f64,
    /// False when the residual tolerance was not reached by the time cap.
    pub converged: bool,
}

/// Tuning knobs for the adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Per-component absolute tolerance of the embedded error estimate.
    pub atol: f64,
    /// Relative tolerance (0 = purely absolute control).
    pub rtol: f64,
    /// Compute the smallest eigenvalue at every sample.
    pub track_positivity: bool,
    /// Skip the coherence-sector fast path even when applicable.
    pub force_full_space: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 0.0,
            track_positivity: true,
            force_full_space: false,
        }
    }
}

/// Default time cap for the steady-state search, in units of 1/γ.
pub const DEFAULT_T_CAP: f64 = 200.0;
/// Default residual tolerance for the steady-state search.
pub const DEFAULT_SS_TOLERANCE: f64 = 1e-10;

/// Initial charging state: charger fully excited (top of its Dicke ladder),
/// battery in thermal equilibrium with the reservoir (Gibbs state on its
/// ladder; the ground state at T = 0).
pub fn initial_state(spec: &SystemSpec) -> Result<DensityMatrix> {
    let dim_c = spec.n_c() + 1;
    let dim_b = spec.n_b() + 1;

    let mut charger = CMat::zeros(dim_c, dim_c);
    charger[(0, 0)] = C64::new(1.0, 0.0);

    // Gibbs weights e^{−ωm/T} ∝ x^{m+j} with x = e^{−ω/T} = n̄/(n̄+1);
    // battery index b holds m = j − b, so the exponent is n_b − b.
    let x = {
        let n = spec.nbar();
        n / (n + 1.0)
    };
    let mut battery = CMat::zeros(dim_b, dim_b);
    let mut z = 0.0;
    for b in 0..dim_b {
        let w = x.powi((spec.n_b() - b) as i32);
        battery[(b, b)] = C64::new(w, 0.0);
        z += w;
    }
    let battery = battery.scale(1.0 / z);

    DensityMatrix::new(charger.kronecker(&battery))
}

enum Representation {
    Full { tmp: Vec<C64> },
    Sector(SectorRhs),
}

fn choose_representation(gen: &Generator, rho0: &CMat, force_full: bool) -> Representation {
    if !force_full {
        let sector = SectorRhs::build(gen);
        if sector.supports_exactly(rho0) {
            return Representation::Sector(sector);
        }
    }
    let d = gen.dim();
    Representation::Full {
        tmp: vec![C64::new(0.0, 0.0); d * d],
    }
}

fn check_dims(gen: &Generator, rho0: &DensityMatrix) -> Result<()> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            got: rho0.dim(),
        });
    }
    Ok(())
}

/// Integrate the master equation, handing each grid sample (t, ρ(t)) to the
/// observer. Returns the truncation reason if the step size underflowed.
pub fn evolve_observed<F>(
    gen: &Generator,
    rho0: &DensityMatrix,
    t_end: f64,
    sample_interval: f64,
    opts: &EvolveOptions,
    mut observer: F,
) -> Result<Option<String>>
where
    F: FnMut(f64, &CMat),
{
    check_dims(gen, rho0)?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(sample_interval > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "sample_interval must be positive, got {sample_interval}"
        )));
    }

    let control = StepControl {
        atol: opts.atol,
        rtol: opts.rtol,
        ..Default::default()
    };
    let n_samples = (t_end / sample_interval + 1e-9).floor() as usize;

    observer(0.0, rho0.matrix());

    match choose_representation(gen, rho0.matrix(), opts.force_full_space) {
        Representation::Sector(sector) => {
            let y0 = sector.gather(rho0.matrix());
            let rhs = |y: &[C64], out: &mut [C64]| sector.rhs(y, out);
            let mut stepper = Dopri5::new(rhs, 0.0, y0, control);
            for k in 1..=n_samples {
                let t = k as f64 * sample_interval;
                if let Err(e) = stepper.advance_to(t) {
                    return Ok(Some(format!(
                        "step size underflow at t = {:.6e} (dt = {:.3e})",
                        e.t, e.dt
                    )));
                }
                observer(t, &sector.scatter(&stepper.y));
            }
        }
        Representation::Full { mut tmp } => {
            let y0 = rho0.matrix().as_slice().to_vec();
            let rhs = |y: &[C64], out: &mut [C64]| gen.apply_into(y, out, &mut tmp);
            let mut stepper = Dopri5::new(rhs, 0.0, y0, control);
            let d = gen.dim();
            for k in 1..=n_samples {
                let t = k as f64 * sample_interval;
                if let Err(e) = stepper.advance_to(t) {
                    return Ok(Some(format!(
                        "step size underflow at t = {:.6e} (dt = {:.3e})",
                        e.t, e.dt
                    )));
                }
                observer(t, &CMat::from_column_slice(d, d, &stepper.y));
            }
        }
    }
    Ok(None)
}

/// Integrate and record states plus diagnostics on the sample grid.
pub fn evolve_with(
    gen: &Generator,
    rho0: &DensityMatrix,
    t_end: f64,
    sample_interval: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut diagnostics = Vec::new();
    let mut bad_sample: Option<Error> = None;

    let truncated = evolve_observed(gen, rho0, t_end, sample_interval, opts, |t, mat| {
        if bad_sample.is_some() {
            return;
        }
        match DensityMatrix::new(mat.clone()) {
            Ok(state) => {
                diagnostics.push(Diagnostics {
                    trace_error: state.trace_error(),
                    min_eigenvalue: opts.track_positivity.then(|| state.min_eigenvalue()),
                });
                times.push(t);
                states.push(state);
            }
            Err(e) => bad_sample = Some(e),
        }
    })?;
    if let Some(e) = bad_sample {
        return Err(e);
    }

    Ok(Trajectory {
        times,
        states,
        diagnostics,
        truncated,
    })
}

/// [`evolve_with`] under default options.
pub fn evolve(
    gen: &Generator,
    rho0: &DensityMatrix,
    t_end: f64,
    sample_interval: f64,
) -> Result<Trajectory> {
    evolve_with(gen, rho0, t_end, sample_interval, &EvolveOptions::default())
}

/// Integrate from `rho0` until the Frobenius norm of dρ/dt drops below
/// `tolerance`, or give up at `t_cap` (returning the best iterate flagged
/// as unconverged).
pub fn steady_state(
    gen: &Generator,
    rho0: &DensityMatrix,
    tolerance: f64,
    t_cap: f64,
) -> Result<SteadyStateResult> {
    steady_state_with(gen, rho0, tolerance, t_cap, &EvolveOptions::default())
}

/// [`steady_state`] with explicit integration options.
pub fn steady_state_with(
    gen: &Generator,
    rho0: &DensityMatrix,
    tolerance: f64,
    t_cap: f64,
    opts: &EvolveOptions,
) -> Result<SteadyStateResult> {
    check_dims(gen, rho0)?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if !(t_cap > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "t_cap must be positive, got {t_cap}"
        )));
    }

    // The state wobbles around the fixed point at the integrator's local
    // error level and the residual sees that noise amplified by the
    // generator's rates, so the integration tolerance must sit well below
    // tolerance/rates for the stopping rule to be reachable.
    let atol = (tolerance / (50.0 * gen.rate_scale().max(1.0)))
        .min(opts.atol)
        .max(1e-15);
    let control = StepControl {
        atol,
        rtol: opts.rtol,
        ..Default::default()
    };

    // The FSAL stage caches ‖dρ/dt‖ at the current state, so convergence is
    // checked after every accepted step at no extra generator cost.
    macro_rules! run {
        ($stepper:expr, $to_mat:expr) => {{
            let mut stepper = $stepper;
            let mut converged = stepper.residual() < tolerance;
            while !converged && stepper.t < t_cap {
                if let Err(e) = stepper.step(t_cap) {
                    return Err(Error::Integration(format!(
                        "step size underflow at t = {:.6e} (dt = {:.3e})",
                        e.t, e.dt
                    )));
                }
                converged = stepper.rhs_norm < tolerance;
            }
            let mat = $to_mat(&stepper.y);
            Ok(SteadyStateResult {
                rho_ss: DensityMatrix::new(mat)?,
                residual: stepper.rhs_norm,
                elapsed_time: stepper.t,
                converged,
            })
        }};
    }

    match choose_representation(gen, rho0.matrix(), opts.force_full_space) {
        Representation::Sector(sector) => {
            let y0 = sector.gather(rho0.matrix());
            let rhs = |y: &[C64], out: &mut [C64]| sector.rhs(y, out);
            run!(
                Dopri5::new(rhs, 0.0, y0, control),
                |y: &Vec<C64>| sector.scatter(y)
            )
        }
        Representation::Full { mut tmp } => {
            let y0 = rho0.matrix().as_slice().to_vec();
            let rhs = |y: &[C64], out: &mut [C64]| gen.apply_into(y, out, &mut tmp);
            let d = gen.dim();
            run!(
                Dopri5::new(rhs, 0.0, y0, control),
                |y: &Vec<C64>| CMat::from_column_slice(d, d, y)
            )
        }
    }
}
