// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Built-in invariant suite: fast end-to-end checks of the operator
//! algebra, the generator, the integrator, and the observables against
//! the exact two-spin reference. One line per check.

use std::process::ExitCode;

use nalgebra::DVector;
use num_complex::Complex64;

use qbsim::dynamics::{evolve, evolve_with, initial_state, steady_state, EvolveOptions};
use qbsim::linalg::{commutator, frobenius_norm, max_abs_diff, trace_distance, CMat};
use qbsim::lindblad::{Generator, SystemSpec, TemperatureSpec};
use qbsim::observables::{
    energy_density, ergotropy_density, finite_difference, log_negativity, power_density,
    Subsystem,
};
use qbsim::oracle::{self, AppendixBasis};
use qbsim::spinops::build_collective_ops;
use qbsim::DensityMatrix;

type Check = (&'static str, fn() -> Result<(), String>);

pub fn run() -> ExitCode {
    let checks: &[Check] = &[
        ("collective ladder algebra", check_ladder_algebra),
        ("dark state is annihilated", check_dark_state),
        ("generator preserves Hermiticity and trace", check_generator_structure),
        ("generator matches two-spin rate table", check_rate_table),
        ("steady state matches closed form", check_steady_state),
        ("dark-state trajectory is frozen", check_dark_trajectory),
        ("observables are omega-invariant", check_omega_invariance),
        ("entanglement reference values", check_negativity),
        ("ergotropy passivity and bounds", check_ergotropy),
        ("trace and positivity along a thermal run", check_cptp),
        ("power equals energy-density slope", check_power_consistency),
    ];

    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if failures == 0 {
        println!("selftest: all {} checks passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("selftest: {failures} of {} checks failed", checks.len());
        ExitCode::FAILURE
    }
}

fn err(msg: String) -> Result<(), String> {
    Err(msg)
}

fn two_spin(nbar: f64) -> Result<(SystemSpec, Generator), String> {
    let spec = SystemSpec::new(1, 1, 1.0, 1.0, TemperatureSpec::MeanOccupation(nbar))
        .map_err(|e| e.to_string())?;
    let gen = Generator::new(spec.clone()).map_err(|e| e.to_string())?;
    Ok((spec, gen))
}

fn charging_state() -> DensityMatrix {
    let mut psi = CMat::zeros(4, 1);
    psi[(1, 0)] = Complex64::new(1.0, 0.0);
    DensityMatrix::from_pure(&psi).expect("valid pure state")
}

fn dark_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = CMat::zeros(4, 1);
    psi[(1, 0)] = Complex64::new(s, 0.0);
    psi[(2, 0)] = Complex64::new(-s, 0.0);
    DensityMatrix::from_pure(&psi).expect("valid pure state")
}

fn pseudo_random_hermitian(d: usize, mut seed: u64) -> CMat {
    let mut next = move || {
        seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((seed >> 33) as f64) / (u32::MAX as f64) - 0.5
    };
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let z = if i == j {
                Complex64::new(next().abs(), 0.0)
            } else {
                Complex64::new(next(), next())
            };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let tr = m.trace().re;
    for i in 0..d {
        m[(i, i)] -= Complex64::new((tr - 1.0) / d as f64, 0.0);
    }
    m
}

fn check_ladder_algebra() -> Result<(), String> {
    for n in [1usize, 2, 5, 12] {
        let ops = build_collective_ops(n).map_err(|e| e.to_string())?;
        let comm = commutator(&ops.jplus, &ops.jminus);
        let dev = max_abs_diff(&comm, &ops.jz.scale(2.0));
        if dev > 1e-12 {
            return err(format!("[J+,J-] != 2Jz at N = {n} (dev {dev:.2e})"));
        }
    }
    Ok(())
}

fn check_dark_state() -> Result<(), String> {
    let (_, gen) = two_spin(0.0)?;
    let drho = gen.apply(dark_state().matrix()).map_err(|e| e.to_string())?;
    let norm = frobenius_norm(&drho);
    if norm > 1e-12 {
        return err(format!("generator moves the dark state (|L rho| = {norm:.2e})"));
    }
    Ok(())
}

fn check_generator_structure() -> Result<(), String> {
    let spec = SystemSpec::new(2, 3, 1.0, 1.0, TemperatureSpec::MeanOccupation(0.7))
        .map_err(|e| e.to_string())?;
    let gen = Generator::new(spec.clone()).map_err(|e| e.to_string())?;
    let rho = pseudo_random_hermitian(spec.joint_dim(), 42);
    let out = gen.apply(&rho).map_err(|e| e.to_string())?;
    let herm = max_abs_diff(&out, &out.adjoint());
    let tr = out.trace().norm();
    if herm > 1e-12 {
        return err(format!("output not Hermitian (dev {herm:.2e})"));
    }
    if tr > 1e-12 {
        return err(format!("output not traceless (|tr| = {tr:.2e})"));
    }
    Ok(())
}

fn check_rate_table() -> Result<(), String> {
    let nbar = 0.3;
    let (_, gen) = two_spin(nbar)?;
    let basis = AppendixBasis::new();
    let rates = oracle::two_spin_rate_matrix(nbar, 1.0, 1.0).map_err(|e| e.to_string())?;
    let reference = rates.superoperator();

    // column k + 4l of the generator superoperator in the coupled basis
    let mut numeric = CMat::zeros(16, 16);
    for l in 0..4 {
        for k in 0..4 {
            let mut e = CMat::zeros(4, 4);
            e[(k, l)] = Complex64::new(1.0, 0.0);
            let x = basis.to_product(&e);
            let y = gen.apply(&x).map_err(|e| e.to_string())?;
            let y = basis.to_coupled(&y);
            let col = DVector::from_column_slice(y.as_slice());
            numeric.set_column(k + 4 * l, &col);
        }
    }
    let dev = max_abs_diff(&numeric, &reference);
    if dev > 1e-12 {
        return err(format!("superoperator deviates from rate table by {dev:.2e}"));
    }
    Ok(())
}

fn check_steady_state() -> Result<(), String> {
    let basis = AppendixBasis::new();
    for nbar in [0.0, 1.0] {
        let (_, gen) = two_spin(nbar)?;
        let found = steady_state(&gen, &charging_state(), 1e-10, 200.0)
            .map_err(|e| e.to_string())?;
        if !found.converged {
            return err(format!("steady-state search did not converge at nbar = {nbar}"));
        }
        let expected =
            basis.to_product(oracle::two_spin_steady_state(nbar, 0.5).unwrap().matrix());
        let dist = trace_distance(found.rho_ss.matrix(), &expected);
        if dist > 1e-7 {
            return err(format!("trace distance {dist:.2e} at nbar = {nbar}"));
        }
    }
    Ok(())
}

fn check_dark_trajectory() -> Result<(), String> {
    let (_, gen) = two_spin(0.0)?;
    let rho0 = dark_state();
    let traj = evolve(&gen, &rho0, 10.0, 0.5).map_err(|e| e.to_string())?;
    for state in &traj.states {
        let dist = trace_distance(state.matrix(), rho0.matrix());
        if dist > 1e-9 {
            return err(format!("dark state drifted by {dist:.2e}"));
        }
    }
    Ok(())
}

fn check_omega_invariance() -> Result<(), String> {
    let opts = EvolveOptions {
        force_full_space: true,
        ..Default::default()
    };
    let mut results: Vec<Vec<f64>> = Vec::new();
    for omega in [0.5, 5.0] {
        let spec = SystemSpec::new(1, 1, omega, 1.0, TemperatureSpec::MeanOccupation(0.5))
            .map_err(|e| e.to_string())?;
        let gen = Generator::new(spec.clone()).map_err(|e| e.to_string())?;
        let rho0 = initial_state(&spec).map_err(|e| e.to_string())?;
        let traj = evolve_with(&gen, &rho0, 5.0, 0.5, &opts).map_err(|e| e.to_string())?;
        let mut series = Vec::new();
        for state in &traj.states {
            series.push(energy_density(state, Subsystem::Battery, &spec).unwrap());
            series.push(log_negativity(state, &spec).unwrap());
            series.push(power_density(&gen, state, &spec).unwrap());
        }
        results.push(series);
    }
    let worst = results[0]
        .iter()
        .zip(&results[1])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-8 {
        return err(format!("observables differ across omega by {worst:.2e}"));
    }
    Ok(())
}

fn check_negativity() -> Result<(), String> {
    let (spec, _) = two_spin(0.0)?;
    let s_dark = log_negativity(&dark_state(), &spec).map_err(|e| e.to_string())?;
    if (s_dark - 1.0).abs() > 1e-10 {
        return err(format!("dark-state negativity {s_dark} != 1"));
    }
    let basis = AppendixBasis::new();
    let eq_ss = DensityMatrix::new(
        basis.to_product(oracle::two_spin_steady_state(0.0, 0.5).unwrap().matrix()),
    )
    .unwrap();
    let s_ss = log_negativity(&eq_ss, &spec).map_err(|e| e.to_string())?;
    let expected = (0.5 + std::f64::consts::FRAC_1_SQRT_2).log2();
    if (s_ss - expected).abs() > 1e-9 {
        return err(format!("steady-state negativity {s_ss} != {expected}"));
    }
    let product = initial_state(&spec).unwrap();
    let s_prod = log_negativity(&product, &spec).map_err(|e| e.to_string())?;
    if s_prod > 1e-12 {
        return err(format!("product state has negativity {s_prod:.2e}"));
    }
    Ok(())
}

fn check_ergotropy() -> Result<(), String> {
    let (spec, gen) = two_spin(0.0)?;
    let ss = steady_state(&gen, &charging_state(), 1e-10, 200.0).map_err(|e| e.to_string())?;
    let w = ergotropy_density(&ss.rho_ss, &spec).map_err(|e| e.to_string())?;
    if w > 1e-9 {
        return err(format!("steady state should be passive, got w = {w:.2e}"));
    }
    let e_b = energy_density(&ss.rho_ss, Subsystem::Battery, &spec).unwrap();
    if !(0.0..=1.0).contains(&e_b) {
        return err(format!("battery energy density {e_b} out of [0, 1]"));
    }
    Ok(())
}

fn check_cptp() -> Result<(), String> {
    let spec = SystemSpec::new(2, 4, 1.0, 1.0, TemperatureSpec::Temperature(2.0))
        .map_err(|e| e.to_string())?;
    let gen = Generator::new(spec.clone()).map_err(|e| e.to_string())?;
    let rho0 = initial_state(&spec).map_err(|e| e.to_string())?;
    let traj = evolve(&gen, &rho0, 20.0, 0.5).map_err(|e| e.to_string())?;
    for diag in &traj.diagnostics {
        if diag.trace_error > 1e-9 {
            return err(format!("trace drift {:.2e}", diag.trace_error));
        }
        if let Some(min_ev) = diag.min_eigenvalue {
            if min_ev < -1e-8 {
                return err(format!("positivity violated ({min_ev:.2e})"));
            }
        }
    }
    Ok(())
}

fn check_power_consistency() -> Result<(), String> {
    // grid fine enough that the O(h²) central-difference error sits below
    // the 1e-6 comparison threshold
    let (spec, gen) = two_spin(0.0)?;
    let traj = evolve(&gen, &charging_state(), 2.0, 0.001).map_err(|e| e.to_string())?;
    let e_b: Vec<f64> = traj
        .states
        .iter()
        .map(|s| energy_density(s, Subsystem::Battery, &spec).unwrap())
        .collect();
    let slope = finite_difference(&traj.times, &e_b).map_err(|e| e.to_string())?;
    for (i, state) in traj.states.iter().enumerate().skip(1).take(e_b.len() - 2) {
        let p = power_density(&gen, state, &spec).unwrap();
        if (p - slope[i]).abs() > 1e-6 {
            return err(format!(
                "power {p:.3e} vs finite difference {:.3e} at t = {}",
                slope[i], traj.times[i]
            ));
        }
    }
    Ok(())
}
