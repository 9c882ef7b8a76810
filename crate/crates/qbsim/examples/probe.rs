// scratch measurement harness used while tuning test grids; not part of the
// deliverable surface
use std::time::Instant;

use qbsim::dynamics::{evolve_observed, initial_state, steady_state, DensityMatrix, EvolveOptions};
use qbsim::lindblad::{Generator, SystemSpec, TemperatureSpec};
use qbsim::observables::{
    energy_density, finite_difference, log_negativity, power_density, work_open, Subsystem,
};
use qbsim::sweep::locate_peak;
use qbsim::linalg::CMat;

fn spec_t(n_b: usize, r: usize, t: f64) -> SystemSpec {
    SystemSpec::new(n_b, r * n_b, 1.0, 1.0, TemperatureSpec::Temperature(t)).unwrap()
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "ss".into());
    match which.as_str() {
        "ss" => probe_steady_states(),
        "power" => probe_power_peaks(),
        "thermal" => probe_thermal(),
        "lag" => probe_lag(),
        "cptp" => probe_cptp(),
        _ => eprintln!("unknown probe"),
    }
}

fn probe_steady_states() {
    println!("criterion 6 matrix: e_ss/capacity, T=0");
    let t0 = Instant::now();
    for r in [2usize, 5, 10] {
        for n_b in [1usize, 2, 3, 4] {
            let spec = spec_t(n_b, r, 0.0);
            let gen = Generator::new(spec.clone()).unwrap();
            let rho0 = initial_state(&spec).unwrap();
            let t1 = Instant::now();
            let ss = steady_state(&gen, &rho0, 1e-8, 200.0).unwrap();
            let e_ss = energy_density(&ss.rho_ss, Subsystem::Battery, &spec).unwrap();
            println!(
                "  R={r} n_b={n_b} d={} e_ss={e_ss:.6} conv={} t_elapsed={:.1} wall={:?}",
                spec.joint_dim(),
                ss.converged,
                ss.elapsed_time,
                t1.elapsed()
            );
        }
    }
    println!("total wall {:?}", t0.elapsed());
}

fn probe_power_peaks() {
    println!("criterion 7: p_max vs n_b at R=5,10 (t_end=10, h=0.005)");
    let t0 = Instant::now();
    for r in [5usize, 10] {
        let mut points = Vec::new();
        for n_b in 1..=5usize {
            let spec = spec_t(n_b, r, 0.0);
            let gen = Generator::new(spec.clone()).unwrap();
            let rho0 = initial_state(&spec).unwrap();
            let t1 = Instant::now();
            let mut series = Vec::new();
            evolve_observed(
                &gen,
                &rho0,
                10.0,
                0.005,
                &EvolveOptions::default(),
                |t, mat| {
                    let rho = DensityMatrix::new(mat.clone()).unwrap();
                    series.push((t, power_density(&gen, &rho, &spec).unwrap()));
                },
            )
            .unwrap();
            let peak = locate_peak(&series).unwrap();
            println!(
                "  R={r} n_b={n_b} d={} p_max={:.6} at t={:.3} boundary={} wall={:?}",
                spec.joint_dim(),
                peak.value,
                peak.t,
                peak.boundary,
                t1.elapsed()
            );
            points.push((n_b as f64, peak.value));
        }
        let fit = qbsim::sweep::scaling_fit(&points).unwrap();
        println!(
            "  R={r}: slope={:.4} intercept={:.4} r2={:.6}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    println!("total wall {:?}", t0.elapsed());
}

fn probe_thermal() {
    println!("criterion 10: e_ss(T) for n_b=1, R=1..4");
    for r in 1..=4usize {
        for t in [0.0, 2.0, 100.0] {
            let spec = spec_t(1, r, t);
            let gen = Generator::new(spec.clone()).unwrap();
            let rho0 = initial_state(&spec).unwrap();
            let ss = steady_state(&gen, &rho0, 1e-8, 200.0).unwrap();
            let e_ss = energy_density(&ss.rho_ss, Subsystem::Battery, &spec).unwrap();
            let w_open = work_open(&ss.rho_ss, &spec).unwrap();
            println!(
                "  R={r} T={t} nbar={:.3} e_ss={e_ss:.6} w_open={w_open:.6} conv={}",
                spec.nbar(),
                ss.converged
            );
        }
    }
}

fn probe_lag() {
    println!("criterion 12: lag at R=10, n_b=1..3 (t_end=20, h=0.02)");
    for n_b in 1..=3usize {
        let spec = spec_t(n_b, 10, 0.0);
        let gen = Generator::new(spec.clone()).unwrap();
        let rho0 = initial_state(&spec).unwrap();
        let t1 = Instant::now();
        let mut p_series = Vec::new();
        let mut s_series = Vec::new();
        let mut times = Vec::new();
        evolve_observed(
            &gen,
            &rho0,
            20.0,
            0.02,
            &EvolveOptions::default(),
            |t, mat: &CMat| {
                let rho = DensityMatrix::new(mat.clone()).unwrap();
                times.push(t);
                p_series.push((t, power_density(&gen, &rho, &spec).unwrap()));
                s_series.push(log_negativity(&rho, &spec).unwrap());
            },
        )
        .unwrap();
        let sdot = finite_difference(&times, &s_series).unwrap();
        let sdot_series: Vec<(f64, f64)> = times.iter().copied().zip(sdot).collect();
        let p_peak = locate_peak(&p_series).unwrap();
        let s_peak = locate_peak(&sdot_series).unwrap();
        println!(
            "  n_b={n_b} d={} p_max={:.4}@{:.3} sdot_max={:.4}@{:.3} lag={:.3} wall={:?}",
            spec.joint_dim(),
            p_peak.value,
            p_peak.t,
            s_peak.value,
            s_peak.t,
            s_peak.t - p_peak.t,
            t1.elapsed()
        );
    }
}

fn probe_cptp() {
    println!("criterion 5 sizing: one (3,10,2) trajectory with positivity tracking");
    let spec = SystemSpec::new(3, 30, 1.0, 1.0, TemperatureSpec::Temperature(2.0)).unwrap();
    let gen = Generator::new(spec.clone()).unwrap();
    let rho0 = initial_state(&spec).unwrap();
    let t1 = Instant::now();
    let traj = qbsim::dynamics::evolve(&gen, &rho0, 50.0, 0.1).unwrap();
    let worst_trace = traj
        .diagnostics
        .iter()
        .map(|d| d.trace_error)
        .fold(0.0f64, f64::max);
    let worst_eig = traj
        .diagnostics
        .iter()
        .filter_map(|d| d.min_eigenvalue)
        .fold(0.0f64, f64::min);
    println!(
        "  d={} samples={} worst_trace={worst_trace:.2e} worst_min_eig={worst_eig:.2e} wall={:?}",
        spec.joint_dim(),
        traj.times.len(),
        t1.elapsed()
    );
}
