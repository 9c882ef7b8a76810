// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: single runs, sweeps, the exact two-spin
//! reference values, and a built-in invariant suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbsim::lindblad::{Generator, SystemSpec, TemperatureSpec};
use qbsim::oracle;
use qbsim::sweep::{
    run_point_spec, run_sweep, summary_line, write_trajectory_csv, RunSettings, SweepConfig,
    SUMMARY_HEADER,
};

mod selftest;

#[derive(Parser)]
#[command(
    name = "qbsim",
    version,
    about = "Collective-spin open quantum battery simulator",
    long_about = "Simulates two spin ensembles (charger and battery) relaxing in a shared \
                  thermal reservoir, with dark-state-stabilized charging. Times are in units \
                  of 1/gamma; energies in units of the transition energy omega."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one (N_B, R, T) point: trajectory CSV plus a summary row
    Run(RunArgs),
    /// Run a parameter sweep described by a flat key-value config file
    Sweep {
        /// Config file (keys: n_b_list, r_list, temperature_list, omega,
        /// gamma, t_end, sample_interval, ss_tolerance, out_dir)
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the exact two-spin reference values for a given occupation
    Oracle {
        /// Mean reservoir occupation n̄
        #[arg(long)]
        nbar: f64,
        /// Initial dark-state population (the charging protocol gives 1/2)
        #[arg(long, default_value_t = 0.5)]
        rho_dark: f64,
    },
    /// Run the built-in invariant suite and report one line per check
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Battery spins N_B
    #[arg(long)]
    n_b: usize,
    /// Charger-to-battery ratio R (N_C = R·N_B)
    #[arg(long)]
    r: usize,
    /// Reservoir temperature in energy units (ħ = k_B = 1)
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Mean occupation n̄; overrides --temperature when given
    #[arg(long)]
    nbar: Option<f64>,
    /// Spin transition frequency in units of gamma
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Damping rate (sets the time unit)
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Trajectory length in units of 1/gamma
    #[arg(long, default_value_t = 50.0)]
    t_end: f64,
    /// Sample spacing in units of 1/gamma
    #[arg(long, default_value_t = 0.01)]
    sample_interval: f64,
    /// Residual tolerance of the steady-state search
    #[arg(long, default_value_t = 1e-10)]
    ss_tolerance: f64,
    /// Output directory for the trajectory CSV
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Oracle { nbar, rho_dark } => cmd_oracle(nbar, rho_dark),
        Command::Selftest => return selftest::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(args: RunArgs) -> qbsim::Result<()> {
    let temperature = match args.nbar {
        Some(n) => TemperatureSpec::MeanOccupation(n),
        None => TemperatureSpec::Temperature(args.temperature),
    };
    let spec = SystemSpec::new(
        args.n_b,
        args.r * args.n_b,
        args.omega,
        args.gamma,
        temperature,
    )?;
    for warning in spec.warnings() {
        eprintln!("warning: {warning}");
    }
    let settings = RunSettings {
        omega: args.omega,
        gamma: args.gamma,
        t_end: args.t_end,
        sample_interval: args.sample_interval,
        ss_tolerance: args.ss_tolerance,
    };

    let (records, row) = run_point_spec(&spec, &settings)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join(format!(
        "traj_nb{}_r{}_nbar{}.csv",
        args.n_b,
        args.r,
        spec.nbar()
    ));
    write_trajectory_csv(&path, &records)?;

    println!("wrote {}", path.display());
    println!("{SUMMARY_HEADER}");
    println!("{}", summary_line(&row));
    if !row.converged {
        eprintln!("warning: steady-state search did not reach the requested tolerance");
    }
    Ok(())
}

fn cmd_sweep(config_path: &PathBuf) -> qbsim::Result<()> {
    let config = SweepConfig::from_file(config_path)?;
    let n_points = config.n_b_list.len() * config.r_list.len() * config.temperature_list.len();
    println!(
        "sweep: {n_points} points -> {}",
        config.out_dir.display()
    );
    let outcome = run_sweep(&config)?;
    println!("{SUMMARY_HEADER}");
    for row in &outcome.rows {
        println!("{}", summary_line(row));
    }
    for failure in &outcome.failures {
        eprintln!("failed point: {failure}");
    }
    println!("summary written to {}", outcome.summary_path.display());
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(qbsim::Error::Integration(format!(
            "{} of {n_points} points failed",
            outcome.failures.len()
        )))
    }
}

fn cmd_oracle(nbar: f64, rho_dark: f64) -> qbsim::Result<()> {
    let ss = oracle::two_spin_steady_state(nbar, rho_dark)?;
    let labels = oracle::AppendixBasis::labels();
    println!("two-spin steady state (coupled basis), nbar = {nbar}, initial dark population = {rho_dark}:");
    for (k, label) in labels.iter().enumerate() {
        println!("  rho[{label}] = {:.12}", ss.matrix()[(k, k)].re);
    }
    if (rho_dark - 0.5).abs() < 1e-12 {
        let jz = oracle::two_spin_jz_expectation(nbar);
        println!("steady-state <J_C^z> = <J_B^z> = {jz:.12}");
        println!("steady-state battery energy density = {:.12}", jz + 0.5);
    }

    let rates = oracle::two_spin_rate_matrix(nbar, 1.0, 1.0)?;
    println!("rate coefficients (gamma = omega = 1), d/dt rho[i][j] = sum c * rho[k][l]:");
    for i in 0..4 {
        for j in i..4 {
            let terms = rates.coefficients(i, j);
            if terms.is_empty() {
                println!("  d/dt rho[{}][{}] = 0", labels[i], labels[j]);
                continue;
            }
            let rhs: Vec<String> = terms
                .iter()
                .map(|((k, l), c)| {
                    format!("({:+.6}{:+.6}i) rho[{}][{}]", c.re, c.im, labels[*k], labels[*l])
                })
                .collect();
            println!("  d/dt rho[{}][{}] = {}", labels[i], labels[j], rhs.join(" + "));
        }
    }

    // a numeric cross-check is one subcommand away
    let spec = SystemSpec::new(1, 1, 1.0, 1.0, TemperatureSpec::MeanOccupation(nbar))?;
    let gen = Generator::new(spec)?;
    println!("generator rate scale: {:.3} gamma", gen.rate_scale());
    Ok(())
}
