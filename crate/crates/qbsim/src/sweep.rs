// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over (N_B, R, T), peak/lag analysis, and CSV output.
//!
//! A sweep point is fully determined by its parameters — there is no
//! randomness anywhere in the pipeline — so rerunning a configuration
//! produces byte-identical files. Trajectory CSVs carry the per-sample
//! observable series; the summary CSV carries one row per point with
//! steady-state values taken from the converged steady-state search, not
//! from the last trajectory sample.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::{
    evolve_observed, initial_state, steady_state, DensityMatrix, EvolveOptions, DEFAULT_T_CAP,
};
use crate::lindblad::{Generator, SystemSpec, TemperatureSpec};
use crate::observables::{
    capacity, energy_density, ergotropy_density, finite_difference, log_negativity, power_density,
    work_open, ObservableRecord, Subsystem,
};
use crate::{Error, Result};

/// Grid and tolerance settings shared by every point of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub omega: f64,
    pub gamma: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    pub ss_tolerance: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma: 1.0,
            t_end: 50.0,
            sample_interval: 0.01,
            ss_tolerance: 1e-10,
        }
    }
}

/// A full sweep: parameter lists, grid settings, and the output directory.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_b_list: Vec<usize>,
    pub r_list: Vec<usize>,
    pub temperature_list: Vec<f64>,
    pub settings: RunSettings,
    pub out_dir: PathBuf,
    /// Largest allowed joint dimension (N_C+1)(N_B+1).
    pub dim_cap: usize,
}

pub const DEFAULT_DIM_CAP: usize = 200;

impl SweepConfig {
    /// Parse the flat key-value config format. Recognized keys:
    /// n_b_list, r_list, temperature_list, omega, gamma, t_end,
    /// sample_interval, ss_tolerance, out_dir. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n_b_list = None;
        let mut r_list = None;
        let mut temperature_list = None;
        let mut settings = RunSettings::default();
        let mut out_dir = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value}", lineno + 1));
            match key {
                "n_b_list" => n_b_list = Some(parse_usize_list(value).ok_or_else(|| bad("n_b_list"))?),
                "r_list" => r_list = Some(parse_usize_list(value).ok_or_else(|| bad("r_list"))?),
                "temperature_list" => {
                    temperature_list = Some(parse_f64_list(value).ok_or_else(|| bad("temperature_list"))?)
                }
                "omega" => settings.omega = value.parse().map_err(|_| bad("omega"))?,
                "gamma" => settings.gamma = value.parse().map_err(|_| bad("gamma"))?,
                "t_end" => settings.t_end = value.parse().map_err(|_| bad("t_end"))?,
                "sample_interval" => {
                    settings.sample_interval = value.parse().map_err(|_| bad("sample_interval"))?
                }
                "ss_tolerance" => {
                    settings.ss_tolerance = value.parse().map_err(|_| bad("ss_tolerance"))?
                }
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }

        let config = Self {
            n_b_list: n_b_list.ok_or_else(|| Error::Config("missing n_b_list".into()))?,
            r_list: r_list.ok_or_else(|| Error::Config("missing r_list".into()))?,
            temperature_list: temperature_list
                .ok_or_else(|| Error::Config("missing temperature_list".into()))?,
            settings,
            out_dir: out_dir.ok_or_else(|| Error::Config("missing out_dir".into()))?,
            dim_cap: DEFAULT_DIM_CAP,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_b_list.is_empty() {
            return Err(Error::Config("n_b_list must not be empty".into()));
        }
        if self.r_list.is_empty() {
            return Err(Error::Config("r_list must not be empty".into()));
        }
        if self.temperature_list.is_empty() {
            return Err(Error::Config("temperature_list must not be empty".into()));
        }
        if self.n_b_list.iter().any(|&n| n == 0) || self.r_list.iter().any(|&r| r == 0) {
            return Err(Error::Config("n_b and R must be positive integers".into()));
        }
        if self.temperature_list.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("temperatures must be nonnegative".into()));
        }
        for &n_b in &self.n_b_list {
            for &r in &self.r_list {
                let dim = (r * n_b + 1) * (n_b + 1);
                if dim > self.dim_cap {
                    return Err(Error::Config(format!(
                        "point n_b={n_b}, R={r} has joint dimension {dim} above the cap {}",
                        self.dim_cap
                    )));
                }
            }
        }
        Ok(())
    }
}

fn parse_usize_list(s: &str) -> Option<Vec<usize>> {
    let v: Option<Vec<usize>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
    v.filter(|v: &Vec<usize>| !v.is_empty())
}

fn parse_f64_list(s: &str) -> Option<Vec<f64>> {
    let v: Option<Vec<f64>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
    v.filter(|v: &Vec<f64>| !v.is_empty())
}

/// Summary of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n_b: usize,
    pub n_c: usize,
    pub r: usize,
    pub temperature: f64,
    pub nbar: f64,
    /// Steady-state battery energy density.
    pub e_ss: f64,
    pub capacity: f64,
    pub p_max: f64,
    pub t_p_max: f64,
    pub s_ss: f64,
    pub sdot_max: f64,
    pub t_sdot_max: f64,
    /// γΔt between the entanglement-rate peak and the power peak.
    pub lag: f64,
    pub w_closed_ss: f64,
    pub w_open_ss: f64,
    pub converged: bool,
}

/// A located series maximum.
#[derive(Debug, Clone, Copy)]
pub struct PeakResult {
    pub t: f64,
    pub value: f64,
    /// True when the series had no interior local maximum and the boundary
    /// maximum was returned instead.
    pub boundary: bool,
}

/// Largest local maximum of a sampled series; ties broken by earliest time.
///
/// A monotone or constant series has no interior maximum: the boundary
/// maximum is returned with `boundary = true`.
pub fn locate_peak(series: &[(f64, f64)]) -> Result<PeakResult> {
    if series.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "peak location needs at least 3 samples, got {}",
            series.len()
        )));
    }
    if series.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
        return Err(Error::DegenerateInput(
            "peak location requires finite samples".into(),
        ));
    }

    let mut best: Option<(f64, f64)> = None;
    for i in 1..series.len() - 1 {
        let (_, prev) = series[i - 1];
        let (t, v) = series[i];
        let (_, next) = series[i + 1];
        // rising into the point, not rising out of it: marks a local
        // maximum and the left edge of any plateau
        if v > prev && v >= next {
            let better = match best {
                None => true,
                Some((_, bv)) => v > bv,
            };
            if better {
                best = Some((t, v));
            }
        }
    }

    if let Some((t, value)) = best {
        return Ok(PeakResult {
            t,
            value,
            boundary: false,
        });
    }
    // no interior maximum: fall back to the boundary maximum, earliest first
    let mut t_best = series[0].0;
    let mut v_best = series[0].1;
    for &(t, v) in &series[1..] {
        if v > v_best {
            t_best = t;
            v_best = v;
        }
    }
    Ok(PeakResult {
        t: t_best,
        value: v_best,
        boundary: true,
    })
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit y = slope·x + intercept by ordinary least squares.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput(
            "fit abscissae are all identical".into(),
        ));
    }
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// Run a single sweep point for an explicit system configuration.
pub fn run_point_spec(
    spec: &SystemSpec,
    settings: &RunSettings,
) -> Result<(Vec<ObservableRecord>, SweepRow)> {
    let gen = Generator::new(spec.clone())?;
    let rho0 = initial_state(spec)?;
    let opts = EvolveOptions::default();

    let mut records: Vec<ObservableRecord> = Vec::new();
    let mut sample_error: Option<Error> = None;
    evolve_observed(
        &gen,
        &rho0,
        settings.t_end,
        settings.sample_interval,
        &opts,
        |t, mat| {
            if sample_error.is_some() {
                return;
            }
            let build = || -> Result<ObservableRecord> {
                let rho = DensityMatrix::new(mat.clone())?;
                Ok(ObservableRecord {
                    t,
                    e_c: energy_density(&rho, Subsystem::Charger, spec)?,
                    e_b: energy_density(&rho, Subsystem::Battery, spec)?,
                    p_b: power_density(&gen, &rho, spec)?,
                    s_b: log_negativity(&rho, spec)?,
                    sdot_b: f64::NAN, // filled from the sampled series below
                    w_closed: ergotropy_density(&rho, spec)?,
                    w_open: work_open(&rho, spec)?,
                })
            };
            match build() {
                Ok(rec) => records.push(rec),
                Err(e) => sample_error = Some(e),
            }
        },
    )?;
    if let Some(e) = sample_error {
        return Err(e);
    }

    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let s_series: Vec<f64> = records.iter().map(|r| r.s_b).collect();
    let rates = finite_difference(&times, &s_series)?;
    for (rec, rate) in records.iter_mut().zip(&rates) {
        rec.sdot_b = *rate;
    }

    let ss = steady_state(&gen, &rho0, settings.ss_tolerance, DEFAULT_T_CAP)?;
    let p_peak = locate_peak(
        &records
            .iter()
            .map(|r| (r.t, r.p_b))
            .collect::<Vec<_>>(),
    )?;
    let sdot_peak = locate_peak(
        &records
            .iter()
            .map(|r| (r.t, r.sdot_b))
            .collect::<Vec<_>>(),
    )?;

    let row = SweepRow {
        n_b: spec.n_b(),
        n_c: spec.n_c(),
        r: spec.ratio().unwrap_or(0),
        temperature: spec.temperature(),
        nbar: spec.nbar(),
        e_ss: energy_density(&ss.rho_ss, Subsystem::Battery, spec)?,
        capacity: capacity(&ss.rho_ss, spec)?,
        p_max: p_peak.value,
        t_p_max: p_peak.t,
        s_ss: log_negativity(&ss.rho_ss, spec)?,
        sdot_max: sdot_peak.value,
        t_sdot_max: sdot_peak.t,
        lag: sdot_peak.t - p_peak.t,
        w_closed_ss: ergotropy_density(&ss.rho_ss, spec)?,
        w_open_ss: work_open(&ss.rho_ss, spec)?,
        converged: ss.converged,
    };
    Ok((records, row))
}

/// Run a single sweep point given (N_B, R, T); N_C = R·N_B.
pub fn run_point(
    n_b: usize,
    r: usize,
    temperature: f64,
    settings: &RunSettings,
) -> Result<(Vec<ObservableRecord>, SweepRow)> {
    if r == 0 {
        return Err(Error::InvalidSpec("R must be a positive integer".into()));
    }
    let spec = SystemSpec::new(
        n_b,
        r * n_b,
        settings.omega,
        settings.gamma,
        TemperatureSpec::Temperature(temperature),
    )?;
    run_point_spec(&spec, settings)
}

/// Outcome of a sweep: completed rows plus any per-point failures.
#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<String>,
    pub summary_path: PathBuf,
}

pub const TRAJECTORY_HEADER: &str = "t,e_c,e_b,p_b,s_b,sdot_b,w_closed,w_open";
pub const SUMMARY_HEADER: &str = "n_b,n_c,r,temperature,nbar,e_ss,capacity,p_max,t_p_max,s_ss,\
                                  sdot_max,t_sdot_max,lag,w_closed_ss,w_open_ss,converged";

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

/// Compact, filesystem-safe rendering of a temperature for file names.
fn fmt_t_label(t: f64) -> String {
    let mut s = format!("{t}");
    if let Some(stripped) = s.strip_suffix(".0") {
        s = stripped.to_string();
    }
    s.replace('.', "p").replace('-', "m")
}

/// Write a per-sample observable series in the trajectory CSV schema.
pub fn write_trajectory_csv(path: &Path, records: &[ObservableRecord]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f(r.t),
            fmt_f(r.e_c),
            fmt_f(r.e_b),
            fmt_f(r.p_b),
            fmt_f(r.s_b),
            fmt_f(r.sdot_b),
            fmt_f(r.w_closed),
            fmt_f(r.w_open)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Render one summary row in the summary CSV column order.
pub fn summary_line(row: &SweepRow) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.n_b,
        row.n_c,
        row.r,
        fmt_f(row.temperature),
        fmt_f(row.nbar),
        fmt_f(row.e_ss),
        fmt_f(row.capacity),
        fmt_f(row.p_max),
        fmt_f(row.t_p_max),
        fmt_f(row.s_ss),
        fmt_f(row.sdot_max),
        fmt_f(row.t_sdot_max),
        fmt_f(row.lag),
        fmt_f(row.w_closed_ss),
        fmt_f(row.w_open_ss),
        row.converged
    );
    s
}

/// Run every point of the sweep, writing one trajectory CSV per point and a
/// summary CSV for the whole sweep. Point failures are recorded and the
/// sweep continues; rows are written in deterministic parameter order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n_b in &config.n_b_list {
        for &r in &config.r_list {
            for &t in &config.temperature_list {
                match run_point(n_b, r, t, &config.settings) {
                    Ok((records, row)) => {
                        let name = format!("traj_nb{}_r{}_t{}.csv", n_b, r, fmt_t_label(t));
                        write_trajectory_csv(&config.out_dir.join(name), &records)?;
                        rows.push(row);
                    }
                    Err(e) => failures.push(format!("n_b={n_b} R={r} T={t}: {e}")),
                }
            }
        }
    }

    let summary_path = config.out_dir.join("summary.csv");
    let mut w = BufWriter::new(fs::File::create(&summary_path)?);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for row in &rows {
        writeln!(w, "{}", summary_line(row))?;
    }
    w.flush()?;

    Ok(SweepOutcome {
        rows,
        failures,
        summary_path,
    })
}
