// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical configuration and the Lindblad generator.
//!
//! The master equation for the joint charger ⊗ battery state is
//!
//!   dρ/dt = −iω[J_C^z + J_B^z, ρ]
//!           + γ(n̄+1) D[J_C⁻ + J_B⁻](ρ) + γ n̄ D[J_C⁺ + J_B⁺](ρ)
//!
//! with D[O](ρ) = OρO† − ½{O†O, ρ} and n̄ the mean thermal occupation of the
//! reservoir at the transition frequency. Both ensembles couple through the
//! *joint* jump operators, which is what creates dark states.
//!
//! [`dissipator`] exposes the doubled superoperator
//! L(O)ρ = 2OρO† − O†Oρ − ρO†O = 2·D[O](ρ); the generator weighs it by γ/2
//! so that the two-spin rate equations come out with the coefficients used
//! throughout (ρ̇₁₁ = −2γ(n̄+1)ρ₁₁ + …, see [`crate::oracle`]).
//!
//! Ref: Lindblad (1976), Commun. Math. Phys. 48, 119;
//!      Breuer & Petruccione, "The Theory of Open Quantum Systems" (2002).

use crate::linalg::{CMat, C64};
use crate::spinops::JointOps;
use crate::{Error, Result};

/// Mean thermal occupation n̄ = 1/(e^{ω/T} − 1) of a bosonic reservoir mode
/// at frequency `omega`, temperature `temperature` (units ħ = k_B = 1).
///
/// The T = 0 limit returns exactly 0. Negative temperatures are rejected.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "transition frequency must be positive, got {omega}"
        )));
    }
    if temperature < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "temperature must be nonnegative, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    // exp_m1 keeps the high-temperature limit (ω/T → 0) accurate
    let x = (omega / temperature).exp_m1();
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 / x)
}

/// Reservoir temperature given either T directly or the occupation n̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureSpec {
    /// Temperature in energy units (ħ = k_B = 1, same units as ω).
    Temperature(f64),
    /// Mean occupation n̄ ≥ 0 at the spin transition frequency.
    MeanOccupation(f64),
}

/// Physical configuration of one charging run.
///
/// `gamma` fixes the time unit (all times are γt); `omega` is the spin
/// transition frequency in units of γ. N_C ≥ N_B is the regime of interest;
/// the reverse is allowed but flagged by [`SystemSpec::warnings`].
#[derive(Debug, Clone)]
pub struct SystemSpec {
    n_b: usize,
    n_c: usize,
    omega: f64,
    gamma: f64,
    temperature: TemperatureSpec,
}

impl SystemSpec {
    pub fn new(
        n_b: usize,
        n_c: usize,
        omega: f64,
        gamma: f64,
        temperature: TemperatureSpec,
    ) -> Result<Self> {
        if n_b == 0 || n_c == 0 {
            return Err(Error::InvalidSpec(
                "battery and charger must each contain at least one spin".into(),
            ));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        match temperature {
            TemperatureSpec::Temperature(t) if !(t >= 0.0) => {
                return Err(Error::InvalidSpec(format!(
                    "temperature must be nonnegative, got {t}"
                )));
            }
            TemperatureSpec::MeanOccupation(n) if !(n >= 0.0) => {
                return Err(Error::InvalidSpec(format!(
                    "mean occupation must be nonnegative, got {n}"
                )));
            }
            _ => {}
        }
        Ok(Self {
            n_b,
            n_c,
            omega,
            gamma,
            temperature,
        })
    }

    /// Zero-temperature configuration with ω = γ = 1.
    pub fn zero_temperature(n_b: usize, n_c: usize) -> Result<Self> {
        Self::new(n_b, n_c, 1.0, 1.0, TemperatureSpec::Temperature(0.0))
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn temperature_spec(&self) -> TemperatureSpec {
        self.temperature
    }

    /// Charger-to-battery spin ratio R = N_C/N_B, when integer.
    pub fn ratio(&self) -> Option<usize> {
        (self.n_c % self.n_b == 0).then_some(self.n_c / self.n_b)
    }

    /// Joint Hilbert-space dimension (N_C+1)(N_B+1).
    pub fn joint_dim(&self) -> usize {
        (self.n_c + 1) * (self.n_b + 1)
    }

    /// Mean thermal occupation derived from the temperature specification.
    pub fn nbar(&self) -> f64 {
        match self.temperature {
            TemperatureSpec::Temperature(t) => {
                thermal_occupation(self.omega, t).expect("validated at construction")
            }
            TemperatureSpec::MeanOccupation(n) => n,
        }
    }

    /// Temperature in energy units; inverted from n̄ when n̄ was given.
    pub fn temperature(&self) -> f64 {
        match self.temperature {
            TemperatureSpec::Temperature(t) => t,
            TemperatureSpec::MeanOccupation(n) => {
                if n == 0.0 {
                    0.0
                } else {
                    self.omega / ((n + 1.0) / n).ln()
                }
            }
        }
    }

    /// Non-fatal configuration warnings.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.n_c < self.n_b {
            w.push(format!(
                "charger smaller than battery (N_C = {} < N_B = {}); the charging regime assumes N_C >= N_B",
                self.n_c, self.n_b
            ));
        }
        w
    }
}

/// Doubled Lindblad superoperator L(O)ρ = 2OρO† − O†Oρ − ρO†O.
///
/// Trace-free and Hermiticity-preserving for any `op`.
pub fn dissipator(op: &CMat, rho: &CMat) -> Result<CMat> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.ncols(),
        });
    }
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: op.nrows(),
        });
    }
    let op_dag = op.adjoint();
    let op_dag_op = &op_dag * op;
    Ok((op * rho * op_dag).scale(2.0) - &op_dag_op * rho - rho * op_dag_op)
}

/// Sparse real matrix in coordinate form; all operators appearing in the
/// generator (J^±, J^±J^∓) have real entries and O(d) nonzeros.
#[derive(Debug, Clone)]
pub(crate) struct SparseReal {
    pub entries: Vec<(u32, u32, f64)>,
}

impl SparseReal {
    fn from_dense(m: &CMat, tol: f64) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                debug_assert!(z.im.abs() <= tol, "operator entries must be real");
                if z.re.abs() > tol {
                    entries.push((i as u32, j as u32, z.re));
                }
            }
        }
        SparseReal { entries }
    }

}

/// The Lindblad generator for a given [`SystemSpec`].
///
/// Construction precomputes sparse forms of the jump operators, so
/// [`Generator::apply`] costs O(d²) instead of the O(d³) of naive dense
/// products. The action is
///
///   apply(ρ) = −iω[J^z, ρ] + κ₋(2 J⁻ρJ⁺ − {J⁺J⁻, ρ}) + κ₊(2 J⁺ρJ⁻ − {J⁻J⁺, ρ})
///
/// with κ₋ = γ(n̄+1)/2 and κ₊ = γn̄/2.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: SystemSpec,
    /// J_C⁻ + J_B⁻ on the joint space.
    pub jump_down: CMat,
    /// J_C⁺ + J_B⁺ on the joint space.
    pub jump_up: CMat,
    /// ω(J_C^z + J_B^z).
    pub hamiltonian: CMat,
    dim: usize,
    /// 2m per joint basis index.
    two_m: Vec<i64>,
    /// ω·m per joint basis index.
    omega_m: Vec<f64>,
    jm: SparseReal,
    jp: SparseReal,
    /// κ₋ J⁺J⁻ + κ₊ J⁻J⁺ (Hermitian, real, m-preserving).
    anticomm: SparseReal,
    kappa_down: f64,
    kappa_up: f64,
}

/// Assemble the generator for `spec`.
pub fn build_generator(spec: &SystemSpec) -> Result<Generator> {
    Generator::new(spec.clone())
}

impl Generator {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        let joint = JointOps::new(spec.n_c(), spec.n_b())?;
        let dim = joint.dim();
        let jump_down = joint.jump_down();
        let jump_up = joint.jump_up();
        let hamiltonian = joint.jz_total().scale(spec.omega());
        let two_m = joint.two_m();
        let omega_m: Vec<f64> = two_m.iter().map(|&tm| spec.omega() * tm as f64 / 2.0).collect();

        let nbar = spec.nbar();
        let kappa_down = spec.gamma() * (nbar + 1.0) / 2.0;
        let kappa_up = spec.gamma() * nbar / 2.0;

        let jm = SparseReal::from_dense(&jump_down, 1e-14);
        let jp = SparseReal::from_dense(&jump_up, 1e-14);
        let a_down = &jump_up * &jump_down;
        let a_up = &jump_down * &jump_up;
        let anticomm =
            SparseReal::from_dense(&(a_down.scale(kappa_down) + a_up.scale(kappa_up)), 1e-14);

        Ok(Self {
            spec,
            jump_down,
            jump_up,
            hamiltonian,
            dim,
            two_m,
            omega_m,
            jm,
            jp,
            anticomm,
            kappa_down,
            kappa_up,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn two_m(&self) -> &[i64] {
        &self.two_m
    }

    pub(crate) fn jm_sparse(&self) -> &SparseReal {
        &self.jm
    }

    pub(crate) fn anticomm_sparse(&self) -> &SparseReal {
        &self.anticomm
    }

    pub(crate) fn rates(&self) -> (f64, f64) {
        (self.kappa_down, self.kappa_up)
    }

    /// Crude upper bound on the generator's spectral scale, used to pick
    /// integration tolerances that keep residual noise below a target.
    pub fn rate_scale(&self) -> f64 {
        let max_diag = self
            .anticomm
            .entries
            .iter()
            .filter(|(r, c, _)| r == c)
            .map(|&(_, _, v)| v)
            .fold(0.0f64, f64::max);
        2.0 * max_diag + self.spec.omega() * (self.spec.n_c() + self.spec.n_b()) as f64
    }

    /// dρ/dt for a density-matrix-shaped input (units of γ).
    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.nrows(),
            });
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        let mut tmp = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        self.apply_into(rho.as_slice(), out.as_mut_slice(), &mut tmp);
        Ok(out)
    }

    /// Core action on column-major slices of length d²; `tmp` is scratch of
    /// the same length. Used directly by the integrator to avoid allocation.
    pub(crate) fn apply_into(&self, rho: &[C64], out: &mut [C64], tmp: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        out.fill(C64::new(0.0, 0.0));

        // phase term: out[i,j] += −iω(m_i − m_j) ρ[i,j]
        for j in 0..d {
            let wj = self.omega_m[j];
            let col = &rho[j * d..(j + 1) * d];
            let out_col = &mut out[j * d..(j + 1) * d];
            for i in 0..d {
                let w = wj - self.omega_m[i]; // = −ω(m_i − m_j)
                if w != 0.0 {
                    let z = col[i];
                    out_col[i] += C64::new(-z.im * w, z.re * w);
                }
            }
        }

        // down channel: out += 2κ₋ J⁻ (ρ J⁺);  ρJ⁺ column c gathers ρ columns
        tmp.fill(C64::new(0.0, 0.0));
        for &(r, c, v) in &self.jp.entries {
            // tmp[:, c] += v ρ[:, r]
            axpy_real(
                v,
                &rho[r as usize * d..(r as usize + 1) * d],
                &mut tmp[c as usize * d..(c as usize + 1) * d],
            );
        }
        for j in 0..d {
            let tcol = &tmp[j * d..(j + 1) * d];
            let out_col = &mut out[j * d..(j + 1) * d];
            for &(r, c, v) in &self.jm.entries {
                out_col[r as usize] += tcol[c as usize] * (2.0 * self.kappa_down * v);
            }
        }

        // up channel: out += 2κ₊ J⁺ (ρ J⁻)
        tmp.fill(C64::new(0.0, 0.0));
        for &(r, c, v) in &self.jm.entries {
            axpy_real(
                v,
                &rho[r as usize * d..(r as usize + 1) * d],
                &mut tmp[c as usize * d..(c as usize + 1) * d],
            );
        }
        for j in 0..d {
            let tcol = &tmp[j * d..(j + 1) * d];
            let out_col = &mut out[j * d..(j + 1) * d];
            for &(r, c, v) in &self.jp.entries {
                out_col[r as usize] += tcol[c as usize] * (2.0 * self.kappa_up * v);
            }
        }

        // anticommutator: out −= Cρ + ρC with C = κ₋J⁺J⁻ + κ₊J⁻J⁺
        for j in 0..d {
            let rcol = &rho[j * d..(j + 1) * d];
            let out_col = &mut out[j * d..(j + 1) * d];
            for &(r, c, v) in &self.anticomm.entries {
                out_col[r as usize] -= rcol[c as usize] * v;
            }
        }
        for &(r, c, v) in &self.anticomm.entries {
            // out[:, c] −= v ρ[:, r]
            axpy_real(
                -v,
                &rho[r as usize * d..(r as usize + 1) * d],
                &mut out[c as usize * d..(c as usize + 1) * d],
            );
        }
    }
}

fn axpy_real(alpha: f64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += xi * alpha;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, frobenius_norm, hermiticity_error, max_abs_diff, trace_re};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn thermal_occupation_limits() {
        assert_eq!(thermal_occupation(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            thermal_occupation(1.0, 1.0).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            epsilon = 1e-15
        );
        // high-temperature asymptote T/ω − 1/2
        let n = thermal_occupation(1.0, 100.0).unwrap();
        assert!((n - 99.5).abs() / 99.5 < 0.01, "got {n}");
        // deep low-temperature limit underflows cleanly to zero
        assert_eq!(thermal_occupation(1.0, 1e-6).unwrap(), 0.0);
        assert!(thermal_occupation(1.0, -0.1).is_err());
        assert!(thermal_occupation(0.0, 1.0).is_err());
    }

    #[test]
    fn spec_validation_and_derived_quantities() {
        assert!(SystemSpec::new(0, 1, 1.0, 1.0, TemperatureSpec::Temperature(0.0)).is_err());
        assert!(SystemSpec::new(1, 1, -1.0, 1.0, TemperatureSpec::Temperature(0.0)).is_err());
        assert!(SystemSpec::new(1, 1, 1.0, 0.0, TemperatureSpec::Temperature(0.0)).is_err());
        assert!(SystemSpec::new(1, 1, 1.0, 1.0, TemperatureSpec::MeanOccupation(-2.0)).is_err());

        let s = SystemSpec::new(2, 10, 1.0, 1.0, TemperatureSpec::Temperature(0.0)).unwrap();
        assert_eq!(s.ratio(), Some(5));
        assert_eq!(s.joint_dim(), 33);
        assert_eq!(s.nbar(), 0.0);
        assert!(s.warnings().is_empty());

        let s = SystemSpec::new(3, 2, 1.0, 1.0, TemperatureSpec::Temperature(0.0)).unwrap();
        assert_eq!(s.ratio(), None);
        assert_eq!(s.warnings().len(), 1);

        // n̄ ↔ T round trip
        let s = SystemSpec::new(1, 1, 1.0, 1.0, TemperatureSpec::MeanOccupation(1.0)).unwrap();
        let t = s.temperature();
        assert_abs_diff_eq!(thermal_occupation(1.0, t).unwrap(), 1.0, epsilon = 1e-12);
        // n̄ = 0 exactly when T = 0
        let s0 = SystemSpec::new(1, 1, 1.0, 1.0, TemperatureSpec::MeanOccupation(0.0)).unwrap();
        assert_eq!(s0.temperature(), 0.0);
    }

    #[test]
    fn dissipator_single_spin_cases() {
        let mut sigma_minus = CMat::zeros(2, 2);
        sigma_minus[(1, 0)] = c(1.0, 0.0); // descending-m basis: |↑⟩ = e0, |↓⟩ = e1

        // ground state is annihilated
        let mut ground = CMat::zeros(2, 2);
        ground[(1, 1)] = c(1.0, 0.0);
        let d = dissipator(&sigma_minus, &ground).unwrap();
        assert!(frobenius_norm(&d) < 1e-15);

        // excited state decays at the doubled rate: 2(|↓⟩⟨↓| − |↑⟩⟨↑|)
        let mut excited = CMat::zeros(2, 2);
        excited[(0, 0)] = c(1.0, 0.0);
        let d = dissipator(&sigma_minus, &excited).unwrap();
        assert_abs_diff_eq!(d[(0, 0)].re, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[(1, 1)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_re(&d), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dissipator_annihilates_two_spin_dark_state() {
        let joint = JointOps::new(1, 1).unwrap();
        let jm = joint.jump_down();
        // |ψ₋⟩ = (|↑↓⟩ − |↓↑⟩)/√2 in the charger-major product basis
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = CMat::zeros(4, 1);
        psi[(1, 0)] = c(s, 0.0);
        psi[(2, 0)] = c(-s, 0.0);
        let rho = &psi * psi.adjoint();
        let d = dissipator(&jm, &rho).unwrap();
        assert!(frobenius_norm(&d) < 1e-14);
    }

    #[test]
    fn dissipator_rejects_dimension_mismatch() {
        let op = CMat::zeros(2, 2);
        let rho = CMat::zeros(3, 3);
        assert!(dissipator(&op, &rho).is_err());
    }

    #[test]
    fn generator_matches_dense_formula() {
        // apply must equal −iω[J^z,ρ] + (γ/2)[(n̄+1)L(J⁻) + n̄L(J⁺)] entrywise
        for (n_c, n_b, nbar, omega, gamma) in [
            (1usize, 1usize, 0.0, 1.0, 1.0),
            (2, 1, 0.7, 0.5, 1.3),
            (3, 2, 1.5, 2.0, 0.8),
        ] {
            let spec = SystemSpec::new(
                n_b,
                n_c,
                omega,
                gamma,
                TemperatureSpec::MeanOccupation(nbar),
            )
            .unwrap();
            let gen = Generator::new(spec.clone()).unwrap();
            let d = gen.dim();

            // deterministic pseudo-random Hermitian input
            let mut seed = 0x9e3779b97f4a7c15u64;
            let mut next = || {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((seed >> 33) as f64) / (u32::MAX as f64) - 0.5
            };
            let mut rho = CMat::zeros(d, d);
            for i in 0..d {
                for j in 0..=i {
                    let z = if i == j {
                        c(next(), 0.0)
                    } else {
                        c(next(), next())
                    };
                    rho[(i, j)] = z;
                    rho[(j, i)] = z.conj();
                }
            }

            let fast = gen.apply(&rho).unwrap();
            let comm = commutator(&gen.hamiltonian, &rho) * c(0.0, -1.0);
            let down = dissipator(&gen.jump_down, &rho).unwrap();
            let up = dissipator(&gen.jump_up, &rho).unwrap();
            let dense =
                comm + (down.scale(nbar + 1.0) + up.scale(nbar)).scale(gamma / 2.0);
            assert!(
                max_abs_diff(&fast, &dense) < 1e-12,
                "mismatch at N_C={n_c} N_B={n_b}"
            );

            // Lindblad form: Hermitian and traceless output
            assert!(hermiticity_error(&fast) < 1e-12);
            assert!(trace_re(&fast).abs() < 1e-12);
            assert!(fast.trace().im.abs() < 1e-12);
        }
    }

    #[test]
    fn generator_annihilates_dark_state_at_zero_temperature() {
        let spec = SystemSpec::zero_temperature(1, 1).unwrap();
        let gen = Generator::new(spec).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = CMat::zeros(4, 1);
        psi[(1, 0)] = c(s, 0.0);
        psi[(2, 0)] = c(-s, 0.0);
        let rho = &psi * psi.adjoint();
        let drho = gen.apply(&rho).unwrap();
        assert!(frobenius_norm(&drho) < 1e-12);
    }

    #[test]
    fn maximally_mixed_output_is_traceless() {
        let spec = SystemSpec::new(2, 4, 1.0, 1.0, TemperatureSpec::MeanOccupation(0.5)).unwrap();
        let gen = Generator::new(spec.clone()).unwrap();
        let d = spec.joint_dim();
        let rho = CMat::identity(d, d).scale(1.0 / d as f64);
        let drho = gen.apply(&rho).unwrap();
        assert!(trace_re(&drho).abs() < 1e-12);
    }

    #[test]
    fn generator_is_linear() {
        let spec = SystemSpec::new(1, 2, 1.0, 1.0, TemperatureSpec::MeanOccupation(0.4)).unwrap();
        let gen = Generator::new(spec.clone()).unwrap();
        let d = spec.joint_dim();
        let mut a = CMat::zeros(d, d);
        let mut b = CMat::zeros(d, d);
        for i in 0..d {
            a[(i, i)] = c(1.0 / (i + 1) as f64, 0.0);
            b[(i, (i + 1) % d)] = c(0.3, 0.1 * i as f64);
        }
        let b = (&b + b.adjoint()).scale(0.5);
        let (alpha, beta) = (0.7, -1.9);
        let lhs = gen.apply(&(a.scale(alpha) + b.scale(beta))).unwrap();
        let rhs = gen.apply(&a).unwrap().scale(alpha) + gen.apply(&b).unwrap().scale(beta);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let spec = SystemSpec::zero_temperature(1, 1).unwrap();
        let gen = Generator::new(spec).unwrap();
        let rho = CMat::zeros(3, 3);
        assert!(gen.apply(&rho).is_err());
    }
}
