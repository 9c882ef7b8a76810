// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact two-spin (N_C = N_B = 1) reference solution.
//!
//! In the coupled basis |ψ↑⟩ = |↑↑⟩, |ψ±⟩ = (|↑↓⟩ ± |↓↑⟩)/√2, |ψ↓⟩ = |↓↓⟩
//! the master equation closes into ten independent scalar ODEs. The
//! coefficients are hard-coded here from the operator algebra — never taken
//! from the numeric generator — so this module can serve as an independent
//! oracle for it.
//!
//! With κ = γ, basis indices 0..3 in the order above, and m = (1, 0, 0, −1):
//!
//!   ρ̇₀₀ = −2γ(n̄+1)ρ₀₀ + 2γn̄ρ₁₁
//!   ρ̇₁₁ =  2γ(n̄+1)ρ₀₀ − 2γ(2n̄+1)ρ₁₁ + 2γn̄ρ₃₃
//!   ρ̇₂₂ =  0                                  (dark state, any n̄)
//!   ρ̇₃₃ =  2γ(n̄+1)ρ₁₁ − 2γn̄ρ₃₃
//!   ρ̇₀₁ = −[γ(3n̄+2) + iω]ρ₀₁ + 2γn̄ρ₁₃
//!   ρ̇₀₂ = −[γ(n̄+1)  + iω]ρ₀₂
//!   ρ̇₀₃ = −[γ(2n̄+1) + 2iω]ρ₀₃
//!   ρ̇₁₂ = −γ(2n̄+1)ρ₁₂
//!   ρ̇₁₃ = −[γ(3n̄+1) + iω]ρ₁₃ + 2γ(n̄+1)ρ₀₁
//!   ρ̇₂₃ = −[γn̄      + iω]ρ₂₃
//!
//! The populations close among themselves; all coherences decay, so the
//! steady state is diagonal with the dark-state population ρ₂₂ frozen at its
//! initial value:
//!
//!   ρ₀₀^ss = n̄²(1−ρ₂₂(0))/Z,   ρ₁₁^ss = n̄(n̄+1)(1−ρ₂₂(0))/Z,
//!   ρ₂₂^ss = ρ₂₂(0),           ρ₃₃^ss = (n̄+1)²(1−ρ₂₂(0))/Z,
//!
//! with Z = 1 + 3n̄(n̄+1).

use crate::dynamics::DensityMatrix;
use crate::linalg::{CMat, C64};
use crate::{Error, Result};

/// Index of |ψ↑⟩ = |↑↑⟩ in the coupled basis.
pub const PSI_UP: usize = 0;
/// Index of the symmetric state |ψ₊⟩.
pub const PSI_PLUS: usize = 1;
/// Index of the antisymmetric (dark) state |ψ₋⟩.
pub const PSI_MINUS: usize = 2;
/// Index of |ψ↓⟩ = |↓↓⟩.
pub const PSI_DOWN: usize = 3;

/// The coupled two-spin basis and its unitary map to the charger-major
/// product basis {↑↑, ↑↓, ↓↑, ↓↓}.
#[derive(Debug, Clone)]
pub struct AppendixBasis {
    /// Column k is the coupled basis vector |k⟩ expressed in the product basis.
    pub transform: CMat,
}

impl Default for AppendixBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl AppendixBasis {
    pub fn new() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut u = CMat::zeros(4, 4);
        u[(0, PSI_UP)] = C64::new(1.0, 0.0);
        u[(1, PSI_PLUS)] = C64::new(s, 0.0);
        u[(2, PSI_PLUS)] = C64::new(s, 0.0);
        u[(1, PSI_MINUS)] = C64::new(s, 0.0);
        u[(2, PSI_MINUS)] = C64::new(-s, 0.0);
        u[(3, PSI_DOWN)] = C64::new(1.0, 0.0);
        Self { transform: u }
    }

    pub fn labels() -> [&'static str; 4] {
        ["psi_up", "psi_plus", "psi_minus", "psi_down"]
    }

    /// Express a product-basis operator in the coupled basis: U†ρU.
    pub fn to_coupled(&self, rho_product: &CMat) -> CMat {
        self.transform.adjoint() * rho_product * &self.transform
    }

    /// Express a coupled-basis operator in the product basis: UρU†.
    pub fn to_product(&self, rho_coupled: &CMat) -> CMat {
        &self.transform * rho_coupled * self.transform.adjoint()
    }
}

/// Linear coefficient table for the ten independent matrix elements.
#[derive(Debug, Clone)]
pub struct TwoSpinRates {
    pub nbar: f64,
    pub gamma: f64,
    pub omega: f64,
}

/// Build the coefficient table for d/dt of all ρ_ij at the given reservoir
/// occupation, damping rate, and transition frequency.
pub fn two_spin_rate_matrix(nbar: f64, gamma: f64, omega: f64) -> Result<TwoSpinRates> {
    if !(nbar >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "mean occupation must be nonnegative, got {nbar}"
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "omega must be positive, got {omega}"
        )));
    }
    Ok(TwoSpinRates { nbar, gamma, omega })
}

impl TwoSpinRates {
    /// Coefficients of d/dt ρ[i,j] for i ≤ j as ((k, l), c) terms meaning
    /// c·ρ[k,l]. Rows with j < i follow by conjugation.
    pub fn coefficients(&self, i: usize, j: usize) -> Vec<((usize, usize), C64)> {
        assert!(i <= j && j < 4, "upper-triangle indices expected");
        let (n, g, w) = (self.nbar, self.gamma, self.omega);
        let re = |x: f64| C64::new(x, 0.0);
        let c = |x: f64, y: f64| C64::new(x, y);
        match (i, j) {
            (0, 0) => vec![((0, 0), re(-2.0 * g * (n + 1.0))), ((1, 1), re(2.0 * g * n))],
            (1, 1) => vec![
                ((0, 0), re(2.0 * g * (n + 1.0))),
                ((1, 1), re(-2.0 * g * (2.0 * n + 1.0))),
                ((3, 3), re(2.0 * g * n)),
            ],
            (2, 2) => vec![],
            (3, 3) => vec![
                ((1, 1), re(2.0 * g * (n + 1.0))),
                ((3, 3), re(-2.0 * g * n)),
            ],
            (0, 1) => vec![
                ((0, 1), c(-g * (3.0 * n + 2.0), -w)),
                ((1, 3), re(2.0 * g * n)),
            ],
            (0, 2) => vec![((0, 2), c(-g * (n + 1.0), -w))],
            (0, 3) => vec![((0, 3), c(-g * (2.0 * n + 1.0), -2.0 * w))],
            (1, 2) => vec![((1, 2), re(-g * (2.0 * n + 1.0)))],
            (1, 3) => vec![
                ((1, 3), c(-g * (3.0 * n + 1.0), -w)),
                ((0, 1), re(2.0 * g * (n + 1.0))),
            ],
            (2, 3) => vec![((2, 3), c(-g * n, -w))],
            _ => unreachable!(),
        }
    }

    /// Self-coupling (decay) coefficient of ρ[i,j].
    pub fn decay_coefficient(&self, i: usize, j: usize) -> C64 {
        self.coefficients(i, j)
            .into_iter()
            .find(|((k, l), _)| *k == i && *l == j)
            .map(|(_, c)| c)
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    /// The full 16×16 superoperator on vec(ρ) (column-major, coupled basis).
    ///
    /// Lower-triangle rows follow from Hermiticity preservation:
    /// d/dt ρ[j,i] = conj(d/dt ρ[i,j]) with every referenced ρ[k,l]
    /// replaced by ρ[l,k].
    pub fn superoperator(&self) -> CMat {
        let idx = |i: usize, j: usize| i + 4 * j;
        let mut m = CMat::zeros(16, 16);
        for i in 0..4 {
            for j in i..4 {
                for ((k, l), coeff) in self.coefficients(i, j) {
                    m[(idx(i, j), idx(k, l))] += coeff;
                    if i != j {
                        m[(idx(j, i), idx(l, k))] += coeff.conj();
                    }
                }
            }
        }
        m
    }
}

/// Steady state reached from an initial state with dark-state population
/// `rho_dark_initial` = ρ₂₂(0), as a diagonal coupled-basis density matrix.
pub fn two_spin_steady_state(nbar: f64, rho_dark_initial: f64) -> Result<DensityMatrix> {
    if !(nbar >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "mean occupation must be nonnegative, got {nbar}"
        )));
    }
    if !(0.0..=1.0).contains(&rho_dark_initial) {
        return Err(Error::InvalidSpec(format!(
            "dark-state population must lie in [0, 1], got {rho_dark_initial}"
        )));
    }
    let z = 1.0 + 3.0 * nbar * (nbar + 1.0);
    let rest = 1.0 - rho_dark_initial;
    let p_up = nbar * nbar * rest / z;
    let p_plus = nbar * (nbar + 1.0) * rest / z;
    // closing the trace exactly on the largest population
    let p_down = 1.0 - rho_dark_initial - p_up - p_plus;

    let mut rho = CMat::zeros(4, 4);
    rho[(PSI_UP, PSI_UP)] = C64::new(p_up, 0.0);
    rho[(PSI_PLUS, PSI_PLUS)] = C64::new(p_plus, 0.0);
    rho[(PSI_MINUS, PSI_MINUS)] = C64::new(rho_dark_initial, 0.0);
    rho[(PSI_DOWN, PSI_DOWN)] = C64::new(p_down, 0.0);
    DensityMatrix::new(rho)
}

/// Steady-state ⟨J_C^z⟩ = ⟨J_B^z⟩ for the charging initial condition
/// (excited charger, battery in the ground state, so ρ₂₂(0) = 1/2):
/// −(2n̄+1)/(12n̄(n̄+1)+4).
pub fn two_spin_jz_expectation(nbar: f64) -> f64 {
    -(2.0 * nbar + 1.0) / (12.0 * nbar * (nbar + 1.0) + 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, max_abs_diff};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn basis_transform_is_unitary() {
        let basis = AppendixBasis::new();
        let u = &basis.transform;
        let id = CMat::identity(4, 4);
        assert!(max_abs_diff(&(u.adjoint() * u), &id) < 1e-14);
        assert!(max_abs_diff(&(u * u.adjoint()), &id) < 1e-14);
    }

    #[test]
    fn charging_initial_state_decomposition() {
        // |↑⟩_C|↓⟩_B has exactly four nonzero coupled-basis elements,
        // all equal to 1/2, in the {ψ₊, ψ₋} block
        let basis = AppendixBasis::new();
        let mut rho = CMat::zeros(4, 4);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let coupled = basis.to_coupled(&rho);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == PSI_PLUS || i == PSI_MINUS)
                    && (j == PSI_PLUS || j == PSI_MINUS)
                {
                    0.5
                } else {
                    0.0
                };
                assert_abs_diff_eq!(coupled[(i, j)].re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(coupled[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn population_rates_at_zero_temperature() {
        let rates = two_spin_rate_matrix(0.0, 1.0, 1.0).unwrap();
        // ρ̇₀₀ = −2γρ₀₀
        assert_eq!(
            rates.coefficients(0, 0),
            vec![((0, 0), C64::new(-2.0, 0.0)), ((1, 1), C64::new(0.0, 0.0))]
        );
        // dark-state population is frozen at any n̄
        assert!(rates.coefficients(2, 2).is_empty());
        let rates = two_spin_rate_matrix(3.7, 1.0, 1.0).unwrap();
        assert!(rates.coefficients(2, 2).is_empty());
    }

    #[test]
    fn coherence_decay_coefficients() {
        let (n, g, w) = (0.8, 1.3, 0.6);
        let rates = two_spin_rate_matrix(n, g, w).unwrap();
        assert_abs_diff_eq!(
            rates.decay_coefficient(0, 1).re,
            -g * (3.0 * n + 2.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(rates.decay_coefficient(0, 1).im, -w, epsilon = 1e-15);
        assert_abs_diff_eq!(rates.decay_coefficient(0, 3).im, -2.0 * w, epsilon = 1e-15);
        assert_abs_diff_eq!(
            rates.decay_coefficient(1, 2).re,
            -g * (2.0 * n + 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(rates.decay_coefficient(2, 3).re, -g * n, epsilon = 1e-15);
    }

    #[test]
    fn steady_state_values() {
        // zero temperature, charging initial condition
        let ss = two_spin_steady_state(0.0, 0.5).unwrap();
        let m = ss.matrix();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 0.0, 0.5, 0.5]);

        // n̄ = 1: (1/14, 1/7, 1/2, 2/7)
        let ss = two_spin_steady_state(1.0, 0.5).unwrap();
        let m = ss.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, 1.0 / 14.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, 1.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 2)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 3)].re, 2.0 / 7.0, epsilon = 1e-15);

        // pure dark state stays pure for any n̄
        for nbar in [0.0, 0.5, 4.0] {
            let ss = two_spin_steady_state(nbar, 1.0).unwrap();
            let m = ss.matrix();
            assert_abs_diff_eq!(m[(PSI_MINUS, PSI_MINUS)].re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(m[(PSI_DOWN, PSI_DOWN)].re, 0.0, epsilon = 1e-15);
        }

        assert!(two_spin_steady_state(-0.5, 0.5).is_err());
        assert!(two_spin_steady_state(1.0, 1.5).is_err());
    }

    #[test]
    fn jz_expectation_values() {
        assert_abs_diff_eq!(two_spin_jz_expectation(0.0), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(two_spin_jz_expectation(1.0), -3.0 / 28.0, epsilon = 1e-15);
        assert!(two_spin_jz_expectation(1e6).abs() < 1e-6);
    }

    #[test]
    fn steady_state_consistent_with_jz_expectation() {
        // Tr(ρ_ss J_B^z) recomputed in the product basis must match the
        // closed-form expectation on a grid of occupations
        let basis = AppendixBasis::new();
        let m_b = [0.5, -0.5, 0.5, -0.5]; // battery m per product index
        let m_c = [0.5, 0.5, -0.5, -0.5];
        for nbar in [0.0, 0.1, 1.0, 10.0] {
            let ss = two_spin_steady_state(nbar, 0.5).unwrap();
            let prod = basis.to_product(ss.matrix());
            let jz_b: f64 = (0..4).map(|k| prod[(k, k)].re * m_b[k]).sum();
            let jz_c: f64 = (0..4).map(|k| prod[(k, k)].re * m_c[k]).sum();
            let expected = two_spin_jz_expectation(nbar);
            assert_abs_diff_eq!(jz_b, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(jz_c, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn steady_state_lies_in_rate_equation_kernel() {
        // A11–A14 must solve A1–A4: vec(ρ_ss) in the kernel of the table's
        // superoperator
        for nbar in [0.0, 0.1, 1.0, 10.0] {
            let rates = two_spin_rate_matrix(nbar, 1.0, 1.0).unwrap();
            let sup = rates.superoperator();
            let ss = two_spin_steady_state(nbar, 0.5).unwrap();
            let v = DVector::from_column_slice(ss.matrix().as_slice());
            assert!((sup * v).norm() < 1e-13, "nbar = {nbar}");
        }
    }

    #[test]
    fn superoperator_preserves_hermiticity() {
        // evolve a random Hermitian matrix one Euler step; Hermiticity must survive
        let rates = two_spin_rate_matrix(0.7, 1.0, 2.0).unwrap();
        let sup = rates.superoperator();
        let mut rho = CMat::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] = C64::new((i + 1) as f64 * 0.1, (j as f64 - i as f64) * 0.05);
            }
        }
        let rho = (&rho + rho.adjoint()).scale(0.5);
        let v = DVector::from_column_slice(rho.as_slice());
        let dv = &sup * v;
        let drho = CMat::from_column_slice(4, 4, dv.as_slice());
        assert!(frobenius_norm(&(&drho - drho.adjoint())) < 1e-13);
    }
}
