// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix helpers shared by all modules.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>` (column-major). Equality is
//! always tolerance-based; callers supply the entrywise tolerance.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix carrying operators and states.
pub type CMat = DMatrix<Complex64>;

/// Complex scalar shorthand.
pub type C64 = Complex64;

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Commutator [a, b] = ab − ba.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entrywise absolute difference between two matrices.
///
/// Panics if shapes differ; shape agreement is the caller's contract.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entrywise comparison within an absolute tolerance.
pub fn approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

/// Largest deviation from Hermiticity, max |m − m†|.
pub fn hermiticity_error(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(dev);
        }
    }
    worst
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized first so that tiny anti-Hermitian numerical
/// noise cannot leak into complex eigenvalues, and entries many orders of
/// magnitude below the unit-trace scale are flushed to zero: long-decayed
/// coherences reach subnormal magnitudes whose squared norms underflow
/// inside the Householder tridiagonalization and poison it with NaNs.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    const FLUSH: f64 = 1e-120;
    let mut sym = (m + m.adjoint()).scale(0.5);
    for z in sym.iter_mut() {
        if z.re.abs() < FLUSH {
            z.re = 0.0;
        }
        if z.im.abs() < FLUSH {
            z.im = 0.0;
        }
    }
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    ev
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::NAN)
}

/// Trace norm ‖m‖₁ = Σ|λᵢ| of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// Trace distance ½‖a − b‖₁ between Hermitian matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    0.5 * trace_norm_hermitian(&(a - b))
}

/// Real part of the trace.
pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dagger_flips_and_conjugates() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, -1.0), c(0.0, 4.0), c(5.0, 0.0)]);
        let d = dagger(&m);
        assert_eq!(d[(0, 1)], c(0.0, -4.0));
        assert_eq!(d[(1, 0)], c(3.0, 1.0));
    }

    #[test]
    fn hermitian_eigenvalues_of_known_block() {
        // [[0, -1/4], [-1/4, 1/2]] has eigenvalues 1/4 ± √2/4
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(-0.25, 0.0), c(-0.25, 0.0), c(0.5, 0.0)],
        );
        let ev = hermitian_eigenvalues(&m);
        assert_abs_diff_eq!(ev[0], 0.25 - 2f64.sqrt() / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.25 + 2f64.sqrt() / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(1.0, 0.0);
        let mut b = CMat::zeros(2, 2);
        b[(1, 1)] = c(1.0, 0.0);
        assert_abs_diff_eq!(trace_distance(&a, &b), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_distance(&a, &a), 0.0, epsilon = 1e-14);
    }
}
