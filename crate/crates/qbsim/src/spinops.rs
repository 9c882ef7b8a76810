// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Collective spin operators on the symmetric (Dicke) sector.
//!
//! An ensemble of N spin-1/2 particles restricted to its maximal-spin sector
//! j = N/2 is an (N+1)-level ladder. Basis ordering is descending m:
//! index k ↔ m = j − k, so index 0 is the fully excited state |j, +j⟩ and
//! index N the ground state |j, −j⟩. Joint (charger ⊗ battery) indices are
//! charger-major: idx = c·(N_B+1) + b.

use crate::linalg::{CMat, C64};
use crate::{Error, Result};

/// Collective spin operators J^z, J^± for one ensemble of `n_spins` spins
/// in the j = N/2 Dicke ladder, dimension N+1. ħ = 1; entries dimensionless.
#[derive(Debug, Clone)]
pub struct CollectiveOps {
    pub n_spins: usize,
    pub jz: CMat,
    pub jplus: CMat,
    pub jminus: CMat,
}

/// Build the collective ladder operators for `n_spins` ≥ 1.
///
/// `jz` is real diagonal with entries m = j, j−1, …, −j (descending);
/// `jplus` couples m → m+1 with amplitude √(j(j+1) − m(m+1)); `jminus` is
/// its conjugate transpose.
pub fn build_collective_ops(n_spins: usize) -> Result<CollectiveOps> {
    if n_spins == 0 {
        return Err(Error::InvalidSpec(
            "ensemble must contain at least one spin".into(),
        ));
    }
    let dim = n_spins + 1;
    let j = n_spins as f64 / 2.0;

    let mut jz = CMat::zeros(dim, dim);
    let mut jplus = CMat::zeros(dim, dim);
    for k in 0..dim {
        let m = j - k as f64;
        jz[(k, k)] = C64::new(m, 0.0);
        if k > 0 {
            // raising |j, m⟩ → √(j(j+1) − m(m+1)) |j, m+1⟩; m+1 sits at index k−1
            let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            jplus[(k - 1, k)] = C64::new(amp, 0.0);
        }
    }
    let jminus = jplus.adjoint();

    Ok(CollectiveOps {
        n_spins,
        jz,
        jplus,
        jminus,
    })
}

impl CollectiveOps {
    /// Ladder dimension N+1.
    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    /// Total spin j = N/2.
    pub fn j(&self) -> f64 {
        self.n_spins as f64 / 2.0
    }
}

/// The six collective operators embedded on the joint charger ⊗ battery
/// space, dimension (N_C+1)(N_B+1), plus the joint jump operators built
/// from them.
#[derive(Debug, Clone)]
pub struct JointOps {
    pub n_c: usize,
    pub n_b: usize,
    pub jz_c: CMat,
    pub jplus_c: CMat,
    pub jminus_c: CMat,
    pub jz_b: CMat,
    pub jplus_b: CMat,
    pub jminus_b: CMat,
}

/// Embed charger and battery ladders on the joint space, charger-major.
pub fn embed_joint(ops_c: &CollectiveOps, ops_b: &CollectiveOps) -> JointOps {
    let id_c = CMat::identity(ops_c.dim(), ops_c.dim());
    let id_b = CMat::identity(ops_b.dim(), ops_b.dim());
    JointOps {
        n_c: ops_c.n_spins,
        n_b: ops_b.n_spins,
        jz_c: ops_c.jz.kronecker(&id_b),
        jplus_c: ops_c.jplus.kronecker(&id_b),
        jminus_c: ops_c.jminus.kronecker(&id_b),
        jz_b: id_c.kronecker(&ops_b.jz),
        jplus_b: id_c.kronecker(&ops_b.jplus),
        jminus_b: id_c.kronecker(&ops_b.jminus),
    }
}

impl JointOps {
    /// Build both ladders and embed them in one call.
    pub fn new(n_c: usize, n_b: usize) -> Result<Self> {
        let ops_c = build_collective_ops(n_c)?;
        let ops_b = build_collective_ops(n_b)?;
        Ok(embed_joint(&ops_c, &ops_b))
    }

    /// Joint dimension (N_C+1)(N_B+1).
    pub fn dim(&self) -> usize {
        (self.n_c + 1) * (self.n_b + 1)
    }

    /// Joint lowering operator J_C⁻ + J_B⁻.
    pub fn jump_down(&self) -> CMat {
        &self.jminus_c + &self.jminus_b
    }

    /// Joint raising operator J_C⁺ + J_B⁺.
    pub fn jump_up(&self) -> CMat {
        &self.jplus_c + &self.jplus_b
    }

    /// Total J^z (diagonal on the joint space).
    pub fn jz_total(&self) -> CMat {
        &self.jz_c + &self.jz_b
    }

    /// Twice the total magnetic quantum number per joint basis index,
    /// 2m = (N_C − 2c) + (N_B − 2b). Integer-valued, used to classify
    /// coherence sectors without floating-point comparisons.
    pub fn two_m(&self) -> Vec<i64> {
        let db = self.n_b + 1;
        let mut out = Vec::with_capacity(self.dim());
        for c in 0..=self.n_c {
            for b in 0..db {
                out.push((self.n_c as i64 - 2 * c as i64) + (self.n_b as i64 - 2 * b as i64));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs_diff};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_zero_spins() {
        assert!(build_collective_ops(0).is_err());
    }

    #[test]
    fn single_spin_ladder() {
        let ops = build_collective_ops(1).unwrap();
        assert_eq!(ops.dim(), 2);
        assert_abs_diff_eq!(ops.jz[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ops.jz[(1, 1)].re, -0.5, epsilon = 1e-15);
        // single raising entry of unit strength above the diagonal
        assert_abs_diff_eq!(ops.jplus[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ops.jplus[(1, 0)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_spin_ladder_amplitudes() {
        let ops = build_collective_ops(2).unwrap();
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(ops.jplus[(0, 1)].re, s2, epsilon = 1e-14);
        assert_abs_diff_eq!(ops.jplus[(1, 2)].re, s2, epsilon = 1e-14);
    }

    #[test]
    fn su2_commutators_hold() {
        for n in [1, 2, 3, 7, 12] {
            let ops = build_collective_ops(n).unwrap();
            let two_jz = ops.jz.scale(2.0);
            let comm_pm = commutator(&ops.jplus, &ops.jminus);
            assert!(max_abs_diff(&comm_pm, &two_jz) < 1e-12, "n = {n}");
            let comm_zp = commutator(&ops.jz, &ops.jplus);
            assert!(max_abs_diff(&comm_zp, &ops.jplus) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn ladder_ends_annihilate() {
        let ops = build_collective_ops(4).unwrap();
        let dim = ops.dim();
        let mut top = CMat::zeros(dim, 1);
        top[(0, 0)] = C64::new(1.0, 0.0);
        let mut bottom = CMat::zeros(dim, 1);
        bottom[(dim - 1, 0)] = C64::new(1.0, 0.0);
        assert!((&ops.jplus * &top).norm() < 1e-15);
        assert!((&ops.jminus * &bottom).norm() < 1e-15);
    }

    #[test]
    fn jz_spectrum_is_integer_ladder() {
        let ops = build_collective_ops(5).unwrap();
        let expected: Vec<f64> = (0..=5).map(|k| 2.5 - k as f64).collect();
        for (k, want) in expected.iter().enumerate() {
            assert_abs_diff_eq!(ops.jz[(k, k)].re, *want, epsilon = 1e-15);
        }
    }

    #[test]
    fn joint_embedding_dimensions_and_diagonal() {
        let joint = JointOps::new(1, 1).unwrap();
        assert_eq!(joint.dim(), 4);
        let jz_tot = joint.jz_total();
        let diag: Vec<f64> = (0..4).map(|i| jz_tot[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);

        let joint = JointOps::new(2, 1).unwrap();
        assert_eq!(joint.dim(), 6);
    }

    #[test]
    fn charger_and_battery_operators_commute() {
        let joint = JointOps::new(2, 3).unwrap();
        let zero = CMat::zeros(joint.dim(), joint.dim());
        for (a, b) in [
            (&joint.jplus_c, &joint.jminus_b),
            (&joint.jz_c, &joint.jplus_b),
            (&joint.jminus_c, &joint.jplus_b),
        ] {
            assert!(max_abs_diff(&commutator(a, b), &zero) < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_hermiticity_pairing() {
        let joint = JointOps::new(3, 2).unwrap();
        assert!(max_abs_diff(&joint.jz_c.adjoint(), &joint.jz_c) < 1e-15);
        assert!(max_abs_diff(&joint.jplus_c.adjoint(), &joint.jminus_c) < 1e-15);
        assert!(max_abs_diff(&joint.jplus_b.adjoint(), &joint.jminus_b) < 1e-15);
    }

    #[test]
    fn two_m_matches_jz_diagonal() {
        let joint = JointOps::new(3, 2).unwrap();
        let jz_tot = joint.jz_total();
        for (i, tm) in joint.two_m().iter().enumerate() {
            assert_abs_diff_eq!(jz_tot[(i, i)].re * 2.0, *tm as f64, epsilon = 1e-12);
        }
    }
}
