// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Coherence-sector restriction of the generator.
//!
//! Every term of the generator shifts row and column total-m by the same
//! amount, so the superoperator is block-diagonal over the sector label
//! q = m(row) − m(col). Physical initial states here (products of diagonal
//! factors, dark states) live entirely in q = 0, whose size is only
//! Σ_m mult(m)² ≈ d·(N_B+1) instead of d². Restricting the integration to
//! that block is exact and cuts the per-step cost by roughly a factor d.
//!
//! On q = 0 the Hamiltonian commutator vanishes identically (equal row and
//! column m), which is also why every reported observable is ω-independent.

use crate::linalg::{CMat, C64};
use crate::lindblad::Generator;

/// Sparse real action of the generator restricted to the q = 0 sector.
#[derive(Debug, Clone)]
pub(crate) struct SectorRhs {
    dim: usize,
    /// (row, col) of each sector slot, in column-major scan order.
    slots: Vec<(u32, u32)>,
    /// Map from full index i + j·dim to slot, or -1 when outside the sector.
    slot_of: Vec<i64>,
    row_ptr: Vec<u32>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

impl SectorRhs {
    pub fn build(gen: &Generator) -> Self {
        let d = gen.dim();
        let tm = gen.two_m();
        let (kappa_down, kappa_up) = gen.rates();

        let mut slots = Vec::new();
        let mut slot_of = vec![-1i64; d * d];
        for j in 0..d {
            for i in 0..d {
                if tm[i] == tm[j] {
                    slot_of[i + j * d] = slots.len() as i64;
                    slots.push((i as u32, j as u32));
                }
            }
        }

        // adjacency of the sparse operators
        let mut jm_cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); d];
        let mut jm_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); d];
        for &(r, c, v) in &gen.jm_sparse().entries {
            jm_cols[c as usize].push((r, v));
            jm_rows[r as usize].push((c, v));
        }
        // C = κ₋J⁺J⁻ + κ₊J⁻J⁺ is real symmetric, so rows double as columns
        let mut c_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); d];
        for &(r, c, v) in &gen.anticomm_sparse().entries {
            c_rows[r as usize].push((c, v));
        }

        let slot = |i: u32, j: u32| -> u32 {
            let s = slot_of[i as usize + j as usize * d];
            debug_assert!(s >= 0, "generator left the coherence sector");
            s as u32
        };

        let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
        for (src, &(c, cp)) in slots.iter().enumerate() {
            let src = src as u32;
            // 2κ₋ J⁻ρJ⁺: targets one rung down on both sides
            for &(r, v1) in &jm_cols[c as usize] {
                for &(r2, v2) in &jm_cols[cp as usize] {
                    triplets.push((slot(r, r2), src, 2.0 * kappa_down * v1 * v2));
                }
            }
            // 2κ₊ J⁺ρJ⁻: J⁺ columns are J⁻ rows
            for &(r, v1) in &jm_rows[c as usize] {
                for &(r2, v2) in &jm_rows[cp as usize] {
                    triplets.push((slot(r, r2), src, 2.0 * kappa_up * v1 * v2));
                }
            }
            // −(Cρ + ρC)
            for &(r, v) in &c_rows[c as usize] {
                triplets.push((slot(r, cp), src, -v));
            }
            for &(s2, v) in &c_rows[cp as usize] {
                triplets.push((slot(c, s2), src, -v));
            }
        }

        triplets.sort_unstable_by_key(|&(dst, src, _)| (dst, src));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(triplets.len());
        for (dst, src, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == dst && last.1 == src => last.2 += v,
                _ => merged.push((dst, src, v)),
            }
        }

        let n = slots.len();
        let mut row_ptr = vec![0u32; n + 1];
        for &(dst, _, _) in &merged {
            row_ptr[dst as usize + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let col_idx: Vec<u32> = merged.iter().map(|&(_, src, _)| src).collect();
        let vals: Vec<f64> = merged.iter().map(|&(_, _, v)| v).collect();

        Self {
            dim: d,
            slots,
            slot_of,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    /// True when `rho` is exactly zero outside the sector. Only exact zeros
    /// qualify: anything else falls back to the full-space path.
    pub fn supports_exactly(&self, rho: &CMat) -> bool {
        let d = self.dim;
        debug_assert_eq!(rho.nrows(), d);
        let data = rho.as_slice();
        for (idx, &s) in self.slot_of.iter().enumerate() {
            if s < 0 {
                let z = data[idx];
                if z.re != 0.0 || z.im != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn gather(&self, rho: &CMat) -> Vec<C64> {
        let d = self.dim;
        let data = rho.as_slice();
        self.slots
            .iter()
            .map(|&(i, j)| data[i as usize + j as usize * d])
            .collect()
    }

    pub fn scatter(&self, y: &[C64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        let data = out.as_mut_slice();
        for (&(i, j), &v) in self.slots.iter().zip(y.iter()) {
            data[i as usize + j as usize * self.dim] = v;
        }
        out
    }

    /// out = M·y over sector slots.
    pub fn rhs(&self, y: &[C64], out: &mut [C64]) {
        for r in 0..self.len() {
            let lo = self.row_ptr[r] as usize;
            let hi = self.row_ptr[r + 1] as usize;
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..hi {
                acc += y[self.col_idx[k] as usize] * self.vals[k];
            }
            out[r] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{SystemSpec, TemperatureSpec};
    use crate::linalg::max_abs_diff;

    fn diagonal_state(d: usize) -> CMat {
        let mut rho = CMat::zeros(d, d);
        let mut w = 0.0;
        for i in 0..d {
            rho[(i, i)] = C64::new((i + 1) as f64, 0.0);
            w += (i + 1) as f64;
        }
        rho.scale(1.0 / w)
    }

    #[test]
    fn sector_rhs_matches_full_generator() {
        for (n_c, n_b, nbar) in [(1usize, 1usize, 0.0), (2, 1, 0.8), (4, 2, 1.7), (6, 3, 0.0)] {
            let spec = SystemSpec::new(
                n_b,
                n_c,
                1.3,
                0.9,
                TemperatureSpec::MeanOccupation(nbar),
            )
            .unwrap();
            let gen = Generator::new(spec.clone()).unwrap();
            let sector = SectorRhs::build(&gen);
            let d = gen.dim();

            // a state with support on the whole sector: diagonal plus a dash
            // of every equal-m coherence
            let mut rho = diagonal_state(d);
            let tm = {
                let joint = crate::spinops::JointOps::new(n_c, n_b).unwrap();
                joint.two_m()
            };
            for i in 0..d {
                for j in 0..d {
                    if i != j && tm[i] == tm[j] {
                        rho[(i, j)] += C64::new(0.01, if i < j { 0.005 } else { -0.005 });
                    }
                }
            }
            assert!(sector.supports_exactly(&rho));

            let full = gen.apply(&rho).unwrap();
            let mut reduced = vec![C64::new(0.0, 0.0); sector.len()];
            sector.rhs(&sector.gather(&rho), &mut reduced);
            let reduced_full = sector.scatter(&reduced);
            assert!(
                max_abs_diff(&full, &reduced_full) < 1e-13,
                "N_C={n_c} N_B={n_b} nbar={nbar}"
            );
        }
    }

    #[test]
    fn detects_off_sector_support() {
        let spec = SystemSpec::zero_temperature(1, 1).unwrap();
        let gen = Generator::new(spec).unwrap();
        let sector = SectorRhs::build(&gen);
        let mut rho = diagonal_state(4);
        assert!(sector.supports_exactly(&rho));
        rho[(0, 1)] = C64::new(1e-18, 0.0); // different total m
        assert!(!sector.supports_exactly(&rho));
    }

    #[test]
    fn gather_scatter_round_trip() {
        let spec = SystemSpec::new(1, 3, 1.0, 1.0, TemperatureSpec::MeanOccupation(0.4)).unwrap();
        let gen = Generator::new(spec).unwrap();
        let sector = SectorRhs::build(&gen);
        let rho = diagonal_state(gen.dim());
        let back = sector.scatter(&sector.gather(&rho));
        assert!(max_abs_diff(&rho, &back) < 1e-16);
    }
}
