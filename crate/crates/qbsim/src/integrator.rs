// Copyright 2026 qbsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) stepper for complex linear systems.
//!
//! The state is a flat `Vec<Complex64>` (for this crate: a column-major
//! density matrix or its coherence-sector restriction). Error control is
//! per-component: a step is accepted when
//! max_i |err_i| / (atol + rtol·max(|y_i|, |y'_i|)) ≤ 1.
//!
//! The scheme is FSAL, so after every accepted step `rhs_norm` holds the
//! Frobenius norm of the generator action at the *current* state — the
//! steady-state residual — at no extra cost.
//!
//! Ref: Dormand & Prince (1980), J. Comput. Appl. Math. 6, 19;
//!      Hairer, Nørsett & Wanner, "Solving ODEs I" (1993), §II.4.

use crate::linalg::C64;

const STAGES: usize = 7;

/// Lower-triangular stage coefficients (row i gives a[i][0..i]).
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Error weights: 5th-order minus embedded 4th-order solution.
const E: [f64; STAGES] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub atol: f64,
    pub rtol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 0.0,
            dt_min: 1e-13,
            dt_max: 1.0,
        }
    }
}

#[derive(Debug)]
pub(crate) struct StepUnderflow {
    pub t: f64,
    pub dt: f64,
}

pub(crate) struct Dopri5<F>
where
    F: FnMut(&[C64], &mut [C64]),
{
    rhs: F,
    pub t: f64,
    pub y: Vec<C64>,
    control: StepControl,
    k: Vec<Vec<C64>>,
    y_stage: Vec<C64>,
    y_next: Vec<C64>,
    dt: f64,
    k1_fresh: bool,
    /// ‖f(y)‖₂ at the current (t, y); valid after the first step attempt.
    pub rhs_norm: f64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
}

impl<F> Dopri5<F>
where
    F: FnMut(&[C64], &mut [C64]),
{
    pub fn new(rhs: F, t0: f64, y0: Vec<C64>, control: StepControl) -> Self {
        let n = y0.len();
        Self {
            rhs,
            t: t0,
            y: y0,
            control,
            k: (0..STAGES).map(|_| vec![C64::new(0.0, 0.0); n]).collect(),
            y_stage: vec![C64::new(0.0, 0.0); n],
            y_next: vec![C64::new(0.0, 0.0); n],
            dt: 1e-6,
            k1_fresh: false,
            rhs_norm: f64::NAN,
            accepted_steps: 0,
            rejected_steps: 0,
        }
    }

    fn refresh_k1(&mut self) {
        if !self.k1_fresh {
            (self.rhs)(&self.y, &mut self.k[0]);
            self.rhs_norm = norm2(&self.k[0]);
            self.k1_fresh = true;
        }
    }

    /// Current residual ‖f(y)‖₂, evaluating it if not already cached.
    pub fn residual(&mut self) -> f64 {
        self.refresh_k1();
        self.rhs_norm
    }

    /// Take one accepted adaptive step, never crossing `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<(), StepUnderflow> {
        debug_assert!(t_limit > self.t);
        self.refresh_k1();
        let n = self.y.len();

        loop {
            let remaining = t_limit - self.t;
            let dt = self.dt.min(remaining);
            let hits_limit = dt >= remaining;

            // stages 2..6
            for s in 1..STAGES - 1 {
                for i in 0..n {
                    let mut acc = self.y[i];
                    for (j, a) in A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (a * dt);
                        }
                    }
                    self.y_stage[i] = acc;
                }
                (self.rhs)(&self.y_stage, &mut self.k[s]);
            }
            // stage 7 evaluates at the 5th-order solution itself (FSAL)
            for i in 0..n {
                let mut acc = self.y[i];
                for (j, a) in A[STAGES - 1][..STAGES - 1].iter().enumerate() {
                    if *a != 0.0 {
                        acc += self.k[j][i] * (a * dt);
                    }
                }
                self.y_next[i] = acc;
            }
            (self.rhs)(&self.y_next, &mut self.k[STAGES - 1]);

            // per-component error ratio
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let mut err = C64::new(0.0, 0.0);
                for (j, e) in E.iter().enumerate() {
                    if *e != 0.0 {
                        err += self.k[j][i] * (*e * dt);
                    }
                }
                let scale = self.control.atol
                    + self.control.rtol * self.y[i].norm().max(self.y_next[i].norm());
                worst = worst.max(err.norm() / scale);
            }

            if worst <= 1.0 {
                self.t = if hits_limit { t_limit } else { self.t + dt };
                std::mem::swap(&mut self.y, &mut self.y_next);
                self.k.swap(0, STAGES - 1);
                self.rhs_norm = norm2(&self.k[0]);
                self.accepted_steps += 1;

                let factor = if worst == 0.0 {
                    5.0
                } else {
                    (0.9 * worst.powf(-0.2)).clamp(0.2, 5.0)
                };
                let grown = (dt * factor).min(self.control.dt_max);
                // a step clipped to the sample boundary must not shrink the
                // working step size
                self.dt = if hits_limit { self.dt.max(grown) } else { grown };
                return Ok(());
            }

            self.rejected_steps += 1;
            let factor = (0.9 * worst.powf(-0.2)).clamp(0.1, 0.9);
            self.dt = dt * factor;
            if self.dt < self.control.dt_min {
                return Err(StepUnderflow { t: self.t, dt: self.dt });
            }
        }
    }

    /// Integrate up to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), StepUnderflow> {
        while self.t < t_target {
            self.step(t_target)?;
        }
        Ok(())
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_complex_exponential() {
        // y' = λy with λ = −1 + 2i; exact y(t) = e^{λt}
        let lambda = C64::new(-1.0, 2.0);
        let rhs = move |y: &[C64], out: &mut [C64]| {
            out[0] = lambda * y[0];
        };
        let mut stepper = Dopri5::new(
            rhs,
            0.0,
            vec![C64::new(1.0, 0.0)],
            StepControl {
                atol: 1e-12,
                ..Default::default()
            },
        );
        stepper.advance_to(3.0).unwrap();
        let exact = (lambda * 3.0).exp();
        assert!(
            (stepper.y[0] - exact).norm() < 1e-9,
            "got {:?}, want {:?}",
            stepper.y[0],
            exact
        );
        assert_eq!(stepper.t, 3.0);
    }

    #[test]
    fn lands_exactly_on_sample_times() {
        let rhs = |y: &[C64], out: &mut [C64]| {
            out[0] = -y[0];
        };
        let mut stepper = Dopri5::new(rhs, 0.0, vec![C64::new(1.0, 0.0)], StepControl::default());
        for k in 1..=7 {
            let target = 0.3 * k as f64;
            stepper.advance_to(target).unwrap();
            assert_eq!(stepper.t, target);
        }
        assert_abs_diff_eq!(stepper.y[0].re, (-2.1f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn residual_tracks_rhs_norm() {
        // stationary input: residual must be zero immediately
        let rhs = |_y: &[C64], out: &mut [C64]| {
            out[0] = C64::new(0.0, 0.0);
        };
        let mut stepper = Dopri5::new(rhs, 0.0, vec![C64::new(0.7, 0.0)], StepControl::default());
        assert_eq!(stepper.residual(), 0.0);
    }

    #[test]
    fn stiff_decay_is_stable() {
        // strongly damped mode: adaptive control must keep the solution bounded
        let rhs = |y: &[C64], out: &mut [C64]| {
            out[0] = y[0] * -800.0;
            out[1] = y[1] * -1.0;
        };
        let mut stepper = Dopri5::new(
            rhs,
            0.0,
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            StepControl::default(),
        );
        stepper.advance_to(5.0).unwrap();
        // the damped component floors at the absolute-tolerance noise level
        assert!(stepper.y[0].norm() < 1e-9);
        assert_abs_diff_eq!(stepper.y[1].re, (-5.0f64).exp(), epsilon = 1e-8);
    }
}
