//! Dormand–Prince 5(4) explicit Runge–Kutta with adaptive step control.
//!
//! Step-size selection follows Hairer, Nørsett & Wanner (DOPRI5), including
//! the Lund stabilization that keeps the step from oscillating when the
//! solution sits on a steady state and the step is limited by stability.

use crate::error::IntegratorError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Integrator state. Each call to [`Dopri5::step`] performs one accepted step.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    rtol: f64,
    atol: Vec<f64>,
    max_step: f64,
    t: f64,
    h: f64,
    y: Vec<f64>,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    fac_old: f64,
    last_rejected: bool,
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new<F>(rhs: &F, t0: f64, y0: &[f64], rtol: f64, atol: f64) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = y0.len();
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
        rhs(t0, y0, &mut k[0]);
        let mut s = Self {
            rtol,
            atol: vec![atol; n],
            max_step: f64::INFINITY,
            t: t0,
            h: 0.0,
            y: y0.to_vec(),
            k,
            y_stage: vec![0.0; n],
            y_new: vec![0.0; n],
            fac_old: 1e-4,
            last_rejected: false,
            accepted: 0,
            rejected: 0,
        };
        s.h = s.initial_step(rhs);
        s
    }

    /// Replaces the scalar absolute tolerance with one per component.
    pub fn with_component_atol<F>(mut self, rhs: &F, atol: &[f64]) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        assert_eq!(atol.len(), self.y.len(), "one tolerance per component");
        self.atol = atol.to_vec();
        self.h = self.initial_step(rhs).min(self.max_step);
        self
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self.h = self.h.min(max_step);
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// dy/dt at the current point (first-same-as-last stage).
    pub fn dydt(&self) -> &[f64] {
        &self.k[0]
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    fn scale(&self, i: usize, y0: f64, y1: f64) -> f64 {
        self.atol[i] + self.rtol * y0.abs().max(y1.abs())
    }

    fn initial_step<F>(&mut self, rhs: &F) -> f64
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = self.y.len() as f64;
        let rms = |v: &[f64], y: &[f64], s: &Self| {
            (v.iter()
                .zip(y)
                .enumerate()
                .map(|(i, (a, b))| (a / s.scale(i, *b, *b)).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = rms(&self.y, &self.y, self);
        let d1 = rms(&self.k[0], &self.y, self);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        for i in 0..self.y.len() {
            self.y_stage[i] = self.y[i] + h0 * self.k[0][i];
        }
        let (k0, rest) = self.k.split_at_mut(1);
        rhs(self.t + h0, &self.y_stage, &mut rest[0]);
        let d2 = rest[0]
            .iter()
            .zip(&k0[0])
            .zip(&self.y)
            .enumerate()
            .map(|(i, ((a, b), y))| ((a - b) / (self.atol[i] + self.rtol * y.abs())).powi(2))
            .sum::<f64>();
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step)
    }

    /// Advances by one accepted step, never past `t_limit`.
    pub fn step<F>(&mut self, rhs: &F, t_limit: f64) -> Result<(), IntegratorError>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = self.y.len();
        loop {
            let remaining = t_limit - self.t;
            let mut h = self.h.min(self.max_step);
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if h <= 16.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(IntegratorError::StepSizeUnderflow { t: self.t, h });
            }

            let t = self.t;
            let y = &self.y;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let ys = &mut self.y_stage;

            for i in 0..n {
                ys[i] = y[i] + h * A21 * k1[i];
            }
            rhs(t + C2 * h, ys, k2);
            for i in 0..n {
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * h, ys, k3);
            for i in 0..n {
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * h, ys, k4);
            for i in 0..n {
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * h, ys, k5);
            for i in 0..n {
                ys[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + h, ys, k6);
            let yn = &mut self.y_new;
            for i in 0..n {
                yn[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            rhs(t + h, yn, k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol[i] + self.rtol * y[i].abs().max(yn[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                if yn.iter().any(|v| !v.is_finite()) && h < 1e-300 {
                    return Err(IntegratorError::NonFinite { t });
                }
                self.h = h * FAC_MIN;
                self.rejected += 1;
                self.last_rejected = true;
                continue;
            }

            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac =
                    (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                self.fac_old = err.max(1e-4);
                self.last_rejected = false;
                self.accepted += 1;
                self.t = if clipped { t_limit } else { t + h };
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.k.swap(0, 6);
                if self.y.iter().any(|v| !v.is_finite()) {
                    return Err(IntegratorError::NonFinite { t: self.t });
                }
                // A step clipped to land on t_limit says little about the
                // natural step size; keep the previous proposal.
                if !clipped || h_new < self.h {
                    self.h = h_new;
                }
                return Ok(());
            }
            self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            self.rejected += 1;
            self.last_rejected = true;
        }
    }

    /// Integrates up to exactly `t_end`.
    pub fn advance_to<F>(&mut self, rhs: &F, t_end: f64) -> Result<(), IntegratorError>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        while self.t < t_end {
            self.step(rhs, t_end)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut s = Dopri5::new(&f, 0.0, &[1.0, 0.0], 1e-10, 1e-12);
        s.advance_to(&f, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(s.t(), 2.0 * std::f64::consts::PI);
        assert!((s.y()[0] - 1.0).abs() < 1e-8);
        assert!(s.y()[1].abs() < 1e-8);
    }

    #[test]
    fn exponential_decay_with_time_dependent_forcing() {
        // y' = -y + cos t, y(0) = 0  =>  y = (cos t + sin t - e^{-t}) / 2
        let f = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0] + t.cos();
        let mut s = Dopri5::new(&f, 0.0, &[0.0], 1e-10, 1e-13);
        s.advance_to(&f, 20.0).unwrap();
        let exact = (20f64.cos() + 20f64.sin() - (-20f64).exp()) / 2.0;
        assert!((s.y()[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn fifth_order_convergence() {
        // halving the tolerance by 2^5 should shrink the error roughly 2^5-fold
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * (1.0 - y[0]);
        let exact = |t: f64| 1.0 / (1.0 + 9.0 * (-t).exp());
        let run = |tol: f64| {
            let mut s = Dopri5::new(&f, 0.0, &[0.1], tol, tol * 1e-3);
            s.advance_to(&f, 10.0).unwrap();
            (s.y()[0] - exact(10.0)).abs()
        };
        let coarse = run(1e-6);
        let fine = run(1e-9);
        assert!(fine < coarse);
        assert!(fine < 1e-8);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -0.3 * (y[0] - 2.0);
        };
        let mut s = Dopri5::new(&f, 0.0, &[2.0], 1e-9, 1e-12);
        s.advance_to(&f, 1e4).unwrap();
        assert_eq!(s.y()[0], 2.0);
    }
}
