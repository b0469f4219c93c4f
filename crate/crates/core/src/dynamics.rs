//! Equations of motion for the mode envelopes and emitter density matrices.
//!
//! The rotating frame factors out e^{−iωt} from α₁, e^{−iω′t} from α₂ and
//! e^{−i(2ω−ω′)t} from α₃ and every ρ_ge, which makes the driven system
//! autonomous. The lab frame keeps the explicit drive phases and is used
//! only to cross-check the rotating-frame reduction.
//!
//! Coupling convention: f* multiplies α₃ in the coherence equation and f
//! multiplies α₃* in the population equation, for one or two emitters alike.

use num_complex::Complex64;

use crate::params::{CoupledEmitterParams, SingleEmitterParams, SystemParams};
use crate::state::HybridState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Rotating,
    Lab,
}

#[derive(Debug, Clone, Copy)]
struct EmitterModel {
    omega_eg: f64,
    f: Complex64,
    gamma_ee: f64,
    gamma_eg: f64,
    /// Coefficient of i·y·ρ_ge(other) in this emitter's coherence equation:
    /// g* for emitter 1, g for emitter 2.
    exchange: Complex64,
}

/// Flattened right-hand side shared by the single- and two-emitter systems.
#[derive(Debug, Clone)]
pub struct Dynamics {
    omega: [f64; 3],
    gamma: [f64; 3],
    chi: f64,
    eps_p: Complex64,
    eps_p_prime: Complex64,
    omega_drive: f64,
    omega_drive_prime: f64,
    emitters: [EmitterModel; 2],
    n_emitters: usize,
    frame: Frame,
}

#[inline]
fn times_i(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

impl Dynamics {
    pub fn new(params: &SystemParams, frame: Frame) -> Self {
        match params {
            SystemParams::Single(p) => Self::single(p, frame),
            SystemParams::Coupled(p) => Self::coupled(p, frame),
        }
    }

    fn single(p: &SingleEmitterParams, frame: Frame) -> Self {
        let e = EmitterModel {
            omega_eg: p.omega_eg,
            f: p.f,
            gamma_ee: p.gamma_ee,
            gamma_eg: p.gamma_eg,
            exchange: Complex64::new(0.0, 0.0),
        };
        Self {
            omega: [p.omega1, p.omega2, p.omega3],
            gamma: [p.gamma1, p.gamma2, p.gamma3],
            chi: p.chi,
            eps_p: p.eps_p,
            eps_p_prime: p.eps_p_prime,
            omega_drive: p.omega_drive,
            omega_drive_prime: p.omega_drive_prime,
            emitters: [e, e],
            n_emitters: 1,
            frame,
        }
    }

    fn coupled(p: &CoupledEmitterParams, frame: Frame) -> Self {
        Self {
            omega: [p.omega1, p.omega2, p.omega3],
            gamma: [p.gamma1, p.gamma2, p.gamma3],
            chi: p.chi,
            eps_p: p.eps_p,
            eps_p_prime: p.eps_p_prime,
            omega_drive: p.omega_drive,
            omega_drive_prime: p.omega_drive_prime,
            emitters: [
                EmitterModel {
                    omega_eg: p.omega_eg_1,
                    f: p.f1,
                    gamma_ee: p.gamma_ee_1,
                    gamma_eg: p.gamma_eg_1,
                    exchange: p.g.conj(),
                },
                EmitterModel {
                    omega_eg: p.omega_eg_2,
                    f: p.f2,
                    gamma_ee: p.gamma_ee_2,
                    gamma_eg: p.gamma_eg_2,
                    exchange: p.g,
                },
            ],
            n_emitters: 2,
            frame,
        }
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn dim(&self) -> usize {
        HybridState::flat_len(self.n_emitters)
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Frequencies removed from (α₁, α₂, α₃ and ρ_ge) by the frame.
    fn frame_frequencies(&self) -> [f64; 3] {
        match self.frame {
            Frame::Rotating => [
                self.omega_drive,
                self.omega_drive_prime,
                2.0 * self.omega_drive - self.omega_drive_prime,
            ],
            Frame::Lab => [0.0; 3],
        }
    }

    /// Writes dy/dt into `dy`. `t` only matters in the lab frame.
    pub fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let a1 = Complex64::new(y[0], y[1]);
        let a2 = Complex64::new(y[2], y[3]);
        let a3 = Complex64::new(y[4], y[5]);
        let shift = self.frame_frequencies();
        let (drive1, drive2) = match self.frame {
            Frame::Rotating => (self.eps_p, self.eps_p_prime),
            Frame::Lab => (
                self.eps_p * Complex64::cis(-self.omega_drive * t),
                self.eps_p_prime * Complex64::cis(-self.omega_drive_prime * t),
            ),
        };
        let loss = |k: usize| Complex64::new(self.gamma[k], self.omega[k] - shift[k]);

        let da1 = -loss(0) * a1 - times_i(2.0 * self.chi * a1.conj() * a2 * a3) + drive1;
        let da2 = -loss(1) * a2 - times_i(self.chi * a3.conj() * a1 * a1) + drive2;
        let mut da3 = -loss(2) * a3 - times_i(self.chi * a2.conj() * a1 * a1);

        let n = self.n_emitters;
        let mut rho = [Complex64::new(0.0, 0.0); 2];
        let mut pop = [0.0; 2];
        for k in 0..n {
            let base = 6 + 3 * k;
            rho[k] = Complex64::new(y[base], y[base + 1]);
            pop[k] = y[base + 2];
        }
        for k in 0..n {
            let e = &self.emitters[k];
            let inversion = 2.0 * pop[k] - 1.0;
            da3 -= times_i(e.f * rho[k]);

            let detuned = Complex64::new(e.gamma_eg, e.omega_eg - shift[2]);
            let mut drho = -detuned * rho[k] + times_i(e.f.conj() * a3 * inversion);
            // i(f α₃* ρ_ge − f* α₃ ρ_eg) = −2 Im(f α₃* ρ_ge)
            let mut dpop = -e.gamma_ee * pop[k] - 2.0 * (e.f * a3.conj() * rho[k]).im;
            if n == 2 {
                let other = rho[1 - k];
                drho += times_i(e.exchange * other * inversion);
                dpop -= 2.0 * (e.exchange.conj() * other.conj() * rho[k]).im;
            }
            let base = 6 + 3 * k;
            dy[base] = drho.re;
            dy[base + 1] = drho.im;
            dy[base + 2] = dpop;
        }

        dy[0] = da1.re;
        dy[1] = da1.im;
        dy[2] = da2.re;
        dy[3] = da2.im;
        dy[4] = da3.re;
        dy[5] = da3.im;
    }

    pub fn derivative(&self, t: f64, state: &HybridState) -> HybridState {
        let y = state.to_flat();
        let mut dy = vec![0.0; y.len()];
        self.eval(t, &y, &mut dy);
        HybridState::from_flat(&dy)
    }

    /// Multiplies lab-frame amplitudes by the frame phases, giving envelopes.
    pub fn lab_to_envelope(&self, t: f64, lab: &[f64], out: &mut [f64]) {
        let phases = [
            Complex64::cis(self.omega_drive * t),
            Complex64::cis(self.omega_drive_prime * t),
            Complex64::cis((2.0 * self.omega_drive - self.omega_drive_prime) * t),
        ];
        for (k, ph) in phases.iter().enumerate() {
            let z = Complex64::new(lab[2 * k], lab[2 * k + 1]) * ph;
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        for k in 0..self.n_emitters {
            let base = 6 + 3 * k;
            let z = Complex64::new(lab[base], lab[base + 1]) * phases[2];
            out[base] = z.re;
            out[base + 1] = z.im;
            out[base + 2] = lab[base + 2];
        }
    }
}

/// Rotating-frame time derivative of a single-emitter state.
pub fn rhs_single(state: &HybridState, params: &SingleEmitterParams) -> HybridState {
    Dynamics::single(params, Frame::Rotating).derivative(0.0, state)
}

/// Rotating-frame time derivative of a two-emitter state.
pub fn rhs_coupled(state: &HybridState, params: &CoupledEmitterParams) -> HybridState {
    Dynamics::coupled(params, Frame::Rotating).derivative(0.0, state)
}

pub fn rhs(state: &HybridState, params: &SystemParams) -> HybridState {
    Dynamics::new(params, Frame::Rotating).derivative(0.0, state)
}

/// Largest relative rate of change, max_k |ẋ_k| / |x_k|, over the complex
/// components α₁, α₂, α₃, ρ_ge and the real populations.
///
/// A component that is exactly zero with an exactly zero rate contributes 0.
pub fn relative_rate(y: &[f64], dy: &[f64]) -> f64 {
    let ratio = |num: f64, den: f64| {
        if num == 0.0 {
            0.0
        } else {
            num / den.max(f64::MIN_POSITIVE)
        }
    };
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        worst = worst.max(ratio(
            dy[2 * k].hypot(dy[2 * k + 1]),
            y[2 * k].hypot(y[2 * k + 1]),
        ));
    }
    for (yc, dc) in y[6..].chunks_exact(3).zip(dy[6..].chunks_exact(3)) {
        worst = worst.max(ratio(dc[0].hypot(dc[1]), yc[0].hypot(yc[1])));
        worst = worst.max(ratio(dc[2].abs(), yc[2].abs()));
    }
    worst
}

/// Steady-state residual ‖ẋ‖∞ / max(1, ‖x‖∞) of the rotating-frame
/// equations at `state`.
pub fn steady_residual(state: &HybridState, params: &SystemParams) -> f64 {
    let (y, dy) = flat_derivative(state, params);
    scaled_norm(&y, &dy)
}

/// Largest relative rate of change of any component at `state`; see
/// [`relative_rate`].
pub fn relative_steady_residual(state: &HybridState, params: &SystemParams) -> f64 {
    let (y, dy) = flat_derivative(state, params);
    relative_rate(&y, &dy)
}

/// ‖dy‖∞ / max(1, ‖y‖∞)
pub fn scaled_norm(y: &[f64], dy: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    inf(dy) / inf(y).max(1.0)
}

fn flat_derivative(state: &HybridState, params: &SystemParams) -> (Vec<f64>, Vec<f64>) {
    let dynamics = Dynamics::new(params, Frame::Rotating);
    let y = state.to_flat();
    let mut dy = vec![0.0; y.len()];
    dynamics.eval(0.0, &y, &mut dy);
    (y, dy)
}
