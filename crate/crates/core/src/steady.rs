//! Time evolution to the driven steady state, and the lab-frame cross-check.

use num_complex::Complex64;
use std::collections::VecDeque;

use crate::analytic::linearized_guess;
use crate::dynamics::{relative_rate, scaled_norm, Dynamics, Frame};
use crate::error::{DynamicsError, SettingsError};
use crate::integrator::Dopri5;
use crate::params::SystemParams;
use crate::state::{HybridState, POSITIVITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub rel_tol: f64,
    /// Applied per component in units of that component's characteristic
    /// magnitude; see [`component_scales`].
    pub abs_tol: f64,
    /// Threshold on the window-averaged relative drift of every component.
    pub steady_residual_tol: f64,
    /// Integration horizon in units of 1/ω.
    pub max_time: f64,
    /// Averaging window of the steady-state test.
    pub residual_window: f64,
}

impl IntegrationSettings {
    /// rel 1e-9, abs 1e-12, residual 1e-10 held for 10/γ₃, horizon
    /// 50/min(γ_eg, γ_ee).
    pub fn for_params(params: &SystemParams) -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            steady_residual_tol: 1e-10,
            max_time: 50.0 / params.slowest_emitter_rate(),
            residual_window: 10.0 / params.gamma3(),
        }
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        for (field, value) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("steady_residual_tol", self.steady_residual_tol),
            ("max_time", self.max_time),
            ("residual_window", self.residual_window),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SettingsError::NotPositive { field, value });
            }
        }
        if self.max_time < self.residual_window {
            return Err(SettingsError::WindowExceedsHorizon {
                max_time: self.max_time,
                window: self.residual_window,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub state: HybridState,
    pub converged: bool,
    /// ‖ẋ‖∞ / max(1, ‖x‖∞) at `state`.
    pub final_residual: f64,
    /// Largest relative rate of change of any component, averaged over the
    /// last residual window (instantaneous for the algebraic solver).
    pub relative_drift: f64,
    pub elapsed_sim_time: f64,
    /// |α̃₃|² of `state`.
    pub fwm_intensity: f64,
    /// Largest positivity excess seen at any accepted step (≤ 0 when every
    /// step was strictly physical).
    pub worst_positivity_excess: f64,
    pub steps: usize,
}

impl SteadyStateResult {
    pub(crate) fn new(
        final_residual: f64,
        relative_drift: f64,
        state: HybridState,
        converged: bool,
        elapsed_sim_time: f64,
        worst_positivity_excess: f64,
        steps: usize,
    ) -> Self {
        let fwm_intensity = state.fwm_intensity();
        Self {
            state,
            converged,
            final_residual,
            relative_drift,
            elapsed_sim_time,
            fwm_intensity,
            worst_positivity_excess,
            steps,
        }
    }

    pub fn inversions(&self) -> Vec<f64> {
        self.state.emitters.iter().map(|e| e.inversion()).collect()
    }
}

fn check_emitters(params: &SystemParams, state: &HybridState) -> Result<(), DynamicsError> {
    if state.emitters.len() != params.emitter_count() {
        return Err(DynamicsError::EmitterCount {
            expected: params.emitter_count(),
            found: state.emitters.len(),
        });
    }
    Ok(())
}

/// Characteristic magnitude of each flat state component, taken from the
/// pump-linearized steady state with every emitter in its ground state and
/// capped at 1. The absolute tolerance is applied relative to these, so
/// α̃₃ and the emitter variables (often 10⁻¹⁰ or smaller) are resolved to
/// the same relative accuracy as the pumps.
pub fn component_scales(params: &SystemParams) -> Vec<f64> {
    let guess = linearized_guess(params);
    let a3 = guess.alpha[2];
    let emitters: Vec<(Complex64, f64, f64, f64)> = match params {
        SystemParams::Single(p) => vec![(p.f, p.emitter_detuning(), p.gamma_eg, p.gamma_ee)],
        SystemParams::Coupled(p) => {
            let mix = p.mixing_frequency();
            vec![
                (p.f1, p.omega_eg_1 - mix, p.gamma_eg_1, p.gamma_ee_1),
                (p.f2, p.omega_eg_2 - mix, p.gamma_eg_2, p.gamma_ee_2),
            ]
        }
    };
    let clamp = |v: f64| {
        if v > 0.0 && v.is_finite() {
            v.min(1.0)
        } else {
            1.0
        }
    };
    let mut out = Vec::with_capacity(HybridState::flat_len(emitters.len()));
    for a in guess.alpha {
        out.extend([clamp(a.norm()); 2]);
    }
    for (f, detuning, gamma_eg, gamma_ee) in emitters {
        let beta = Complex64::new(gamma_eg, detuning).norm();
        let rho = f.norm() * a3.norm() / beta;
        let k = rho * rho * gamma_eg;
        let rho_ee = 2.0 * k / (gamma_ee + 4.0 * k);
        out.extend([clamp(rho), clamp(rho), clamp(rho_ee)]);
    }
    out
}

/// Evolves the rotating-frame equations from `init` until the state is
/// stationary, or until `max_time` (reported as `converged = false`).
///
/// Stationary means that across the last `residual_window` every complex
/// amplitude, coherence and population has moved by less than
/// `steady_residual_tol` of its own magnitude per unit time. This implies
/// the window-averaged ‖ẋ‖∞/max(1, ‖x‖∞) is below the same threshold, and
/// it also resolves α̃₃ and the emitter variables, which sit many orders of
/// magnitude below the pumps. The average is taken over the window because
/// the instantaneous derivative of a converged explicit integration jitters
/// at the level of `rel_tol`.
///
/// Every accepted step is checked against the density-matrix constraints;
/// a violation beyond [`POSITIVITY_TOL`] aborts with `InvariantViolation`.
pub fn integrate_to_steady_state(
    params: &SystemParams,
    init: &HybridState,
    settings: &IntegrationSettings,
) -> Result<SteadyStateResult, DynamicsError> {
    params.validate()?;
    settings.validate()?;
    check_emitters(params, init)?;

    let dynamics = Dynamics::new(params, Frame::Rotating);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| dynamics.eval(t, y, dy);
    let atol: Vec<f64> = component_scales(params)
        .iter()
        .map(|s| s * settings.abs_tol)
        .collect();
    let mut stepper = Dopri5::new(
        &rhs,
        0.0,
        &init.to_flat(),
        settings.rel_tol,
        settings.abs_tol,
    )
    .with_component_atol(&rhs, &atol);

    let window = settings.residual_window;
    let mut history: VecDeque<(f64, Vec<f64>)> = VecDeque::new();
    history.push_back((0.0, stepper.y().to_vec()));
    let mut diff = vec![0.0; stepper.y().len()];

    let mut worst_excess = f64::NEG_INFINITY;
    let mut drift = f64::INFINITY;
    let mut converged = false;

    while stepper.t() < settings.max_time {
        stepper.step(&rhs, settings.max_time)?;
        let t = stepper.t();
        let y = stepper.y();
        let state = HybridState::from_flat(y);
        if let Some((emitter, excess)) = state.worst_positivity() {
            worst_excess = worst_excess.max(excess);
            if excess > POSITIVITY_TOL {
                return Err(DynamicsError::InvariantViolation { t, emitter, excess });
            }
        }

        // keep the newest sample at least one window old at the front
        while history.len() > 1 && history[1].0 <= t - window {
            history.pop_front();
        }
        let (t_old, y_old) = &history[0];
        if t - t_old >= window {
            let span = t - t_old;
            for ((d, new), old) in diff.iter_mut().zip(y).zip(y_old) {
                *d = (new - old) / span;
            }
            drift = relative_rate(y, &diff);
        }
        history.push_back((t, y.to_vec()));

        if drift <= settings.steady_residual_tol {
            converged = true;
            break;
        }
    }

    Ok(SteadyStateResult::new(
        scaled_norm(stepper.y(), stepper.dydt()),
        drift,
        HybridState::from_flat(stepper.y()),
        converged,
        stepper.t(),
        worst_excess,
        stepper.accepted,
    ))
}

/// Steady state reached from the empty-mode, ground-state initial condition.
pub fn steady_state_from_rest(
    params: &SystemParams,
    settings: &IntegrationSettings,
) -> Result<SteadyStateResult, DynamicsError> {
    integrate_to_steady_state(params, &HybridState::zero(params.emitter_count()), settings)
}

/// Integrates the lab-frame equations (explicit drive phases) and the
/// rotating-frame equations side by side from the same initial envelopes,
/// converts the lab amplitudes back to envelopes, and returns the largest
/// modulus deviation over `n_samples` equally spaced times in (0, horizon].
pub fn lab_frame_check(
    params: &SystemParams,
    init: &HybridState,
    settings: &IntegrationSettings,
    horizon: f64,
    n_samples: usize,
) -> Result<f64, DynamicsError> {
    params.validate()?;
    settings.validate()?;
    check_emitters(params, init)?;

    let rot = Dynamics::new(params, Frame::Rotating);
    let lab = Dynamics::new(params, Frame::Lab);
    let rot_rhs = |t: f64, y: &[f64], dy: &mut [f64]| rot.eval(t, y, dy);
    let lab_rhs = |t: f64, y: &[f64], dy: &mut [f64]| lab.eval(t, y, dy);

    // At t = 0 the lab amplitudes equal the envelopes.
    let y0 = init.to_flat();
    let mut rot_stepper = Dopri5::new(&rot_rhs, 0.0, &y0, settings.rel_tol, settings.abs_tol);
    let mut lab_stepper = Dopri5::new(&lab_rhs, 0.0, &y0, settings.rel_tol, settings.abs_tol);

    let mut envelope = vec![0.0; y0.len()];
    let mut worst: f64 = 0.0;
    let n_samples = n_samples.max(1);
    for i in 1..=n_samples {
        let t = horizon * i as f64 / n_samples as f64;
        rot_stepper.advance_to(&rot_rhs, t)?;
        lab_stepper.advance_to(&lab_rhs, t)?;
        lab.lab_to_envelope(t, lab_stepper.y(), &mut envelope);
        let a = HybridState::from_flat(rot_stepper.y());
        let b = HybridState::from_flat(&envelope);
        for (x, y) in a.alpha.iter().zip(&b.alpha) {
            worst = worst.max((x - y).norm());
        }
        for (x, y) in a.emitters.iter().zip(&b.emitters) {
            worst = worst.max((x.rho_ge - y.rho_ge).norm());
            worst = worst.max((x.rho_ee - y.rho_ee).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    #[test]
    fn settings_validation() {
        let p = Preset::Fig1.params();
        let s = IntegrationSettings::for_params(&p);
        s.validate().unwrap();
        assert_eq!(s.residual_window, 1000.0);
        assert_eq!(s.max_time, 50.0 / 1e-5);
        let bad = IntegrationSettings { rel_tol: 0.0, ..s };
        assert!(matches!(
            bad.validate(),
            Err(SettingsError::NotPositive {
                field: "rel_tol",
                ..
            })
        ));
        let bad = IntegrationSettings {
            max_time: 10.0,
            ..s
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn linear_mode_converges_to_closed_form() {
        let mut p = *Preset::Fig1.params().as_single().unwrap();
        p.chi = 0.0;
        p.f = Complex64::new(0.0, 0.0);
        p.omega1 = 1.003;
        p.eps_p = Complex64::new(1e-3, 4e-4);
        let params = SystemParams::Single(p);
        let r = steady_state_from_rest(&params, &IntegrationSettings::for_params(&params)).unwrap();
        assert!(r.converged);
        let expected = p.eps_p / Complex64::new(p.gamma1, p.omega1 - p.omega_drive);
        assert!((r.state.alpha[0] - expected).norm() / expected.norm() < 1e-9);
        assert_eq!(r.state.alpha[2], Complex64::new(0.0, 0.0));
        assert_eq!(r.fwm_intensity, r.state.alpha[2].norm_sqr());
    }

    #[test]
    fn short_horizon_reports_non_convergence() {
        let params = Preset::Fig1.params();
        let settings = IntegrationSettings {
            max_time: 2000.0,
            ..IntegrationSettings::for_params(&params)
        };
        let r = steady_state_from_rest(&params, &settings).unwrap();
        assert!(!r.converged);
        assert_eq!(r.elapsed_sim_time, 2000.0);
        assert!(r.state.is_physical());
    }

    #[test]
    fn wrong_emitter_count_rejected() {
        let params = Preset::Fig4.params();
        let settings = IntegrationSettings::for_params(&params);
        let err = integrate_to_steady_state(&params, &HybridState::zero(1), &settings);
        assert!(matches!(
            err,
            Err(DynamicsError::EmitterCount {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn linear_system_frames_agree() {
        let mut p = *Preset::Fig1.params().as_single().unwrap();
        p.chi = 0.0;
        p.f = Complex64::new(0.0, 0.0);
        let params = SystemParams::Single(p);
        let dev = lab_frame_check(
            &params,
            &HybridState::zero(1),
            &IntegrationSettings::for_params(&params),
            500.0,
            50,
        )
        .unwrap();
        assert!(dev < 1e-8, "{dev}");
    }
}
