//! Algebraic steady states of the rotating-frame equations.
//!
//! Eliminating the emitter coherences from the steady-state equations gives
//! α̃₃ in closed form as a function of the pump envelopes and the population
//! inversions. The inversions are inputs here; [`fixed_point_solve`] closes
//! the full system self-consistently.

use num_complex::Complex64;

use crate::dynamics::{relative_steady_residual, steady_residual};
use crate::error::AnalyticError;
use crate::params::{CoupledEmitterParams, SingleEmitterParams, SystemParams};
use crate::state::{EmitterState, HybridState};
use crate::steady::SteadyStateResult;

/// Below this |D| the closed form is treated as sitting on a pole.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-30;

/// Convergence threshold on the relative update of the fixed-point iteration.
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100_000;
pub const FIXED_POINT_DAMPING: f64 = 0.5;

#[inline]
fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Population inversion y = ρ_ee − ρ_gg for each emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InversionEstimate {
    Single(f64),
    Coupled(f64, f64),
}

impl InversionEstimate {
    /// Fully in the ground state, y = −1.
    pub fn ground(n_emitters: usize) -> Self {
        if n_emitters == 2 {
            InversionEstimate::Coupled(-1.0, -1.0)
        } else {
            InversionEstimate::Single(-1.0)
        }
    }

    pub fn of_state(state: &HybridState) -> Self {
        match state.emitters.as_slice() {
            [a, b] => InversionEstimate::Coupled(a.inversion(), b.inversion()),
            [a] => InversionEstimate::Single(a.inversion()),
            _ => InversionEstimate::Single(-1.0),
        }
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        let check = |y: f64| {
            if (-1.0..=1.0).contains(&y) {
                Ok(())
            } else {
                Err(AnalyticError::InversionOutOfRange(y))
            }
        };
        match *self {
            InversionEstimate::Single(y) => check(y),
            InversionEstimate::Coupled(a, b) => check(a).and(check(b)),
        }
    }
}

/// The α̃₃ denominator split into the emitter-mediated and bare-mode parts.
///
/// Single emitter: `emitter_term = |f|²y/β`, `bare_term = −ε₃`.
/// Two emitters: `emitter_term = y₁|f₁|²β₂ + y₂|f₂|²β₁ + iy₁y₂(f₁f₂*g* + f₁*f₂g)`,
/// `bare_term = −ε₃(β₁β₂ + y₁y₂|g|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorBreakdown {
    pub emitter_term: Complex64,
    pub bare_term: Complex64,
    pub total: Complex64,
}

/// ε_k = i·(detuning) + γ for a mode or emitter in the rotating frame.
fn lossy(detuning: f64, gamma: f64) -> Complex64 {
    Complex64::new(gamma, detuning)
}

fn check_inversion(y: f64) -> Result<(), AnalyticError> {
    InversionEstimate::Single(y).validate()
}

/// Closed-form α̃₃ for one emitter at inversion `y`:
/// α̃₃ = iχ α̃₂* α̃₁² / (|f|²y/β − ε₃).
pub fn alpha3_single(
    alpha1: Complex64,
    alpha2: Complex64,
    y: f64,
    params: &SingleEmitterParams,
) -> Result<(Complex64, DenominatorBreakdown), AnalyticError> {
    check_inversion(y)?;
    let beta = lossy(params.emitter_detuning(), params.gamma_eg);
    let eps3 = lossy(params.fwm_detuning(), params.gamma3);
    let emitter_term = params.f.norm_sqr() * y / beta;
    let bare_term = -eps3;
    let total = emitter_term + bare_term;
    if total.norm() < DEGENERATE_DENOMINATOR {
        return Err(AnalyticError::DegenerateDenominator(total.norm()));
    }
    let source = i() * params.chi * alpha2.conj() * alpha1 * alpha1;
    Ok((
        source / total,
        DenominatorBreakdown {
            emitter_term,
            bare_term,
            total,
        },
    ))
}

/// Closed-form α̃₃ for two exchange-coupled emitters at inversions `y1`, `y2`.
pub fn alpha3_coupled(
    alpha1: Complex64,
    alpha2: Complex64,
    y1: f64,
    y2: f64,
    params: &CoupledEmitterParams,
) -> Result<(Complex64, DenominatorBreakdown), AnalyticError> {
    check_inversion(y1)?;
    check_inversion(y2)?;
    let mix = params.mixing_frequency();
    let beta1 = lossy(params.omega_eg_1 - mix, params.gamma_eg_1);
    let beta2 = lossy(params.omega_eg_2 - mix, params.gamma_eg_2);
    let eps3 = lossy(params.fwm_detuning(), params.gamma3);
    let (f1, f2, g) = (params.f1, params.f2, params.g);

    let hybrid = beta1 * beta2 + y1 * y2 * g.norm_sqr();
    let emitter_term = y1 * f1.norm_sqr() * beta2
        + y2 * f2.norm_sqr() * beta1
        + i() * y1 * y2 * (f1 * f2.conj() * g.conj() + f1.conj() * f2 * g);
    let bare_term = -eps3 * hybrid;
    let total = emitter_term + bare_term;
    if total.norm() < DEGENERATE_DENOMINATOR {
        return Err(AnalyticError::DegenerateDenominator(total.norm()));
    }
    let source = i() * params.chi * alpha2.conj() * alpha1 * alpha1;
    Ok((
        source * hybrid / total,
        DenominatorBreakdown {
            emitter_term,
            bare_term,
            total,
        },
    ))
}

/// Emitter spacings at which the emitter term cancels the imaginary part of
/// the bare mode-3 detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancementRoots {
    /// Offsets x = ω_eg − (2ω − ω′), ordered by magnitude.
    pub offsets: [f64; 2],
    /// The corresponding ω_eg; `omega_eg[1]` is the enhancement candidate.
    pub omega_eg: [f64; 2],
}

impl EnhancementRoots {
    pub fn near_pole(&self) -> f64 {
        self.omega_eg[0]
    }

    pub fn enhancement(&self) -> f64 {
        self.omega_eg[1]
    }
}

/// Coefficients (a, b, c) of a·x² + b·x + c with x = ω_eg + ω′ − 2ω:
/// a = ω₃ + ω′ − 2ω, b = |f|²y, c = (ω₃ + ω′ − 2ω)·γ_eg².
pub fn enhancement_coefficients(params: &SingleEmitterParams, y: f64) -> [f64; 3] {
    let delta3 = params.fwm_detuning();
    [
        delta3,
        params.f.norm_sqr() * y,
        delta3 * params.gamma_eg * params.gamma_eg,
    ]
}

/// Solves the cancellation condition
/// |f|²y·x + (ω₃ + ω′ − 2ω)(x² + γ_eg²) = 0 exactly.
pub fn enhancement_roots(
    params: &SingleEmitterParams,
    y: f64,
) -> Result<EnhancementRoots, AnalyticError> {
    check_inversion(y)?;
    let [a, b, c] = enhancement_coefficients(params, y);
    if a == 0.0 {
        return Err(AnalyticError::ResonantMode);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(AnalyticError::ComplexRoots(disc));
    }
    // Cancellation-free form: q = −(b + sign(b)√disc)/2, roots q/a and c/q.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (mut x_small, mut x_large) = if q == 0.0 {
        // b = 0 and disc = 0 forces c = 0: double root at zero.
        (0.0, 0.0)
    } else {
        (c / q, q / a)
    };
    if x_small.abs() > x_large.abs() {
        std::mem::swap(&mut x_small, &mut x_large);
    }
    let mix = params.mixing_frequency();
    Ok(EnhancementRoots {
        offsets: [x_small, x_large],
        omega_eg: [mix + x_small, mix + x_large],
    })
}

/// Mode envelopes from the linear response of the pumped modes, and the
/// closed-form α̃₃ with every emitter in its ground state.
pub fn linearized_guess(params: &SystemParams) -> HybridState {
    let (eps_p, eps_pp, gamma, detuning) = match params {
        SystemParams::Single(p) => (
            p.eps_p,
            p.eps_p_prime,
            [p.gamma1, p.gamma2],
            [p.omega1 - p.omega_drive, p.omega2 - p.omega_drive_prime],
        ),
        SystemParams::Coupled(p) => (
            p.eps_p,
            p.eps_p_prime,
            [p.gamma1, p.gamma2],
            [p.omega1 - p.omega_drive, p.omega2 - p.omega_drive_prime],
        ),
    };
    let a1 = eps_p / lossy(detuning[0], gamma[0]);
    let a2 = eps_pp / lossy(detuning[1], gamma[1]);
    let mut state = HybridState::zero(params.emitter_count());
    state.alpha[0] = a1;
    state.alpha[1] = a2;
    let a3 = match params {
        SystemParams::Single(p) => alpha3_single(a1, a2, -1.0, p).map(|r| r.0),
        SystemParams::Coupled(p) => alpha3_coupled(a1, a2, -1.0, -1.0, p).map(|r| r.0),
    };
    state.alpha[2] = a3.unwrap_or_default();
    state
}

/// Pump-mode updates shared by both variants.
struct PumpModes {
    eps1: Complex64,
    eps2: Complex64,
    eps_p: Complex64,
    eps_pp: Complex64,
    chi: f64,
}

impl PumpModes {
    fn update(&self, a: &[Complex64; 3]) -> (Complex64, Complex64) {
        let [a1, a2, a3] = *a;
        let a1_new = (self.eps_p - 2.0 * i() * self.chi * a1.conj() * a2 * a3) / self.eps1;
        let a2_new = (self.eps_pp - i() * self.chi * a3.conj() * a1_new * a1_new) / self.eps2;
        (a1_new, a2_new)
    }
}

/// Exact steady state of one emitter driven by a fixed α̃₃:
/// ρ_ee = 2K/(γ_ee + 4K) with K = |f|²|α̃₃|²γ_eg/|β|², then
/// ρ_ge = i f* α̃₃ y / β.
fn single_emitter_response(a3: Complex64, p: &SingleEmitterParams) -> EmitterState {
    let beta = lossy(p.emitter_detuning(), p.gamma_eg);
    let k = p.f.norm_sqr() * a3.norm_sqr() * p.gamma_eg / beta.norm_sqr();
    let rho_ee = 2.0 * k / (p.gamma_ee + 4.0 * k);
    let y = 2.0 * rho_ee - 1.0;
    EmitterState {
        rho_ge: i() * p.f.conj() * a3 * y / beta,
        rho_ee,
    }
}

/// Coherences of the coupled pair at fixed α̃₃ and inversions (2×2 solve),
/// followed by the populations from the population balance.
fn coupled_emitter_response(
    a3: Complex64,
    y: [f64; 2],
    p: &CoupledEmitterParams,
) -> [EmitterState; 2] {
    let mix = p.mixing_frequency();
    let beta1 = lossy(p.omega_eg_1 - mix, p.gamma_eg_1);
    let beta2 = lossy(p.omega_eg_2 - mix, p.gamma_eg_2);
    // [β₁, −ig*y₁; −igy₂, β₂]·[ρ₁; ρ₂] = iα̃₃·[f₁*y₁; f₂*y₂]
    let m12 = -i() * p.g.conj() * y[0];
    let m21 = -i() * p.g * y[1];
    let r1 = i() * p.f1.conj() * a3 * y[0];
    let r2 = i() * p.f2.conj() * a3 * y[1];
    let det = beta1 * beta2 - m12 * m21;
    let rho1 = (r1 * beta2 - m12 * r2) / det;
    let rho2 = (beta1 * r2 - m21 * r1) / det;
    let pop1 =
        (-2.0 * (p.f1 * a3.conj() * rho1).im - 2.0 * (p.g * rho2.conj() * rho1).im) / p.gamma_ee_1;
    let pop2 = (-2.0 * (p.f2 * a3.conj() * rho2).im - 2.0 * (p.g.conj() * rho1.conj() * rho2).im)
        / p.gamma_ee_2;
    [
        EmitterState {
            rho_ge: rho1,
            rho_ee: pop1,
        },
        EmitterState {
            rho_ge: rho2,
            rho_ee: pop2,
        },
    ]
}

fn relative_update(old: &HybridState, new: &HybridState) -> f64 {
    let rel = |a: f64, b: f64, scale: f64| {
        if a == b {
            0.0
        } else {
            (a - b).abs() / scale.max(f64::MIN_POSITIVE)
        }
    };
    let mut worst: f64 = 0.0;
    for (x, y) in old.alpha.iter().zip(&new.alpha) {
        worst = worst.max(rel(0.0, (x - y).norm(), y.norm()));
    }
    for (x, y) in old.emitters.iter().zip(&new.emitters) {
        worst = worst.max(rel(0.0, (x.rho_ge - y.rho_ge).norm(), y.rho_ge.norm()));
        worst = worst.max(rel(x.rho_ee, y.rho_ee, y.rho_ee.abs()));
    }
    worst
}

fn blend(old: &HybridState, new: &HybridState, damping: f64) -> HybridState {
    let lerp = |a: Complex64, b: Complex64| a + (b - a) * damping;
    HybridState {
        alpha: std::array::from_fn(|k| lerp(old.alpha[k], new.alpha[k])),
        emitters: old
            .emitters
            .iter()
            .zip(&new.emitters)
            .map(|(a, b)| EmitterState {
                rho_ge: lerp(a.rho_ge, b.rho_ge),
                rho_ee: a.rho_ee + (b.rho_ee - a.rho_ee) * damping,
            })
            .collect(),
    }
}

/// Solves the full algebraic steady-state system by damped fixed-point
/// iteration: pump envelopes from their balance equations given α̃₃, emitter
/// coherences and populations given α̃₃, and α̃₃ from the closed form given
/// the rest. Starts from `guess`, or [`linearized_guess`] when `None`.
///
/// The time integrator remains the reference; near poles or in bistable
/// regions this may fail with `NonConvergence`.
pub fn fixed_point_solve(
    params: &SystemParams,
    guess: Option<&HybridState>,
) -> Result<SteadyStateResult, AnalyticError> {
    params.validate()?;
    let pumps = match params {
        SystemParams::Single(p) => PumpModes {
            eps1: lossy(p.omega1 - p.omega_drive, p.gamma1),
            eps2: lossy(p.omega2 - p.omega_drive_prime, p.gamma2),
            eps_p: p.eps_p,
            eps_pp: p.eps_p_prime,
            chi: p.chi,
        },
        SystemParams::Coupled(p) => PumpModes {
            eps1: lossy(p.omega1 - p.omega_drive, p.gamma1),
            eps2: lossy(p.omega2 - p.omega_drive_prime, p.gamma2),
            eps_p: p.eps_p,
            eps_pp: p.eps_p_prime,
            chi: p.chi,
        },
    };
    let mut x = match guess {
        Some(g) if g.emitters.len() == params.emitter_count() => g.clone(),
        _ => linearized_guess(params),
    };

    let step = |x: &HybridState| -> Result<HybridState, AnalyticError> {
        let (a1, a2) = pumps.update(&x.alpha);
        let a3_old = x.alpha[2];
        let next = match params {
            SystemParams::Single(p) => {
                let e = single_emitter_response(a3_old, p);
                let (a3, _) = alpha3_single(a1, a2, e.inversion().clamp(-1.0, 1.0), p)?;
                HybridState {
                    alpha: [a1, a2, a3],
                    emitters: vec![e],
                }
            }
            SystemParams::Coupled(p) => {
                let y = [x.emitters[0].inversion(), x.emitters[1].inversion()]
                    .map(|v| v.clamp(-1.0, 1.0));
                let [e1, e2] = coupled_emitter_response(a3_old, y, p);
                let (a3, _) = alpha3_coupled(a1, a2, y[0], y[1], p)?;
                HybridState {
                    alpha: [a1, a2, a3],
                    emitters: vec![e1, e2],
                }
            }
        };
        Ok(next)
    };

    let mut last_update = f64::INFINITY;
    for iteration in 1..=FIXED_POINT_MAX_ITER {
        let next = step(&x)?;
        last_update = relative_update(&x, &next);
        x = blend(&x, &next, FIXED_POINT_DAMPING);
        if last_update < FIXED_POINT_TOL {
            let (x, relative, polish) = polish(x, params, &step)?;
            let excess = x.worst_positivity().map_or(f64::NEG_INFINITY, |w| w.1);
            return Ok(SteadyStateResult::new(
                steady_residual(&x, params),
                relative,
                x,
                true,
                0.0,
                excess,
                iteration + polish,
            ));
        }
        if !last_update.is_finite() {
            break;
        }
    }
    Err(AnalyticError::NonConvergence {
        iterations: FIXED_POINT_MAX_ITER,
        last_update,
    })
}

/// Undamped iterations from a converged point, kept while they lower the
/// relative steady-state residual. In the suppression regime α̃₃ is a near-total
/// cancellation of much larger terms, so the damped tolerance alone leaves
/// its relative rate of change well above rounding level.
fn polish<F>(
    mut x: HybridState,
    params: &SystemParams,
    step: &F,
) -> Result<(HybridState, f64, usize), AnalyticError>
where
    F: Fn(&HybridState) -> Result<HybridState, AnalyticError>,
{
    const MAX_POLISH: usize = 200;
    let mut residual = relative_steady_residual(&x, params);
    let mut used = 0;
    while used < MAX_POLISH {
        let next = step(&x)?;
        let r = relative_steady_residual(&next, params);
        if r.is_nan() || r >= residual {
            break;
        }
        x = next;
        residual = r;
        used += 1;
    }
    Ok((x, residual, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;
    use proptest::prelude::*;

    fn fig1() -> SingleEmitterParams {
        *Preset::Fig1.params().as_single().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bare_resonant_mode_limit() {
        let mut p = fig1();
        p.f = c(0.0, 0.0);
        let (a1, a2) = (c(0.1, 0.01), c(0.1, -0.02));
        let (a3, d) = alpha3_single(a1, a2, -1.0, &p).unwrap();
        let expected = -i() * p.chi * a2.conj() * a1 * a1 / p.gamma3;
        assert!((a3 - expected).norm() <= 1e-15 * expected.norm());
        assert_eq!(d.emitter_term, c(0.0, 0.0));
        assert_eq!(d.total, d.emitter_term + d.bare_term);
    }

    #[test]
    fn suppression_denominator_magnitude() {
        let p = fig1();
        let (_, d) = alpha3_single(c(0.1, 0.0), c(0.1, 0.0), -1.0, &p).unwrap();
        // |−|f|²/γ_eg − γ₃| = 1000 + 0.01
        assert!((d.total.norm() - 1000.01).abs() < 1e-9);
        let ratio = (p.gamma3 / d.total.norm()).powi(2);
        assert!((ratio - 1.0e-10).abs() < 0.01e-10, "{ratio}");
        assert!(d.total.norm() >= p.f.norm_sqr() / p.gamma_eg - p.gamma3);
    }

    #[test]
    fn no_pump_one_photons_no_mixing() {
        let (a3, _) = alpha3_single(c(0.0, 0.0), c(0.1, 0.0), -1.0, &fig1()).unwrap();
        assert_eq!(a3, c(0.0, 0.0));
    }

    #[test]
    fn out_of_range_inversion_rejected() {
        assert!(matches!(
            alpha3_single(c(0.1, 0.0), c(0.1, 0.0), -1.5, &fig1()),
            Err(AnalyticError::InversionOutOfRange(_))
        ));
    }

    #[test]
    fn exact_pole_reported() {
        let mut p = fig1();
        p.f = c(0.0, 0.0);
        p.gamma3 = 1e-40;
        assert!(matches!(
            alpha3_single(c(0.1, 0.0), c(0.1, 0.0), -1.0, &p),
            Err(AnalyticError::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn coupled_without_exchange_drops_g_terms() {
        let mut p = *Preset::Fig4.params().as_coupled().unwrap();
        p.g = c(0.0, 0.0);
        let (y1, y2) = (-0.9, -0.7);
        let (_, d) = alpha3_coupled(c(0.1, 0.0), c(0.1, 0.0), y1, y2, &p).unwrap();
        let mix = p.mixing_frequency();
        let b1 = c(p.gamma_eg_1, p.omega_eg_1 - mix);
        let b2 = c(p.gamma_eg_2, p.omega_eg_2 - mix);
        let expected = y1 * p.f1.norm_sqr() * b2 + y2 * p.f2.norm_sqr() * b1;
        assert_eq!(d.emitter_term, expected);
        let eps3 = c(p.gamma3, p.fwm_detuning());
        assert_eq!(d.bare_term, -eps3 * (b1 * b2));
    }

    #[test]
    fn enhancement_roots_worked_example() {
        let mut p = *Preset::Fig3.params().as_single().unwrap();
        p.gamma_eg = 5e-6;
        let r = enhancement_roots(&p, -1.0).unwrap();
        // sum = |f|²/0.35, product = γ_eg²
        let sum = 0.01 / 0.35;
        assert!((r.offsets[0] + r.offsets[1] - sum).abs() < 1e-15);
        assert!((r.offsets[0] * r.offsets[1] - 2.5e-11).abs() < 1e-24);
        assert!((r.offsets[1] - 2.857e-2).abs() < 1e-5);
        assert!((r.offsets[0] - 8.75e-10).abs() < 1e-12);
        assert!((r.enhancement() - 1.5286).abs() < 1e-4);
        assert!(r.near_pole() > 1.5 && r.near_pole() < 1.5 + 1e-8);
    }

    #[test]
    fn vanishing_linewidth_gives_a_zero_root() {
        let mut p = *Preset::Fig3.params().as_single().unwrap();
        p.gamma_eg = 1e-300;
        let r = enhancement_roots(&p, -1.0).unwrap();
        assert_eq!(r.offsets[0], 0.0);
        // exact γ_eg = 0 cannot be constructed through validation, but the
        // root finder itself handles c = 0
        let [a, b, _] = enhancement_coefficients(&p, -1.0);
        assert!((r.offsets[1] + b / a).abs() < 1e-17);
    }

    #[test]
    fn roots_error_paths() {
        let mut p = *Preset::Fig3.params().as_single().unwrap();
        assert!(matches!(
            enhancement_roots(&p, 0.0),
            Err(AnalyticError::ComplexRoots(_))
        ));
        p.omega3 = p.mixing_frequency();
        assert!(matches!(
            enhancement_roots(&p, -1.0),
            Err(AnalyticError::ResonantMode)
        ));
    }

    #[test]
    fn fixed_point_linear_limit() {
        let mut p = fig1();
        p.chi = 0.0;
        p.f = c(0.0, 0.0);
        let params = SystemParams::Single(p);
        let r = fixed_point_solve(&params, None).unwrap();
        assert!(r.steps <= 2, "{}", r.steps);
        assert_eq!(r.state.alpha[0], p.eps_p / c(p.gamma1, 0.0));
    }

    #[test]
    fn fixed_point_residual_is_numerically_zero() {
        for preset in Preset::ALL {
            let params = preset.params();
            let r = fixed_point_solve(&params, None).unwrap();
            assert!(r.relative_drift < 1e-10, "{preset}: {}", r.relative_drift);
            assert!(r.final_residual < 1e-12, "{preset}: {}", r.final_residual);
            let d = crate::dynamics::rhs(&r.state, &params);
            assert!(d.norm_inf() < 1e-12, "{preset}: {}", d.norm_inf());
        }
    }

    proptest! {
        #[test]
        fn coupled_reduces_to_single(
            a1r in -1.0f64..1.0, a1i in -1.0f64..1.0,
            a2r in -1.0f64..1.0, a2i in -1.0f64..1.0,
            y in -1.0f64..=1.0, y2 in -1.0f64..=1.0,
            fr in -0.3f64..0.3, fi in -0.3f64..0.3,
            weg in 1.3f64..1.8, w3 in 1.3f64..2.0,
        ) {
            let mut s = fig1();
            s.f = c(fr, fi);
            s.omega_eg = weg;
            s.omega3 = w3;
            let cp = s.to_coupled();
            let (a1, a2) = (c(a1r, a1i), c(a2r, a2i));
            let (x, _) = alpha3_single(a1, a2, y, &s).unwrap();
            let (z, _) = alpha3_coupled(a1, a2, y, y2, &cp).unwrap();
            prop_assert!((x - z).norm() <= 1e-13 * x.norm().max(1e-300));
        }

        #[test]
        fn intensity_is_phase_invariant_in_f(phi in 0.0f64..std::f64::consts::TAU, y in -1.0f64..=1.0) {
            let p = fig1();
            let mut q = p;
            q.f = p.f * Complex64::cis(phi);
            let (a, _) = alpha3_single(c(0.1, 0.0), c(0.1, 0.0), y, &p).unwrap();
            let (b, _) = alpha3_single(c(0.1, 0.0), c(0.1, 0.0), y, &q).unwrap();
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm());
        }
    }
}
