//! Parameter sweeps, normalization against no-emitter baselines, and optimum
//! search.
//!
//! Every grid point is an independent time integration from the empty,
//! ground-state initial condition. Points are distributed over a rayon pool
//! and reassembled in grid order, so results do not depend on worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::analytic::enhancement_roots;
use crate::error::SweepError;
use crate::golden;
use crate::params::SystemParams;
use crate::steady::{steady_state_from_rest, IntegrationSettings, SteadyStateResult};

/// Final bracket width of the golden-section refinement.
pub const OPTIMUM_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepTarget {
    OmegaEg,
    OmegaEg1,
    OmegaEg2,
    Omega3,
    F,
    F1,
    F2,
    /// |g| with its phase held fixed.
    GModulus,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::OmegaEg => "omega_eg",
            SweepTarget::OmegaEg1 => "omega_eg_1",
            SweepTarget::OmegaEg2 => "omega_eg_2",
            SweepTarget::Omega3 => "omega3",
            SweepTarget::F => "f",
            SweepTarget::F1 => "f1",
            SweepTarget::F2 => "f2",
            SweepTarget::GModulus => "g_modulus",
        }
    }

    pub fn is_emitter_spacing(self) -> bool {
        matches!(self, SweepTarget::OmegaEg | SweepTarget::OmegaEg1)
    }

    /// `params` with this target set to `value`.
    pub fn apply(self, params: &SystemParams, value: f64) -> Result<SystemParams, SweepError> {
        let mut out = *params;
        let mismatch = |kind| SweepError::TargetMismatch {
            target: self.name().to_string(),
            kind,
        };
        match (&mut out, self) {
            (SystemParams::Single(p), SweepTarget::OmegaEg) => p.omega_eg = value,
            (SystemParams::Single(p), SweepTarget::F) => p.f = Complex64::new(value, 0.0),
            (SystemParams::Single(p), SweepTarget::Omega3) => p.omega3 = value,
            (SystemParams::Single(_), _) => return Err(mismatch("single-emitter")),
            (SystemParams::Coupled(p), SweepTarget::OmegaEg1) => p.omega_eg_1 = value,
            (SystemParams::Coupled(p), SweepTarget::OmegaEg2) => p.omega_eg_2 = value,
            (SystemParams::Coupled(p), SweepTarget::Omega3) => p.omega3 = value,
            (SystemParams::Coupled(p), SweepTarget::F1) => p.f1 = Complex64::new(value, 0.0),
            (SystemParams::Coupled(p), SweepTarget::F2) => p.f2 = Complex64::new(value, 0.0),
            (SystemParams::Coupled(p), SweepTarget::GModulus) => {
                let phase = if p.g.norm() == 0.0 { 0.0 } else { p.g.arg() };
                p.g = Complex64::from_polar(value, phase);
            }
            (SystemParams::Coupled(_), _) => return Err(mismatch("coupled-emitter")),
        }
        Ok(out)
    }
}

impl fmt::Display for SweepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepTarget {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "omega_eg" => SweepTarget::OmegaEg,
            "omega_eg_1" => SweepTarget::OmegaEg1,
            "omega_eg_2" => SweepTarget::OmegaEg2,
            "omega3" => SweepTarget::Omega3,
            "f" => SweepTarget::F,
            "f1" => SweepTarget::F1,
            "f2" => SweepTarget::F2,
            "g_modulus" | "g-modulus" => SweepTarget::GModulus,
            other => {
                return Err(SweepError::InvalidSpec(format!(
                    "unknown sweep target `{other}`"
                )))
            }
        })
    }
}

/// A linear grid over one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
    pub base_params: SystemParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(SweepError::InvalidSpec(format!(
                "start ({}) must be below stop ({})",
                self.start, self.stop
            )));
        }
        if self.n_points < 2 {
            return Err(SweepError::InvalidSpec(format!(
                "n_points must be at least 2, got {}",
                self.n_points
            )));
        }
        self.base_params.validate()?;
        self.target
            .apply(&self.base_params, self.start)?
            .validate()?;
        self.target
            .apply(&self.base_params, self.stop)?
            .validate()?;
        Ok(())
    }

    /// The i-th grid value. Grids whose sizes share a common refinement
    /// produce bit-identical values at shared points.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            return self.stop;
        }
        let frac = i as f64 / (self.n_points - 1) as f64;
        self.start + (self.stop - self.start) * frac
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.value(i)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.n_points - 1) as f64
    }

    pub fn params_at(&self, value: f64) -> Result<SystemParams, SweepError> {
        self.target.apply(&self.base_params, value)
    }
}

/// What a factor of 1 means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    /// No emitter, mode 3 tuned to 2ω − ω′.
    ResonantNoEmitter,
    /// No emitter, mode 3 left at its own frequency.
    OffResonantNoEmitter,
    /// The best intensity a single emitter (emitter 1 alone) reaches over
    /// the same window.
    SingleEmitterOptimum,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::ResonantNoEmitter => "resonant-no-emitter",
            BaselineKind::OffResonantNoEmitter => "off-resonant-no-emitter",
            BaselineKind::SingleEmitterOptimum => "single-emitter-optimum",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "resonant-no-emitter" => BaselineKind::ResonantNoEmitter,
            "off-resonant-no-emitter" => BaselineKind::OffResonantNoEmitter,
            "single-emitter-optimum" => BaselineKind::SingleEmitterOptimum,
            other => {
                return Err(SweepError::InvalidSpec(format!(
                    "unknown baseline `{other}`"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param_value: f64,
    pub fwm_intensity: f64,
    /// Excited population of each emitter.
    pub rho_ee: Vec<f64>,
    pub factor: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub target: SweepTarget,
    pub points: Vec<SweepPoint>,
    pub baseline_intensity: f64,
    pub baseline_kind: BaselineKind,
}

impl SweepCurve {
    pub fn min_factor(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.converged)
            .min_by(|a, b| a.factor.total_cmp(&b.factor))
    }

    pub fn max_factor(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.converged)
            .max_by(|a, b| a.factor.total_cmp(&b.factor))
    }

    /// Point with the largest excited population of `emitter`.
    pub fn max_population(&self, emitter: usize) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.converged)
            .max_by(|a, b| a.rho_ee[emitter].total_cmp(&b.rho_ee[emitter]))
    }

    pub fn unconverged(&self) -> usize {
        self.points.iter().filter(|p| !p.converged).count()
    }
}

/// How sweeps are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRunner {
    pub settings: IntegrationSettings,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl SweepRunner {
    pub fn new(settings: IntegrationSettings) -> Self {
        Self {
            settings,
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn parallel_map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        if self.workers == 1 {
            return items.iter().map(f).collect();
        }
        let run = || items.par_iter().map(&f).collect();
        if self.workers == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }

    /// Steady state of `params` from rest.
    pub fn steady_state(&self, params: &SystemParams) -> Result<SteadyStateResult, SweepError> {
        Ok(steady_state_from_rest(params, &self.settings)?)
    }

    /// Reference intensity for `kind`, computed with the same pumps and settings.
    pub fn baseline_intensity(
        &self,
        spec: &SweepSpec,
        kind: BaselineKind,
    ) -> Result<f64, SweepError> {
        let intensity = match kind {
            BaselineKind::ResonantNoEmitter | BaselineKind::OffResonantNoEmitter => {
                let mut reference = spec.base_params.without_emitters();
                if kind == BaselineKind::ResonantNoEmitter {
                    reference = reference.with_resonant_mode3();
                }
                let r = self.steady_state(&reference)?;
                if !r.converged {
                    return Err(SweepError::BaselineNotConverged(r.final_residual));
                }
                r.fwm_intensity
            }
            BaselineKind::SingleEmitterOptimum => {
                let single = match &spec.base_params {
                    SystemParams::Single(p) => *p,
                    SystemParams::Coupled(p) => p.emitter1_only(),
                };
                let single_spec = SweepSpec {
                    target: SweepTarget::OmegaEg,
                    start: spec.start,
                    stop: spec.stop,
                    n_points: spec.n_points,
                    base_params: SystemParams::Single(single),
                };
                self.find_optimum(&single_spec, BaselineKind::OffResonantNoEmitter)?
                    .fwm_intensity
            }
        };
        if intensity == 0.0 {
            return Err(SweepError::ZeroBaseline);
        }
        Ok(intensity)
    }

    fn point(&self, spec: &SweepSpec, value: f64, baseline: f64) -> Result<SweepPoint, SweepError> {
        let r = self.steady_state(&spec.params_at(value)?)?;
        Ok(SweepPoint {
            param_value: value,
            fwm_intensity: r.fwm_intensity,
            rho_ee: r.state.emitters.iter().map(|e| e.rho_ee).collect(),
            factor: r.fwm_intensity / baseline,
            converged: r.converged,
        })
    }

    pub fn run_sweep(
        &self,
        spec: &SweepSpec,
        baseline: BaselineKind,
    ) -> Result<SweepCurve, SweepError> {
        spec.validate()?;
        let baseline_intensity = self.baseline_intensity(spec, baseline)?;
        let grid = spec.grid();
        let points = self
            .parallel_map(&grid, |&v| self.point(spec, v, baseline_intensity))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SweepCurve {
            target: spec.target,
            points,
            baseline_intensity,
            baseline_kind: baseline,
        })
    }

    /// Coarse scan over the sweep grid followed by golden-section refinement
    /// of the factor between the neighbours of the best grid point. For
    /// emitter-spacing targets the enhancement root at y = −1 is evaluated
    /// as an extra seed candidate.
    pub fn find_optimum(
        &self,
        spec: &SweepSpec,
        baseline: BaselineKind,
    ) -> Result<Optimum, SweepError> {
        let curve = self.run_sweep(spec, baseline)?;
        let seed = self.enhancement_seed(spec);
        let baseline_intensity = curve.baseline_intensity;
        let grid = spec.grid();
        let coarse: Vec<f64> = curve
            .points
            .iter()
            .map(|p| {
                if p.converged {
                    p.factor
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let evaluate = |v: f64| -> Result<f64, SweepError> {
            let p = self.point(spec, v, baseline_intensity)?;
            Ok(if p.converged {
                p.factor
            } else {
                f64::NEG_INFINITY
            })
        };
        let refined = refine_on_grid(&grid, &coarse, seed, evaluate, OPTIMUM_RESOLUTION)?;
        Ok(Optimum {
            param_value: refined.x,
            factor: refined.value,
            fwm_intensity: refined.value * baseline_intensity,
            baseline_intensity,
            baseline_kind: baseline,
            grid_best: refined.grid_best,
        })
    }

    fn enhancement_seed(&self, spec: &SweepSpec) -> Option<f64> {
        if !spec.target.is_emitter_spacing() {
            return None;
        }
        let single = match &spec.base_params {
            SystemParams::Single(p) => *p,
            SystemParams::Coupled(p) => p.emitter1_only(),
        };
        let root = enhancement_roots(&single, -1.0).ok()?.enhancement();
        (root > spec.start && root < spec.stop).then_some(root)
    }

    /// Optimum enhancement of one emitter against two coupled emitters, each
    /// against its own off-resonant no-emitter baseline.
    pub fn coupled_vs_single_report(
        &self,
        single: &SweepSpec,
        coupled: &SweepSpec,
    ) -> Result<CoupledVsSingle, SweepError> {
        let (s, c) = match (&single.base_params, &coupled.base_params) {
            (SystemParams::Single(s), SystemParams::Coupled(c)) => (s, c),
            _ => {
                return Err(SweepError::InvalidSpec(
                    "expected a single-emitter and a coupled-emitter sweep".into(),
                ))
            }
        };
        let shared = [
            ("eps_p", s.eps_p == c.eps_p),
            ("eps_p_prime", s.eps_p_prime == c.eps_p_prime),
            ("gamma1", s.gamma1 == c.gamma1),
            ("gamma2", s.gamma2 == c.gamma2),
            ("gamma3", s.gamma3 == c.gamma3),
            ("omega1", s.omega1 == c.omega1),
            ("omega2", s.omega2 == c.omega2),
            ("omega_drive", s.omega_drive == c.omega_drive),
            (
                "omega_drive_prime",
                s.omega_drive_prime == c.omega_drive_prime,
            ),
        ];
        if let Some((name, _)) = shared.iter().find(|(_, same)| !same) {
            return Err(SweepError::InvalidSpec(format!(
                "single and coupled parameter sets differ in `{name}`"
            )));
        }
        let single_optimum = self.find_optimum(single, BaselineKind::OffResonantNoEmitter)?;
        let coupled_optimum = self.find_optimum(coupled, BaselineKind::OffResonantNoEmitter)?;
        Ok(CoupledVsSingle {
            ratio: coupled_optimum.factor / single_optimum.factor,
            single: single_optimum,
            coupled: coupled_optimum,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub param_value: f64,
    pub factor: f64,
    pub fwm_intensity: f64,
    pub baseline_intensity: f64,
    pub baseline_kind: BaselineKind,
    /// Best point of the coarse scan, before refinement.
    pub grid_best: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledVsSingle {
    pub single: Optimum,
    pub coupled: Optimum,
    /// Coupled optimum factor over single optimum factor.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub x: f64,
    pub value: f64,
    pub grid_best: (f64, f64),
}

/// Picks the best of `coarse` (values on `grid`) and the optional `seed`,
/// then refines between the neighbouring grid points with golden section.
///
/// Fails with `NoInteriorOptimum` when the best coarse point is a grid end.
pub fn refine_on_grid<F>(
    grid: &[f64],
    coarse: &[f64],
    seed: Option<f64>,
    mut evaluate: F,
    x_tol: f64,
) -> Result<Refined, SweepError>
where
    F: FnMut(f64) -> Result<f64, SweepError>,
{
    debug_assert_eq!(grid.len(), coarse.len());
    let n = grid.len();
    let best = (0..n)
        .max_by(|&a, &b| coarse[a].total_cmp(&coarse[b]))
        .ok_or_else(|| SweepError::InvalidSpec("empty grid".into()))?;
    let grid_best = (grid[best], coarse[best]);

    let mut centre = (grid[best], coarse[best]);
    if let Some(s) = seed {
        let v = evaluate(s)?;
        if v > centre.1 {
            centre = (s, v);
        }
    }
    let is_seed = centre.0 != grid[best];
    if !is_seed && (best == 0 || best + 1 == n) {
        return Err(SweepError::NoInteriorOptimum(grid[best]));
    }

    // grid neighbours of the centre
    let upper = grid.partition_point(|&g| g <= centre.0).min(n - 1);
    let (lo, hi) = if is_seed {
        (grid[upper.saturating_sub(1)], grid[upper])
    } else {
        (grid[best - 1], grid[best + 1])
    };

    let m = golden::maximize(&mut evaluate, lo, hi, x_tol)?;
    let (x, value) = if m.value > centre.1 {
        (m.x, m.value)
    } else {
        centre
    };
    Ok(Refined {
        x,
        value,
        grid_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    #[test]
    fn grid_ends_and_refinement_share_points() {
        let mut spec = Preset::Fig1.sweep();
        assert_eq!(spec.value(0), 1.3);
        assert_eq!(spec.value(800), 1.7);
        let coarse = spec.grid();
        spec.n_points = 1601;
        let fine = spec.grid();
        for (i, v) in coarse.iter().enumerate() {
            assert_eq!(*v, fine[2 * i]);
        }
        assert!((coarse[400] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = Preset::Fig1.sweep();
        spec.n_points = 1;
        assert!(spec.validate().is_err());
        let mut spec = Preset::Fig1.sweep();
        spec.stop = spec.start;
        assert!(spec.validate().is_err());
        let mut spec = Preset::Fig1.sweep();
        spec.target = SweepTarget::OmegaEg1;
        assert!(matches!(
            spec.validate(),
            Err(SweepError::TargetMismatch { .. })
        ));
        let mut spec = Preset::Fig1.sweep();
        spec.start = -0.1;
        assert!(matches!(spec.validate(), Err(SweepError::Params(_))));
    }

    #[test]
    fn target_names_round_trip() {
        for t in [
            SweepTarget::OmegaEg,
            SweepTarget::OmegaEg1,
            SweepTarget::OmegaEg2,
            SweepTarget::Omega3,
            SweepTarget::F,
            SweepTarget::F1,
            SweepTarget::F2,
            SweepTarget::GModulus,
        ] {
            assert_eq!(t.name().parse::<SweepTarget>().unwrap(), t);
        }
        for b in [
            BaselineKind::ResonantNoEmitter,
            BaselineKind::OffResonantNoEmitter,
            BaselineKind::SingleEmitterOptimum,
        ] {
            assert_eq!(b.name().parse::<BaselineKind>().unwrap(), b);
        }
    }

    #[test]
    fn g_modulus_keeps_phase() {
        let p = Preset::Fig4.params();
        let q = SweepTarget::GModulus.apply(&p, 0.2).unwrap();
        let (g0, g1) = (p.as_coupled().unwrap().g, q.as_coupled().unwrap().g);
        assert!((g1.norm() - 0.2).abs() < 1e-15);
        assert!((g1.arg() - g0.arg()).abs() < 1e-15);
    }

    #[test]
    fn golden_refinement_on_stub_quadratic() {
        let peak = 1.52345;
        let f = |x: f64| 80.0 - 1e5 * (x - peak).powi(2);
        let grid: Vec<f64> = (0..61).map(|i| 1.40 + 0.005 * i as f64).collect();
        let coarse: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let r = refine_on_grid(&grid, &coarse, None, |x| Ok(f(x)), OPTIMUM_RESOLUTION).unwrap();
        assert!((r.x - peak).abs() < 1e-5, "{}", r.x);
        assert!((r.value - 80.0).abs() < 1e-3);
    }

    #[test]
    fn boundary_maximum_is_rejected() {
        let grid: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let coarse = grid.clone();
        let r = refine_on_grid(&grid, &coarse, None, Ok, 1e-6);
        assert!(matches!(r, Err(SweepError::NoInteriorOptimum(v)) if v == 1.0));
    }

    #[test]
    fn seed_between_grid_points_wins() {
        // A spike narrower than the grid spacing, located by the seed.
        let peak = 0.537;
        let f = |x: f64| 1.0 / (1e-6 + (x - peak).powi(2));
        let grid: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let coarse: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let r = refine_on_grid(&grid, &coarse, Some(0.536), |x| Ok(f(x)), 1e-9).unwrap();
        assert!((r.x - peak).abs() < 1e-6);
    }
}
