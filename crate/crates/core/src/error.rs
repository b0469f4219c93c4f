use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("`{field}` must be strictly positive, got {value}")]
    NotPositive { field: String, value: f64 },
    #[error("`{field}` must be finite")]
    NotFinite { field: String },
    #[error("`chi` must be real and non-negative, got {0}")]
    NegativeChi(f64),
    #[error("`{field}` is a real quantity; a complex value was given")]
    ExpectedReal { field: String },
    #[error("unknown {kind} parameter `{name}`")]
    UnknownField { name: String, kind: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettingsError {
    #[error("integration setting `{field}` must be strictly positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("max_time ({max_time}) is shorter than residual_window ({window})")]
    WindowExceedsHorizon { max_time: f64, window: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Settings(#[from] SettingsError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error("state has {found} emitters but the parameters describe {expected}")]
    EmitterCount { expected: usize, found: usize },
    #[error(
        "density-matrix invariant violated at t = {t} (emitter {emitter}, excess {excess:.3e}); \
         integrator tolerances are too loose"
    )]
    InvariantViolation { t: f64, emitter: usize, excess: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("steady-state denominator vanishes (|D| = {0:.3e}); exact pole")]
    DegenerateDenominator(f64),
    #[error("population inversion {0} outside [-1, 1]")]
    InversionOutOfRange(f64),
    #[error("mode 3 is exactly on the mixing resonance; the enhancement condition is degenerate")]
    ResonantMode,
    #[error("enhancement condition has complex roots (discriminant {0:.3e})")]
    ComplexRoots(f64),
    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {last_update:.3e})")]
    NonConvergence { iterations: usize, last_update: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("sweep target `{target}` does not apply to {kind} parameters")]
    TargetMismatch { target: String, kind: &'static str },
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("baseline steady state did not converge (residual {0:.3e})")]
    BaselineNotConverged(f64),
    #[error("baseline intensity is zero; factors are undefined")]
    ZeroBaseline,
    #[error("optimum lies on the sweep boundary at {0}")]
    NoInteriorOptimum(f64),
}
