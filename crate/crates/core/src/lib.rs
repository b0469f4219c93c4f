//! Four-wave mixing in the plasmon modes of a grating coupled to one or two
//! quantum emitters.
//!
//! Two pump modes (α₁ at ω, α₂ at ω′) generate a converted mode α₃ at
//! 2ω − ω′. An emitter coupled to α₃ either blocks the conversion (when its
//! level spacing sits on 2ω − ω′) or cancels the off-resonant detuning of
//! α₃ and enhances it. The crate provides:
//!
//! - [`dynamics`]: rotating- and lab-frame equations of motion,
//! - [`steady`]: adaptive integration to the driven steady state,
//! - [`analytic`]: closed-form α̃₃, enhancement roots and a fixed-point solver,
//! - [`sweep`]: parameter sweeps, baselines and optimum search,
//! - [`validation`]: the figure-reproduction and invariant checks.
//!
//! All frequencies and rates are in units of the first drive frequency ω.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod golden;
pub mod integrator;
pub mod params;
pub mod presets;
pub mod state;
pub mod steady;
pub mod sweep;
pub mod validation;

pub use analytic::{
    alpha3_coupled, alpha3_single, enhancement_roots, fixed_point_solve, DenominatorBreakdown,
    EnhancementRoots, InversionEstimate,
};
pub use dynamics::{rhs_coupled, rhs_single, Frame};
pub use error::{AnalyticError, DynamicsError, ParamError, SettingsError, SweepError};
pub use num_complex::Complex64;
pub use params::{CoupledEmitterParams, ParamValue, SingleEmitterParams, SystemParams};
pub use presets::Preset;
pub use state::{EmitterState, HybridState};
pub use steady::{
    integrate_to_steady_state, lab_frame_check, steady_state_from_rest, IntegrationSettings,
    SteadyStateResult,
};
pub use sweep::{
    BaselineKind, CoupledVsSingle, Optimum, SweepCurve, SweepPoint, SweepRunner, SweepSpec,
    SweepTarget,
};
