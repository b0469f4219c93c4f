//! Physical parameters of the grating/emitter system.
//!
//! Every frequency and rate is measured in units of the first drive
//! frequency ω, so the presets carry `omega_drive = 1.0`.

use num_complex::Complex64;
use std::fmt;

use crate::error::ParamError;

/// A scalar that may be assigned to a parameter field by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Complex(Complex64),
}

impl ParamValue {
    fn as_real(self, field: &str) -> Result<f64, ParamError> {
        match self {
            ParamValue::Real(v) => Ok(v),
            ParamValue::Complex(c) if c.im == 0.0 => Ok(c.re),
            ParamValue::Complex(_) => Err(ParamError::ExpectedReal {
                field: field.to_string(),
            }),
        }
    }

    fn as_complex(self) -> Complex64 {
        match self {
            ParamValue::Real(v) => Complex64::new(v, 0.0),
            ParamValue::Complex(c) => c,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Complex(c) => write!(f, "({}, {})", c.re, c.im),
        }
    }
}

/// One grating with three plasmon modes coupled to a single two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleEmitterParams {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub omega_eg: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma_ee: f64,
    pub gamma_eg: f64,
    /// Four-wave-mixing coupling constant (real, non-negative).
    pub chi: f64,
    /// Emitter coupling to mode 3.
    pub f: Complex64,
    pub eps_p: Complex64,
    pub eps_p_prime: Complex64,
    pub omega_drive: f64,
    pub omega_drive_prime: f64,
}

/// Same grating coupled to two emitters that also interact with each other
/// through the exchange constant `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledEmitterParams {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub omega_eg_1: f64,
    pub omega_eg_2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma_ee_1: f64,
    pub gamma_ee_2: f64,
    pub gamma_eg_1: f64,
    pub gamma_eg_2: f64,
    pub chi: f64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub g: Complex64,
    pub eps_p: Complex64,
    pub eps_p_prime: Complex64,
    pub omega_drive: f64,
    pub omega_drive_prime: f64,
}

const SINGLE_FIELDS: &[&str] = &[
    "omega1",
    "omega2",
    "omega3",
    "omega_eg",
    "gamma1",
    "gamma2",
    "gamma3",
    "gamma_ee",
    "gamma_eg",
    "chi",
    "f",
    "eps_p",
    "eps_p_prime",
    "omega_drive",
    "omega_drive_prime",
];

const COUPLED_FIELDS: &[&str] = &[
    "omega1",
    "omega2",
    "omega3",
    "omega_eg_1",
    "omega_eg_2",
    "gamma1",
    "gamma2",
    "gamma3",
    "gamma_ee_1",
    "gamma_ee_2",
    "gamma_eg_1",
    "gamma_eg_2",
    "chi",
    "f1",
    "f2",
    "g",
    "eps_p",
    "eps_p_prime",
    "omega_drive",
    "omega_drive_prime",
];

fn check_positive(field: &str, value: f64) -> Result<(), ParamError> {
    if !value.is_finite() {
        return Err(ParamError::NotFinite {
            field: field.to_string(),
        });
    }
    if value <= 0.0 {
        return Err(ParamError::NotPositive {
            field: field.to_string(),
            value,
        });
    }
    Ok(())
}

fn check_finite_complex(field: &str, value: Complex64) -> Result<(), ParamError> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NotFinite {
            field: field.to_string(),
        })
    }
}

fn check_chi(chi: f64) -> Result<(), ParamError> {
    if !chi.is_finite() {
        return Err(ParamError::NotFinite {
            field: "chi".to_string(),
        });
    }
    if chi < 0.0 {
        return Err(ParamError::NegativeChi(chi));
    }
    Ok(())
}

impl SingleEmitterParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega3", self.omega3),
            ("omega_eg", self.omega_eg),
            ("omega_drive", self.omega_drive),
            ("omega_drive_prime", self.omega_drive_prime),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma_ee", self.gamma_ee),
            ("gamma_eg", self.gamma_eg),
        ] {
            check_positive(name, v)?;
        }
        check_chi(self.chi)?;
        check_finite_complex("f", self.f)?;
        check_finite_complex("eps_p", self.eps_p)?;
        check_finite_complex("eps_p_prime", self.eps_p_prime)?;
        Ok(())
    }

    pub fn field_names() -> &'static [&'static str] {
        SINGLE_FIELDS
    }

    pub fn set_field(&mut self, name: &str, value: ParamValue) -> Result<(), ParamError> {
        match name {
            "omega1" => self.omega1 = value.as_real(name)?,
            "omega2" => self.omega2 = value.as_real(name)?,
            "omega3" => self.omega3 = value.as_real(name)?,
            "omega_eg" => self.omega_eg = value.as_real(name)?,
            "gamma1" => self.gamma1 = value.as_real(name)?,
            "gamma2" => self.gamma2 = value.as_real(name)?,
            "gamma3" => self.gamma3 = value.as_real(name)?,
            "gamma_ee" => self.gamma_ee = value.as_real(name)?,
            "gamma_eg" => self.gamma_eg = value.as_real(name)?,
            "chi" => self.chi = value.as_real(name)?,
            "f" => self.f = value.as_complex(),
            "eps_p" => self.eps_p = value.as_complex(),
            "eps_p_prime" => self.eps_p_prime = value.as_complex(),
            "omega_drive" => self.omega_drive = value.as_real(name)?,
            "omega_drive_prime" => self.omega_drive_prime = value.as_real(name)?,
            _ => {
                return Err(ParamError::UnknownField {
                    name: name.to_string(),
                    kind: "single-emitter",
                })
            }
        }
        Ok(())
    }

    /// Detuning of mode 3 from the mixing frequency, ω₃ − (2ω − ω′).
    pub fn fwm_detuning(&self) -> f64 {
        self.omega3 - self.mixing_frequency()
    }

    /// Detuning of the emitter from the mixing frequency, ω_eg − (2ω − ω′).
    pub fn emitter_detuning(&self) -> f64 {
        self.omega_eg - self.mixing_frequency()
    }

    /// The generated frequency 2ω − ω′.
    pub fn mixing_frequency(&self) -> f64 {
        2.0 * self.omega_drive - self.omega_drive_prime
    }

    /// Two-emitter form with the second emitter switched off (f₂ = g = 0).
    ///
    /// Emitter 2 gets copies of emitter 1's frequency and rates; they never
    /// enter any equation for emitter 1 or the modes.
    pub fn to_coupled(&self) -> CoupledEmitterParams {
        CoupledEmitterParams {
            omega1: self.omega1,
            omega2: self.omega2,
            omega3: self.omega3,
            omega_eg_1: self.omega_eg,
            omega_eg_2: self.omega_eg,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            gamma3: self.gamma3,
            gamma_ee_1: self.gamma_ee,
            gamma_ee_2: self.gamma_ee,
            gamma_eg_1: self.gamma_eg,
            gamma_eg_2: self.gamma_eg,
            chi: self.chi,
            f1: self.f,
            f2: Complex64::new(0.0, 0.0),
            g: Complex64::new(0.0, 0.0),
            eps_p: self.eps_p,
            eps_p_prime: self.eps_p_prime,
            omega_drive: self.omega_drive,
            omega_drive_prime: self.omega_drive_prime,
        }
    }
}

impl CoupledEmitterParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega3", self.omega3),
            ("omega_eg_1", self.omega_eg_1),
            ("omega_eg_2", self.omega_eg_2),
            ("omega_drive", self.omega_drive),
            ("omega_drive_prime", self.omega_drive_prime),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma_ee_1", self.gamma_ee_1),
            ("gamma_ee_2", self.gamma_ee_2),
            ("gamma_eg_1", self.gamma_eg_1),
            ("gamma_eg_2", self.gamma_eg_2),
        ] {
            check_positive(name, v)?;
        }
        check_chi(self.chi)?;
        for (name, v) in [
            ("f1", self.f1),
            ("f2", self.f2),
            ("g", self.g),
            ("eps_p", self.eps_p),
            ("eps_p_prime", self.eps_p_prime),
        ] {
            check_finite_complex(name, v)?;
        }
        Ok(())
    }

    pub fn field_names() -> &'static [&'static str] {
        COUPLED_FIELDS
    }

    pub fn set_field(&mut self, name: &str, value: ParamValue) -> Result<(), ParamError> {
        match name {
            "omega1" => self.omega1 = value.as_real(name)?,
            "omega2" => self.omega2 = value.as_real(name)?,
            "omega3" => self.omega3 = value.as_real(name)?,
            "omega_eg_1" => self.omega_eg_1 = value.as_real(name)?,
            "omega_eg_2" => self.omega_eg_2 = value.as_real(name)?,
            "gamma1" => self.gamma1 = value.as_real(name)?,
            "gamma2" => self.gamma2 = value.as_real(name)?,
            "gamma3" => self.gamma3 = value.as_real(name)?,
            "gamma_ee_1" => self.gamma_ee_1 = value.as_real(name)?,
            "gamma_ee_2" => self.gamma_ee_2 = value.as_real(name)?,
            "gamma_eg_1" => self.gamma_eg_1 = value.as_real(name)?,
            "gamma_eg_2" => self.gamma_eg_2 = value.as_real(name)?,
            "chi" => self.chi = value.as_real(name)?,
            "f1" => self.f1 = value.as_complex(),
            "f2" => self.f2 = value.as_complex(),
            "g" => self.g = value.as_complex(),
            "eps_p" => self.eps_p = value.as_complex(),
            "eps_p_prime" => self.eps_p_prime = value.as_complex(),
            "omega_drive" => self.omega_drive = value.as_real(name)?,
            "omega_drive_prime" => self.omega_drive_prime = value.as_real(name)?,
            _ => {
                return Err(ParamError::UnknownField {
                    name: name.to_string(),
                    kind: "coupled-emitter",
                })
            }
        }
        Ok(())
    }

    pub fn fwm_detuning(&self) -> f64 {
        self.omega3 - self.mixing_frequency()
    }

    pub fn mixing_frequency(&self) -> f64 {
        2.0 * self.omega_drive - self.omega_drive_prime
    }

    /// Emitter 1 alone on the grating (f₂ and g dropped).
    pub fn emitter1_only(&self) -> SingleEmitterParams {
        SingleEmitterParams {
            omega1: self.omega1,
            omega2: self.omega2,
            omega3: self.omega3,
            omega_eg: self.omega_eg_1,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            gamma3: self.gamma3,
            gamma_ee: self.gamma_ee_1,
            gamma_eg: self.gamma_eg_1,
            chi: self.chi,
            f: self.f1,
            eps_p: self.eps_p,
            eps_p_prime: self.eps_p_prime,
            omega_drive: self.omega_drive,
            omega_drive_prime: self.omega_drive_prime,
        }
    }

    /// Relabels the emitters (1 ↔ 2). The exchange constant becomes g*.
    pub fn swapped(&self) -> Self {
        Self {
            omega_eg_1: self.omega_eg_2,
            omega_eg_2: self.omega_eg_1,
            gamma_ee_1: self.gamma_ee_2,
            gamma_ee_2: self.gamma_ee_1,
            gamma_eg_1: self.gamma_eg_2,
            gamma_eg_2: self.gamma_eg_1,
            f1: self.f2,
            f2: self.f1,
            g: self.g.conj(),
            ..*self
        }
    }
}

/// Either system variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemParams {
    Single(SingleEmitterParams),
    Coupled(CoupledEmitterParams),
}

impl From<SingleEmitterParams> for SystemParams {
    fn from(p: SingleEmitterParams) -> Self {
        SystemParams::Single(p)
    }
}

impl From<CoupledEmitterParams> for SystemParams {
    fn from(p: CoupledEmitterParams) -> Self {
        SystemParams::Coupled(p)
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        match self {
            SystemParams::Single(p) => p.validate(),
            SystemParams::Coupled(p) => p.validate(),
        }
    }

    pub fn emitter_count(&self) -> usize {
        match self {
            SystemParams::Single(_) => 1,
            SystemParams::Coupled(_) => 2,
        }
    }

    pub fn set_field(&mut self, name: &str, value: ParamValue) -> Result<(), ParamError> {
        match self {
            SystemParams::Single(p) => p.set_field(name, value),
            SystemParams::Coupled(p) => p.set_field(name, value),
        }
    }

    pub fn field_names(&self) -> &'static [&'static str] {
        match self {
            SystemParams::Single(_) => SINGLE_FIELDS,
            SystemParams::Coupled(_) => COUPLED_FIELDS,
        }
    }

    pub fn fwm_detuning(&self) -> f64 {
        match self {
            SystemParams::Single(p) => p.fwm_detuning(),
            SystemParams::Coupled(p) => p.fwm_detuning(),
        }
    }

    /// The generated frequency 2ω − ω′.
    pub fn mixing_frequency(&self) -> f64 {
        match self {
            SystemParams::Single(p) => p.mixing_frequency(),
            SystemParams::Coupled(p) => p.mixing_frequency(),
        }
    }

    pub fn gamma3(&self) -> f64 {
        match self {
            SystemParams::Single(p) => p.gamma3,
            SystemParams::Coupled(p) => p.gamma3,
        }
    }

    /// Slowest emitter rate, which sets the time needed to reach steady state.
    pub fn slowest_emitter_rate(&self) -> f64 {
        match self {
            SystemParams::Single(p) => p.gamma_ee.min(p.gamma_eg),
            SystemParams::Coupled(p) => p
                .gamma_ee_1
                .min(p.gamma_ee_2)
                .min(p.gamma_eg_1)
                .min(p.gamma_eg_2),
        }
    }

    pub fn pumps(&self) -> (Complex64, Complex64) {
        match self {
            SystemParams::Single(p) => (p.eps_p, p.eps_p_prime),
            SystemParams::Coupled(p) => (p.eps_p, p.eps_p_prime),
        }
    }

    /// Both pump amplitudes multiplied by `factor`.
    pub fn with_pumps_scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        match &mut out {
            SystemParams::Single(p) => {
                p.eps_p *= factor;
                p.eps_p_prime *= factor;
            }
            SystemParams::Coupled(p) => {
                p.eps_p *= factor;
                p.eps_p_prime *= factor;
            }
        }
        out
    }

    /// Bare grating: every emitter coupling (and the exchange g) set to zero.
    pub fn without_emitters(&self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut out = *self;
        match &mut out {
            SystemParams::Single(p) => p.f = zero,
            SystemParams::Coupled(p) => {
                p.f1 = zero;
                p.f2 = zero;
                p.g = zero;
            }
        }
        out
    }

    /// Mode 3 tuned onto the mixing frequency, ω₃ = 2ω − ω′.
    pub fn with_resonant_mode3(&self) -> Self {
        let mut out = *self;
        match &mut out {
            SystemParams::Single(p) => p.omega3 = p.mixing_frequency(),
            SystemParams::Coupled(p) => p.omega3 = p.mixing_frequency(),
        }
        out
    }

    pub fn as_single(&self) -> Option<&SingleEmitterParams> {
        match self {
            SystemParams::Single(p) => Some(p),
            SystemParams::Coupled(_) => None,
        }
    }

    pub fn as_coupled(&self) -> Option<&CoupledEmitterParams> {
        match self {
            SystemParams::Coupled(p) => Some(p),
            SystemParams::Single(_) => None,
        }
    }
}
