//! The four reference parameter sets, fig1 to fig4.
//!
//! Frequencies and rates are in units of ω. Fields a preset does not pin
//! down are inherited from fig1, with γ_ee = 2γ_eg.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::params::{CoupledEmitterParams, SingleEmitterParams, SystemParams};
use crate::sweep::{BaselineKind, SweepSpec, SweepTarget};

/// Default pump amplitude for both drives (weak-conversion regime).
pub const DEFAULT_PUMP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Suppression with mode 3 on the mixing resonance.
    Fig1,
    /// Excited population over the same parameters as `Fig1`.
    Fig2,
    /// Enhancement with mode 3 off resonance (ω₃ = 1.85).
    Fig3,
    /// Enhancement with two coupled emitters (ω₃ = 1.90).
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn params(self) -> SystemParams {
        match self {
            Preset::Fig1 | Preset::Fig2 => SystemParams::Single(fig1_single()),
            Preset::Fig3 => SystemParams::Single(SingleEmitterParams {
                omega3: 1.85,
                omega_eg: 1.52,
                ..fig1_single()
            }),
            Preset::Fig4 => SystemParams::Coupled(CoupledEmitterParams {
                omega1: 1.0,
                omega2: 0.5,
                omega3: 1.90,
                omega_eg_1: 1.5732,
                omega_eg_2: 1.5810,
                gamma1: 0.01,
                gamma2: 0.01,
                gamma3: 0.01,
                gamma_ee_1: 1e-5,
                gamma_ee_2: 1e-5,
                gamma_eg_1: 1e-5 / 2.0,
                gamma_eg_2: 1e-5 / 2.0,
                chi: 1e-5,
                f1: Complex64::new(0.1909, 0.0),
                f2: Complex64::new(0.1909, 0.0),
                g: Complex64::new(0.1000, 0.0101),
                eps_p: Complex64::new(DEFAULT_PUMP, 0.0),
                eps_p_prime: Complex64::new(DEFAULT_PUMP, 0.0),
                omega_drive: 1.0,
                omega_drive_prime: 0.5,
            }),
        }
    }

    /// The sweep behind the figure's x-axis.
    pub fn sweep(self) -> SweepSpec {
        let base_params = self.params();
        match self {
            Preset::Fig1 | Preset::Fig2 => SweepSpec {
                target: SweepTarget::OmegaEg,
                start: 1.3,
                stop: 1.7,
                n_points: 801,
                base_params,
            },
            Preset::Fig3 => SweepSpec {
                target: SweepTarget::OmegaEg,
                start: 1.40,
                stop: 1.70,
                n_points: 1201,
                base_params,
            },
            Preset::Fig4 => SweepSpec {
                target: SweepTarget::OmegaEg1,
                start: 1.40,
                stop: 1.70,
                n_points: 1201,
                base_params,
            },
        }
    }

    /// The unit reference of the figure's y-axis.
    pub fn baseline(self) -> BaselineKind {
        match self {
            Preset::Fig1 | Preset::Fig2 => BaselineKind::ResonantNoEmitter,
            Preset::Fig3 | Preset::Fig4 => BaselineKind::OffResonantNoEmitter,
        }
    }
}

fn fig1_single() -> SingleEmitterParams {
    SingleEmitterParams {
        omega1: 1.0,
        omega2: 0.5,
        omega3: 1.5,
        omega_eg: 1.5,
        gamma1: 0.01,
        gamma2: 0.01,
        gamma3: 0.01,
        gamma_ee: 2e-5,
        gamma_eg: 1e-5,
        chi: 1e-5,
        f: Complex64::new(0.1, 0.0),
        eps_p: Complex64::new(DEFAULT_PUMP, 0.0),
        eps_p_prime: Complex64::new(DEFAULT_PUMP, 0.0),
        omega_drive: 1.0,
        omega_drive_prime: 0.5,
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown preset `{0}` (expected fig1, fig2, fig3 or fig4)")]
pub struct UnknownPreset(pub String);

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            other => Err(UnknownPreset(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let p = *Preset::Fig1.params().as_single().unwrap();
        assert_eq!((p.omega1, p.omega2, p.omega3), (1.0, 0.5, 1.5));
        assert_eq!((p.gamma1, p.gamma2, p.gamma3), (0.01, 0.01, 0.01));
        assert_eq!(p.gamma_eg, 0.00001);
        assert_eq!(p.chi, 0.00001);
        assert_eq!(p.f, Complex64::new(0.1, 0.0));

        let p3 = *Preset::Fig3.params().as_single().unwrap();
        assert_eq!(p3.omega3, 1.85);
        assert_eq!(p3.f, Complex64::new(0.1, 0.0));

        let p4 = *Preset::Fig4.params().as_coupled().unwrap();
        assert_eq!(p4.omega3, 1.90);
        assert_eq!(p4.omega_eg_2, 1.5810);
        assert_eq!(p4.f1, Complex64::new(0.1909, 0.0));
        assert_eq!(p4.f2, Complex64::new(0.1909, 0.0));
        assert_eq!(p4.g, Complex64::new(0.1000, 0.0101));
        assert_eq!(p4.gamma_ee_1, 0.00001);
        assert_eq!(p4.gamma_eg_1, p4.gamma_ee_1 / 2.0);
    }

    #[test]
    fn presets_validate_and_parse() {
        for preset in Preset::ALL {
            preset.params().validate().unwrap();
            assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
            preset.sweep().validate().unwrap();
        }
        assert!("fig5".parse::<Preset>().is_err());
    }
}
