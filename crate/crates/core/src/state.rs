use num_complex::Complex64;

/// Positivity slack allowed on |ρ_ge|² ≤ ρ_ee(1 − ρ_ee) and on the range of ρ_ee.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Reduced density matrix of one two-level emitter.
///
/// Only ρ_ge and ρ_ee are stored: ρ_gg is always `1 - rho_ee` and ρ_eg is
/// always `rho_ge.conj()`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmitterState {
    pub rho_ge: Complex64,
    pub rho_ee: f64,
}

impl EmitterState {
    pub fn rho_gg(&self) -> f64 {
        1.0 - self.rho_ee
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge.conj()
    }

    /// Population inversion y = ρ_ee − ρ_gg.
    pub fn inversion(&self) -> f64 {
        2.0 * self.rho_ee - 1.0
    }

    /// How far this state lies outside the set of physical density matrices.
    /// Zero or negative means physical.
    pub fn positivity_excess(&self) -> f64 {
        let coherence = self.rho_ge.norm_sqr() - self.rho_ee * (1.0 - self.rho_ee);
        let below = -self.rho_ee;
        let above = self.rho_ee - 1.0;
        coherence.max(below).max(above)
    }
}

/// Mode envelopes α̃₁, α̃₂, α̃₃ plus one or two emitters.
///
/// The same shape is used for time derivatives, in which case the emitter
/// "populations" are rates and carry no range constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub alpha: [Complex64; 3],
    pub emitters: Vec<EmitterState>,
}

impl HybridState {
    /// Everything in the ground state with empty modes.
    pub fn zero(n_emitters: usize) -> Self {
        Self {
            alpha: [Complex64::new(0.0, 0.0); 3],
            emitters: vec![EmitterState::default(); n_emitters],
        }
    }

    pub fn fwm_intensity(&self) -> f64 {
        self.alpha[2].norm_sqr()
    }

    pub fn flat_len(n_emitters: usize) -> usize {
        6 + 3 * n_emitters
    }

    /// Packs into `[Re α₁, Im α₁, …, Re ρ_ge, Im ρ_ge, ρ_ee, …]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::flat_len(self.emitters.len()));
        for a in &self.alpha {
            out.push(a.re);
            out.push(a.im);
        }
        for e in &self.emitters {
            out.push(e.rho_ge.re);
            out.push(e.rho_ge.im);
            out.push(e.rho_ee);
        }
        out
    }

    pub fn from_flat(y: &[f64]) -> Self {
        debug_assert!(y.len() >= 6 && (y.len() - 6).is_multiple_of(3));
        let alpha = [
            Complex64::new(y[0], y[1]),
            Complex64::new(y[2], y[3]),
            Complex64::new(y[4], y[5]),
        ];
        let emitters = y[6..]
            .chunks_exact(3)
            .map(|c| EmitterState {
                rho_ge: Complex64::new(c[0], c[1]),
                rho_ee: c[2],
            })
            .collect();
        Self { alpha, emitters }
    }

    /// Largest positivity excess over the emitters, with its index.
    pub fn worst_positivity(&self) -> Option<(usize, f64)> {
        self.emitters
            .iter()
            .map(EmitterState::positivity_excess)
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn is_physical(&self) -> bool {
        self.worst_positivity()
            .is_none_or(|(_, excess)| excess <= POSITIVITY_TOL)
    }

    pub fn norm_inf(&self) -> f64 {
        self.alpha
            .iter()
            .map(|a| a.norm())
            .chain(
                self.emitters
                    .iter()
                    .flat_map(|e| [e.rho_ge.norm(), e.rho_ee.abs()]),
            )
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn flat_round_trip(v in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let s = HybridState::from_flat(&v);
            prop_assert_eq!(s.emitters.len(), 2);
            prop_assert_eq!(s.to_flat(), v);
        }

        #[test]
        fn pure_states_sit_on_the_boundary(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU) {
            // |ψ⟩ = cos(θ/2)|g⟩ + e^{iφ} sin(θ/2)|e⟩
            let c = (theta / 2.0).cos();
            let s = (theta / 2.0).sin();
            let e = EmitterState {
                rho_ge: Complex64::from_polar(c * s, -phi),
                rho_ee: s * s,
            };
            prop_assert!(e.positivity_excess().abs() < 1e-15);
            prop_assert!((e.rho_ee + e.rho_gg() - 1.0).abs() == 0.0);
        }
    }

    #[test]
    fn detects_unphysical_coherence() {
        let e = EmitterState {
            rho_ge: Complex64::new(0.5, 0.0),
            rho_ee: 0.1,
        };
        assert!(e.positivity_excess() > 0.1);
        let s = HybridState {
            alpha: [Complex64::default(); 3],
            emitters: vec![EmitterState::default(), e],
        };
        assert_eq!(s.worst_positivity().unwrap().0, 1);
        assert!(!s.is_physical());
        assert!(HybridState::zero(2).is_physical());
    }
}
