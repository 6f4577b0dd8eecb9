//! Physical rates of the coupled cantilever/ion system.
//!
//! All rates are angular frequencies in rad/µs; time is in µs.

use crate::error::{Error, Result};
use crate::C64;

/// The five rates that define either Hamiltonian.
///
/// `H = (ω - iΓ_a) a†a + (ν - iΓ_b) b†b - κ (a + a†)(b + b†)` for the full
/// model, with the coupling reduced to `-κ (a b† + a† b)` under the RWA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cantilever frequency ω.
    pub omega: f64,
    /// Ion vibration frequency ν.
    pub nu: f64,
    /// Coupling constant κ.
    pub kappa: f64,
    /// Cantilever decay coefficient Γ_a.
    pub gamma_a: f64,
    /// Ion decay coefficient Γ_b.
    pub gamma_b: f64,
}

impl SystemParams {
    pub fn new(omega: f64, nu: f64, kappa: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        let params = SystemParams {
            omega,
            nu,
            kappa,
            gamma_a,
            gamma_b,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("omega", self.omega), ("nu", self.nu)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        let non_negative = [
            ("kappa", self.kappa),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                });
            }
        }
        Ok(())
    }

    /// ω - iΓ_a
    #[inline]
    pub fn damped_omega(&self) -> C64 {
        C64::new(self.omega, -self.gamma_a)
    }

    /// ν - iΓ_b
    #[inline]
    pub fn damped_nu(&self) -> C64 {
        C64::new(self.nu, -self.gamma_b)
    }

    /// Exchange the roles of the two modes.
    pub fn mode_swapped(&self) -> Self {
        SystemParams {
            omega: self.nu,
            nu: self.omega,
            kappa: self.kappa,
            gamma_a: self.gamma_b,
            gamma_b: self.gamma_a,
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        SystemParams { kappa, ..self }
    }

    pub fn with_nu(self, nu: f64) -> Self {
        SystemParams { nu, ..self }
    }
}

/// Which Hamiltonian drives the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Keeps the counter-rotating `a†b† + ab` terms.
    Full,
    /// Rotating-wave approximation.
    Rwa,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Full => "full",
            ModelKind::Rwa => "rwa",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rates() {
        assert!(SystemParams::new(19.7, 19.7, 1.8, 0.0197, 0.0197).is_ok());
        assert!(SystemParams::new(0.0, 19.7, 1.8, 0.0, 0.0).is_err());
        assert!(SystemParams::new(19.7, -1.0, 1.8, 0.0, 0.0).is_err());
        assert!(SystemParams::new(19.7, 19.7, -0.1, 0.0, 0.0).is_err());
        assert!(SystemParams::new(19.7, 19.7, 1.8, -1e-3, 0.0).is_err());
        assert!(SystemParams::new(19.7, 19.7, 1.8, 0.0, f64::NAN).is_err());
        // zero coupling and zero damping are allowed
        assert!(SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn swap_is_an_involution() {
        let p = SystemParams::new(19.7, 16.0, 4.0, 0.01, 0.02).unwrap();
        assert_eq!(p.mode_swapped().mode_swapped(), p);
        assert_eq!(p.mode_swapped().damped_omega(), p.damped_nu());
    }
}
