//! The squeezed-state trial wavefunction
//! `|t⟩ = ρ exp(α₁ a†² + α₂ a†b† + α₃ b†²) |0⟩`.


use crate::error::{Error, Result};
use crate::moments::SqueezeMatrix;
use crate::C64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Complex variational parameters of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzState {
    pub rho: C64,
    /// Cantilever self-squeezing, coefficient of `a†²`.
    pub alpha1: C64,
    /// Cross-mode pairing, coefficient of `a†b†`.
    pub alpha2: C64,
    /// Ion self-squeezing, coefficient of `b†²`.
    pub alpha3: C64,
}

impl AnsatzState {
    pub const VACUUM: AnsatzState = AnsatzState {
        rho: C64::new(1.0, 0.0),
        alpha1: C64::new(0.0, 0.0),
        alpha2: C64::new(0.0, 0.0),
        alpha3: C64::new(0.0, 0.0),
    };

    pub fn new(rho: C64, alpha1: C64, alpha2: C64, alpha3: C64) -> Self {
        AnsatzState {
            rho,
            alpha1,
            alpha2,
            alpha3,
        }
    }

    pub fn squeeze_matrix(&self) -> SqueezeMatrix {
        SqueezeMatrix::new(self.alpha1, self.alpha2, self.alpha3)
    }

    /// Exchange the roles of the cantilever and the ion (α₁ ↔ α₃).
    pub fn mode_swapped(&self) -> Self {
        AnsatzState {
            rho: self.rho,
            alpha1: self.alpha3,
            alpha2: self.alpha2,
            alpha3: self.alpha1,
        }
    }

    /// `[Re ρ, Im ρ, Re α₁, Im α₁, Re α₂, Im α₂, Re α₃, Im α₃]`
    pub fn to_real(&self) -> [f64; 8] {
        [
            self.rho.re,
            self.rho.im,
            self.alpha1.re,
            self.alpha1.im,
            self.alpha2.re,
            self.alpha2.im,
            self.alpha3.re,
            self.alpha3.im,
        ]
    }

    pub fn from_real(y: &[f64; 8]) -> Self {
        AnsatzState {
            rho: C64::new(y[0], y[1]),
            alpha1: C64::new(y[2], y[3]),
            alpha2: C64::new(y[4], y[5]),
            alpha3: C64::new(y[6], y[7]),
        }
    }

    pub fn components(&self) -> [C64; 4] {
        [self.rho, self.alpha1, self.alpha2, self.alpha3]
    }

    pub fn is_finite(&self) -> bool {
        self.to_real().iter().all(|x| x.is_finite())
    }

    /// Largest componentwise modulus of the difference to `other`.
    pub fn max_abs_diff(&self, other: &AnsatzState) -> f64 {
        self.components()
            .iter()
            .zip(other.components().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Normalized squeezed vacuum of the cantilever with mean occupation `n_a0`,
/// the ion in its ground state.
///
/// Positive roots are taken for both ρ(0) and α₁(0).
pub fn initial_ansatz(n_a0: f64) -> Result<AnsatzState> {
    if !(n_a0.is_finite() && n_a0 >= 0.0) {
        return Err(Error::Domain {
            value: n_a0,
            reason: "initial occupation must be finite and >= 0",
        });
    }
    let rho = (n_a0 + 1.0).powf(-0.25);
    let alpha1 = 0.5 * (n_a0 / (n_a0 + 1.0)).sqrt();
    Ok(AnsatzState {
        rho: C64::new(rho, 0.0),
        alpha1: C64::new(alpha1, 0.0),
        alpha2: C64::new(0.0, 0.0),
        alpha3: C64::new(0.0, 0.0),
    })
}
