//! Right-hand sides of the ansatz equations of motion.
//!
//! Substituting the squeezed-state ansatz into `i d|t⟩/dt = H|t⟩` and
//! matching the coefficients of `|A⟩`, `a†²|A⟩`, `a†b†|A⟩` and `b†²|A⟩`
//! closes the dynamics on (ρ, α₁, α₂, α₃). The full Hamiltonian gives a
//! Riccati-type system; the RWA one is linear in the α's with ρ constant.

use crate::ansatz::AnsatzState;
use crate::params::{ModelKind, SystemParams};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Time derivatives of the ansatz parameters [1/µs].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzDerivative {
    pub d_rho: C64,
    pub d_alpha1: C64,
    pub d_alpha2: C64,
    pub d_alpha3: C64,
}

impl AnsatzDerivative {
    pub fn to_real(&self) -> [f64; 8] {
        AnsatzState::new(self.d_rho, self.d_alpha1, self.d_alpha2, self.d_alpha3).to_real()
    }

    pub fn is_finite(&self) -> bool {
        self.to_real().iter().all(|x| x.is_finite())
    }
}

/// Equations of motion including the counter-rotating terms.
pub fn full_rhs(state: &AnsatzState, params: &SystemParams) -> AnsatzDerivative {
    let AnsatzState {
        rho,
        alpha1: a1,
        alpha2: a2,
        alpha3: a3,
    } = *state;
    let k = params.kappa;
    let wa = params.damped_omega();
    let wb = params.damped_nu();

    AnsatzDerivative {
        d_rho: I * k * a2 * rho,
        d_alpha1: -I * (wa * 2.0 * a1 - a2 * k - a2 * a1 * (2.0 * k)),
        d_alpha2: -I
            * ((wa + wb) * a2 - k - a2 * a2 * k - a1 * a3 * (4.0 * k) - a1 * (2.0 * k)
                - a3 * (2.0 * k)),
        d_alpha3: -I * (wb * 2.0 * a3 - a2 * k - a2 * a3 * (2.0 * k)),
    }
}

/// Equations of motion under the rotating-wave approximation.
pub fn rwa_rhs(state: &AnsatzState, params: &SystemParams) -> AnsatzDerivative {
    let AnsatzState {
        alpha1: a1,
        alpha2: a2,
        alpha3: a3,
        ..
    } = *state;
    let k = params.kappa;
    let wa = params.damped_omega();
    let wb = params.damped_nu();

    AnsatzDerivative {
        d_rho: C64::new(0.0, 0.0),
        d_alpha1: -I * (wa * 2.0 * a1 - a2 * k),
        d_alpha2: -I * ((wa + wb) * a2 - a1 * (2.0 * k) - a3 * (2.0 * k)),
        d_alpha3: -I * (wb * 2.0 * a3 - a2 * k),
    }
}

pub fn rhs(model: ModelKind) -> fn(&AnsatzState, &SystemParams) -> AnsatzDerivative {
    match model {
        ModelKind::Full => full_rhs,
        ModelKind::Rwa => rwa_rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::initial_ansatz;
    use proptest::prelude::*;

    fn fig2() -> SystemParams {
        SystemParams::new(19.7, 19.7, 1.8, 0.0197, 0.0197).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn full_rhs_at_initial_state() {
        let s = initial_ansatz(6.0).unwrap();
        let d = full_rhs(&s, &fig2());
        assert_eq!(d.d_rho, C64::new(0.0, 0.0));
        // -i (39.4 - 0.0394 i) α₁
        let a1 = 0.5 * (6.0f64 / 7.0).sqrt();
        assert!(close(d.d_alpha1, C64::new(-0.0394 * a1, -39.4 * a1), 1e-12));
        assert!(close(d.d_alpha1, C64::new(-0.018239, -18.2387), 1e-4));
        // +i κ (1 + 2α₁)
        assert!(close(d.d_alpha2, C64::new(0.0, 1.8 * (1.0 + 2.0 * a1)), 1e-12));
        assert!(close(d.d_alpha2, C64::new(0.0, 3.46648), 1e-5));
        assert!(close(d.d_alpha3, C64::new(0.0, 0.0), 0.0));
    }

    #[test]
    fn rwa_rhs_at_initial_state() {
        let s = initial_ansatz(6.0).unwrap();
        let d = rwa_rhs(&s, &fig2());
        assert_eq!(d.d_rho, C64::new(0.0, 0.0));
        let a1 = 0.5 * (6.0f64 / 7.0).sqrt();
        assert!(close(d.d_alpha2, C64::new(0.0, 2.0 * 1.8 * a1), 1e-12));
        assert!(close(d.d_alpha2, C64::new(0.0, 1.66648), 1e-5));
    }

    #[test]
    fn decoupled_rotation() {
        let p = fig2().with_kappa(0.0);
        let s = AnsatzState::new(
            C64::new(0.7, 0.1),
            C64::new(0.2, -0.1),
            C64::new(0.05, 0.3),
            C64::new(-0.1, 0.2),
        );
        for d in [full_rhs(&s, &p), rwa_rhs(&s, &p)] {
            let expected = -I * p.damped_omega() * 2.0 * s.alpha1;
            assert!(close(d.d_alpha1, expected, 1e-15));
        }
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(re, im)| C64::new(re, im))
    }

    proptest! {
        #[test]
        fn difference_is_the_counter_rotating_part(
            rho in arb_c(), a1 in arb_c(), a2 in arb_c(), a3 in arb_c(),
            omega in 1.0..30.0f64, nu in 1.0..30.0f64, kappa in 0.0..6.0f64,
            ga in 0.0..0.5f64, gb in 0.0..0.5f64,
        ) {
            let p = SystemParams::new(omega, nu, kappa, ga, gb).unwrap();
            let s = AnsatzState::new(rho, a1, a2, a3);
            let full = full_rhs(&s, &p);
            let rwa = rwa_rhs(&s, &p);
            let tol = 1e-12 * (1.0 + omega + nu);
            prop_assert!(close(full.d_rho - rwa.d_rho, I * kappa * a2 * rho, tol));
            prop_assert!(close(full.d_alpha1 - rwa.d_alpha1, -I * (-2.0 * kappa * a2 * a1), tol));
            prop_assert!(close(
                full.d_alpha2 - rwa.d_alpha2,
                -I * (-kappa) * (1.0 + a2 * a2 + 4.0 * a1 * a3),
                tol
            ));
            prop_assert!(close(full.d_alpha3 - rwa.d_alpha3, -I * (-2.0 * kappa * a2 * a3), tol));
        }
    }
}
