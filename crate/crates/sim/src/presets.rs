//! Parameter sets of the four published figure regimes.

use cantilever_ion_core::SystemParams;

pub const FIGURES: [u8; 4] = [2, 3, 4, 5];

pub const DEFAULT_T_MAX: f64 = 3.0;
pub const DEFAULT_DT_OUT: f64 = 0.01;
pub const DEFAULT_NA0: f64 = 6.0;

/// `(ω, ν, κ, Γ_a, Γ_b)` for figure 2–5, in rad/µs.
pub fn figure_params(figure: u8) -> Option<SystemParams> {
    let (nu, kappa) = match figure {
        2 => (19.7, 1.8),
        3 => (19.7, 5.0),
        4 => (16.0, 4.0),
        5 => (16.0, 5.0),
        _ => return None,
    };
    Some(SystemParams {
        omega: 19.7,
        nu,
        kappa,
        gamma_a: 0.0197,
        gamma_b: 0.0197,
    })
}
