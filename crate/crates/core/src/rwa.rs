//! Closed-form solution of the linear RWA equations.
//!
//! Under the RWA the pairing amplitudes obey `i d/dt α = K α` with
//!
//! ```text
//!     [ 2(ω-iΓ_a)        -κ             0      ]
//! K = [   -2κ     ω+ν-i(Γ_a+Γ_b)      -2κ      ]
//!     [    0             -κ         2(ν-iΓ_b)  ]
//! ```
//!
//! Because `K₂₂ = (K₁₁ + K₃₃)/2` the characteristic polynomial factors as
//! `(K₂₂ - λ) [(K₁₁ - λ)(K₃₃ - λ) - 4κ²]`, so `λ = K₂₂` is always an
//! eigenvalue and the other two come from a quadratic. The normal-mode
//! splitting is `2 sqrt(((K₁₁-K₃₃)/2)² + 4κ²)`, i.e. `4κ` at resonance with
//! equal damping. Solutions are written as `e^{Ωt}` with `Ω = -iλ`.


use crate::ansatz::{initial_ansatz, AnsatzState};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::C64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub type Matrix3 = [[C64; 3]; 3];
pub type Vector3 = [C64; 3];

/// Relative separation below which two eigenfrequencies count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

const MINUS_I: C64 = C64::new(0.0, -1.0);

/// One exponential solution `vec · e^{Ω t}` of the RWA system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    /// Ω [1/µs]
    pub omega_big: C64,
    /// (α₁₀, α₂₀, α₃₀), unit 2-norm.
    pub vec: Vector3,
}

pub fn rwa_matrix(params: &SystemParams) -> Matrix3 {
    let k = C64::new(params.kappa, 0.0);
    let zero = C64::new(0.0, 0.0);
    let wa = params.damped_omega();
    let wb = params.damped_nu();
    [
        [wa * 2.0, -k, zero],
        [-k * 2.0, wa + wb, -k * 2.0],
        [zero, -k, wb * 2.0],
    ]
}

fn cross(u: &Vector3, v: &Vector3) -> Vector3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn norm3(v: &Vector3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Null vector of the (numerically) singular matrix `K - λI`, taken as the
/// largest cross product of two of its rows.
fn null_vector(k: &Matrix3, lambda: C64) -> Vector3 {
    let mut a = *k;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let candidates = [cross(&a[0], &a[1]), cross(&a[0], &a[2]), cross(&a[1], &a[2])];
    let mut best = candidates[0];
    let mut best_norm = norm3(&best);
    for c in &candidates[1..] {
        let n = norm3(c);
        if n > best_norm {
            best = *c;
            best_norm = n;
        }
    }
    if best_norm == 0.0 {
        // K - λI has rank <= 1: every row is parallel. Pick a unit vector
        // orthogonal (bilinearly) to the nonzero row, or e₁ if A = 0.
        let row = a
            .iter()
            .copied()
            .max_by(|x, y| norm3(x).total_cmp(&norm3(y)))
            .unwrap_or(a[0]);
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        best = if norm3(&row) == 0.0 {
            [one, zero, zero]
        } else if row[0].norm() >= row[1].norm() {
            [-row[1], row[0], zero]
        } else {
            [zero, -row[2], row[1]]
        };
        best_norm = norm3(&best);
    }
    [best[0] / best_norm, best[1] / best_norm, best[2] / best_norm]
}

/// The three exponential modes, ordered so that mode 1 is `Ω = -(Γ_a+Γ_b) - i(ω+ν)`
/// and modes 2/3 are the lower/upper normal modes (`λ = K₂₂ ∓ s`).
pub fn eigen_modes(params: &SystemParams) -> Result<[EigenMode; 3]> {
    params.validate()?;
    let k = rwa_matrix(params);
    let center = C64::new(params.omega + params.nu, -(params.gamma_a + params.gamma_b));
    let half_gap = (k[0][0] - k[2][2]) * 0.5;
    let split = (half_gap * half_gap + 4.0 * params.kappa * params.kappa).sqrt();
    let lambdas = [center, center - split, center + split];

    let omegas = lambdas.map(|l| MINUS_I * l);
    let scale = omegas.iter().map(|o| o.norm()).fold(0.0, f64::max);
    let mut separation = f64::INFINITY;
    for i in 0..3 {
        for j in (i + 1)..3 {
            separation = separation.min((omegas[i] - omegas[j]).norm());
        }
    }
    if separation <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateModes { separation });
    }

    let mut modes = [EigenMode {
        omega_big: omegas[0],
        vec: [C64::new(0.0, 0.0); 3],
    }; 3];
    for (mode, (&lambda, &omega_big)) in modes.iter_mut().zip(lambdas.iter().zip(omegas.iter())) {
        *mode = EigenMode {
            omega_big,
            vec: null_vector(&k, lambda),
        };
    }
    Ok(modes)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve3(mut a: Matrix3, mut b: Vector3) -> Option<Vector3> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let factor = a[row][col] / a[col][col];
            for c in col..3 {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = [C64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for c in (row + 1)..3 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Eigenmode expansion of a fixed initial α-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaPropagator {
    rho: C64,
    modes: [EigenMode; 3],
    coefficients: Vector3,
}

impl RwaPropagator {
    pub fn new(initial: &AnsatzState, params: &SystemParams) -> Result<Self> {
        let modes = eigen_modes(params)?;
        let columns: Matrix3 = core::array::from_fn(|r| core::array::from_fn(|c| modes[c].vec[r]));
        let alpha0 = [initial.alpha1, initial.alpha2, initial.alpha3];
        let coefficients = solve3(columns, alpha0).ok_or(Error::DegenerateModes { separation: 0.0 })?;
        Ok(RwaPropagator {
            rho: initial.rho,
            modes,
            coefficients,
        })
    }

    pub fn modes(&self) -> &[EigenMode; 3] {
        &self.modes
    }

    /// Expansion coefficients `c_j` with `α(0) = Σ c_j vec_j`.
    pub fn coefficients(&self) -> &Vector3 {
        &self.coefficients
    }

    pub fn at(&self, t: f64) -> AnsatzState {
        let mut alpha = [C64::new(0.0, 0.0); 3];
        for (mode, &c) in self.modes.iter().zip(self.coefficients.iter()) {
            let weight = c * (mode.omega_big * t).exp();
            for (a, v) in alpha.iter_mut().zip(mode.vec.iter()) {
                *a += weight * v;
            }
        }
        AnsatzState::new(self.rho, alpha[0], alpha[1], alpha[2])
    }
}

/// Analytic RWA state at time `t` starting from the squeezed cantilever
/// vacuum with mean occupation `n_a0`.
pub fn propagate_rwa(n_a0: f64, params: &SystemParams, t: f64) -> Result<AnsatzState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain {
            value: t,
            reason: "propagation time must be finite and >= 0",
        });
    }
    let initial = initial_ansatz(n_a0)?;
    if t == 0.0 {
        return Ok(initial);
    }
    Ok(RwaPropagator::new(&initial, params)?.at(t))
}
