//! Norm and mean occupations of the two-mode Gaussian ansatz.
//!
//! Writing the exponent as `½ a†ᵀ M a†` with `a† = (a†, b†)` and
//! `M = [[2α₁, α₂], [α₂, 2α₃]]`, the Gram matrix `G = M̄M = M†M` is
//! Hermitian and positive semidefinite. Then
//!
//! * `⟨t|t⟩ = |ρ|² det(I - G)^(-1/2)`
//! * `⟨a_i† a_i⟩ / ⟨t|t⟩ = [G (I - G)^(-1)]_ii`
//!
//! The single-mode series identities used to fix the initial condition are
//! provided as partial sums so the closed forms can be checked term by term.


use crate::ansatz::AnsatzState;
use crate::error::{Error, Result};
use crate::C64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Symmetric 2×2 matrix `[[2α₁, α₂], [α₂, 2α₃]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeMatrix {
    m11: C64,
    m12: C64,
    m22: C64,
}

impl SqueezeMatrix {
    pub fn new(alpha1: C64, alpha2: C64, alpha3: C64) -> Self {
        SqueezeMatrix {
            m11: alpha1 * 2.0,
            m12: alpha2,
            m22: alpha3 * 2.0,
        }
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        [[self.m11, self.m12], [self.m12, self.m22]]
    }

    /// `(g11, g12, g22)` of `G = M̄M`; `g11`, `g22` are real.
    fn gram(&self) -> (f64, C64, f64) {
        let g11 = self.m11.norm_sqr() + self.m12.norm_sqr();
        let g22 = self.m12.norm_sqr() + self.m22.norm_sqr();
        let g12 = self.m11.conj() * self.m12 + self.m12.conj() * self.m22;
        (g11, g12, g22)
    }

    pub fn largest_singular_value(&self) -> f64 {
        let (g11, g12, g22) = self.gram();
        let half_gap = 0.5 * (g11 - g22);
        let lambda = 0.5 * (g11 + g22) + (half_gap * half_gap + g12.norm_sqr()).sqrt();
        lambda.max(0.0).sqrt()
    }

    /// `det(I - M̄M)`, positive exactly when the state is normalizable.
    pub fn det_i_minus_gram(&self) -> f64 {
        let (g11, g12, g22) = self.gram();
        (1.0 - g11) * (1.0 - g22) - g12.norm_sqr()
    }
}

/// Norm and normalized occupations of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    /// ⟨t|t⟩
    pub norm: f64,
    /// ⟨a†a⟩ / ⟨t|t⟩
    pub n_a: f64,
    /// ⟨b†b⟩ / ⟨t|t⟩
    pub n_b: f64,
}

fn checked_det(state: &AnsatzState) -> Result<f64> {
    let det = state.squeeze_matrix().det_i_minus_gram();
    if !(det > 0.0) || state.squeeze_matrix().largest_singular_value() >= 1.0 {
        return Err(Error::NormSingular { det });
    }
    Ok(det)
}

pub fn state_norm(state: &AnsatzState) -> Result<f64> {
    let det = checked_det(state)?;
    Ok(state.rho.norm_sqr() / det.sqrt())
}

pub fn mean_occupations(state: &AnsatzState) -> Result<MomentRecord> {
    let det = checked_det(state)?;
    let (g11, g12, g22) = state.squeeze_matrix().gram();
    // G (I - G)^{-1} with (I - G)^{-1} = [[1 - g22, g12], [g21, 1 - g11]] / det
    let n_a = (g11 * (1.0 - g22) + g12.norm_sqr()) / det;
    let n_b = (g22 * (1.0 - g11) + g12.norm_sqr()) / det;
    Ok(MomentRecord {
        norm: state.rho.norm_sqr() / det.sqrt(),
        n_a: n_a.max(0.0),
        n_b: n_b.max(0.0),
    })
}

fn check_series_argument(x: f64) -> Result<()> {
    if !(x.abs() < 0.5) {
        return Err(Error::Domain {
            value: x,
            reason: "series diverges for |x| >= 1/2",
        });
    }
    Ok(())
}

/// Partial sum `Σ_{n<n_terms} (2n)!/(n!)² x^(2n)`, which tends to `(1-4x²)^(-1/2)`.
pub fn series_norm_partial(x: f64, n_terms: usize) -> Result<f64> {
    check_series_argument(x)?;
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..n_terms {
        sum += term;
        let n = n as f64;
        term *= x2 * (2.0 * n + 1.0) * (2.0 * n + 2.0) / ((n + 1.0) * (n + 1.0));
    }
    Ok(sum)
}

/// Partial sum `Σ_{n<n_terms} (2n+1)!/(n!)² x^(2n)`, which tends to `(1-4x²)^(-3/2)`.
pub fn series_occupation_partial(x: f64, n_terms: usize) -> Result<f64> {
    check_series_argument(x)?;
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..n_terms {
        sum += term;
        let n = n as f64;
        term *= x2 * (2.0 * n + 2.0) * (2.0 * n + 3.0) / ((n + 1.0) * (n + 1.0));
    }
    Ok(sum)
}
