use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A series or closed form was evaluated outside its domain of convergence.
    #[error("argument {value} outside domain: {reason}")]
    Domain { value: f64, reason: &'static str },

    #[error("time grid must start at 0 and be strictly increasing (offending index {index})")]
    InvalidGrid { index: usize },

    /// det(I - M̄M) <= 0: the squeezed state is not normalizable.
    #[error("state norm is singular (det(I - M*M) = {det})")]
    NormSingular { det: f64 },

    /// The squeeze matrix left the unit ball during integration.
    #[error("ansatz breakdown at t = {t}: largest singular value {singular_value}")]
    AnsatzBreakdown { t: f64, singular_value: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// Two RWA eigenfrequencies coincide; the eigenbasis expansion is ill-conditioned.
    #[error("degenerate RWA eigenmodes (separation {separation})")]
    DegenerateModes { separation: f64 },

    #[error("Fock truncation n_max = {n_max} too small: captured mass {captured}")]
    TruncationTooSmall { n_max: usize, captured: f64 },

    #[error("Fock truncation leakage {leakage} exceeds bound at t = {t}")]
    LeakageExceeded { t: f64, leakage: f64 },

    #[error("Fock evolution not converged in dt: halving changed occupations by {change}")]
    NotConverged { change: f64 },

    #[error("Fock state has zero norm")]
    ZeroNorm,
}
