//! Squeezed-state dynamics of a damped cantilever coupled to a trapped ion.
//!
//! The two vibrational modes evolve under a non-Hermitian quadratic
//! Hamiltonian. A two-mode squeezed vacuum ansatz stays exact under that
//! evolution, so the state is captured by four complex numbers obeying a
//! small ODE system ([`dynamics`], [`integrator`]). Under the rotating-wave
//! approximation that system is linear and solved in closed form ([`rwa`]).
//! Observables come from Gaussian moment formulas ([`moments`]), and a
//! brute-force truncated Fock-space evolution ([`fock`]) serves as an
//! independent reference.
#![no_std]

extern crate alloc;

pub mod ansatz;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod integrator;
pub mod moments;
pub mod params;
pub mod rwa;

pub use num_complex::Complex64 as C64;

pub use ansatz::{initial_ansatz, AnsatzState};
pub use dynamics::{full_rhs, rwa_rhs, AnsatzDerivative};
pub use error::{Error, Result};
pub use fock::{
    apply_hamiltonian, build_initial_fock, evolve_fock, fock_occupations, FockState,
};
pub use integrator::{integrate, integrate_with, IntegratorConfig, Trajectory, TrajectoryPoint};
pub use moments::{
    mean_occupations, series_norm_partial, series_occupation_partial, state_norm, MomentRecord,
    SqueezeMatrix,
};
pub use params::{ModelKind, SystemParams};
pub use rwa::{eigen_modes, propagate_rwa, rwa_matrix, EigenMode, RwaPropagator};
