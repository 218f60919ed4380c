//! Universal counterdiabatic driving.
//!
//! The adiabatic gauge potential (AGP) of a driven Hamiltonian `H(lambda)` is
//! approximated by an odd Chebyshev polynomial of the Liouvillian
//! `L = [H, .]` applied to `dH/dlambda`, with coefficients obtained from a
//! least-squares fit of `-1/x` on a frequency window `[zeta, 1]`. The crate
//! provides the pieces needed to build and test such protocols:
//!
//! * [`pauli`]: sparse Pauli-string operators.
//! * [`models`]: annealing Hamiltonians and schedules.
//! * [`fit`]: the Chebyshev fits of `-1/x`.
//! * [`spectral`]: exact diagonalization, spectral functions, exact and
//!   variational AGPs.
//! * [`free_fermion`]: momentum-space solver for the Ising families.
//! * [`evolution`]: AGP assembly and many-body counterdiabatic dynamics.
//! * [`scaling`]: window optimization and asymptote fits.
//! * [`krylov`]: Lanczos coefficients of operator growth.

pub mod chebyshev;
pub mod ed;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod free_fermion;
pub mod integrate;
pub mod krylov;
pub mod linalg;
pub mod models;
pub mod optimize;
pub mod pauli;
pub mod protocol;
pub mod quadrature;
pub mod scaling;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use fit::{cheb_to_monomial, eval_fit, fit_inverse, ChebFit, FitMode, MonomialCoeffs};
pub use models::{dlambda_h, hamiltonian, omega_max, Boundary, ModelKind, ModelSpec, Schedule};
pub use pauli::{Axis, PauliOperator, PauliString};
pub use scalar::Real;

/// Complex scalar used by the dense backends.
pub type C64 = num_complex::Complex<f64>;

pub type PauliOp = PauliOperator<f64>;
pub type PauliOp32 = PauliOperator<f32>;
pub type ChebFit64 = ChebFit<f64>;
pub type ChebFit32 = ChebFit<f32>;
