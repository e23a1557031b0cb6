//! Exact and certified computations for the chiral model of twisted bilayer
//! graphene: lattice traces of the Birman-Schwinger operator, its regularized
//! determinant, a computer-assisted bound on the first real magic angle, and
//! band diagnostics on truncated Fourier windows.

pub mod exactnum;
pub mod fredholm;
pub mod model;
pub mod spectra;
pub mod traces;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient of order {0} lies outside the retained window")]
    TruncatedWindow(i32),
    #[error("evaluation point hits a pole at site {0:?}")]
    PoleHit((i64, i64)),
    #[error("evaluation point within {0:e} of a pole")]
    PoleProximity(f64),
    #[error("trace is not a rational multiple of pi/sqrt(3): {0}")]
    NonRational(String),
    #[error("tail series diverges: {0}")]
    Divergence(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("inconsistent symmetry data: {0}")]
    Symmetry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
