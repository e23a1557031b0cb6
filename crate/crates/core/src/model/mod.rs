//! Potentials, lattice geometry, the Â_k stencil and walk enumeration.

pub mod lattice;
pub mod potential;
pub mod stencil;
pub mod walks;

pub use lattice::{lambda_value, LatticeSite};
pub use potential::{Mode, Potential, PotentialFile, Shift};
pub use stencil::{build_stencil, CompositeTerm, Stencil, Step};
pub use walks::{count_closed_walks, enumerate_theta, enumerate_theta_par, Walk};
