//! Exact number types: rationals, the cyclotomic field Q(ζ₁₂), polynomials in
//! Π = π/√3, truncated Laurent series and rational intervals.

pub mod cyclo;
pub mod interval;
pub mod laurent;
pub mod pipoly;
pub mod qomega;
pub mod rational;

pub use cyclo::CycloNum;
pub use interval::{pi_over_sqrt3, RatInterval};
pub use laurent::LaurentSeries;
pub use pipoly::PiPoly;
pub use qomega::QOmega;
pub use rational::{format_rational, parse_rational};
