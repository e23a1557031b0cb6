//! Sites of the A-layer sublattice and the diagonal resolvent Λ.
//!
//! Offsets are rectangular coordinates relative to the Fourier site (1,1).
//! A-layer sites sit at `3·(m,n)`; B-layer sites are reached by one plus step.

use num_complex::Complex64;

use crate::exactnum::CycloNum;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSite {
    pub m: i64,
    pub n: i64,
}

impl LatticeSite {
    pub fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }

    pub fn offset(self) -> (i64, i64) {
        (3 * self.m, 3 * self.n)
    }
}

/// `k + γ_(a,b) + μ`, the symbol of 𝒟̂_k at offset `(a,b)`.
pub fn denominator(offset: (i64, i64), k: &CycloNum) -> CycloNum {
    &(k + &CycloNum::gamma(offset.0, offset.1)) + &CycloNum::mu()
}

/// `Λ(offset) = 1/(k + γ_offset + μ)`.
pub fn lambda_at(offset: (i64, i64), k: &CycloNum) -> Result<CycloNum> {
    denominator(offset, k)
        .inv()
        .map_err(|_| Error::PoleHit(offset))
}

/// Λ at an A-layer site: `1/(k + 3γ_(m,n) + μ)`.
pub fn lambda_value(site: LatticeSite, k: &CycloNum) -> Result<CycloNum> {
    lambda_at(site.offset(), k)
}

/// The floating-point value of `γ_(a,b) + μ`.
pub fn denominator_f64(offset: (i64, i64)) -> Complex64 {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let w2 = w * w;
    w2 * (offset.0 as f64 + 1.0) - w * (offset.1 as f64 + 1.0)
}

/// Spectral parameter `k = ω² k₁ − ω k₂` from rectangular momentum coordinates.
pub fn momentum(k1: f64, k2: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    w * w * k1 - w * k2
}
