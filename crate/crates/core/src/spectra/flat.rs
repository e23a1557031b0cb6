//! Flat-band and band-structure checks through singular values of `L(α,k)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::op::{block_operator, gamma_f64};
use super::singular::{smallest_singular_values, IterOptions};
use crate::model::Potential;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSample {
    pub k1: f64,
    pub k2: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatBandReport {
    pub alpha: f64,
    pub grid: usize,
    #[serde(rename = "M")]
    pub m: i64,
    pub max_min_singular: f64,
    pub per_k: Vec<KSample>,
}

/// `k_j = −3/2 + 3j/G`, one period of the dual lattice in each direction.
pub fn k_grid(grid: usize) -> Vec<(f64, f64)> {
    let step = 3.0 / grid as f64;
    let mut out = Vec::with_capacity(grid * grid);
    for a in 0..grid {
        for b in 0..grid {
            out.push((-1.5 + step * a as f64, -1.5 + step * b as f64));
        }
    }
    out
}

/// `k = ω²k₁ − ωk₂`.
pub fn k_point(k1: f64, k2: f64) -> Complex64 {
    gamma_f64(k1, k2)
}

fn validate(grid: usize, m: i64) -> Result<()> {
    if grid < 2 {
        return Err(Error::Validation("grid must be at least 2".into()));
    }
    if m < 1 {
        return Err(Error::Validation("truncation must be at least 1".into()));
    }
    Ok(())
}

/// The `count` smallest singular values of `L(α,k)` on the window of radius `m`.
pub fn singular_values_at(p: &Potential, alpha: Complex64, k: Complex64, m: i64, count: usize) -> Result<Vec<f64>> {
    let op = block_operator(p, alpha, k, m)?;
    smallest_singular_values(&op.mat, count, IterOptions::default())
}

pub fn band_profile(p: &Potential, alpha: f64, grid: usize, num: usize, m: i64) -> Result<Vec<KSample>> {
    validate(grid, m)?;
    if num == 0 {
        return Err(Error::Validation("need at least one band".into()));
    }
    k_grid(grid)
        .par_iter()
        .map(|&(k1, k2)| {
            let values = singular_values_at(p, Complex64::new(alpha, 0.0), k_point(k1, k2), m, num)?;
            Ok(KSample { k1, k2, values })
        })
        .collect()
}

pub fn flat_band_check(p: &Potential, alpha: f64, grid: usize, m: i64) -> Result<FlatBandReport> {
    let per_k = band_profile(p, alpha, grid, 1, m)?;
    let max_min_singular = per_k.iter().map(|s| s.values[0]).fold(0.0, f64::max);
    Ok(FlatBandReport {
        alpha,
        grid,
        m,
        max_min_singular,
        per_k,
    })
}

/// Golden-section minimization of the smallest singular value over `α ∈ [lo, hi]` at fixed `k`.
pub fn refine_alpha(p: &Potential, lo: f64, hi: f64, k: Complex64, m: i64, tol: f64) -> Result<f64> {
    let f = |a: f64| -> Result<f64> { Ok(singular_values_at(p, Complex64::new(a, 0.0), k, m, 1)?[0]) };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}
