//! Magic angles as zeros of the truncated determinant `Σ_{j≤n} d_j β^j`, `β = α²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::aberth;
use crate::exactnum::rational::to_f64;
use crate::exactnum::{pi_over_sqrt3, PiPoly};
use crate::fredholm::det2_taylor;
use crate::traces::TraceTable;
use crate::{Error, Result};

pub enum TraceSource<'a> {
    Exact(&'a TraceTable),
    /// `σ_ℓ` by index; entries 0 and 1 are ignored.
    Numeric(&'a [f64]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicOptions {
    pub count: usize,
    pub trace_order: usize,
    pub complex: bool,
    /// Hilbert–Schmidt bound used for the truncation error estimate.
    pub hs: f64,
    /// A root is kept when its error radius is below this fraction of the
    /// distance to the nearest other root.
    pub separation: f64,
    pub cluster_tol: f64,
    /// Window radius the numeric traces were computed with, if any.
    pub truncation: Option<i64>,
}

impl Default for MagicOptions {
    fn default() -> Self {
        Self {
            count: 1,
            trace_order: 16,
            complex: false,
            hs: 5.5,
            separation: 0.5,
            cluster_tol: 1e-4,
            truncation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicAngle {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// First-order bound on the root displacement caused by truncation.
    pub error_radius: f64,
}

impl MagicAngle {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicSet {
    pub alphas: Vec<MagicAngle>,
    pub trace_order: usize,
    pub truncation: Option<i64>,
}

impl MagicSet {
    /// Smallest positive real magic angle.
    pub fn first_real(&self) -> Option<f64> {
        self.alphas
            .iter()
            .filter(|a| a.im == 0.0 && a.re > 0.0)
            .map(|a| a.re)
            .min_by(f64::total_cmp)
    }

    /// Largest distance from a conjugated element to the set.
    pub fn conjugation_defect(&self) -> f64 {
        self.alphas
            .iter()
            .map(|a| {
                let c = a.value().conj();
                self.alphas
                    .iter()
                    .map(|b| (b.value() - c).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficients `d_0..d_n` of `det₂(1 − βÂ)` in floating point.
pub fn beta_coefficients(src: &TraceSource, n: usize) -> Result<Vec<f64>> {
    match src {
        TraceSource::Exact(t) => {
            let det = det2_taylor(t, n)?;
            let pi = pi_over_sqrt3();
            Ok((0..=n)
                .map(|j| {
                    let c: PiPoly = det.beta_coeff(j);
                    let v = c.eval_interval(&pi);
                    (to_f64(&v.lo) + to_f64(&v.hi)) / 2.0
                })
                .collect())
        }
        TraceSource::Numeric(s) => {
            if s.len() <= n {
                return Err(Error::Validation(format!(
                    "need numeric traces up to {n}, have {}",
                    s.len().saturating_sub(1)
                )));
            }
            let mut d = vec![1.0];
            for j in 1..=n {
                let acc: f64 = (2..=j).map(|i| s[i] * d[j - i]).sum();
                d.push(-acc / j as f64);
            }
            Ok(d)
        }
    }
}

/// `Σ_{j>n} (√e·hs·|β|/√j)^j`.
pub fn truncation_tail(n: usize, hs: f64, beta_abs: f64) -> f64 {
    let nu = 0.5f64.exp() * hs * beta_abs;
    let mut s = 0.0;
    for j in n + 1..n + 2000 {
        let t = (nu / (j as f64).sqrt()).powi(j as i32);
        s += t;
        if t < 1e-18 * s && (nu / (j as f64).sqrt()) < 0.5 {
            break;
        }
    }
    s
}

fn derivative(c: &[f64], z: Complex64) -> Complex64 {
    let mut dp = Complex64::default();
    for (j, a) in c.iter().enumerate().skip(1).rev() {
        dp = dp * z + a * j as f64;
    }
    dp
}

/// Replaces every root by the average of itself and its conjugate partner.
fn symmetrize(z: &mut [Complex64]) {
    let orig = z.to_vec();
    for (i, zi) in z.iter_mut().enumerate() {
        let c = orig[i].conj();
        let partner = orig
            .iter()
            .min_by(|a, b| (*a - c).norm().total_cmp(&(*b - c).norm()))
            .copied()
            .unwrap_or(c);
        *zi = (orig[i] + partner.conj()) / 2.0;
        if zi.im.abs() < 1e-9 * zi.norm().max(1.0) {
            zi.im = 0.0;
        }
    }
}

pub fn magic_angles(src: &TraceSource, opts: &MagicOptions) -> Result<MagicSet> {
    let n = opts.trace_order;
    if n < 2 {
        return Err(Error::Validation("trace order must be at least 2".into()));
    }
    let d = beta_coefficients(src, n)?;
    let c: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut betas = aberth(&c, 2000, 1e-15)?;
    symmetrize(&mut betas);

    let mut kept: Vec<(Complex64, f64)> = Vec::new();
    for (i, &b) in betas.iter().enumerate() {
        let nearest = betas
            .iter()
            .enumerate()
            .filter(|&(j, o)| j != i && (o - b).norm() > opts.cluster_tol)
            .map(|(_, o)| (o - b).norm())
            .fold(f64::INFINITY, f64::min);
        let dp = derivative(&d, b).norm();
        let err = truncation_tail(n, opts.hs, b.norm()) / dp.max(1e-300);
        if err < opts.separation * nearest {
            kept.push((b, err));
        }
    }
    kept.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()).then(a.0.arg().total_cmp(&b.0.arg())));

    // cluster β
    let mut clusters: Vec<(Complex64, usize, f64)> = Vec::new();
    for (b, e) in kept {
        match clusters.iter_mut().find(|c| (c.0 - b).norm() < opts.cluster_tol) {
            Some(c) => {
                c.1 += 1;
                c.2 = c.2.max(e);
            }
            None => clusters.push((b, 1, e)),
        }
    }
    if !opts.complex {
        clusters.retain(|c| c.0.im == 0.0 && c.0.re > 0.0);
    }
    clusters.truncate(opts.count);

    let mut alphas = Vec::new();
    for (b, mult, e) in clusters {
        let a = b.sqrt();
        // |δα| ≈ |δβ|/(2|α|)
        let ea = e / (2.0 * a.norm().max(1e-300));
        for s in [a, -a] {
            if !opts.complex && s.re < 0.0 {
                continue;
            }
            let s = Complex64::new(s.re, if b.im == 0.0 && b.re > 0.0 { 0.0 } else { s.im });
            alphas.push(MagicAngle {
                re: s.re,
                im: s.im,
                multiplicity: mult,
                error_radius: ea,
            });
        }
    }
    alphas.sort_by(|a, b| {
        a.value()
            .norm()
            .total_cmp(&b.value().norm())
            .then(a.value().arg().total_cmp(&b.value().arg()))
    });
    Ok(MagicSet {
        alphas,
        trace_order: n,
        truncation: opts.truncation,
    })
}

/// `q_ℓ/q_{ℓ−1}`, which approaches `1/α₁²` for large ℓ.
pub fn ratio_diagnostic(table: &TraceTable) -> Vec<(usize, f64)> {
    (3..=table.max_contiguous())
        .map(|l| {
            let r = table.q(l).unwrap() / table.q(l - 1).unwrap();
            (l, to_f64(&r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_spectrum_roots() {
        // σ_ℓ = Σ λ^ℓ for λ = 2, 1/2 → zeros at β = 1/2, 2
        let lam = [2.0f64, 0.5];
        let s: Vec<f64> = (0..=12).map(|l| lam.iter().map(|x| x.powi(l)).sum()).collect();
        let opts = MagicOptions {
            count: 2,
            trace_order: 12,
            hs: (4.0f64 + 0.25).sqrt(),
            ..Default::default()
        };
        let set = magic_angles(&TraceSource::Numeric(&s), &opts).unwrap();
        let first = set.first_real().unwrap();
        assert!((first - 0.5f64.sqrt()).abs() < 1e-6, "{set:?}");
        assert!(set.conjugation_defect() < 1e-9);
    }

    #[test]
    fn tail_decreases_with_order() {
        assert!(truncation_tail(20, 5.5, 0.34) < truncation_tail(16, 5.5, 0.34));
        assert!(truncation_tail(16, 5.5, 0.0) == 0.0);
    }
}
