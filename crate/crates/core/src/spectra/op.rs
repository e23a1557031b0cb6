//! Floating-point images of Â_k and of the first-order block operator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::Banded;
use crate::model::{Potential, Stencil};
use crate::{Error, Result};

/// Poles closer than this to a window site are rejected.
pub const POLE_TOL: f64 = 1e-6;

fn c64(x: &crate::exactnum::CycloNum) -> Complex64 {
    x.to_complex()
}

/// `γ(a,b) = ω²a − ωb` in floating point.
pub fn gamma_f64(a: f64, b: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    w * w * a - w * b
}

/// Â_k restricted to A-sites `3(i,j)`, `|i|,|j| ≤ M`; entries leaving the window are dropped.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedOp {
    #[serde(rename = "M")]
    pub m: i64,
    pub k: (f64, f64),
    /// `(row, col, value)` sorted by row then column.
    pub entries: Vec<(usize, usize, (f64, f64))>,
}

impl TruncatedOp {
    pub fn dim(&self) -> usize {
        let s = (2 * self.m + 1) as usize;
        s * s
    }

    pub fn index(&self, i: i64, j: i64) -> Option<usize> {
        let w = 2 * self.m + 1;
        (i.abs() <= self.m && j.abs() <= self.m).then(|| ((i + self.m) * w + (j + self.m)) as usize)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.0 == row && e.1 == col)
            .map(|e| Complex64::new(e.2 .0, e.2 .1))
            .unwrap_or_default()
    }

    pub fn row_nonzeros(&self, row: usize) -> usize {
        self.entries.iter().filter(|e| e.0 == row).count()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.dim()];
        for &(r, c, (re, im)) in &self.entries {
            y[r] += Complex64::new(re, im) * x[c];
        }
        y
    }
}

/// `1/(k + γ(offset) + μ)` with the pole guard.
fn lambda(k: Complex64, off: (i64, i64)) -> Result<Complex64> {
    let d = k + gamma_f64((off.0 + 1) as f64, (off.1 + 1) as f64);
    if d.norm() < POLE_TOL {
        return Err(Error::PoleProximity(d.norm()));
    }
    Ok(1.0 / d)
}

pub fn materialize(stencil: &Stencil, k: Complex64, m: i64) -> Result<TruncatedOp> {
    let mut op = TruncatedOp {
        m,
        k: (k.re, k.im),
        entries: Vec::new(),
    };
    let pref = c64(&stencil.prefactor);
    let mut row = std::collections::BTreeMap::new();
    for i in -m..=m {
        for j in -m..=m {
            let s = (3 * i, 3 * j);
            let r = op.index(i, j).expect("inside");
            let ls = lambda(k, s)?;
            row.clear();
            for t in &stencil.composite {
                let Some(c) = op.index(i + t.net_shift.0 / 3, j + t.net_shift.1 / 3) else {
                    continue;
                };
                let o = (s.0 + t.resolvent_offset.0, s.1 + t.resolvent_offset.1);
                let v = pref * ls * c64(&t.coeff) * lambda(k, o)?;
                *row.entry(c).or_insert(Complex64::default()) += v;
            }
            op.entries.extend(row.iter().map(|(&c, v)| (r, c, (v.re, v.im))));
        }
    }
    Ok(op)
}

/// `L(α,k) = [[𝒟, αV₊], [αV₋, 𝒟]]` on A-sites `3(i,j)` and B-sites `3(i,j) + (1,1)`,
/// `|i|,|j| ≤ M`, with `𝒟 = k + γ(offset)`.
///
/// Here `k` is measured from the A-layer Dirac point: it equals the trace
/// parameter plus μ. `L ψ = 0` forces `α²Â ψ_A = ψ_A`.
pub struct BlockOp {
    pub m: i64,
    pub mat: Banded,
}

impl BlockOp {
    pub fn dim(&self) -> usize {
        self.mat.n
    }
}

fn block_index(m: i64, i: i64, j: i64, layer: usize) -> Option<usize> {
    let w = 2 * m + 1;
    (i.abs() <= m && j.abs() <= m).then(|| (((i + m) * w + (j + m)) * 2) as usize + layer)
}

pub fn block_operator(p: &Potential, alpha: Complex64, k: Complex64, m: i64) -> Result<BlockOp> {
    if m < 0 {
        return Err(Error::Validation("truncation must be non-negative".into()));
    }
    let plus: Vec<((i64, i64), Complex64)> = p
        .plus_steps()
        .into_iter()
        .map(|(s, c)| (s, c64(&c)))
        .collect();
    // plus shifts are (1,1) + 3(u,v)
    let cell = |s: (i64, i64)| ((s.0 - 1).div_euclid(3), (s.1 - 1).div_euclid(3));
    let reach = plus
        .iter()
        .map(|(s, _)| {
            let (u, v) = cell(*s);
            u.abs().max(v.abs())
        })
        .max()
        .unwrap_or(0);
    let w = 2 * m + 1;
    let n = (w * w * 2) as usize;
    let band = ((reach * (w + 1)) * 2 + 1) as usize;
    let mut mat = Banded::zeros(n, band, band);
    for i in -m..=m {
        for j in -m..=m {
            let a = block_index(m, i, j, 0).unwrap();
            let b = block_index(m, i, j, 1).unwrap();
            mat.add(a, a, k + gamma_f64((3 * i) as f64, (3 * j) as f64));
            mat.add(b, b, k + gamma_f64((3 * i + 1) as f64, (3 * j + 1) as f64));
            for &(s, c) in &plus {
                let (u, v) = cell(s);
                // A(i,j) → B at offset 3(i,j) + s; B(i,j) → A at offset 3(i,j) + (1,1) − s
                if let Some(t) = block_index(m, i + u, j + v, 1) {
                    mat.add(a, t, alpha * c);
                }
                if let Some(t) = block_index(m, i - u, j - v, 0) {
                    mat.add(b, t, alpha * c);
                }
            }
        }
    }
    Ok(BlockOp { m, mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use crate::exactnum::CycloNum;
    use crate::model::build_stencil;
    use crate::model::lattice::lambda_at;

    #[test]
    fn origin_row_has_nine_terms_merged() {
        let st = build_stencil(&Potential::canonical());
        let op = materialize(&st, Complex64::new(0.1, 0.0), 2).unwrap();
        let r = op.index(0, 0).unwrap();
        assert_eq!(op.row_nonzeros(r), 7);
        let terms: usize = st
            .composite
            .iter()
            .filter(|t| op.index(t.net_shift.0 / 3, t.net_shift.1 / 3).is_some())
            .map(|t| t.multiplicity)
            .sum();
        assert_eq!(terms, 9);
    }

    #[test]
    fn origin_entry_matches_exact() {
        let st = build_stencil(&Potential::canonical());
        let op = materialize(&st, Complex64::new(0.1, 0.0), 1).unwrap();
        let r = op.index(0, 0).unwrap();
        let k = CycloNum::from_rational(rat(1, 10));
        let ls = lambda_at((0, 0), &k).unwrap();
        let mut sum = CycloNum::zero();
        for t in st.composite.iter().filter(|t| t.net_shift == (0, 0)) {
            sum += &(&t.coeff * &lambda_at(t.resolvent_offset, &k).unwrap());
        }
        let exact = (&(&st.prefactor * &ls) * &sum).to_complex();
        assert!((op.entry(r, r) - exact).norm() < 1e-12);
    }

    #[test]
    fn zero_window() {
        let st = build_stencil(&Potential::canonical());
        let op = materialize(&st, Complex64::new(0.1, 0.2), 0).unwrap();
        assert_eq!(op.dim(), 1);
        assert_eq!(op.entries.len(), 1);
    }

    #[test]
    fn pole_rejected() {
        let st = build_stencil(&Potential::canonical());
        let mu = CycloNum::mu().to_complex();
        assert!(matches!(materialize(&st, -mu, 1), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn schur_complement_is_a_hat() {
        // For M large enough to hold all shifts of the origin, (α²Â)(0,0) from the block
        // equals the materialized entry: eliminate B and compare the A-block.
        let p = Potential::canonical();
        let st = build_stencil(&p);
        let kt = Complex64::new(0.13, 0.07);
        let mu = CycloNum::mu().to_complex();
        let m = 3;
        let op = materialize(&st, kt, m).unwrap();
        let blk = block_operator(&p, Complex64::new(1.0, 0.0), kt + mu, m).unwrap();
        // Â x at the origin for x = e_origin, via L: Λ_A V₊ Λ_B V₋
        let n = blk.dim();
        let d = blk.mat.to_dense();
        let a0 = block_index(m, 0, 0, 0).unwrap();
        let mut x = vec![Complex64::default(); n];
        x[a0] = Complex64::new(1.0, 0.0);
        let mut y = vec![Complex64::default(); n];
        for (bi, row) in d.iter().enumerate().filter(|(i, _)| i % 2 == 1) {
            y[bi] = row[a0] / d[bi][bi];
        }
        let mut z = vec![Complex64::default(); n];
        for (ai, row) in d.iter().enumerate().filter(|(i, _)| i % 2 == 0) {
            let s: Complex64 = (1..n).step_by(2).map(|bj| row[bj] * y[bj]).sum();
            z[ai] = s / d[ai][ai];
        }
        let col = op.index(0, 0).unwrap();
        for i in -m..=m {
            for j in -m..=m {
                let r = op.index(i, j).unwrap();
                let v = z[block_index(m, i, j, 0).unwrap()];
                assert!((v - op.entry(r, col)).norm() < 1e-12, "({i},{j})");
            }
        }
    }
}
