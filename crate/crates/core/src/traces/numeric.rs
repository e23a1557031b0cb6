//! Floating-point lattice sums of diagonal entries.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::lattice::denominator_f64;
use crate::model::{build_stencil, Potential, Shift, Stencil};
use crate::{Error, Result};

const POLE_GUARD: f64 = 1e-3;

fn c64(x: &crate::exactnum::CycloNum) -> Complex64 {
    x.to_complex()
}

struct Compiled {
    plus: Vec<(Shift, Complex64)>,
    minus: Vec<(Shift, Complex64)>,
    nets: Vec<Shift>,
    reach: i64,
}

fn compile(st: &Stencil) -> Compiled {
    Compiled {
        plus: st.plus.iter().map(|s| (s.shift, c64(&s.coeff))).collect(),
        minus: st.minus.iter().map(|s| (s.shift, c64(&s.coeff))).collect(),
        nets: st.composite.iter().map(|t| t.net_shift).collect(),
        reach: st.reach(),
    }
}

/// `⟨Â_k^ℓ e_s, e_s⟩` for the A-layer site at offset `s`, over all walks.
fn diagonal_entry(c: &Compiled, ell: usize, k: Complex64, s: Shift) -> Result<Complex64> {
    let lam = |y: Shift| -> Result<Complex64> {
        let d = k + denominator_f64((s.0 + y.0, s.1 + y.1));
        if d.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(d.norm()));
        }
        Ok(1.0 / d)
    };
    let mut v: HashMap<Shift, Complex64> = HashMap::from([((0, 0), Complex64::new(1.0, 0.0))]);
    for i in 0..ell {
        let left = (ell - i - 1) as i64;
        let mut sources = BTreeSet::new();
        for x in v.keys() {
            for n in &c.nets {
                let y = (x.0 - n.0, x.1 - n.1);
                if y.0.abs().max(y.1.abs()) <= left * c.reach {
                    sources.insert(y);
                }
            }
        }
        let mut next = HashMap::with_capacity(sources.len());
        for y in sources {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, cp) in &c.plus {
                let b = (y.0 + p.0, y.1 + p.1);
                let mut inner = Complex64::new(0.0, 0.0);
                for (q, cq) in &c.minus {
                    if let Some(vx) = v.get(&(b.0 + q.0, b.1 + q.1)) {
                        inner += cq * vx;
                    }
                }
                if inner != Complex64::new(0.0, 0.0) {
                    acc += cp * lam(b)? * inner;
                }
            }
            next.insert(y, acc * lam(y)?);
        }
        v = next;
    }
    Ok(v.get(&(0, 0)).copied().unwrap_or_default())
}

fn shell(j: i64) -> Vec<Shift> {
    if j == 0 {
        return vec![(0, 0)];
    }
    let mut out = Vec::with_capacity(8 * j as usize);
    for t in -j..=j {
        out.push((t, j));
        out.push((t, -j));
    }
    for t in -j + 1..j {
        out.push((j, t));
        out.push((-j, t));
    }
    out
}

/// `σ_ℓ(k) ≈ Σ_{|s|∞ ≤ M} ⟨Â_k^ℓ e_s, e_s⟩`, summed shell by shell.
///
/// Shells stop early once two in a row fall below 10⁻¹⁷ of the running sum.
pub fn trace_numeric(p: &Potential, ell: usize, k: Complex64, window: i64) -> Result<Complex64> {
    if ell < 2 {
        return Err(Error::Validation("numeric traces need ell >= 2".into()));
    }
    let c = compile(&build_stencil(p));
    let mut total = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    for j in 0..=window {
        let part: Complex64 = shell(j)
            .par_iter()
            .map(|&(m, n)| diagonal_entry(&c, ell, k, (3 * m, 3 * n)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        total += part;
        if j >= 2 && part.norm() < 1e-17 * total.norm() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(total)
}

/// Square-window partial sums of the diagonal of Â₀ for windows `1..=n_max`.
///
/// σ₁ is only conditionally convergent, so the value depends on this summation order.
pub fn sigma1_regularized(p: &Potential, n_max: i64) -> Result<Vec<Complex64>> {
    let st = build_stencil(p);
    let pref = c64(&st.prefactor);
    let diag: Vec<(Shift, Complex64)> = st
        .composite
        .iter()
        .filter(|t| t.net_shift == (0, 0))
        .map(|t| (t.resolvent_offset, pref * c64(&t.coeff)))
        .collect();
    let entry = |s: Shift| -> Result<Complex64> {
        let d0 = denominator_f64(s);
        if d0.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(d0.norm()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (o, c) in &diag {
            acc += c / denominator_f64((s.0 + o.0, s.1 + o.1));
        }
        Ok(acc / d0)
    };
    let mut out = Vec::with_capacity(n_max.max(0) as usize);
    let mut total = entry((0, 0))?;
    for j in 1..=n_max {
        for (m, n) in shell(j) {
            total += entry((3 * m, 3 * n))?;
        }
        out.push(total);
    }
    Ok(out)
}
