//! Independent trace evaluations used to cross-check the residue engine.
//!
//! `trace_oracle_walks` sums weighted residues walk by walk; `trace_poles`
//! propagates Laurent vectors separately for every candidate pole.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::exactnum::{CycloNum, LaurentSeries};
use crate::model::{build_stencil, enumerate_theta_par, Potential, Shift, Stencil, Walk};
use crate::{Error, Result};

fn gamma(x: Shift) -> CycloNum {
    CycloNum::gamma(x.0, x.1)
}

/// Converts a weighted residue sum `S` into `q = σ/Π`.
pub fn q_from_residue_sum(s: &CycloNum) -> CycloNum {
    let factor = (&(&CycloNum::i() * &CycloNum::omega()) * &CycloNum::sqrt3())
        .scale(&crate::exactnum::rational::rat(-2, 9));
    &factor * s
}

/// Weighted residues of one walk's rational function, keyed by pole label.
pub fn walk_residues(w: &Walk) -> Result<BTreeMap<Shift, CycloNum>> {
    let mut mult: BTreeMap<Shift, i32> = BTreeMap::new();
    for x in w.sites() {
        *mult.entry(x).or_default() += 1;
    }
    let mut out = BTreeMap::new();
    for (&x0, &m) in &mult {
        // cofactor expanded at t = k − p_{x0}; Λ(y) = 1/(t + γ(y − x0))
        let top = m - 1;
        let mut f = LaurentSeries::constant(w.phase.clone(), top);
        for (&y, &my) in &mult {
            if y == x0 {
                continue;
            }
            let inv = LaurentSeries::inverse_linear(&gamma((y.0 - x0.0, y.1 - x0.1)), top)?;
            for _ in 0..my {
                f = f.mul(&inv);
            }
        }
        out.insert(x0, f.coeff(top)?);
    }
    Ok(out)
}

fn weighted_sum(res: &BTreeMap<Shift, CycloNum>) -> (CycloNum, CycloNum) {
    let mut s = CycloNum::zero();
    let mut plain = CycloNum::zero();
    for (x, r) in res {
        s += &r.mul_int(x.1);
        plain += r;
    }
    (s, plain)
}

/// Largest order the walk oracle accepts.
pub const ORACLE_MAX_ELL: usize = 4;

/// `q_ℓ` summed over every closed walk; returns `(q, Σ plain residues)`.
pub fn trace_oracle_walks_checked(p: &Potential, ell: usize) -> Result<(CycloNum, CycloNum)> {
    if !(2..=ORACLE_MAX_ELL).contains(&ell) {
        return Err(Error::Validation(format!(
            "walk oracle covers ell in 2..={ORACLE_MAX_ELL}, got {ell}"
        )));
    }
    let st = build_stencil(p);
    let walks = enumerate_theta_par(&st, ell);
    let parts: Vec<(CycloNum, CycloNum)> = walks
        .par_iter()
        .map(|w| walk_residues(w).map(|r| weighted_sum(&r)))
        .collect::<Result<_>>()?;
    let mut s = CycloNum::zero();
    let mut plain = CycloNum::zero();
    for (a, b) in &parts {
        s += a;
        plain += b;
    }
    Ok((q_from_residue_sum(&s), plain))
}

pub fn trace_oracle_walks(p: &Potential, ell: usize) -> Result<CycloNum> {
    Ok(trace_oracle_walks_checked(p, ell)?.0)
}

/// Sites that some closed walk of length ℓ can visit.
fn candidate_sites(st: &Stencil, ell: usize) -> BTreeSet<Shift> {
    let reach = st.reach();
    let mut layer: BTreeSet<Shift> = BTreeSet::from([(0, 0)]);
    let mut out = BTreeSet::new();
    for i in 0..ell {
        let left = (ell - i) as i64;
        let mut next = BTreeSet::new();
        for &a in &layer {
            if a.0.abs().max(a.1.abs()) > left * reach {
                continue;
            }
            out.insert(a);
            for p in &st.plus {
                let b = (a.0 + p.shift.0, a.1 + p.shift.1);
                out.insert(b);
                for q in &st.minus {
                    next.insert((b.0 + q.shift.0, b.1 + q.shift.1));
                }
            }
        }
        layer = next;
    }
    out
}

/// Residue of `⟨Â^ℓ e₀, e₀⟩` at the pole of label `x0`, by Laurent propagation.
pub fn pole_residue(st: &Stencil, ell: usize, x0: Shift) -> Result<CycloNum> {
    let top = ell as i32 - 1;
    let lam = |y: Shift| LaurentSeries::inverse_linear(&gamma((y.0 - x0.0, y.1 - x0.1)), top);
    let reach = st.reach();
    let mut v: HashMap<Shift, LaurentSeries> =
        HashMap::from([((0, 0), LaurentSeries::constant(CycloNum::one(), top))]);
    let mut cache: HashMap<Shift, LaurentSeries> = HashMap::new();
    let mut lam_c = |y: Shift| -> Result<LaurentSeries> {
        if let Some(s) = cache.get(&y) {
            return Ok(s.clone());
        }
        let s = lam(y)?;
        cache.insert(y, s.clone());
        Ok(s)
    };
    // pull form: (Â v)(s) = Σ c_p c_q Λ(s) Λ(s+p) v(s+p+q), applied backwards from e₀
    for i in 0..ell {
        let left = (ell - i - 1) as i64;
        let mut sources: BTreeSet<Shift> = BTreeSet::new();
        for x in v.keys() {
            for t in &st.composite {
                let s = (x.0 - t.net_shift.0, x.1 - t.net_shift.1);
                if s.0.abs().max(s.1.abs()) <= left * reach {
                    sources.insert(s);
                }
            }
        }
        let mut next: HashMap<Shift, LaurentSeries> = HashMap::new();
        for s in sources {
            let mut acc: Option<LaurentSeries> = None;
            for p in &st.plus {
                let b = (s.0 + p.shift.0, s.1 + p.shift.1);
                let mut inner: Option<LaurentSeries> = None;
                for q in &st.minus {
                    let x = (b.0 + q.shift.0, b.1 + q.shift.1);
                    if let Some(vx) = v.get(&x) {
                        let term = vx.scale(&(&p.coeff * &q.coeff));
                        inner = Some(match inner {
                            Some(a) => a.add(&term),
                            None => term,
                        });
                    }
                }
                if let Some(inner) = inner {
                    let term = inner.mul(&lam_c(b)?);
                    acc = Some(match acc {
                        Some(a) => a.add(&term),
                        None => term,
                    });
                }
            }
            if let Some(acc) = acc {
                next.insert(s, acc.mul(&lam_c(s)?));
            }
        }
        v = next;
    }
    match v.get(&(0, 0)) {
        Some(s) => s.residue(),
        None => Ok(CycloNum::zero()),
    }
}

/// `q_ℓ` by per-pole propagation; returns `(q, Σ plain residues)`.
pub fn trace_poles(p: &Potential, ell: usize) -> Result<(CycloNum, CycloNum)> {
    let st = build_stencil(p);
    let sites: Vec<Shift> = candidate_sites(&st, ell).into_iter().collect();
    let res: Vec<(Shift, CycloNum)> = sites
        .par_iter()
        .map(|&x| pole_residue(&st, ell, x).map(|r| (x, r)))
        .collect::<Result<_>>()?;
    let map: BTreeMap<Shift, CycloNum> = res.into_iter().collect();
    let (s, plain) = weighted_sum(&map);
    Ok((q_from_residue_sum(&s), plain))
}
