//! Closed alternating walks of Â_k returning to the origin.

use std::collections::HashMap;

use rayon::prelude::*;

use super::potential::Shift;
use super::stencil::Stencil;
use crate::exactnum::CycloNum;

/// One closed walk of ℓ full (plus, minus) steps from the A-layer origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Walk {
    /// `(plus index, minus index)` per full step.
    pub steps: Vec<(u8, u8)>,
    /// A-layer offsets before each full step; `a_sites[0]` is the origin.
    pub a_sites: Vec<Shift>,
    /// B-layer offsets visited in between.
    pub b_sites: Vec<Shift>,
    /// Product of all step weights.
    pub phase: CycloNum,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `m` with `phase = 3^ℓ ω^m`, if the walk phase has that form.
    pub fn m_pi(&self) -> Option<u8> {
        let scale = CycloNum::from_int(3).pow(self.len() as u32);
        let unit = &self.phase * &scale.inv().ok()?;
        let w = CycloNum::omega();
        (0..3u8).find(|&m| w.pow(m as u32) == unit)
    }

    /// All 2ℓ resolvent sites in visiting order.
    pub fn sites(&self) -> impl Iterator<Item = Shift> + '_ {
        self.a_sites
            .iter()
            .zip(&self.b_sites)
            .flat_map(|(a, b)| [*a, *b])
    }
}

fn add(a: Shift, b: Shift) -> Shift {
    (a.0 + b.0, a.1 + b.1)
}

fn sup(a: Shift) -> i64 {
    a.0.abs().max(a.1.abs())
}

struct Dfs<'a> {
    st: &'a Stencil,
    ell: usize,
    reach: i64,
    steps: Vec<(u8, u8)>,
    a_sites: Vec<Shift>,
    b_sites: Vec<Shift>,
    out: Vec<Walk>,
}

impl Dfs<'_> {
    fn go(&mut self, pos: Shift) {
        let done = self.steps.len();
        if done == self.ell {
            if pos == (0, 0) {
                let mut phase = CycloNum::one();
                for &(i, j) in &self.steps {
                    phase = &phase * &self.st.plus[i as usize].coeff;
                    phase = &phase * &self.st.minus[j as usize].coeff;
                }
                self.out.push(Walk {
                    steps: self.steps.clone(),
                    a_sites: self.a_sites.clone(),
                    b_sites: self.b_sites.clone(),
                    phase,
                });
            }
            return;
        }
        let left = (self.ell - done - 1) as i64;
        for (i, p) in self.st.plus.iter().enumerate() {
            let b = add(pos, p.shift);
            for (j, q) in self.st.minus.iter().enumerate() {
                let next = add(b, q.shift);
                if sup(next) > left * self.reach {
                    continue;
                }
                self.steps.push((i as u8, j as u8));
                self.a_sites.push(pos);
                self.b_sites.push(b);
                self.go(next);
                self.steps.pop();
                self.a_sites.pop();
                self.b_sites.pop();
            }
        }
    }
}

/// Every closed walk of length ℓ, in lexicographic order of step indices.
pub fn enumerate_theta(st: &Stencil, ell: usize) -> Vec<Walk> {
    enumerate_with_prefix(st, ell, &[])
}

/// Closed walks of length ℓ whose first steps are `prefix`.
pub fn enumerate_with_prefix(st: &Stencil, ell: usize, prefix: &[(u8, u8)]) -> Vec<Walk> {
    let mut d = Dfs {
        st,
        ell,
        reach: st.reach(),
        steps: Vec::new(),
        a_sites: Vec::new(),
        b_sites: Vec::new(),
        out: Vec::new(),
    };
    let mut pos = (0, 0);
    for &(i, j) in prefix.iter().take(ell) {
        let b = add(pos, st.plus[i as usize].shift);
        d.steps.push((i, j));
        d.a_sites.push(pos);
        d.b_sites.push(b);
        pos = add(b, st.minus[j as usize].shift);
    }
    d.go(pos);
    d.out
}

/// Same output as [`enumerate_theta`], split over first steps in parallel.
pub fn enumerate_theta_par(st: &Stencil, ell: usize) -> Vec<Walk> {
    if ell == 0 {
        return enumerate_theta(st, 0);
    }
    let firsts: Vec<(u8, u8)> = (0..st.plus.len() as u8)
        .flat_map(|i| (0..st.minus.len() as u8).map(move |j| (i, j)))
        .collect();
    firsts
        .par_iter()
        .map(|&f| enumerate_with_prefix(st, ell, &[f]))
        .collect::<Vec<_>>()
        .concat()
}

/// Number of closed walks by dynamic programming over A-layer positions.
pub fn count_closed_walks(st: &Stencil, ell: usize) -> u128 {
    let mut counts: HashMap<Shift, u128> = HashMap::from([((0, 0), 1)]);
    for _ in 0..ell {
        let mut next: HashMap<Shift, u128> = HashMap::new();
        for (&pos, &c) in &counts {
            for p in &st.plus {
                for q in &st.minus {
                    *next.entry(add(add(pos, p.shift), q.shift)).or_default() += c;
                }
            }
        }
        counts = next;
    }
    counts.get(&(0, 0)).copied().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_stencil, Potential};

    fn brute_force(st: &Stencil, ell: usize) -> usize {
        let k = st.plus.len() * st.minus.len();
        let mut total = 0;
        for code in 0..k.pow(ell as u32) {
            let mut c = code;
            let mut pos = (0, 0);
            for _ in 0..ell {
                let (i, j) = ((c % k) / st.minus.len(), c % st.minus.len());
                c /= k;
                pos = add(add(pos, st.plus[i].shift), st.minus[j].shift);
            }
            if pos == (0, 0) {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn counts_agree() {
        let st = build_stencil(&Potential::canonical());
        for ell in 1..=4 {
            let walks = enumerate_theta(&st, ell);
            assert_eq!(walks.len(), brute_force(&st, ell), "ell={ell}");
            assert_eq!(walks.len() as u128, count_closed_walks(&st, ell));
        }
        assert_eq!(enumerate_theta(&st, 2).len(), 15);
    }

    #[test]
    fn parallel_order_is_stable() {
        let st = build_stencil(&Potential::canonical());
        assert_eq!(enumerate_theta(&st, 4), enumerate_theta_par(&st, 4));
    }

    #[test]
    fn canonical_phases_are_cube_roots() {
        let st = build_stencil(&Potential::canonical());
        for w in enumerate_theta(&st, 3) {
            assert!(w.m_pi().is_some());
            assert_eq!(w.sites().count(), 6);
        }
    }
}
