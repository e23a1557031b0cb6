//! The two-layer stencil of Â_k = Λ V₊ Λ V₋ and its composite expansion.

use std::collections::BTreeMap;

use super::potential::{Potential, Shift};
use crate::exactnum::CycloNum;

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub shift: Shift,
    pub coeff: CycloNum,
}

/// `coeff · Λ Λ_{resolvent_offset} J^{net_shift}`, relative to the prefactor.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeTerm {
    pub resolvent_offset: Shift,
    pub net_shift: Shift,
    pub coeff: CycloNum,
    /// Number of (plus, minus) pairs merged into this term.
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct Stencil {
    pub plus: Vec<Step>,
    pub minus: Vec<Step>,
    pub prefactor: CycloNum,
    pub composite: Vec<CompositeTerm>,
    /// Composite count before merging equal (resolvent offset, net shift) pairs.
    pub raw_terms: usize,
}

pub fn build_stencil(p: &Potential) -> Stencil {
    let plus: Vec<Step> = p
        .plus_steps()
        .into_iter()
        .map(|(shift, coeff)| Step { shift, coeff })
        .collect();
    let minus: Vec<Step> = p
        .minus_steps()
        .into_iter()
        .map(|(shift, coeff)| Step { shift, coeff })
        .collect();
    let prefactor = CycloNum::from_int(3);
    let third = prefactor.inv().expect("3 is invertible");
    let mut merged: BTreeMap<(Shift, Shift), (CycloNum, usize)> = BTreeMap::new();
    for a in &plus {
        for b in &minus {
            let net = (a.shift.0 + b.shift.0, a.shift.1 + b.shift.1);
            let c = &(&a.coeff * &b.coeff) * &third;
            let e = merged
                .entry((a.shift, net))
                .or_insert((CycloNum::zero(), 0));
            e.0 += &c;
            e.1 += 1;
        }
    }
    let composite = merged
        .into_iter()
        .map(|((resolvent_offset, net_shift), (coeff, multiplicity))| CompositeTerm {
            resolvent_offset,
            net_shift,
            coeff,
            multiplicity,
        })
        .collect();
    Stencil {
        raw_terms: plus.len() * minus.len(),
        plus,
        minus,
        prefactor,
        composite,
    }
}

impl Stencil {
    /// Largest sup-norm of a net A-to-A shift.
    pub fn reach(&self) -> i64 {
        self.composite
            .iter()
            .map(|t| t.net_shift.0.abs().max(t.net_shift.1.abs()))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::CycloNum;

    #[test]
    fn canonical_has_nine_unit_terms() {
        let s = build_stencil(&Potential::canonical());
        assert_eq!(s.composite.len(), 9);
        assert_eq!(s.prefactor, CycloNum::from_int(3));
        let units = [CycloNum::one(), CycloNum::omega(), CycloNum::omega2()];
        for t in &s.composite {
            assert!(units.contains(&t.coeff), "{:?}", t);
        }
        let mut nets: Vec<_> = s.composite.iter().map(|t| t.net_shift).collect();
        nets.sort();
        assert_eq!(
            nets,
            vec![(-3, 0), (-3, 3), (0, -3), (0, 0), (0, 0), (0, 0), (0, 3), (3, -3), (3, 0)]
        );
        // the three diagonal terms carry 1, ω, ω² at offsets (1,1), (1,−2), (−2,1)
        let diag: BTreeMap<_, _> = s
            .composite
            .iter()
            .filter(|t| t.net_shift == (0, 0))
            .map(|t| (t.resolvent_offset, t.coeff.clone()))
            .collect();
        assert_eq!(diag[&(1, 1)], CycloNum::one());
        assert_eq!(diag[&(1, -2)], CycloNum::omega());
        assert_eq!(diag[&(-2, 1)], CycloNum::omega2());
        assert_eq!(s.reach(), 3);
    }

    #[test]
    fn single_mode_gives_one_term() {
        let p = Potential::from_modes([((0, 0), CycloNum::sqrt3())], true);
        assert_eq!(build_stencil(&p).composite.len(), 1);
    }
}
