//! Exact trace values and the table handed to the determinant layer.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::engine::residue_traces;
use crate::exactnum::rational::serde_rational;
use crate::exactnum::{CycloNum, PiPoly};
use crate::model::Potential;
use crate::{Error, Result};

/// `q_ℓ` for `ℓ = 2..=max_ell`, in Q(ζ); index 0 holds ℓ = 2.
pub fn traces_exact(p: &Potential, max_ell: usize) -> Result<Vec<CycloNum>> {
    if max_ell < 2 {
        return Err(Error::Validation("traces start at ell = 2".into()));
    }
    let out = residue_traces(p, max_ell);
    for (l, (a, b)) in out.completeness.iter().enumerate().skip(2) {
        if !a.is_zero() || !b.is_zero() {
            return Err(Error::Validation(format!(
                "residues at ell = {l} do not cancel: {a}, {b}"
            )));
        }
    }
    Ok(out.q[2..].to_vec())
}

/// `q_ℓ ∈ Q(ζ)` with `σ_ℓ = q_ℓ · π/√3`.
pub fn trace_exact_cyclo(p: &Potential, ell: usize) -> Result<CycloNum> {
    Ok(traces_exact(p, ell)?.pop().expect("nonempty"))
}

/// `tr T^{2ℓ}` over both layers, `2σ_ℓ`, as a polynomial in Π.
pub fn trace_t_even(p: &Potential, two_ell: usize) -> Result<PiPoly> {
    if two_ell < 4 || two_ell % 2 == 1 {
        return Err(Error::Validation(format!(
            "two_ell must be even and at least 4, got {two_ell}"
        )));
    }
    let q = trace_exact(p, two_ell / 2)?;
    Ok(PiPoly::monomial(q * BigRational::from_integer(2.into()), 1))
}

/// Rational `q_ℓ`; errors when the trace leaves Q·π/√3.
pub fn trace_exact(p: &Potential, ell: usize) -> Result<BigRational> {
    let q = trace_exact_cyclo(p, ell)?;
    q.to_rational()
        .ok_or_else(|| Error::NonRational(q.to_string()))
}

/// Which evaluation produced a table entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Residue,
    Oracle,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub ell: usize,
    #[serde(with = "serde_rational")]
    pub q: BigRational,
    #[serde(default)]
    pub engine: Provenance,
}

/// Rational traces of one potential, `σ_ℓ = q_ℓ Π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub potential_digest: String,
    pub entries: Vec<TraceEntry>,
}

impl TraceTable {
    pub fn compute(p: &Potential, max_ell: usize) -> Result<Self> {
        let qs = traces_exact(p, max_ell)?;
        let entries = qs
            .into_iter()
            .enumerate()
            .map(|(i, q)| {
                q.to_rational()
                    .map(|q| TraceEntry { ell: i + 2, q, engine: Provenance::Residue })
                    .ok_or_else(|| Error::NonRational(q.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            potential_digest: p.digest(),
            entries,
        })
    }

    pub fn from_map(digest: String, m: &BTreeMap<usize, BigRational>) -> Self {
        Self {
            potential_digest: digest,
            entries: m
                .iter()
                .map(|(&ell, q)| TraceEntry { ell, q: q.clone(), engine: Provenance::Residue })
                .collect(),
        }
    }

    /// Largest ℓ such that every order `2..=ℓ` is present.
    pub fn max_contiguous(&self) -> usize {
        let mut l = 1;
        while self.q(l + 1).is_some() {
            l += 1;
        }
        l
    }

    pub fn q(&self, ell: usize) -> Option<&BigRational> {
        self.entries.iter().find(|e| e.ell == ell).map(|e| &e.q)
    }

    /// `σ_ℓ` as a polynomial in Π; σ₁ is zero by regularization.
    pub fn sigma(&self, ell: usize) -> Option<PiPoly> {
        if ell == 1 {
            return Some(PiPoly::zero());
        }
        self.q(ell).map(|q| PiPoly::monomial(q.clone(), 1))
    }

    /// Drops orders above `max_ell`.
    pub fn truncated(&self, max_ell: usize) -> Self {
        Self {
            potential_digest: self.potential_digest.clone(),
            entries: self
                .entries
                .iter()
                .filter(|e| e.ell <= max_ell)
                .cloned()
                .collect(),
        }
    }
}
