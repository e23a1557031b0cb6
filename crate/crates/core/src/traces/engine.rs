//! Rank-one residue engine.
//!
//! Every pole of the diagonal entry `F₀(k) = ⟨Â_k^ℓ e₀, e₀⟩` is a translate of
//! one of two representative poles, `k = −μ` (an A-layer site is singular)
//! and `k = −2μ` (a B-layer site is singular). At a representative pole the
//! transfer operator splits as `M = t⁻¹|f⟩⟨g| + N` with `t = k − pole` and `N`
//! regular, so the weighted residue sum over all translates collapses to
//! scalar generating functions in `t`:
//!
//! `Σ_ℓ z^ℓ Res tr(X M^ℓ) = Σ_j z^j [t^{j−1}] D(z) C(z)^{j−1}`
//!
//! with `C(z) = Σ z^a ⟨g, N^a f⟩` and `D(z) = Σ z^n ⟨g, y_n⟩`,
//! `y_n = N y_{n−1} + X N^n f`, `X` the diagonal of second coordinates.
//! The unweighted sum (X = 1) must vanish; it is returned as a check.
//!
//! The engine works with the transpose of Â (vectors are pushed along the
//! steps), which leaves traces unchanged. All orders ℓ ≤ L come out of one
//! pass.

use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;

use super::series::{Scalar, Series};
use crate::exactnum::{CycloNum, QOmega};
use crate::model::{Potential, Shift};

type Field<S> = HashMap<Shift, Series<S>>;

struct Family<'a, S> {
    plus: &'a [(Shift, S)],
    minus: &'a [(Shift, S)],
    pole: CycloNum,
    singular: Shift,
    len: usize,
    inverses: RwLock<HashMap<Shift, S>>,
}

impl<S: Scalar> Family<'_, S> {
    fn inverse(&self, pos: Shift) -> S {
        if let Some(v) = self.inverses.read().unwrap().get(&pos) {
            return v.clone();
        }
        let d = &(&self.pole + &CycloNum::gamma(pos.0, pos.1)) + &CycloNum::mu();
        let v = S::from_cyclo(&d)
            .expect("site symbols lie in Z[ω]")
            .inv()
            .expect("regular site");
        self.inverses.write().unwrap().insert(pos, v.clone());
        v
    }

    fn push(&self, v: &Field<S>, steps: &[(Shift, S)], len: usize) -> Field<S> {
        let mut targets: Vec<Shift> = v
            .keys()
            .flat_map(|p| steps.iter().map(move |(d, _)| (p.0 + d.0, p.1 + d.1)))
            .collect();
        targets.sort_unstable();
        targets.dedup();
        targets
            .into_par_iter()
            .filter_map(|x| {
                let mut acc = Series::zero(len);
                for (d, c) in steps {
                    if let Some(s) = v.get(&(x.0 - d.0, x.1 - d.1)) {
                        acc.add_scaled_lazy(c, s);
                    }
                }
                acc.reduce();
                (!acc.is_zero()).then_some((x, acc))
            })
            .collect()
    }

    fn resolve(&self, v: Field<S>, skip: Option<Shift>) -> Field<S> {
        v.into_par_iter()
            .filter(|(p, _)| Some(*p) != skip)
            .map(|(p, s)| {
                let inv = self.inverse(p);
                (p, s.div_linear(&inv))
            })
            .collect()
    }

    /// Returns `(⟨g, v⟩, N v)`.
    fn step(&self, v: &Field<S>, len: usize) -> (Series<S>, Field<S>) {
        let zero = || Series::zero(len);
        if self.singular == (0, 0) {
            let b = self.resolve(self.push(v, self.minus, len), None);
            let w = self.push(&b, self.plus, len);
            let g = w.get(&self.singular).cloned().unwrap_or_else(zero);
            (g, self.resolve(w, Some(self.singular)))
        } else {
            let b = self.push(v, self.minus, len);
            let g = b.get(&self.singular).cloned().unwrap_or_else(zero);
            let b = self.resolve(b, Some(self.singular));
            (g, self.resolve(self.push(&b, self.plus, len), None))
        }
    }

    fn start(&self) -> Field<S> {
        let e = Field::from([(self.singular, Series::unit(self.len))]);
        if self.singular == (0, 0) {
            e
        } else {
            self.resolve(self.push(&e, self.plus, self.len), None)
        }
    }
}

fn weight<S: Scalar>(v: &Field<S>) -> Field<S> {
    v.iter()
        .filter(|(p, _)| p.1 != 0)
        .map(|(p, s)| (*p, s.scale(&S::from_int(p.1))))
        .collect()
}

fn add_fields<S: Scalar>(mut a: Field<S>, b: Field<S>) -> Field<S> {
    for (p, s) in b {
        match a.get_mut(&p) {
            Some(t) => {
                t.add_assign_lazy(&s);
                t.reduce();
            }
            None => {
                a.insert(p, s);
            }
        }
    }
    a
}

fn truncate_field<S: Scalar>(v: &mut Field<S>, len: usize) {
    for s in v.values_mut() {
        s.truncate(len);
    }
}

/// `[Σ_j z^j [t^{j−1}] D(z) C(z)^{j−1}]_ℓ` for ℓ = 0..=L.
///
/// Entry `n` of `d` and `c` is known through `t^{L−1−n}`, which is all the
/// extraction below ever reads.
fn collapse<S: Scalar>(d: &[Series<S>], c: &[Series<S>], big_l: usize) -> Vec<S> {
    let mut tot = vec![S::zero(); big_l + 1];
    let mut pz: Vec<Series<S>> = d.to_vec();
    for j in 1..=big_l {
        for (n, s) in pz.iter().enumerate() {
            let l = j + n;
            if l > big_l {
                break;
            }
            tot[l] = tot[l].add(&s.0[j - 1]);
        }
        if j == big_l {
            break;
        }
        let keep = (big_l - j).min(pz.len());
        pz = (0..keep)
            .into_par_iter()
            .map(|m| {
                let mut acc = Series::zero(big_l - m);
                for a in 0..=m.min(c.len() - 1) {
                    acc.add_assign_lazy(&pz[m - a].mul(&c[a]));
                }
                acc.reduce();
                acc
            })
            .collect();
    }
    tot
}

struct FamilySums {
    weighted: Vec<CycloNum>,
    plain: Vec<CycloNum>,
}

fn run_family<S: Scalar>(
    plus: &[(Shift, S)],
    minus: &[(Shift, S)],
    pole: CycloNum,
    singular: Shift,
    big_l: usize,
) -> FamilySums {
    let fam = Family {
        plus,
        minus,
        pole,
        singular,
        len: big_l,
        inverses: RwLock::new(HashMap::new()),
    };
    let mut c = Vec::with_capacity(big_l);
    let mut dser = Vec::with_capacity(big_l);
    let mut v = fam.start();
    let mut y = weight(&v);
    for n in 0..big_l {
        let (cn, mut nv) = fam.step(&v, big_l - n);
        let (dn, ny) = fam.step(&y, big_l - n);
        c.push(cn);
        dser.push(dn);
        if n + 1 < big_l {
            // v_{n+1} only feeds orders t^{<L−n−1}
            truncate_field(&mut nv, big_l - n - 1);
            let mut ny = ny;
            truncate_field(&mut ny, big_l - n - 1);
            v = nv;
            y = add_fields(ny, weight(&v));
        }
    }
    let d1: Vec<Series<S>> = c
        .iter()
        .enumerate()
        .map(|(n, s)| s.scale(&S::from_int(n as i64 + 1)))
        .collect();
    let (weighted, plain) = rayon::join(
        || collapse(&dser, &c, big_l),
        || collapse(&d1, &c, big_l),
    );
    FamilySums {
        weighted: weighted.iter().map(S::to_cyclo).collect(),
        plain: plain.iter().map(S::to_cyclo).collect(),
    }
}

/// Output of one engine pass.
#[derive(Clone, Debug)]
pub struct EngineOutput {
    /// `q[ℓ]` with `σ_ℓ = q[ℓ]·π/√3`, valid for `2 ≤ ℓ ≤ L`.
    pub q: Vec<CycloNum>,
    /// Unweighted residue sums of the two families; all must vanish.
    pub completeness: Vec<(CycloNum, CycloNum)>,
}

/// Step weights rescaled by `κ` and `1/κ` so both layers fit in Q(ω), if possible.
fn omega_steps(p: &Potential) -> Option<(Vec<(Shift, QOmega)>, Vec<(Shift, QOmega)>)> {
    let s3 = CycloNum::sqrt3();
    let third = CycloNum::from_rational(crate::exactnum::rational::rat(1, 3));
    for (kp, km) in [(CycloNum::one(), CycloNum::one()), (s3.clone(), &s3 * &third)] {
        let plus: Option<Vec<_>> = p
            .plus_steps()
            .iter()
            .map(|(d, c)| QOmega::from_cyclo(&(c * &kp)).map(|q| (*d, q)))
            .collect();
        let minus: Option<Vec<_>> = p
            .minus_steps()
            .iter()
            .map(|(d, c)| QOmega::from_cyclo(&(c * &km)).map(|q| (*d, q)))
            .collect();
        if let (Some(a), Some(b)) = (plus, minus) {
            return Some((a, b));
        }
    }
    None
}

fn run_both<S: Scalar>(
    plus: &[(Shift, S)],
    minus: &[(Shift, S)],
    big_l: usize,
) -> (FamilySums, FamilySums) {
    let mu = CycloNum::mu();
    rayon::join(
        || run_family(plus, minus, -&mu, (0, 0), big_l),
        || run_family(plus, minus, -&(&mu + &mu), (1, 1), big_l),
    )
}

/// Runs the engine for all orders up to `max_ell`.
pub fn residue_traces(p: &Potential, max_ell: usize) -> EngineOutput {
    let big_l = max_ell.max(1);
    let (a, b) = match omega_steps(p) {
        Some((plus, minus)) => run_both(&plus, &minus, big_l),
        None => run_both(&p.plus_steps(), &p.minus_steps(), big_l),
    };
    // q = −(2/9)·iω·√3 · S with S = −(A_X + B_X) + B_1
    let factor = (&(&CycloNum::i() * &CycloNum::omega()) * &CycloNum::sqrt3())
        .scale(&crate::exactnum::rational::rat(-2, 9));
    let q = (0..=big_l)
        .map(|l| {
            let s = &(-&(&a.weighted[l] + &b.weighted[l])) + &b.plain[l];
            &factor * &s
        })
        .collect();
    let completeness = (0..=big_l)
        .map(|l| (a.plain[l].clone(), b.plain[l].clone()))
        .collect();
    EngineOutput { q, completeness }
}
