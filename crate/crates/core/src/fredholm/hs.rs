//! Certified upper bound on the Hilbert–Schmidt norm of Â₀.
//!
//! The window part sums squared entry moduli over rows `3(i,j)`, `|i|,|j| ≤ M`.
//! The remainder is bounded by Hölder in Schatten-4 norms,
//! `‖(1−P_M)Â₀‖₂ ≤ ‖V₊‖‖V₋‖·‖(1−P_M)Λ‖₄·‖Λ‖₄`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::rational::{rat, serde_rational};
use crate::exactnum::{pi_over_sqrt3, CycloNum, RatInterval};
use crate::model::{build_stencil, Potential};
use crate::{Error, Result};

/// Fractional bits kept per row in dyadic mode.
const ROW_BITS: u64 = 64;
const ROOT_BITS: u64 = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HsMode {
    Exact,
    Dyadic,
}

impl std::str::FromStr for HsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "dyadic" => Ok(Self::Dyadic),
            _ => Err(Error::Validation(format!("unknown hs mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsReport {
    #[serde(rename = "M")]
    pub m: u32,
    pub mode: HsMode,
    /// `‖P_M Â₀‖₂²`.
    pub window_norm_sq: RatInterval,
    /// Upper bound on `‖P_M Â₀‖₂`.
    #[serde(with = "serde_rational")]
    pub window_bound: BigRational,
    /// `Σ_{|m|∞≤6} 1/g(m)²`, exact.
    #[serde(with = "serde_rational")]
    pub main_part: BigRational,
    /// `g(m) ≥ |m|² + 25` verified for every `|m|∞ ≥ 7`.
    pub g_lower_ok: bool,
    /// `‖V₊‖‖V₋‖·(8/21 + π/549)^{1/4}`, to compare with 213/10.
    pub hoelder_factor: RatInterval,
    /// `(213/10)(1/√3)(∫_M^∞ 2πr/(r²+(M−1)²)² dr)^{1/4}`.
    pub integral_tail: RatInterval,
    /// `‖Λ‖₄⁴` over the (2,2) class, from an explicit sum plus shell remainder.
    pub lambda4_pow4: RatInterval,
    /// `‖(1−P_M)Λ‖₄⁴` over the (1,1) class, shell remainder only.
    pub outer4_pow4: RatInterval,
    /// Rigorous bound on `‖(1−P_M)Â₀‖₂`.
    pub tail_bound: RatInterval,
    /// `window_bound + tail_bound.hi`, rounded up.
    #[serde(with = "serde_rational")]
    pub total_triangle: BigRational,
    /// `√(window_norm_sq.hi + tail_bound.hi²)`, rounded up. Rows split orthogonally,
    /// so this is a bound on `‖Â₀‖₂` as well.
    #[serde(with = "serde_rational")]
    pub total: BigRational,
}

/// `a + bω` with machine integers.
#[derive(Clone, Copy, Debug, PartialEq)]
struct ZOmega {
    a: i128,
    b: i128,
}

impl ZOmega {
    fn mul(self, o: Self) -> Self {
        // ω² = −1 − ω
        Self {
            a: self.a * o.a - self.b * o.b,
            b: self.a * o.b + self.b * o.a - self.b * o.b,
        }
    }

    fn conj(self) -> Self {
        Self {
            a: self.a - self.b,
            b: -self.b,
        }
    }

    fn norm_big(self) -> BigInt {
        let (a, b) = (BigInt::from(self.a), BigInt::from(self.b));
        &a * &a - &a * &b + &b * &b
    }

    fn from_cyclo(c: &CycloNum) -> Option<Self> {
        let k = c.coeffs();
        if k.iter().any(|x| !x.is_integer()) || !k[1].is_zero() || !k[3].is_zero() {
            return None;
        }
        let c0 = k[0].to_integer().to_i128()?;
        let c2 = k[2].to_integer().to_i128()?;
        Some(Self { a: c0 + c2, b: c2 })
    }
}

/// `ω²(a+1) − ω(b+1)` at offset `(a,b)`.
fn symbol(off: (i64, i64)) -> ZOmega {
    let x = (off.0 + 1) as i128;
    let y = (off.1 + 1) as i128;
    ZOmega { a: -x, b: -x - y }
}

fn norm_i(off: (i64, i64)) -> i128 {
    let x = (off.0 + 1) as i128;
    let y = (off.1 + 1) as i128;
    x * x + x * y + y * y
}

/// Composite terms grouped by net shift: each group is one matrix entry per row.
fn entry_groups(p: &Potential) -> Vec<Vec<((i64, i64), CycloNum)>> {
    let st = build_stencil(p);
    let mut g: BTreeMap<(i64, i64), Vec<((i64, i64), CycloNum)>> = BTreeMap::new();
    for t in &st.composite {
        g.entry(t.net_shift)
            .or_default()
            .push((t.resolvent_offset, t.coeff.clone()));
    }
    g.into_values().collect()
}

fn prefactor_sq(p: &Potential) -> Result<BigRational> {
    let pf = build_stencil(p).prefactor;
    (&pf * &pf.conj())
        .to_rational()
        .ok_or_else(|| Error::NotApplicable("prefactor modulus is irrational".into()))
}

/// Row sums `|Λ(s)|²·Σ_g |Σ_t c_t Λ(s+o_t)|²` as exact rationals, Z[ω] coefficients only.
struct FastRows {
    groups: Vec<Vec<((i64, i64), ZOmega)>>,
    pf2: BigRational,
}

impl FastRows {
    fn new(p: &Potential) -> Result<Option<Self>> {
        let pf2 = prefactor_sq(p)?;
        let mut groups = Vec::new();
        for g in entry_groups(p) {
            let mut out = Vec::new();
            for (o, c) in g {
                match ZOmega::from_cyclo(&c) {
                    Some(z) => out.push((o, z)),
                    None => return Ok(None),
                }
            }
            groups.push(out);
        }
        Ok(Some(Self { groups, pf2 }))
    }

    /// `(numerator, denominator)` pairs whose sum is the row's squared norm.
    fn row_terms(&self, s: (i64, i64)) -> Vec<(BigInt, BigInt)> {
        let ns = BigInt::from(norm_i(s));
        let mut out = Vec::with_capacity(self.groups.len());
        for g in &self.groups {
            let offs: Vec<(i64, i64)> = g.iter().map(|(o, _)| (s.0 + o.0, s.1 + o.1)).collect();
            if g.len() == 1 {
                // |c/d|² = |c|²/N(d)
                let c = g[0].1;
                let num = c.norm_big() * self.pf2.numer();
                let den = &ns * BigInt::from(norm_i(offs[0])) * self.pf2.denom();
                out.push((num, den));
                continue;
            }
            let norms: Vec<i128> = offs.iter().map(|&o| norm_i(o)).collect();
            let d: BigInt = norms.iter().map(|&n| BigInt::from(n)).product();
            let mut wa = BigInt::zero();
            let mut wb = BigInt::zero();
            for (k, (_, c)) in g.iter().enumerate() {
                let z = c.mul(symbol(offs[k]).conj());
                let cof: BigInt = norms
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &n)| BigInt::from(n))
                    .product();
                wa += BigInt::from(z.a) * &cof;
                wb += BigInt::from(z.b) * &cof;
            }
            let w2 = &wa * &wa - &wa * &wb + &wb * &wb;
            out.push((w2 * self.pf2.numer(), &ns * &d * &d * self.pf2.denom()));
        }
        out
    }
}

/// Generic row squared norm via field arithmetic; `|z|²` lies in Q(√3).
fn generic_row(p: &Potential, groups: &[Vec<((i64, i64), CycloNum)>], s: (i64, i64)) -> Result<(BigRational, BigRational)> {
    let zero_k = CycloNum::zero();
    let pf = build_stencil(p).prefactor;
    let ls = crate::model::lattice::lambda_at(s, &zero_k)?;
    let mut x = BigRational::zero();
    let mut y = BigRational::zero();
    for g in groups {
        let mut z = CycloNum::zero();
        for (o, c) in g {
            z += &(c * &crate::model::lattice::lambda_at((s.0 + o.0, s.1 + o.1), &zero_k)?);
        }
        let e = &(&pf * &ls) * &z;
        let m = &e * &e.conj();
        x += m.coeff(0);
        y -= m.coeff(3);
    }
    Ok((x, y))
}

/// `‖P_M Â₀‖₂²` for the potential's stencil at k = 0.
pub fn window_norm_sq(p: &Potential, m: u32, mode: HsMode) -> Result<RatInterval> {
    let m = m as i64;
    let rows: Vec<i64> = (-m..=m).collect();
    if let Some(fast) = FastRows::new(p)? {
        return Ok(match mode {
            HsMode::Exact => {
                let parts: Vec<BigRational> = rows
                    .par_iter()
                    .map(|&i| {
                        let mut acc = BigRational::zero();
                        for j in -m..=m {
                            for (n, d) in fast.row_terms((3 * i, 3 * j)) {
                                acc += BigRational::new(n, d);
                            }
                        }
                        acc
                    })
                    .collect();
                RatInterval::point(parts.into_iter().fold(BigRational::zero(), |a, b| a + b))
            }
            HsMode::Dyadic => {
                let parts: Vec<(BigInt, BigInt)> = rows
                    .par_iter()
                    .map(|&i| {
                        let mut lo = BigInt::zero();
                        let mut hi = BigInt::zero();
                        for j in -m..=m {
                            for (n, d) in fast.row_terms((3 * i, 3 * j)) {
                                let (q, r) = (n << ROW_BITS as usize).div_rem(&d);
                                if !r.is_zero() {
                                    hi += 1;
                                }
                                lo += &q;
                                hi += q;
                            }
                        }
                        (lo, hi)
                    })
                    .collect();
                let (lo, hi) = parts
                    .into_iter()
                    .fold((BigInt::zero(), BigInt::zero()), |(a, b), (c, d)| (a + c, b + d));
                let den = BigInt::one() << ROW_BITS as usize;
                RatInterval {
                    lo: BigRational::new(lo, den.clone()),
                    hi: BigRational::new(hi, den),
                }
            }
        });
    }
    let groups = entry_groups(p);
    let parts: Vec<(BigRational, BigRational)> = rows
        .par_iter()
        .map(|&i| {
            let mut x = BigRational::zero();
            let mut y = BigRational::zero();
            for j in -m..=m {
                let (a, b) = generic_row(p, &groups, (3 * i, 3 * j))?;
                x += a;
                y += b;
            }
            Ok((x, y))
        })
        .collect::<Result<_>>()?;
    let (x, y) = parts
        .into_iter()
        .fold((BigRational::zero(), BigRational::zero()), |(a, b), (c, d)| (a + c, b + d));
    let s3 = RatInterval::point(rat(3, 1)).nth_root(2, ROOT_BITS)?;
    let out = s3.scale(&y).add_rational(&x);
    Ok(match mode {
        HsMode::Exact => out,
        HsMode::Dyadic => out.round_out(ROW_BITS),
    })
}

/// `g(m) = 3((m₁+1)² + (m₂+1)² + (m₁+m₂)²)/2 − 2`, always an integer.
pub fn g_lattice(m1: i64, m2: i64) -> i64 {
    let s = (m1 + 1).pow(2) + (m2 + 1).pow(2) + (m1 + m2).pow(2);
    3 * s / 2 - 2
}

pub fn main_part() -> BigRational {
    let mut acc = BigRational::zero();
    for a in -6..=6 {
        for b in -6..=6 {
            let g = BigInt::from(g_lattice(a, b));
            acc += BigRational::new(BigInt::one(), &g * &g);
        }
    }
    acc
}

/// Checks `g(m) ≥ |m|² + 25` on `|m|∞ ≥ 7`.
///
/// `g(m) − |m|² − 25 = 2m₁² + 3m₁m₂ + 2m₂² + 3(m₁+m₂) − 24 ≥ |m|²/2 − 3√2|m| − 24`,
/// which is positive once `|m| ≥ 13`; the remaining points are enumerated.
pub fn g_lower_bound_holds() -> bool {
    (-13i64..=13).all(|a| {
        (-13i64..=13).all(|b| a.abs().max(b.abs()) < 7 || g_lattice(a, b) >= a * a + b * b + 25)
    })
}

fn pi() -> RatInterval {
    let s3 = RatInterval::point(rat(3, 1)).nth_root(2, ROOT_BITS).unwrap();
    (&pi_over_sqrt3() * &s3).round_out(ROOT_BITS)
}

/// `(213/10)(π/(9(M² + (M−1)²)))^{1/4}`; the integral equals `π/(M² + (M−1)²)`.
pub fn integral_tail(m: u32) -> RatInterval {
    let m = BigInt::from(m);
    let den = BigInt::from(9) * (&m * &m + (&m - 1) * (&m - 1));
    let x = pi().scale(&BigRational::new(BigInt::one(), den));
    x.nth_root(4, ROOT_BITS).unwrap().scale(&rat(213, 10))
}

/// Upper bound for `Σ 1/N(m)²` over one residue class mod 3 with `|m|∞ > k`.
///
/// At most `2(2s+3)/3` class points have `|m|∞ = s`, and `N(m) ≥ 3s²/4` there.
fn shell_remainder(k: i64) -> BigRational {
    let k = BigRational::from_integer(k.into());
    rat(32, 27) / (&k * &k) + rat(32, 27) / (&k * &k * &k)
}

/// `Σ_{m ∈ (3Z+2)²} 1/N(m)²`, explicit up to `|m|∞ ≤ k`.
fn lambda_class_pow4(k: i64) -> RatInterval {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for a in -k..=k {
        for b in -k..=k {
            if a.rem_euclid(3) != 2 || b.rem_euclid(3) != 2 {
                continue;
            }
            let n = BigInt::from(a * a + a * b + b * b);
            let (q, r) = (BigInt::one() << ROW_BITS as usize).div_rem(&(&n * &n));
            lo += &q;
            hi += q + if r.is_zero() { 0 } else { 1 };
        }
    }
    let den = BigInt::one() << ROW_BITS as usize;
    RatInterval {
        lo: BigRational::new(lo, den.clone()),
        hi: BigRational::new(hi, den) + shell_remainder(k),
    }
}

/// Operator norm of `V₊` (or `V₋`) for the canonical potential: `3√3`, so the product is 27.
const V_NORM_PRODUCT: i64 = 27;

fn ceil_to(x: &BigRational, q: i64) -> BigRational {
    let q = BigRational::from_integer(q.into());
    (x * &q).ceil() / q
}

fn sqrt_hi(x: &BigRational) -> BigRational {
    RatInterval::point(x.clone()).nth_root(2, ROOT_BITS).unwrap().hi
}

/// Certified bound on `‖Â₀‖₂` for the canonical potential.
pub fn hs_norm_certified(m: u32, mode: HsMode) -> Result<HsReport> {
    if m == 0 {
        return Err(Error::Validation("window radius must be at least 1".into()));
    }
    let p = Potential::canonical();
    let window = window_norm_sq(&p, m, mode)?;
    let window_bound = ceil_to(&sqrt_hi(&window.hi), 10_000);

    let integral_inner = &RatInterval::point(rat(8, 21)) + &pi().scale(&rat(1, 549));
    let hoelder_factor = integral_inner
        .nth_root(4, ROOT_BITS)?
        .scale(&rat(V_NORM_PRODUCT, 1));

    let lambda4 = lambda_class_pow4(90);
    let outer = RatInterval {
        lo: BigRational::zero(),
        hi: shell_remainder(3 * m as i64 + 1),
    };
    let tail_bound = (&lambda4 * &outer)
        .nth_root(4, ROOT_BITS)?
        .scale(&rat(V_NORM_PRODUCT, 1));
    let tail_bound = RatInterval {
        lo: BigRational::zero(),
        hi: tail_bound.hi,
    };

    let total_triangle = ceil_to(&(&window_bound + &tail_bound.hi), 1000);
    let total = ceil_to(&sqrt_hi(&(&window.hi + &tail_bound.hi * &tail_bound.hi)), 1000);

    Ok(HsReport {
        m,
        mode,
        window_norm_sq: window,
        window_bound,
        main_part: main_part(),
        g_lower_ok: g_lower_bound_holds(),
        hoelder_factor,
        integral_tail: integral_tail(m),
        lambda4_pow4: lambda4,
        outer4_pow4: outer,
        tail_bound,
        total_triangle,
        total,
    })
}

impl HsReport {
    /// The report's internal consistency, recomputed from its own rationals.
    pub fn recheck(&self) -> bool {
        let w_ok = &self.window_bound * &self.window_bound >= self.window_norm_sq.hi;
        let t2 = &self.tail_bound.hi * &self.tail_bound.hi;
        let total_ok = &self.total * &self.total >= &self.window_norm_sq.hi + &t2;
        let tri_ok = self.total_triangle >= &self.window_bound + &self.tail_bound.hi;
        // tail_bound⁴ ≥ 27⁴·λ⁴·outer⁴
        let t4 = &t2 * &t2;
        let f = BigRational::from_integer(BigInt::from(V_NORM_PRODUCT).pow(4));
        let tail_ok = t4 >= f * &self.lambda4_pow4.hi * &self.outer4_pow4.hi;
        w_ok && total_ok && tri_ok && tail_ok && !self.window_norm_sq.lo.is_negative()
    }
}
