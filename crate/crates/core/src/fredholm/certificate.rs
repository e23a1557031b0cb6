//! Integer-only certificate for the first real magic angle.
//!
//! With `f` the Taylor polynomial of `det₂(1 − α²Â)` of order `taylor_order`,
//! `r₀` and `r₁` the remainder majorants at α = 3/5, and `g` the termwise
//! supremum of `f'` over (1/3, 3/5):
//! `det₂ > 0` at 0.583, `det₂ < 0` at 0.589, `∂_α det₂ < 0` on (1/3, 3/5),
//! and `‖Â₀‖ ≤ 9` excludes eigenvalues `1/α²` with `α < 1/3`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::detpoly::{det2_taylor, plemelj_smithies, DetPoly};
use super::hs::HsReport;
use super::tail::{tail_bound, tail_sum_bound};
use crate::exactnum::interval::pi_machin;
use crate::exactnum::rational::{rat, serde_rational};
use crate::exactnum::{pi_over_sqrt3, PiPoly, RatInterval};
use crate::traces::{TraceEntry, TraceTable};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

/// One inequality `value relation bound`, decided on the interval endpoint that matters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: RatInterval,
    pub relation: Relation,
    #[serde(with = "serde_rational")]
    pub bound: BigRational,
    pub holds: bool,
}

impl Check {
    fn new(name: &str, value: RatInterval, relation: Relation, bound: BigRational) -> Self {
        let mut c = Self {
            name: name.to_string(),
            value,
            relation,
            bound,
            holds: false,
        };
        c.holds = c.evaluate();
        c
    }

    pub fn evaluate(&self) -> bool {
        match self.relation {
            Relation::Lt => self.value.hi < self.bound,
            Relation::Le => self.value.hi <= self.bound,
            Relation::Gt => self.value.lo > self.bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub taylor_order: usize,
    pub tail_n: u32,
    pub g_order: usize,
    /// Norm bound at which the reference tail checks are evaluated.
    #[serde(with = "serde_rational")]
    pub reference_hs: BigRational,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            taylor_order: 16,
            tail_n: 17,
            g_order: 20,
            reference_hs: rat(11, 2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub potential_digest: String,
    pub options: CertifyOptions,
    pub traces: Vec<TraceEntry>,
    pub pi_over_sqrt3: RatInterval,
    pub hs: HsReport,
    /// Enclosure of `‖P_M Â₀‖₂`.
    pub hs_window_bound: RatInterval,
    #[serde(with = "serde_rational")]
    pub hs_total_bound: BigRational,
    pub taylor_order: usize,
    pub tail_r0: RatInterval,
    pub tail_r1: RatInterval,
    pub f_left: RatInterval,
    pub f_right: RatInterval,
    pub g_bound: RatInterval,
    #[serde(with = "interval_pair")]
    pub interval: (BigRational, BigRational),
    /// Inequalities the verdict rests on.
    pub checks: Vec<Check>,
    /// Reference constants evaluated as stated; informational, not part of the verdict.
    pub reference_checks: Vec<Check>,
    pub failures: Vec<String>,
    pub verdict: bool,
    pub note: String,
}

mod interval_pair {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exactnum::{format_rational, parse_rational};

    pub fn serialize<S: Serializer>(p: &(BigRational, BigRational), s: S) -> Result<S::Ok, S::Error> {
        [format_rational(&p.0), format_rational(&p.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(BigRational, BigRational), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let a = parse_rational(&a).map_err(serde::de::Error::custom)?;
        let b = parse_rational(&b).map_err(serde::de::Error::custom)?;
        Ok((a, b))
    }
}

const NOTE: &str = "Certifies a simple zero of alpha -> det2(1 - alpha^2 A) in the open interval, \
i.e. a simple eigenvalue 1/alpha^2 of A on the scalar space; on the two-component \
Hamiltonian space this eigenvalue appears twice.";

fn left() -> BigRational {
    rat(583, 1000)
}

fn right() -> BigRational {
    rat(589, 1000)
}

fn beta() -> BigRational {
    rat(3, 5)
}

fn third() -> BigRational {
    rat(1, 3)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// Termwise supremum of `f'` over `(1/3, β)` for `f` of order `n`.
pub fn derivative_majorant(det: &DetPoly, n: usize, pi: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::zero();
    for k in 2..=n {
        // d/dα μ_k(−α²)^k/k! = 2μ_k(−1)^k α^{2k−1}/(k−1)!
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = det.mu[k]
            .scale(&BigRational::new(BigInt::from(2 * sign), factorial(k - 1)))
            .eval_interval(pi);
        let at = |a: BigRational| c.scale(&a.pow(2 * k as i32 - 1));
        let term = if c.hi.is_negative() {
            at(third())
        } else if !c.lo.is_negative() {
            at(beta())
        } else {
            at(third()).hull(&at(beta()))
        };
        acc = &acc + &term;
    }
    acc
}

/// `‖Â₀‖ ≤ ‖V₊‖‖V₋‖/min N = 27/3`; the minimum of `N(m) = m₁² + m₁m₂ + m₂²` over both
/// residue classes is attained inside `|m|∞ ≤ 2`, as `N ≥ 3|m|∞²/4`.
fn operator_norm_bound() -> BigRational {
    let mut min_n = i64::MAX;
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            let class = (a.rem_euclid(3), b.rem_euclid(3));
            if class == (1, 1) || class == (2, 2) {
                min_n = min_n.min(a * a + a * b + b * b);
            }
        }
    }
    rat(27, min_n)
}

fn sqrt_interval(x: &RatInterval) -> Result<RatInterval> {
    x.nth_root(2, 96)
}

pub fn certify_first_magic(table: &TraceTable, hs: &HsReport) -> Result<Certificate> {
    certify_first_magic_with(table, hs, &CertifyOptions::default())
}

pub fn certify_first_magic_with(
    table: &TraceTable,
    hs: &HsReport,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    if opts.tail_n as usize != opts.taylor_order + 1 || opts.g_order < opts.taylor_order {
        return Err(Error::Validation(
            "need tail_n = taylor_order + 1 and g_order >= taylor_order".into(),
        ));
    }
    let need = opts.g_order.max(opts.taylor_order);
    let missing: Vec<usize> = (2..=need).filter(|&l| table.q(l).is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!("insufficient traces, missing ell = {missing:?}")));
    }
    let det = det2_taylor(table, need)?;
    let traces = table.truncated(need).entries;
    build(table.potential_digest.clone(), traces, det, pi_over_sqrt3(), hs.clone(), opts.clone())
}

fn build(
    digest: String,
    traces: Vec<TraceEntry>,
    det: DetPoly,
    pi: RatInterval,
    hs: HsReport,
    opts: CertifyOptions,
) -> Result<Certificate> {
    let f = DetPoly {
        mu: det.mu[..=opts.taylor_order].to_vec(),
    };
    let f_left = f.eval_interval(&left(), &pi);
    let f_right = f.eval_interval(&right(), &pi);
    let g_bound = derivative_majorant(&det, opts.g_order, &pi);

    let hs_total = hs.total.clone();
    let tail_r0 = tail_sum_bound(opts.tail_n, 0, &hs_total, &beta())?;
    let tail_r1 = tail_sum_bound(opts.tail_n, 1, &hs_total, &beta())?;

    let checks = vec![
        Check::new("f(0.583) > 1/40", f_left.clone(), Relation::Gt, rat(1, 40)),
        Check::new("f(0.589) < -1/40", f_right.clone(), Relation::Lt, rat(-1, 40)),
        Check::new("g(3/5) < -7/10", g_bound.clone(), Relation::Lt, rat(-7, 10)),
        Check::new("r0 <= 1/50", tail_r0.clone(), Relation::Le, rat(1, 50)),
        Check::new("r1 <= 1/2", tail_r1.clone(), Relation::Le, rat(1, 2)),
        Check::new(
            "hs total <= 11/2",
            RatInterval::point(hs_total.clone()),
            Relation::Le,
            rat(11, 2),
        ),
        Check::new(
            "operator norm <= 9",
            RatInterval::point(operator_norm_bound()),
            Relation::Le,
            rat(9, 1),
        ),
    ];

    let hs_window_bound = RatInterval {
        lo: sqrt_interval(&hs.window_norm_sq)?.lo,
        hi: hs.window_bound.clone(),
    };
    let rh = &opts.reference_hs;
    let mut reference_checks = vec![
        Check::new("window bound <= 5", hs_window_bound.clone(), Relation::Le, rat(5, 1)),
        Check::new("integral tail < 1/2", hs.integral_tail.clone(), Relation::Lt, rat(1, 2)),
        Check::new(
            "window + integral tail < 11/2",
            &hs_window_bound + &hs.integral_tail,
            Relation::Lt,
            rat(11, 2),
        ),
        Check::new(
            "sum_{|m|<=6} 1/g^2 <= 24/7",
            RatInterval::point(hs.main_part.clone()),
            Relation::Le,
            rat(24, 7),
        ),
        Check::new(
            "g(m) >= |m|^2 + 25 for |m| > 6",
            RatInterval::point(if hs.g_lower_ok { BigRational::one() } else { BigRational::zero() }),
            Relation::Gt,
            BigRational::zero(),
        ),
        Check::new(
            "27 (8/21 + pi/549)^(1/4) <= 213/10",
            hs.hoelder_factor.clone(),
            Relation::Le,
            rat(213, 10),
        ),
    ];
    for (name, m, bound) in [("r0", 0u8, rat(1, 50)), ("r1", 1u8, rat(1, 2))] {
        let closed = tail_bound(opts.tail_n, m, rh, &beta());
        let summed = tail_sum_bound(opts.tail_n, m, rh, &beta());
        if let (Ok(c), Ok(s)) = (closed, summed) {
            let b = crate::exactnum::format_rational(&bound);
            let h = crate::exactnum::format_rational(rh);
            reference_checks.push(Check::new(
                &format!("{name} closed form <= {b} at hs = {h}"),
                c,
                Relation::Le,
                bound.clone(),
            ));
            reference_checks.push(Check::new(
                &format!("{name} series <= {b} at hs = {h}"),
                s,
                Relation::Le,
                bound,
            ));
        }
    }
    let g_lit = derivative_majorant(&det, 20.min(det.order()), &pi);
    reference_checks.push(Check::new("g over k = 2..20 < -7/10", g_lit, Relation::Lt, rat(-7, 10)));

    let failures: Vec<String> = checks.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    Ok(Certificate {
        potential_digest: digest,
        taylor_order: opts.taylor_order,
        options: opts,
        traces,
        pi_over_sqrt3: pi,
        hs_window_bound,
        hs_total_bound: hs_total,
        hs,
        tail_r0,
        tail_r1,
        f_left,
        f_right,
        g_bound,
        interval: (left(), right()),
        verdict: failures.is_empty(),
        failures,
        checks,
        reference_checks,
        note: NOTE.to_string(),
    })
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("certificate: {e}")))
    }

    /// Rebuilds every quantity from the stored traces, π enclosure and norm report
    /// and compares with the stored values. Returns the recomputed verdict.
    pub fn recheck(&self) -> Result<bool> {
        // lo ≤ π/√3 ≤ hi  ⇔  3lo² ≤ π² ≤ 3hi²
        let machin = pi_machin(60);
        let p = &self.pi_over_sqrt3;
        let three = rat(3, 1);
        if p.lo.is_negative()
            || &three * &p.lo * &p.lo > &machin.lo * &machin.lo
            || &machin.hi * &machin.hi > &three * &p.hi * &p.hi
        {
            return Err(Error::Validation("stored pi/sqrt(3) enclosure does not contain pi/sqrt(3)".into()));
        }
        if !self.hs.recheck() {
            return Err(Error::Validation("norm report is inconsistent".into()));
        }
        let need = self.options.g_order.max(self.options.taylor_order);
        let mut sigma = vec![PiPoly::zero(); need + 1];
        let by_ell: BTreeMap<usize, &BigRational> = self.traces.iter().map(|e| (e.ell, &e.q)).collect();
        for (l, s) in sigma.iter_mut().enumerate().skip(2) {
            let q = by_ell
                .get(&l)
                .ok_or_else(|| Error::Validation(format!("certificate lacks trace {l}")))?;
            *s = PiPoly::monomial((*q).clone(), 1);
        }
        let det = plemelj_smithies(&sigma, need);
        let fresh = build(
            self.potential_digest.clone(),
            self.traces.clone(),
            det,
            self.pi_over_sqrt3.clone(),
            self.hs.clone(),
            self.options.clone(),
        )?;
        if fresh != *self {
            return Err(Error::Validation("stored values differ from recomputation".into()));
        }
        Ok(fresh.verdict && self.checks.iter().all(Check::evaluate))
    }
}
