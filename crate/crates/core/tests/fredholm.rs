use std::sync::OnceLock;

use magic_core::exactnum::interval::e_enclosure;
use magic_core::exactnum::rational::rat;
use magic_core::exactnum::{pi_over_sqrt3, PiPoly, RatInterval};
use magic_core::fredholm::{
    certify_first_magic, det2_taylor, hs_norm_certified, newton_elementary, plemelj_smithies,
    plemelj_smithies_determinant, tail_bound, tail_sum_bound, Certificate, HsMode, HsReport,
};
use magic_core::traces::TraceTable;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn table() -> &'static TraceTable {
    static T: OnceLock<TraceTable> = OnceLock::new();
    T.get_or_init(|| {
        serde_json::from_str(include_str!("data/canonical_traces.json")).expect("fixture parses")
    })
}

fn hs760() -> &'static HsReport {
    static H: OnceLock<HsReport> = OnceLock::new();
    H.get_or_init(|| hs_norm_certified(760, HsMode::Dyadic).unwrap())
}

fn certificate() -> &'static Certificate {
    static C: OnceLock<Certificate> = OnceLock::new();
    C.get_or_init(|| certify_first_magic(table(), hs760()).unwrap())
}

fn sigmas(n: usize) -> Vec<PiPoly> {
    (0..=n).map(|l| table().sigma(l).unwrap_or_else(PiPoly::zero)).collect()
}

fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |a, k| a * k))
}

#[test]
fn determinant_recursion_matches_literal_determinant() {
    let s = sigmas(10);
    let det = plemelj_smithies(&s, 10);
    assert_eq!(det.mu[0], PiPoly::constant(rat(1, 1)));
    assert!(det.mu[1].is_zero());
    assert_eq!(det.mu[2], -&s[2]);
    for j in 0..=10 {
        assert_eq!(det.mu[j], plemelj_smithies_determinant(&s, j), "j = {j}");
    }
}

#[test]
fn determinant_is_factorial_times_elementary_function() {
    let s = sigmas(10);
    let det = plemelj_smithies(&s, 10);
    let mut p: Vec<PiPoly> = s[1..].to_vec();
    p[0] = PiPoly::zero();
    let e = newton_elementary(&p, 10);
    for j in 1..=10 {
        assert_eq!(det.mu[j], e[j - 1].scale(&factorial(j)), "j = {j}");
    }
    // the alternating form agrees exactly at even orders and differs in sign at odd ones
    for j in 2..=10 {
        let sign = if j % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        let alternating = e[j - 1].scale(&(&sign * &factorial(j)));
        assert_eq!(det.mu[j] == alternating, j % 2 == 0 || det.mu[j].is_zero(), "j = {j}");
    }
}

#[test]
fn mu_growth_bound() {
    let s = sigmas(20);
    let det = plemelj_smithies(&s, 20);
    let pi = pi_over_sqrt3();
    let hs = rat(11, 2);
    let e = e_enclosure(40);
    for j in 2..=20 {
        let v = det.mu[j].eval_interval(&pi);
        let abs_hi = v.hi.abs().max(v.lo.abs());
        // |μ_j|² ≤ hs^{2j} e^j (j!)² / j^j
        let rhs = hs.pow(2 * j as i32) * e.lo.pow(j as i32) * factorial(j).pow(2)
            / BigRational::from_integer(BigInt::from(j).pow(j as u32));
        assert!(&abs_hi * &abs_hi <= rhs, "j = {j}");
    }
}

#[test]
fn taylor_polynomial_low_order() {
    let d = det2_taylor(table(), 2).unwrap();
    assert_eq!(d.eval(&BigRational::zero()), PiPoly::constant(rat(1, 1)));
    // 1 − (σ₂/2)α⁴
    let a = rat(1, 2);
    let want = &PiPoly::constant(rat(1, 1)) - &PiPoly::monomial(rat(2, 1) * a.pow(4), 1);
    assert_eq!(d.eval(&a), want);
    assert!(det2_taylor(&table().truncated(5), 8).is_err());
}

#[test]
fn window_bound_and_total() {
    let h = hs760();
    assert!(h.window_bound <= rat(5, 1));
    assert!(h.total <= rat(11, 2));
    assert!(h.total_triangle >= h.total);
    assert!(h.integral_tail.hi < rat(1, 2));
    assert!(h.recheck());
}

#[test]
fn canonical_certificate_holds() {
    let c = certificate();
    assert!(c.verdict, "{:?}", c.failures);
    assert_eq!(c.interval, (rat(583, 1000), rat(589, 1000)));
    assert!(c.f_left.lo > rat(1, 40));
    assert!(c.f_right.hi < rat(-1, 40));
    assert!(c.g_bound.hi < rat(-7, 10));
    assert!(c.tail_r0.hi <= rat(1, 50));
    assert!(c.tail_r1.hi <= rat(1, 2));
}

#[test]
fn certificate_round_trip_and_recheck() {
    let c = certificate();
    let json = c.to_json();
    let back = Certificate::from_json(&json).unwrap();
    assert_eq!(&back, c);
    assert_eq!(back.to_json(), json);
    assert!(back.recheck().unwrap());

    let mut tampered = back.clone();
    tampered.f_left.lo += rat(1, 1000);
    assert!(tampered.recheck().is_err());
    let mut tampered = back.clone();
    tampered.traces[3].q = rat(41, 1);
    assert!(tampered.recheck().is_err());
    let mut tampered = back;
    tampered.pi_over_sqrt3 = RatInterval::parse("1814/1000", "1815/1000").unwrap();
    assert!(tampered.recheck().is_err());
}

#[test]
fn zeroed_second_trace_fails() {
    let mut t = table().clone();
    t.entries[0].q = BigRational::zero();
    let c = certify_first_magic(&t, hs760()).unwrap();
    assert!(!c.verdict);
    assert!(!c.failures.is_empty());
}

#[test]
fn verdict_is_monotone_in_the_norm_bound() {
    let mut seen_false = false;
    for total in [rat(497, 100), rat(5, 1), rat(51, 10), rat(11, 2), rat(6, 1), rat(8, 1)] {
        let mut h = hs760().clone();
        h.total = total;
        let v = certify_first_magic(table(), &h).unwrap().verdict;
        assert!(!(seen_false && v), "verdict flipped back to true");
        seen_false |= !v;
    }
    assert!(seen_false);
}

#[test]
fn f_decreases_from_one_third() {
    let d = det2_taylor(table(), 16).unwrap();
    let pi = pi_over_sqrt3();
    let at_third = d.eval_interval(&rat(1, 3), &pi);
    let at_left = d.eval_interval(&rat(583, 1000), &pi);
    assert!(at_third.lo > at_left.hi);
}

#[test]
fn tail_majorants() {
    let (a, hs) = (rat(3, 5), rat(497, 100));
    let r0 = tail_sum_bound(17, 0, &hs, &a).unwrap();
    let r1 = tail_sum_bound(17, 1, &hs, &a).unwrap();
    assert!(r0.hi <= rat(1, 50) && r1.hi <= rat(1, 2));
    assert_eq!(tail_bound(17, 0, &hs, &BigRational::zero()).unwrap(), RatInterval::zero());
    // smaller windows of the sum can only grow the majorant
    assert!(tail_sum_bound(17, 1, &rat(11, 2), &a).unwrap().hi > r1.hi);
}
