//! Majorants for the remainder of the determinant's Taylor series.
//!
//! With `ν = √e·hs·α²` the remainder after order `N − 1` and its α-derivative are
//! dominated by `r₀ = Σ_{k≥N} (ν/√k)^k` and `r₁ = Σ_{k≥N} (2k/α)(ν/√k)^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exactnum::interval::e_enclosure;
use crate::exactnum::RatInterval;
use crate::{Error, Result};

const BITS: u64 = 192;
/// Terms summed explicitly before switching to a geometric remainder.
const EXPLICIT_TERMS: u32 = 64;

fn sqrt_e() -> RatInterval {
    e_enclosure(40).nth_root(2, BITS).expect("e > 0")
}

/// `ν = √e·hs·α²`.
pub fn nu(hs: &BigRational, alpha: &BigRational) -> RatInterval {
    sqrt_e().scale(&(hs * alpha * alpha)).round_out(BITS)
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `ν/√N` as an interval.
fn ratio(nu: &RatInterval, n: u32) -> Result<RatInterval> {
    let s = RatInterval::point(int(n)).nth_root(2, BITS)?;
    Ok((nu * &s.recip()?).round_out(BITS))
}

fn check_order(m: u8) -> Result<()> {
    if m > 1 {
        return Err(Error::Validation(format!("derivative order {m} not supported")));
    }
    Ok(())
}

/// The closed form `(2ν/α)^m (ν/√N)^{N−m} / (1 − ν/√N)`.
///
/// For `m = 0` this dominates `r₀`. For `m = 1` it drops the factor `k/N` from
/// every term and so does not bound `r₁`; see [`tail_sum_bound`].
pub fn tail_bound(n: u32, m: u8, hs: &BigRational, alpha: &BigRational) -> Result<RatInterval> {
    check_order(m)?;
    if alpha.is_zero() {
        return Ok(RatInterval::zero());
    }
    let nu = nu(hs, alpha);
    let rho = ratio(&nu, n)?;
    if rho.hi >= BigRational::one() {
        return Err(Error::Divergence(format!(
            "nu/sqrt(N) = {:.4} is not below 1",
            rho.mid_f64()
        )));
    }
    let one_minus = &RatInterval::point(BigRational::one()) - &rho;
    let mut out = &rho.pow(n - m as u32) * &one_minus.recip()?;
    if m == 1 {
        out = &out * &nu.scale(&(int(2) / alpha));
    }
    Ok(out.round_out(BITS))
}

/// `(ν/√k)^k` enclosed, using `k^{k/2}` exactly when `k` is even.
fn term(nu: &RatInterval, k: u32) -> Result<RatInterval> {
    let num = nu.pow(k);
    let den = if k % 2 == 0 {
        RatInterval::point(int(k).pow(k as i32 / 2))
    } else {
        let s = RatInterval::point(int(k)).nth_root(2, BITS)?;
        s.scale(&int(k).pow((k as i32 - 1) / 2))
    };
    Ok((&num * &den.recip()?).round_out(BITS))
}

/// Rigorous enclosure of `r_m` itself: the first terms are summed explicitly and
/// the rest is dominated by a geometric series with ratio `ν/√K`.
pub fn tail_sum_bound(n: u32, m: u8, hs: &BigRational, alpha: &BigRational) -> Result<RatInterval> {
    check_order(m)?;
    if alpha.is_zero() {
        return Ok(RatInterval::zero());
    }
    let nu = nu(hs, alpha);
    let two_over_alpha = int(2) / alpha;
    let big_k = n + EXPLICIT_TERMS;
    let mut sum = RatInterval::zero();
    for k in n..big_k {
        let mut t = term(&nu, k)?;
        if m == 1 {
            t = t.scale(&(&two_over_alpha * int(k)));
        }
        sum = &sum + &t;
    }
    let rho = ratio(&nu, big_k)?;
    if rho.hi >= BigRational::one() {
        return Err(Error::Divergence(format!(
            "nu/sqrt(K) = {:.4} is not below 1 at K = {big_k}",
            rho.mid_f64()
        )));
    }
    // Σ_{k≥K} ρ^k = ρ^K/(1−ρ),  Σ_{k≥K} kρ^k = ρ^K (K/(1−ρ) + ρ/(1−ρ)²)
    let inv = (&RatInterval::point(BigRational::one()) - &rho).recip()?;
    let rk = rho.pow(big_k);
    let rest = if m == 0 {
        &rk * &inv
    } else {
        let inner = &inv.scale(&int(big_k)) + &(&rho * &(&inv * &inv));
        (&rk * &inner).scale(&two_over_alpha)
    };
    let rest = RatInterval {
        lo: BigRational::zero(),
        hi: rest.hi,
    };
    Ok((&sum + &rest).round_out(BITS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{rat, to_f64};

    #[test]
    fn zero_alpha() {
        assert_eq!(tail_bound(17, 0, &rat(11, 2), &rat(0, 1)).unwrap(), RatInterval::zero());
        assert_eq!(tail_sum_bound(17, 1, &rat(11, 2), &rat(0, 1)).unwrap(), RatInterval::zero());
    }

    #[test]
    fn closed_form_dominates_r0() {
        for hs in [rat(4, 1), rat(5, 1), rat(11, 2)] {
            let c = tail_bound(17, 0, &hs, &rat(3, 5)).unwrap();
            let s = tail_sum_bound(17, 0, &hs, &rat(3, 5)).unwrap();
            assert!(s.hi <= c.hi);
        }
    }

    #[test]
    fn sum_matches_float() {
        let hs = 5.0;
        let a: f64 = 0.6;
        let nu = 0.5f64.exp() * hs * a * a;
        let (mut r0, mut r1) = (0.0, 0.0);
        for k in 17..400 {
            let t = (nu / (k as f64).sqrt()).powi(k);
            r0 += t;
            r1 += 2.0 * k as f64 / a * t;
        }
        let b0 = tail_sum_bound(17, 0, &rat(5, 1), &rat(3, 5)).unwrap();
        let b1 = tail_sum_bound(17, 1, &rat(5, 1), &rat(3, 5)).unwrap();
        assert!(to_f64(&b0.lo) <= r0 * (1.0 + 1e-9) && r0 <= to_f64(&b0.hi) * (1.0 + 1e-9));
        assert!(to_f64(&b1.lo) <= r1 * (1.0 + 1e-9) && r1 <= to_f64(&b1.hi) * (1.0 + 1e-9));
        assert!((to_f64(&b1.hi) - r1).abs() < 1e-6 * r1);
    }

    #[test]
    fn divergence_reported() {
        assert!(matches!(
            tail_bound(2, 0, &rat(100, 1), &rat(1, 1)),
            Err(Error::Divergence(_))
        ));
    }
}
