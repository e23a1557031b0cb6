//! Closed intervals with exact rational endpoints and outward-rounded enclosures
//! of the few irrational constants the certificate needs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, parse_rational, serde_rational};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatInterval {
    #[serde(with = "serde_rational")]
    pub lo: BigRational,
    #[serde(with = "serde_rational")]
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::Validation(format!(
                "empty interval [{}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let a = &self.lo * r;
        let b = &self.hi * r;
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        Self {
            lo: &self.lo + r,
            hi: &self.hi + r,
        }
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.contains(&BigRational::zero()) {
            return Err(Error::DivisionByZero);
        }
        Ok(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::point(BigRational::one());
        }
        let e = e as i32;
        let (lo, hi) = (self.lo.pow(e), self.hi.pow(e));
        if e % 2 == 1 || !self.lo.is_negative() {
            Self { lo, hi }
        } else if !self.hi.is_positive() {
            Self { lo: hi, hi: lo }
        } else {
            Self {
                lo: BigRational::zero(),
                hi: lo.max(hi),
            }
        }
    }

    /// Upper endpoint of `max(self, other)`.
    pub fn max_hi(&self, other: &Self) -> BigRational {
        self.hi.clone().max(other.hi.clone())
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn mid_f64(&self) -> f64 {
        super::rational::to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }

    /// Enclosure of `x^{1/n}` for an interval in `[0, ∞)`, with `bits` of dyadic precision.
    pub fn nth_root(&self, n: u32, bits: u64) -> Result<Self, Error> {
        if self.lo.is_negative() {
            return Err(Error::Validation("root of a negative interval".into()));
        }
        Ok(Self {
            lo: root_floor(&self.lo, n, bits),
            hi: root_ceil(&self.hi, n, bits),
        })
    }

    /// Widens both endpoints to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u64) -> Self {
        let scale = BigInt::one() << bits as usize;
        let lo = (&self.lo * BigRational::from_integer(scale.clone())).floor().to_integer();
        let hi = (&self.hi * BigRational::from_integer(scale)).ceil().to_integer();
        Self {
            lo: dyadic(lo, bits),
            hi: dyadic(hi, bits),
        }
    }

    pub fn parse(lo: &str, hi: &str) -> Result<Self, Error> {
        Self::new(parse_rational(lo)?, parse_rational(hi)?)
    }
}

fn dyadic(n: BigInt, bits: u64) -> BigRational {
    BigRational::new(n, BigInt::one() << bits as usize)
}

/// Largest `m / 2^bits` with `(m / 2^bits)^n ≤ x`.
fn root_floor(x: &BigRational, n: u32, bits: u64) -> BigRational {
    let scaled = (x.numer() << (bits as usize * n as usize)) / x.denom();
    dyadic(scaled.nth_root(n), bits)
}

/// A dyadic `≥ x^{1/n}`.
fn root_ceil(x: &BigRational, n: u32, bits: u64) -> BigRational {
    let scaled = (x.numer() << (bits as usize * n as usize)) / x.denom();
    dyadic(scaled.nth_root(n) + 1, bits)
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.lo),
            format_rational(&self.hi)
        )
    }
}

const PI_OVER_SQRT3_LO: &str = "181379936423421785059407825764215573228";
const PI_OVER_SQRT3_HI: &str = "181379936423421785059407825764215573229";

/// Enclosure of Π = π/√3 of width 10⁻³⁸.
pub fn pi_over_sqrt3() -> RatInterval {
    let den = BigInt::from(10).pow(38);
    let lo: BigInt = PI_OVER_SQRT3_LO.parse().unwrap();
    let hi: BigInt = PI_OVER_SQRT3_HI.parse().unwrap();
    RatInterval {
        lo: BigRational::new(lo, den.clone()),
        hi: BigRational::new(hi, den),
    }
}

/// π from Machin's formula π = 16 atan(1/5) − 4 atan(1/239), with the
/// alternating-series remainder folded into the endpoints.
pub fn pi_machin(terms: u32) -> RatInterval {
    let a = atan_inv(5, terms).scale(&BigRational::from_integer(16.into()));
    let b = atan_inv(239, terms).scale(&BigRational::from_integer(4.into()));
    &a - &b
}

fn atan_inv(x: i64, terms: u32) -> RatInterval {
    let x = BigInt::from(x);
    let mut sum = BigRational::zero();
    for k in 0..terms {
        let d = BigInt::from(2 * k + 1) * x.pow(2 * k + 1);
        let t = BigRational::new(BigInt::one(), d);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    let next = BigRational::new(
        BigInt::one(),
        BigInt::from(2 * terms + 1) * x.pow(2 * terms + 1),
    );
    if terms % 2 == 0 {
        RatInterval {
            hi: &sum + &next,
            lo: sum,
        }
    } else {
        RatInterval {
            lo: &sum - &next,
            hi: sum,
        }
    }
}

/// Enclosure of e from Σ 1/k!, tail bounded by twice the first omitted term.
pub fn e_enclosure(terms: u32) -> RatInterval {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for k in 0..terms {
        if k > 0 {
            fact *= k;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    fact *= terms.max(1);
    let tail = BigRational::new(BigInt::from(2), fact);
    RatInterval {
        hi: &sum + tail,
        lo: sum,
    }
}
