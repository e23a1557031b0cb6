//! Polynomials in Π = π/√3 with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::interval::RatInterval;
use super::rational::{format_rational, parse_rational, to_f64};

/// `coeffs[i]` multiplies `Π^i`; trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PiPoly {
    coeffs: Vec<BigRational>,
}

impl PiPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c · Π^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Interval enclosure of the value for any Π in `pi`.
    pub fn eval_interval(&self, pi: &RatInterval) -> RatInterval {
        // Horner in interval arithmetic stays an enclosure
        let mut acc = RatInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = (&acc * pi).add_rational(c);
        }
        acc
    }

    pub fn eval_f64(&self, pi: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * pi + to_f64(c))
    }
}

impl Add for &PiPoly {
    type Output = PiPoly;
    fn add(self, o: &PiPoly) -> PiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        PiPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, o: &PiPoly) -> PiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        PiPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &PiPoly {
    type Output = PiPoly;
    fn mul(self, o: &PiPoly) -> PiPoly {
        if self.is_zero() || o.is_zero() {
            return PiPoly::zero();
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PiPoly::new(v)
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 if c.is_one() => write!(f, "Pi")?,
                1 => write!(f, "({})*Pi", format_rational(c))?,
                _ if c.is_one() => write!(f, "Pi^{i}")?,
                _ => write!(f, "({})*Pi^{i}", format_rational(c))?,
            }
        }
        Ok(())
    }
}

impl Serialize for PiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for PiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let c = v
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PiPoly::new(c))
    }
}
