//! Exact arithmetic in Q(ω), ω = e^{2πi/3}, on the basis {1, ω}.
//!
//! A lighter sibling of [`CycloNum`] for potentials whose step weights all lie
//! in Q(ω) after a common rescaling.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::cyclo::CycloNum;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QOmega {
    a: BigInt,
    b: BigInt,
    den: BigInt,
}

impl QOmega {
    pub fn zero() -> Self {
        Self {
            a: BigInt::zero(),
            b: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self {
            a: BigInt::from(n),
            b: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Puts the value in lowest terms with a positive denominator.
    pub fn reduce(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            self.a = -&self.a;
            self.b = -&self.b;
        }
        if self.den.is_one() {
            return;
        }
        let g = self.den.gcd(&self.a);
        if g.is_one() {
            return;
        }
        let g = g.gcd(&self.b);
        if !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.den /= &g;
        }
    }

    fn reduced(mut self) -> Self {
        self.reduce();
        self
    }

    /// `self += o` without reducing; call [`QOmega::reduce`] afterwards.
    pub fn add_lazy(&mut self, o: &Self) {
        if o.is_zero() {
            return;
        }
        if self.den == o.den {
            self.a += &o.a;
            self.b += &o.b;
        } else {
            self.a = &self.a * &o.den + &o.a * &self.den;
            self.b = &self.b * &o.den + &o.b * &self.den;
            self.den *= &o.den;
        }
    }

    pub fn from_cyclo(c: &CycloNum) -> Option<Self> {
        let k = c.coeffs();
        if !k[1].is_zero() || !k[3].is_zero() {
            return None;
        }
        // c0 + c2 ζ² = (c0 + c2) + c2 ω
        let x = &k[0] + &k[2];
        let y = k[2].clone();
        let den = x.denom().lcm(y.denom());
        Some(
            Self {
                a: x.numer() * (&den / x.denom()),
                b: y.numer() * (&den / y.denom()),
                den,
            }
            .reduced(),
        )
    }

    pub fn to_cyclo(&self) -> CycloNum {
        use num_rational::BigRational;
        let a = BigRational::new(self.a.clone(), self.den.clone());
        let b = BigRational::new(self.b.clone(), self.den.clone());
        CycloNum::from_coeffs([&a - &b, BigRational::zero(), b, BigRational::zero()])
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // (a + bω)(a − b − bω) = a² − ab + b²
        let n = &self.a * &self.a - &self.a * &self.b + &self.b * &self.b;
        Ok(Self {
            a: (&self.a - &self.b) * &self.den,
            b: -&self.b * &self.den,
            den: n,
        }
        .reduced())
    }
}

impl Add for &QOmega {
    type Output = QOmega;
    fn add(self, o: &QOmega) -> QOmega {
        let mut r = self.clone();
        r.add_lazy(o);
        r.reduced()
    }
}

impl Sub for &QOmega {
    type Output = QOmega;
    fn sub(self, o: &QOmega) -> QOmega {
        let mut r = self.clone();
        r.add_lazy(&-o);
        r.reduced()
    }
}

impl Neg for &QOmega {
    type Output = QOmega;
    fn neg(self) -> QOmega {
        QOmega {
            a: -&self.a,
            b: -&self.b,
            den: self.den.clone(),
        }
    }
}

impl QOmega {
    /// Product without reduction.
    pub fn mul_lazy(&self, o: &QOmega) -> QOmega {
        if self.is_zero() || o.is_zero() {
            return QOmega::zero();
        }
        // (a + bω)(c + dω) = (ac − bd) + (ad + bc − bd)ω
        let ac = &self.a * &o.a;
        let bd = &self.b * &o.b;
        let cross = (&self.a + &self.b) * (&o.a + &o.b) - &ac - &bd;
        QOmega {
            a: &ac - &bd,
            b: cross - bd,
            den: &self.den * &o.den,
        }
    }
}

impl Mul for &QOmega {
    type Output = QOmega;
    fn mul(self, o: &QOmega) -> QOmega {
        self.mul_lazy(o).reduced()
    }
}
