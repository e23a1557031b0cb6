//! Exact arithmetic in Q(ζ), ζ = e^{iπ/6}, on the basis {1, ζ, ζ², ζ³} with ζ⁴ = ζ² − 1.
//!
//! Values are stored as four integer numerators over one positive common
//! denominator, kept in lowest terms, so equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, to_f64};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNum {
    num: [BigInt; 4],
    den: BigInt,
}

impl CycloNum {
    pub fn from_coeffs(c: [BigRational; 4]) -> Self {
        let mut den = BigInt::one();
        for x in &c {
            den = den.lcm(x.denom());
        }
        let num = c.map(|x| x.numer() * (&den / x.denom()));
        Self::normalized(num, den)
    }

    pub fn from_i64s(c: [i64; 4]) -> Self {
        Self::normalized(c.map(BigInt::from), BigInt::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let (n, d) = r.into_raw();
        Self::normalized([n, BigInt::zero(), BigInt::zero(), BigInt::zero()], d)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_i64s([n, 0, 0, 0])
    }

    fn normalized(mut num: [BigInt; 4], mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for x in num.iter_mut() {
                *x = -&*x;
            }
        }
        if num.iter().all(Zero::is_zero) {
            return Self::zero();
        }
        if !den.is_one() {
            let mut g = den.clone();
            for x in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(x);
            }
            if !g.is_one() {
                for x in num.iter_mut() {
                    *x = &*x / &g;
                }
                den /= g;
            }
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn zeta() -> Self {
        Self::from_i64s([0, 1, 0, 0])
    }

    /// ω = e^{2πi/3} = ζ² − 1.
    pub fn omega() -> Self {
        Self::from_i64s([-1, 0, 1, 0])
    }

    /// ω² = −ζ².
    pub fn omega2() -> Self {
        Self::from_i64s([0, 0, -1, 0])
    }

    pub fn i() -> Self {
        Self::from_i64s([0, 0, 0, 1])
    }

    /// √3 = 2ζ − ζ³.
    pub fn sqrt3() -> Self {
        Self::from_i64s([0, 2, 0, -1])
    }

    /// μ = ω² − ω.
    pub fn mu() -> Self {
        Self::from_i64s([1, 0, -2, 0])
    }

    /// γ_(a,b) = ω²a − ωb.
    pub fn gamma(a: i64, b: i64) -> Self {
        Self::from_i64s([b, 0, -a - b, 0])
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> [BigRational; 4] {
        [self.coeff(0), self.coeff(1), self.coeff(2), self.coeff(3)]
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeff(0))
    }

    /// True when the value lies in the real subfield Q(√3).
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Complex conjugation, ζ ↦ ζ⁻¹ = ζ − ζ³.
    pub fn conj(&self) -> Self {
        let [a, b, c, d] = &self.num;
        Self::normalized([a + c, b.clone(), -c, -(b + d)], self.den.clone())
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        // a·ā = x + y√3 is real, and √3 = 2ζ − ζ³
        let n = self * &c;
        let x = n.coeff(0);
        let y = -n.coeff(3);
        let norm = &x * &x - BigRational::from_integer(3.into()) * &y * &y;
        let mut other = CycloNum::from_coeffs([
            x,
            -(&y * BigRational::from_integer(2.into())),
            BigRational::zero(),
            y,
        ]);
        other = other.scale(&norm.recip());
        Ok(&c * &other)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.clone().map(|x| x * r.numer());
        Self::normalized(num, &self.den * r.denom())
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self::normalized(self.num.clone().map(|x| x * &k), self.den.clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let z = Complex64::from_polar(1.0, std::f64::consts::PI / 6.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for i in 0..4 {
            acc += p * to_f64(&self.coeff(i));
            p *= z;
        }
        acc
    }

    /// Bit size of the largest numerator or the denominator, a cost proxy.
    pub fn height_bits(&self) -> u64 {
        self.num.iter().map(|x| x.bits()).max().unwrap_or(0).max(self.den.bits())
    }
}

impl Default for CycloNum {
    fn default() -> Self {
        Self::zero()
    }
}

fn add_sub(a: &CycloNum, b: &CycloNum, sign: bool) -> CycloNum {
    if a.den == b.den {
        let num = std::array::from_fn(|i| {
            if sign {
                &a.num[i] + &b.num[i]
            } else {
                &a.num[i] - &b.num[i]
            }
        });
        return CycloNum::normalized(num, a.den.clone());
    }
    let g = a.den.gcd(&b.den);
    let fa = &b.den / &g;
    let fb = &a.den / &g;
    let num = std::array::from_fn(|i| {
        let x = &a.num[i] * &fa;
        let y = &b.num[i] * &fb;
        if sign {
            x + y
        } else {
            x - y
        }
    });
    CycloNum::normalized(num, &a.den * fa)
}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, o: &CycloNum) -> CycloNum {
        add_sub(self, o, true)
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, o: &CycloNum) -> CycloNum {
        add_sub(self, o, false)
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, o: &CycloNum) -> CycloNum {
        if self.is_zero() || o.is_zero() {
            return CycloNum::zero();
        }
        let mut r: [BigInt; 7] = Default::default();
        for i in 0..4 {
            if self.num[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if !o.num[j].is_zero() {
                    r[i + j] += &self.num[i] * &o.num[j];
                }
            }
        }
        // ζ^k = ζ^{k-2} − ζ^{k-4}
        for k in (4..7).rev() {
            let t = std::mem::take(&mut r[k]);
            r[k - 2] += &t;
            r[k - 4] -= t;
        }
        let [a, b, c, d, ..] = r;
        CycloNum::normalized([a, b, c, d], &self.den * &o.den)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            num: self.num.clone().map(|x| -x),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $m(self, o: CycloNum) -> CycloNum {
                (&self).$m(&o)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, o: &CycloNum) -> CycloNum {
                (&self).$m(o)
            }
        }
        impl $tr<CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $m(self, o: CycloNum) -> CycloNum {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl AddAssign<&CycloNum> for CycloNum {
    fn add_assign(&mut self, o: &CycloNum) {
        *self = &*self + o;
    }
}

impl SubAssign<&CycloNum> for CycloNum {
    fn sub_assign(&mut self, o: &CycloNum) {
        *self = &*self - o;
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.coeff(0)));
        }
        let names = ["", "ζ", "ζ^2", "ζ^3"];
        let mut first = true;
        for (i, name) in names.iter().enumerate() {
            let c = self.coeff(i);
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{}", format_rational(&c))?;
            } else {
                write!(f, "({}){}", format_rational(&c), name)?;
            }
        }
        Ok(())
    }
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs().iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[String; 4]>::deserialize(d)?;
        let mut c: [BigRational; 4] = Default::default();
        for (slot, s) in c.iter_mut().zip(&v) {
            *slot = parse_rational(s).map_err(serde::de::Error::custom)?;
        }
        Ok(CycloNum::from_coeffs(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn identities() {
        let z = CycloNum::zeta();
        let w = CycloNum::omega();
        let one = CycloNum::one();
        assert_eq!(z.pow(12), one);
        assert_eq!(z.pow(6), -&one);
        assert_eq!(w.pow(3), one);
        assert_eq!(&(&one + &w) + &w.pow(2), CycloNum::zero());
        assert_eq!(w.pow(2), CycloNum::omega2());
        assert_eq!(CycloNum::i().pow(2), -&one);
        assert_eq!(&CycloNum::sqrt3() * &CycloNum::sqrt3(), CycloNum::from_int(3));
        assert_eq!(CycloNum::mu(), &CycloNum::omega2() - &w);
        assert_eq!(CycloNum::gamma(2, -1), &(&CycloNum::omega2() * &CycloNum::from_int(2)) + &w);
        assert!(CycloNum::sqrt3().is_real());
        assert!(!w.is_real());
    }

    #[test]
    fn conj_and_inverse() {
        let w = CycloNum::omega();
        assert_eq!(w.conj(), CycloNum::omega2());
        assert_eq!(CycloNum::i().conj(), -&CycloNum::i());
        let a = CycloNum::from_coeffs([rat(3, 2), rat(-1, 5), rat(7, 3), rat(2, 1)]);
        assert_eq!(&a * &a.inv().unwrap(), CycloNum::one());
        assert!(CycloNum::zero().inv().is_err());
        let c = a.to_complex();
        let cc = a.conj().to_complex();
        assert!((c.conj() - cc).norm() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let a = CycloNum::from_coeffs([rat(3, 2), rat(-1, 5), rat(0, 1), rat(2, 1)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"["3/2","-1/5","0","2"]"#);
        let b: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
