//! Scalar abstraction and dense power series `Σ_{j<T} a_j t^j` for the engines.

use rayon::prelude::*;

use crate::exactnum::{CycloNum, QOmega};
use crate::Result;

pub(crate) trait Scalar: Clone + Send + Sync + PartialEq {
    fn zero() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn from_cyclo(c: &CycloNum) -> Option<Self>;
    fn to_cyclo(&self) -> CycloNum;
    /// Unreduced accumulation; pair with [`Scalar::reduce`].
    fn add_lazy(&mut self, o: &Self) {
        *self = self.add(o);
    }
    fn reduce(&mut self) {}
    fn mul_lazy(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn sub_lazy(&self, o: &Self) -> Self {
        self.sub(o)
    }
}

impl Scalar for CycloNum {
    fn zero() -> Self {
        CycloNum::zero()
    }
    fn from_int(n: i64) -> Self {
        CycloNum::from_int(n)
    }
    fn is_zero(&self) -> bool {
        CycloNum::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Result<Self> {
        CycloNum::inv(self)
    }
    fn from_cyclo(c: &CycloNum) -> Option<Self> {
        Some(c.clone())
    }
    fn to_cyclo(&self) -> CycloNum {
        self.clone()
    }
}

impl Scalar for QOmega {
    fn zero() -> Self {
        QOmega::zero()
    }
    fn from_int(n: i64) -> Self {
        QOmega::from_int(n)
    }
    fn is_zero(&self) -> bool {
        QOmega::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Result<Self> {
        QOmega::inv(self)
    }
    fn from_cyclo(c: &CycloNum) -> Option<Self> {
        QOmega::from_cyclo(c)
    }
    fn to_cyclo(&self) -> CycloNum {
        QOmega::to_cyclo(self)
    }
    fn add_lazy(&mut self, o: &Self) {
        QOmega::add_lazy(self, o)
    }
    fn reduce(&mut self) {
        QOmega::reduce(self)
    }
    fn mul_lazy(&self, o: &Self) -> Self {
        QOmega::mul_lazy(self, o)
    }
    fn sub_lazy(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_lazy(&-o);
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Series<S>(pub Vec<S>);

impl<S: Scalar> Series<S> {
    pub fn zero(len: usize) -> Self {
        Series(vec![S::zero(); len])
    }

    pub fn unit(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.0[0] = S::from_int(1);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(S::is_zero)
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// `self += c·o` over the common length, left unreduced.
    pub fn add_scaled_lazy(&mut self, c: &S, o: &Series<S>) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            if !b.is_zero() {
                a.add_lazy(&b.mul_lazy(c));
            }
        }
    }

    pub fn add_assign_lazy(&mut self, o: &Series<S>) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            if !b.is_zero() {
                a.add_lazy(b);
            }
        }
    }

    pub fn reduce(&mut self) {
        for a in &mut self.0 {
            a.reduce();
        }
    }

    pub fn scale(&self, c: &S) -> Series<S> {
        Series(self.0.iter().map(|x| x.mul(c)).collect())
    }

    /// `self / (t + d)` given `d⁻¹`.
    pub fn div_linear(&self, dinv: &S) -> Series<S> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut prev = S::zero();
        for s in &self.0 {
            let mut g = s.sub_lazy(&prev).mul_lazy(dinv);
            g.reduce();
            prev = g.clone();
            out.push(g);
        }
        Series(out)
    }

    /// Product truncated to the shorter length.
    pub fn mul(&self, o: &Series<S>) -> Series<S> {
        let n = self.0.len().min(o.0.len());
        let out: Vec<S> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut acc = S::zero();
                for i in 0..=k {
                    let (a, b) = (&self.0[i], &o.0[k - i]);
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_lazy(&a.mul_lazy(b));
                    }
                }
                acc.reduce();
                acc
            })
            .collect();
        Series(out)
    }
}
