//! Truncated Laurent series in a local parameter `t` with cyclotomic coefficients.

use num_traits::Zero;

use super::cyclo::CycloNum;
use crate::Error;

/// `Σ coeffs[i] t^{min_order + i}`, exact for orders `≤ max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    min_order: i32,
    max_order: i32,
    coeffs: Vec<CycloNum>,
}

impl LaurentSeries {
    /// The zero series, known exactly through `max_order`.
    pub fn zero(max_order: i32) -> Self {
        Self {
            min_order: max_order + 1,
            max_order,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: CycloNum, max_order: i32) -> Self {
        Self::from_coeffs(0, vec![c], max_order)
    }

    pub fn monomial(c: CycloNum, order: i32, max_order: i32) -> Self {
        Self::from_coeffs(order, vec![c], max_order)
    }

    pub fn from_coeffs(min_order: i32, coeffs: Vec<CycloNum>, max_order: i32) -> Self {
        let mut s = Self {
            min_order,
            max_order,
            coeffs,
        };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let keep = (self.max_order - self.min_order + 1).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.min_order = self.max_order + 1;
            return;
        }
        self.coeffs.drain(..lead);
        self.min_order += lead as i32;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// `1/(t + d)`; a pole when `d = 0`.
    pub fn inverse_linear(d: &CycloNum, max_order: i32) -> Result<Self, Error> {
        Self::constant(CycloNum::one(), max_order).div_linear(d)
    }

    pub fn min_order(&self) -> i32 {
        self.min_order
    }

    pub fn max_order(&self) -> i32 {
        self.max_order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^n`; errors outside the retained window.
    pub fn coeff(&self, n: i32) -> Result<CycloNum, Error> {
        if n > self.max_order {
            return Err(Error::TruncatedWindow(n));
        }
        if n < self.min_order {
            return Ok(CycloNum::zero());
        }
        Ok(self
            .coeffs
            .get((n - self.min_order) as usize)
            .cloned()
            .unwrap_or_else(CycloNum::zero))
    }

    pub fn residue(&self) -> Result<CycloNum, Error> {
        self.coeff(-1)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        let max_order = self.max_order.min(o.max_order);
        if o.is_zero() {
            return Self::from_coeffs(self.min_order, self.coeffs.clone(), max_order);
        }
        if self.is_zero() {
            let c = if negate {
                o.coeffs.iter().map(|c| -c).collect()
            } else {
                o.coeffs.clone()
            };
            return Self::from_coeffs(o.min_order, c, max_order);
        }
        let lo = self.min_order.min(o.min_order);
        let hi = (self.min_order + self.coeffs.len() as i32)
            .max(o.min_order + o.coeffs.len() as i32)
            .min(max_order + 1);
        let mut c = Vec::with_capacity((hi - lo).max(0) as usize);
        for n in lo..hi {
            let a = self.get(n);
            let b = o.get(n);
            c.push(match (a, b) {
                (Some(a), Some(b)) if negate => a - b,
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) if negate => -b,
                (None, Some(b)) => b.clone(),
                (None, None) => CycloNum::zero(),
            });
        }
        Self::from_coeffs(lo, c, max_order)
    }

    fn get(&self, n: i32) -> Option<&CycloNum> {
        if n < self.min_order {
            return None;
        }
        self.coeffs.get((n - self.min_order) as usize)
    }

    /// `self += c · o`, the hot loop of the propagation engines.
    pub fn add_scaled(&mut self, c: &CycloNum, o: &Self) {
        if c.is_zero() || o.is_zero() {
            self.max_order = self.max_order.min(o.max_order);
            self.trim();
            return;
        }
        let scaled = o.scale(c);
        *self = self.add(&scaled);
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        if c.is_zero() {
            return Self::zero(self.max_order);
        }
        Self::from_coeffs(
            self.min_order,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.max_order,
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let max_order = (self.max_order + o.min_order).min(o.max_order + self.min_order);
        if self.is_zero() || o.is_zero() {
            return Self::zero(max_order);
        }
        let lo = self.min_order + o.min_order;
        let len = ((max_order - lo + 1).max(0) as usize)
            .min(self.coeffs.len() + o.coeffs.len() - 1);
        let mut c = vec![CycloNum::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] += &(a * b);
            }
        }
        Self::from_coeffs(lo, c, max_order)
    }

    /// `self · t^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            min_order: self.min_order + k,
            max_order: self.max_order + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `self / (t + d)`.
    pub fn div_linear(&self, d: &CycloNum) -> Result<Self, Error> {
        if d.is_zero() {
            return Ok(self.shift(-1));
        }
        let inv = d.inv()?;
        Ok(self.div_linear_with_inverse(&inv))
    }

    /// `self / (t + d)` given `d⁻¹`, with `d ≠ 0`.
    pub fn div_linear_with_inverse(&self, dinv: &CycloNum) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        // g_j = (s_j − g_{j−1}) / d
        let n = (self.max_order - self.min_order + 1).max(0) as usize;
        let mut out = Vec::with_capacity(n);
        let mut prev = CycloNum::zero();
        for j in 0..n {
            let s = self.coeffs.get(j);
            let g = match s {
                Some(s) => &(s - &prev) * dinv,
                None => &(-&prev) * dinv,
            };
            prev = g.clone();
            out.push(g);
        }
        Self::from_coeffs(self.min_order, out, self.max_order)
    }

    /// Truncate to `t^{≤ max_order}`.
    pub fn truncate(&self, max_order: i32) -> Self {
        Self::from_coeffs(self.min_order, self.coeffs.clone(), self.max_order.min(max_order))
    }
}

impl Zero for LaurentSeries {
    fn zero() -> Self {
        LaurentSeries::zero(i32::MAX / 2)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl std::ops::Add for LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: LaurentSeries) -> LaurentSeries {
        LaurentSeries::add(&self, &o)
    }
}
