//! Taylor coefficients of the regularized determinant `det₂(1 − α²Â)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{PiPoly, RatInterval};
use crate::traces::TraceTable;
use crate::{Error, Result};

/// `det₂(1 − α²Â) ≈ Σ_{j≤n} μ_j (−α²)^j / j!`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetPoly {
    pub mu: Vec<PiPoly>,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

impl DetPoly {
    pub fn order(&self) -> usize {
        self.mu.len() - 1
    }

    /// Coefficient of `β^j` with `β = α²`: `μ_j (−1)^j / j!`.
    pub fn beta_coeff(&self, j: usize) -> PiPoly {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        self.mu[j].scale(&BigRational::new(BigInt::from(sign), factorial(j)))
    }

    /// Exact value at rational α, as a polynomial in Π.
    pub fn eval(&self, alpha: &BigRational) -> PiPoly {
        let beta = alpha * alpha;
        let mut acc = PiPoly::zero();
        let mut pw = BigRational::one();
        for j in 0..self.mu.len() {
            acc = &acc + &self.beta_coeff(j).scale(&pw);
            pw *= &beta;
        }
        acc
    }

    pub fn eval_interval(&self, alpha: &BigRational, pi: &RatInterval) -> RatInterval {
        self.eval(alpha).eval_interval(pi)
    }
}

/// `μ_0..μ_n` by the Newton-type recursion for `det₂(1 + zÂ) = exp(Σ_{i≥2} (−1)^{i+1} σ_i z^i / i)`.
///
/// `sigma[i]` is `σ_i`; entries 0 and 1 are ignored since σ₁ is regularized away.
pub fn plemelj_smithies(sigma: &[PiPoly], n: usize) -> DetPoly {
    // d_j = [z^j] det₂(1 − zÂ):  j d_j = −Σ_{i=2}^{j} σ_i d_{j−i}
    let mut d: Vec<PiPoly> = vec![PiPoly::constant(BigRational::one())];
    for j in 1..=n {
        let mut acc = PiPoly::zero();
        for i in 2..=j {
            acc = &acc + &(&sigma[i] * &d[j - i]);
        }
        d.push(acc.scale(&BigRational::new(BigInt::from(-1), BigInt::from(j))));
    }
    let mu = d
        .iter()
        .enumerate()
        .map(|(j, dj)| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            dj.scale(&BigRational::from_integer(factorial(j) * sign))
        })
        .collect();
    DetPoly { mu }
}

/// `μ_j` as the literal j×j determinant, by cofactor expansion memoized on column sets.
pub fn plemelj_smithies_determinant(sigma: &[PiPoly], j: usize) -> PiPoly {
    assert!(j < 31, "determinant oracle limited to j < 31");
    if j == 0 {
        return PiPoly::constant(BigRational::one());
    }
    let entry = |r: usize, c: usize| -> PiPoly {
        if c == r + 1 {
            PiPoly::constant(BigRational::from_integer(BigInt::from(j - 1 - r)))
        } else if c <= r && r - c + 1 >= 2 {
            sigma[r - c + 1].clone()
        } else {
            PiPoly::zero()
        }
    };
    let mut memo: HashMap<u32, PiPoly> = HashMap::new();
    fn go(
        cols: u32,
        j: usize,
        entry: &dyn Fn(usize, usize) -> PiPoly,
        memo: &mut HashMap<u32, PiPoly>,
    ) -> PiPoly {
        let r = j - cols.count_ones() as usize;
        if r == j {
            return PiPoly::constant(BigRational::one());
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = PiPoly::zero();
        let mut pos = 0;
        for c in 0..j {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = entry(r, c);
            if !a.is_zero() {
                let minor = go(cols & !(1 << c), j, entry, memo);
                let term = &a * &minor;
                acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            pos += 1;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    go((1u32 << j) - 1, j, &entry, &mut memo)
}

/// Elementary symmetric functions `e_1..e_n` from power sums `p[0] = p_1, p[1] = p_2, …`
/// via the partition form of Newton's identities.
pub fn newton_elementary(p: &[PiPoly], n: usize) -> Vec<PiPoly> {
    let mut out = Vec::with_capacity(n);
    for deg in 1..=n {
        let mut total = PiPoly::zero();
        let mut m = vec![0usize; deg + 1];
        partitions(deg, deg, &mut m, &mut |m| {
            // Π (−p_i)^{m_i} / (m_i! i^{m_i})
            let mut term = PiPoly::constant(BigRational::one());
            let mut den = BigInt::one();
            for (i, &mi) in m.iter().enumerate().skip(1) {
                for _ in 0..mi {
                    term = &term * &(-&p[i - 1]);
                }
                den *= factorial(mi) * BigInt::from(i).pow(mi as u32);
            }
            total = &total + &term.scale(&BigRational::new(BigInt::one(), den));
        });
        let sign = if deg % 2 == 0 { 1 } else { -1 };
        out.push(total.scale(&BigRational::from_integer(BigInt::from(sign))));
    }
    out
}

/// Calls `f` with every multiplicity vector `m` with `Σ i m_i = n`, parts ≤ `max`.
fn partitions(n: usize, max: usize, m: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if n == 0 {
        f(m);
        return;
    }
    for part in (1..=max.min(n)).rev() {
        m[part] += 1;
        partitions(n - part, part, m, f);
        m[part] -= 1;
    }
}

/// Taylor polynomial of order `n` from an exact trace table.
pub fn det2_taylor(table: &TraceTable, n: usize) -> Result<DetPoly> {
    let missing: Vec<usize> = (2..=n).filter(|&l| table.q(l).is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!("missing traces for ell = {missing:?}")));
    }
    let mut sigma = vec![PiPoly::zero(); n + 1];
    for (l, s) in sigma.iter_mut().enumerate().skip(2) {
        *s = table.sigma(l).expect("checked above");
    }
    Ok(plemelj_smithies(&sigma, n))
}

/// `Π(1 − βλ) e^{βλ}` for a finite spectrum, as a check on the Taylor machinery.
pub fn product_form(lambdas: &[BigRational], beta: &BigRational, exp_terms: usize) -> RatInterval {
    let mut lo = BigRational::one();
    let mut hi = BigRational::one();
    for l in lambdas {
        let x = beta * l;
        let e = exp_enclosure(&x, exp_terms);
        let f = BigRational::one() - &x;
        let (a, b) = (&f * &e.lo, &f * &e.hi);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let c = [&lo * &a, &lo * &b, &hi * &a, &hi * &b];
        lo = c.iter().min().unwrap().clone();
        hi = c.iter().max().unwrap().clone();
    }
    RatInterval { lo, hi }
}

fn exp_enclosure(x: &BigRational, terms: usize) -> RatInterval {
    let mut sum = BigRational::zero();
    let mut t = BigRational::one();
    for k in 0..terms {
        sum += &t;
        t = &t * x / BigRational::from_integer(BigInt::from(k + 1));
    }
    // |remainder| ≤ 2|t| once |x| ≤ terms/2
    let r = if t < BigRational::zero() { -&t } else { t.clone() };
    let r = r * BigRational::from_integer(BigInt::from(2));
    RatInterval {
        lo: &sum - &r,
        hi: &sum + &r,
    }
}
