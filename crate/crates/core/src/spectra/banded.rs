//! Complex banded LU with partial pivoting, row-window storage.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    /// Row `i` holds columns `i − kl ..= i + ku + kl`.
    data: Vec<Complex64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![Complex64::new(0.0, 0.0); n * (2 * kl + ku + 1)],
        }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width() + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j + self.kl < i || j > i + self.ku {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.idx(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let w = self.width();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                let row = &self.data[i * w + (lo + self.kl - i)..=i * w + (hi + self.kl - i)];
                row.iter().zip(&x[lo..=hi]).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Factorizes in place. A zero pivot is replaced by `ε‖A‖∞` so near-singular
    /// systems still yield the huge solutions inverse iteration wants.
    pub fn factor(mut self) -> BandedLu {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let tiny = f64::EPSILON * self.norm_inf().max(1.0);
        let mut piv = vec![0usize; n];
        let mut replaced = 0;
        for c in 0..n {
            let last = (c + kl).min(n - 1);
            let mut p = c;
            let mut best = self.data[self.idx(c, c)].norm();
            for r in c + 1..=last {
                let v = self.data[self.idx(r, c)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[c] = p;
            let right = (c + kl + ku).min(n - 1);
            if p != c {
                for j in c..=right {
                    let (a, b) = (self.idx(c, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let d = self.idx(c, c);
            if self.data[d].norm() <= tiny {
                self.data[d] = Complex64::new(tiny, 0.0);
                replaced += 1;
            }
            let pivot = self.data[d];
            for r in c + 1..=last {
                let rc = self.idx(r, c);
                if self.data[rc] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let l = self.data[rc] / pivot;
                self.data[rc] = l;
                let (cs, rs) = (self.idx(c, c + 1), self.idx(r, c + 1));
                let (head, tail) = self.data.split_at_mut(rs);
                let len = right - c;
                for (x, u) in tail[..len].iter_mut().zip(&head[cs..cs + len]) {
                    *x -= l * u;
                }
            }
        }
        // multipliers of column c, contiguous, for the substitution sweeps
        let mut lower = vec![Complex64::new(0.0, 0.0); n * kl];
        for c in 0..n {
            for r in c + 1..=(c + kl).min(n - 1) {
                lower[c * kl + (r - c - 1)] = self.data[self.idx(r, c)];
            }
        }
        BandedLu {
            a: self,
            lower,
            piv,
            replaced_pivots: replaced,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BandedLu {
    a: Banded,
    lower: Vec<Complex64>,
    piv: Vec<usize>,
    pub replaced_pivots: usize,
}

impl BandedLu {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &mut [Complex64]) {
        let a = &self.a;
        let n = a.n;
        for c in 0..n {
            b.swap(c, self.piv[c]);
            let bc = b[c];
            let last = (c + a.kl).min(n - 1);
            let col = &self.lower[c * a.kl..c * a.kl + (last - c)];
            for (x, l) in b[c + 1..=last].iter_mut().zip(col) {
                *x -= l * bc;
            }
        }
        let w = a.width();
        for i in (0..n).rev() {
            let hi = (i + a.kl + a.ku).min(n - 1);
            let row = &a.data[i * w + a.kl + 1..i * w + a.kl + 1 + (hi - i)];
            let s: Complex64 = row.iter().zip(&b[i + 1..=hi]).map(|(u, x)| u * x).sum();
            b[i] = (b[i] - s) / a.data[i * w + a.kl];
        }
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &mut [Complex64]) {
        let a = &self.a;
        let n = a.n;
        let w = a.width();
        for i in 0..n {
            let bi = b[i] / a.data[i * w + a.kl].conj();
            b[i] = bi;
            let hi = (i + a.kl + a.ku).min(n - 1);
            let row = &a.data[i * w + a.kl + 1..i * w + a.kl + 1 + (hi - i)];
            for (x, u) in b[i + 1..=hi].iter_mut().zip(row) {
                *x -= u.conj() * bi;
            }
        }
        for c in (0..n).rev() {
            let last = (c + a.kl).min(n - 1);
            let col = &self.lower[c * a.kl..c * a.kl + (last - c)];
            let s: Complex64 = col.iter().zip(&b[c + 1..=last]).map(|(l, x)| l.conj() * x).sum();
            b[c] -= s;
            b.swap(c, self.piv[c]);
        }
    }
}
