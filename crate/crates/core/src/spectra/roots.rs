//! Simultaneous polynomial root finding (Aberth–Ehrlich).

use num_complex::Complex64;

use crate::{Error, Result};

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `Σ c_j z^j`, `c` in ascending order with a nonzero leading coefficient.
pub fn aberth(c: &[Complex64], max_iter: usize, tol: f64) -> Result<Vec<Complex64>> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| *x == Complex64::default()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    // Cauchy-type radius from the coefficient moduli sets the starting circle
    let lead = c[n].norm();
    let radius = (0..n)
        .map(|j| (c[j].norm() / lead).powf(1.0 / (n - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / n as f64))
        .collect();
    // a root is frozen once |p(z)| is at the level of rounding in evaluating p
    let abs_c: Vec<f64> = c.iter().map(|x| x.norm()).collect();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&c, z[i]);
            let r = z[i].norm();
            let scale = abs_c.iter().rev().fold(0.0, |acc, a| acc * r + a);
            if p.norm() <= 8.0 * n as f64 * f64::EPSILON * scale {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            if w.norm() <= tol * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence(format!(
        "root iteration did not converge in {max_iter} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_roots() {
        let r = [1.0, -2.0, 0.5, 3.0];
        // (z−1)(z+2)(z−0.5)(z−3)
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for x in r {
            let mut next = vec![Complex64::default(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * x;
            }
            c = next;
        }
        let mut got = aberth(&c, 500, 1e-14).unwrap();
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut want = r.to_vec();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < 1e-10);
        }
    }

    #[test]
    fn conjugate_pairs() {
        // z² + 1
        let c = [Complex64::new(1.0, 0.0), Complex64::default(), Complex64::new(1.0, 0.0)];
        let got = aberth(&c, 200, 1e-14).unwrap();
        assert!(got.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
    }
}
