//! Smallest singular values by inverse subspace iteration with Rayleigh–Ritz.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::banded::Banded;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct IterOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            rel_tol: 1e-10,
            seed: 7,
        }
    }
}

fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for i in 0..cols.len() {
        for j in 0..i {
            let (a, b) = cols.split_at_mut(i);
            let d: Complex64 = a[j].iter().zip(b[0].iter()).map(|(x, y)| x.conj() * y).sum();
            for (y, x) in b[0].iter_mut().zip(a[j].iter()) {
                *y -= d * x;
            }
        }
        let n = cols[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            for y in cols[i].iter_mut() {
                *y /= n;
            }
        }
    }
}

fn project_out(x: &mut [Complex64], locked: &[Vec<Complex64>]) {
    for v in locked {
        let d: Complex64 = v.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        for (y, a) in x.iter_mut().zip(v.iter()) {
            *y -= d * a;
        }
    }
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// The `count` smallest singular values of `a`, ascending.
///
/// Converged right vectors are locked and projected out around each pair of solves,
/// with the matching left vectors removed between the two solves,
/// so an exactly singular direction cannot swamp the rest of the block.
pub fn smallest_singular_values(a: &Banded, count: usize, opts: IterOptions) -> Result<Vec<f64>> {
    let n = a.n;
    let count = count.min(n);
    let lu = a.clone().factor();
    let norm_a = a.norm_inf();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<Complex64>> = Vec::new();
    let mut left: Vec<Vec<Complex64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let block = (count + 2).min(n);
    let mut x: Vec<Vec<Complex64>> = (0..block)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    orthonormalize(&mut x);
    let mut prev = f64::INFINITY;
    let mut iters = 0;
    while values.len() < count {
        iters += 1;
        if iters > opts.max_iter {
            return Err(Error::NonConvergence(format!(
                "singular values did not settle in {} iterations",
                opts.max_iter
            )));
        }
        for col in x.iter_mut() {
            project_out(col, &locked);
            lu.solve_adjoint(col);
            project_out(col, &left);
            lu.solve(col);
            project_out(col, &locked);
        }
        orthonormalize(&mut x);
        // Rayleigh–Ritz on AᴴA restricted to span(x)
        let p = x.len();
        let ax: Vec<Vec<Complex64>> = x.iter().map(|c| a.matvec(c)).collect();
        let g = DMatrix::from_fn(p, p, |i, j| {
            ax[i].iter().zip(ax[j].iter()).map(|(u, v)| u.conj() * v).sum::<Complex64>()
        });
        let eig = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        x = order
            .iter()
            .map(|&c| {
                (0..n)
                    .map(|r| (0..p).map(|i| x[i][r] * eig.eigenvectors[(i, c)]).sum())
                    .collect()
            })
            .collect();
        let lowest = norm(&a.matvec(&x[0]));
        // rounding in ‖Ax‖ alone is of order ε‖A‖
        let floor = 64.0 * f64::EPSILON * norm_a;
        if (lowest - prev).abs() <= opts.rel_tol * lowest + floor {
            values.push(lowest);
            let v = x.remove(0);
            // left singular vector ∝ A⁻ᴴv, well conditioned even when σ is tiny
            let mut u = v.clone();
            lu.solve_adjoint(&mut u);
            project_out(&mut u, &left);
            let nu = norm(&u);
            u.iter_mut().for_each(|c| *c /= nu);
            left.push(u);
            locked.push(v);
            if values.len() + x.len() < count {
                let fresh: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                x.push(fresh);
            }
            prev = f64::INFINITY;
        } else {
            prev = lowest;
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let vals = [3.0, -0.5, 2.0, 0.25, 7.0, 1.0];
        let mut a = Banded::zeros(vals.len(), 1, 1);
        for (i, v) in vals.iter().enumerate() {
            a.add(i, i, Complex64::new(0.0, *v));
        }
        let s = smallest_singular_values(&a, 3, IterOptions::default()).unwrap();
        let want = [0.25, 0.5, 1.0];
        for (x, y) in s.iter().zip(want) {
            assert!((x - y).abs() < 1e-10, "{s:?}");
        }
    }

    #[test]
    fn bidiagonal_against_dense_svd() {
        let n = 12;
        let mut a = Banded::zeros(n, 0, 1);
        for i in 0..n {
            a.add(i, i, Complex64::new(1.0 + i as f64 * 0.3, 0.1));
            if i + 1 < n {
                a.add(i, i + 1, Complex64::new(0.5, -0.2));
            }
        }
        let d = a.to_dense();
        let m = DMatrix::from_fn(n, n, |i, j| d[i][j]);
        let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
        sv.sort_by(f64::total_cmp);
        let s = smallest_singular_values(&a, 4, IterOptions::default()).unwrap();
        for (x, y) in s.iter().zip(sv.iter()) {
            assert!((x - y).abs() < 1e-9 * y.max(1.0), "{s:?} {sv:?}");
        }
    }
}
