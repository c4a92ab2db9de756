//! Dense real matrices and the largest-singular-value solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 50_000;
const RESTART_SEED: u64 = 0x5eed_0f_9a11;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Real form `[[A, -B], [B, A]]` of the complex matrix `A + iB`.
    pub fn realify(re: &Matrix, im: &Matrix) -> Matrix {
        assert_eq!((re.rows, re.cols), (im.rows, im.cols));
        let (r, c) = (re.rows, re.cols);
        Matrix::from_fn(2 * r, 2 * c, |i, j| {
            let (bi, bj) = (i / r, j / c);
            let (ii, jj) = (i % r, j % c);
            match (bi, bj) {
                (0, 0) | (1, 1) => re.get(ii, jj),
                (0, 1) => -im.get(ii, jj),
                _ => im.get(ii, jj),
            }
        })
    }

    /// `MᵀM`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = vec![0.0; n * n];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..n {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                let ga = &mut g[a * n..(a + 1) * n];
                for b in a..n {
                    ga[b] += ra * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g[a * n + b] = g[b * n + a];
            }
        }
        Matrix { rows: n, cols: n, data: g }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub norm: f64,
    pub iterations: usize,
    /// `‖Gv - θv‖ / θ` for the final unit vector `v`.
    pub residual: f64,
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

struct Run {
    theta: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn iterate(g: &Matrix, mut v: Vec<f64>, tol: f64, cap: usize) -> Run {
    normalize(&mut v);
    let mut theta = 0.0;
    for it in 1..=cap {
        let mut w = g.mul_vec(&v);
        let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let wn = normalize(&mut w);
        if wn == 0.0 {
            return Run { theta: 0.0, iterations: it, residual: 0.0, converged: false };
        }
        let done = (next - theta).abs() <= tol * next.abs();
        theta = next;
        v = w;
        if done {
            let gv = g.mul_vec(&v);
            let th: f64 = gv.iter().zip(&v).map(|(a, b)| a * b).sum();
            let res = gv.iter().zip(&v).map(|(a, b)| (a - th * b).powi(2)).sum::<f64>().sqrt() / th;
            return Run { theta: th.max(theta), iterations: it, residual: res, converged: true };
        }
    }
    Run { theta, iterations: cap, residual: f64::NAN, converged: false }
}

/// Largest singular value of `m` by power iteration on `MᵀM`, started from
/// the all-ones vector; restarts once from a seeded random vector when the
/// first run stagnates.
pub fn largest_singular_value(m: &Matrix, tol: f64) -> Result<NormReport> {
    if m.rows == 0 || m.cols == 0 || m.data.iter().all(|&x| x == 0.0) {
        return Ok(NormReport { norm: 0.0, iterations: 0, residual: 0.0 });
    }
    if m.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular("matrix has non-finite entries".into()));
    }
    let g = m.gram();
    let first = iterate(&g, vec![1.0; g.cols], tol, MAX_ITERATIONS);
    if first.converged && first.theta > 0.0 {
        return Ok(NormReport { norm: first.theta.sqrt(), iterations: first.iterations, residual: first.residual });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let start = (0..g.cols).map(|_| rng.gen::<f64>() - 0.5).collect();
    let second = iterate(&g, start, tol, MAX_ITERATIONS);
    let iterations = first.iterations + second.iterations;
    if second.converged {
        return Ok(NormReport { norm: second.theta.max(first.theta).sqrt(), iterations, residual: second.residual });
    }
    Err(Error::NoConvergence { best: second.theta.max(first.theta).max(0.0).sqrt(), iterations })
}
