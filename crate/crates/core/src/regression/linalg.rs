//! Dense symmetric positive-definite solves for the normal equations.

use crate::{Error, Result};

const RIDGE_JITTER: f64 = 1e-8;

/// Lower-triangular Cholesky factor of a row-major `n x n` matrix, or `None`
/// when a pivot is not safely positive.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= tol {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn solve_with_factor(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * z[k]).sum();
        z[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i * n + i];
    }
    x
}

/// Solves `A x = b` for symmetric `A`. When `A` is numerically singular a
/// ridge jitter of 1e-8 is added to the diagonal, growing tenfold per retry.
pub fn solve_spd(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    if let Some(l) = cholesky(a, n) {
        return Ok(solve_with_factor(&l, n, b));
    }
    let mut jitter = RIDGE_JITTER;
    for _ in 0..8 {
        let mut damped = a.to_vec();
        for i in 0..n {
            damped[i * n + i] += jitter;
        }
        if let Some(l) = cholesky(&damped, n) {
            return Ok(solve_with_factor(&l, n, b));
        }
        jitter *= 10.0;
    }
    Err(Error::Domain("normal equations are not positive definite even with ridge jitter".into()))
}

/// `XᵀX` and `Xᵀy` for a design whose rows are `[1, features...]`.
pub fn gram(rows: &[Vec<f64>], targets: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = rows.first().map_or(0, |r| r.len() + 1);
    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut z = vec![0.0; p];
    for (row, &y) in rows.iter().zip(targets) {
        z[0] = 1.0;
        z[1..].copy_from_slice(row);
        for i in 0..p {
            xty[i] += z[i] * y;
            for j in 0..=i {
                xtx[i * p + j] += z[i] * z[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            xtx[j * p + i] = xtx[i * p + j];
        }
    }
    (xtx, xty)
}
