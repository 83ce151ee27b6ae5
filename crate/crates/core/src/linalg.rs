//! Small dense linear algebra on row-major `Vec<f64>` matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath::{abs, sqrt};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `<z, A z>` for a row-major `d x d` matrix.
pub fn quad_form(a: &[f64], z: &[f64]) -> f64 {
    let d = z.len();
    let mut s = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += a[i * d + j] * z[j];
        }
        s += z[i] * row;
    }
    s
}

pub fn mat_vec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|i| (0..d).map(|j| a[i * d + j] * x[j]).sum()).collect()
}

/// Largest absolute asymmetry `|a_ij - a_ji|`.
pub fn asymmetry(a: &[f64], d: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..d {
        for j in 0..i {
            m = m.max(abs(a[i * d + j] - a[j * d + i]));
        }
    }
    m
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as columns
/// of a row-major matrix.
pub fn sym_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    off += m[i * d + j] * m[i * d + j];
                }
            }
        }
        let diag: f64 = (0..d).map(|i| m[i * d + i] * m[i * d + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (abs(theta) + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| m[i * d + i]).collect(), v)
}

/// Symmetric square root of a positive semi-definite matrix.
/// Slightly negative eigenvalues (round-off) are clamped to zero.
pub fn sym_sqrt(a: &[f64], d: usize) -> Vec<f64> {
    let (w, v) = sym_eigen(a, d);
    let mut out = vec![0.0; d * d];
    for k in 0..d {
        let s = sqrt(w[k].max(0.0));
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] += v[i * d + k] * s * v[j * d + k];
            }
        }
    }
    out
}

/// Solve `M x = y` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve(m: &[f64], y: &[f64]) -> Option<Vec<f64>> {
    let d = y.len();
    let mut a = m.to_vec();
    let mut b = y.to_vec();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(abs(*x)));
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| abs(a[i * d + col]).total_cmp(&abs(a[j * d + col])))?;
        if abs(a[piv * d + col]) <= 1e-14 * scale.max(1e-300) {
            return None;
        }
        if piv != col {
            for k in 0..d {
                a.swap(piv * d + k, col * d + k);
            }
            b.swap(piv, col);
        }
        for r in (col + 1)..d {
            let f = a[r * d + col] / a[col * d + col];
            for k in col..d {
                a[r * d + k] -= f * a[col * d + k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = b[i];
        for k in (i + 1)..d {
            s -= a[i * d + k] * x[k];
        }
        x[i] = s / a[i * d + i];
    }
    Some(x)
}
