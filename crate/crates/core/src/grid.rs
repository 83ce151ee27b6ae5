//! Evaluation grids in `R^d`.

use alloc::vec;
use alloc::vec::Vec;

/// `n` equally spaced values on `[lo, hi]`, computed as `lo + (hi - lo) i / (n - 1)`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Points `t e_i` for `t` in `linspace(lo, hi, n)` along every coordinate
/// axis of `R^d`; the origin is included once.
pub fn axis_grid(d: usize, lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    let ts = linspace(lo, hi, n);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut have_origin = false;
    for axis in 0..d {
        for &t in &ts {
            if t == 0.0 {
                if have_origin {
                    continue;
                }
                have_origin = true;
            }
            let mut z = vec![0.0; d];
            z[axis] = t;
            out.push(z);
        }
    }
    out
}

/// Axis grid plus the two main diagonals in the first coordinate plane (for `d >= 2`).
pub fn axis_diag_grid(d: usize, lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    let mut out = axis_grid(d, lo, hi, n);
    if d >= 2 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for &t in &linspace(lo, hi, n) {
            if t == 0.0 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut z = vec![0.0; d];
                z[0] = t * s;
                z[1] = sign * t * s;
                out.push(z);
            }
        }
    }
    out
}
