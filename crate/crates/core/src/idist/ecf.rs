//! Empirical characteristic functions.

use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::fmath::{cos, sin, sqrt};

/// Default confidence multiplier: the radius is `q / sqrt(n)`.
pub const ECF_Q: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EcfGrid {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub n: usize,
    /// Confidence radius `q / sqrt(n)`.
    pub radius: f64,
}

pub fn ecf_radius(n: usize, q: f64) -> f64 {
    q / sqrt(n as f64)
}

/// ECF of `n = values.len() / dim` row-major samples on `grid`.
pub fn ecf(values: &[f64], dim: usize, grid: &[Vec<f64>], q: f64) -> Result<EcfGrid> {
    if dim == 0 || values.len() % dim != 0 {
        return Err(invalid_arg("sample buffer is not a multiple of the dimension"));
    }
    let n = values.len() / dim;
    if n < 2 {
        return Err(invalid_arg("ECF needs at least two samples"));
    }
    let mut out = Vec::with_capacity(grid.len());
    for z in grid {
        if z.len() != dim {
            return Err(crate::Error::Dimension { expected: dim, got: z.len() });
        }
        let (mut c, mut s) = (0.0, 0.0);
        for row in values.chunks_exact(dim) {
            let u: f64 = row.iter().zip(z).map(|(x, y)| x * y).sum();
            c += cos(u);
            s += sin(u);
        }
        out.push(Complex64::new(c / n as f64, s / n as f64));
    }
    Ok(EcfGrid { points: grid.to_vec(), values: out, n, radius: ecf_radius(n, q) })
}
