//! Numerical toolkit for semi-selfdecomposable distributions on `R^d`.
//!
//! The crate is `no_std` (with `alloc`). Distributions are carried as
//! Lévy–Khintchine triplets `(A, ν, γ)` with the centering `x / (1 + |x|^2)`:
//!
//! ```text
//! C(z) = -<z,Az>/2 + i<γ,z> + ∫ (e^{i<z,x>} - 1 - i<z,x>/(1+|x|^2)) ν(dx)
//! ```
//!
//! Modules:
//! - [`idist`]: triplets, Lévy measures, cumulants, log-moments, sampling, ECFs.
//! - [`phi`]: the span-`b` mapping `Φ_b`, its inverse and membership in `L_0(b)`.
//! - [`ou`]: OU-type processes driven by a Lévy process observed on the epoch grid `[ct]`.
//! - [`iterate`]: iterated mappings, nested classes `L_m(b)` and semi-stable laws.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod fmath;
pub mod grid;
pub mod idist;
pub mod iterate;
pub mod linalg;
pub mod ou;
pub mod phi;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default absolute tolerance for cumulant series and sums.
pub const DEFAULT_TOL: f64 = 1e-10;
