//! Cumulants `log μ̂(z)`, their scale-series `Σ_k C(k+m,m) C(b^{-k} z)`,
//! and log-moments.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::engine::{sum_measure, sum_radial, Envelope};
use super::mass::exact_weighted_sum;
use super::measure::{LevyComponent, LevyMeasure};
use super::triplet::{lattice_pivot, LevyTriplet};
use crate::error::{Error, Result};
use crate::fmath::{abs, inv_one_plus_sq, ln, powf, powi, sin, sq_over_one_plus_sq};
use crate::linalg::{dot, norm, quad_form};
use crate::special::{binom_f64, expi_m1_mi};

/// A cumulant value with an upper bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CumulantValue {
    pub value: Complex64,
    pub err: f64,
}

fn check_dim(t: &LevyTriplet, z: &[f64]) -> Result<()> {
    if z.len() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), got: z.len() });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(alloc::string::String::from("non-finite z")));
    }
    Ok(())
}

/// `e^{iu} - 1 - iu/(1+r^2)` with a rounding bound. For `|u| < 1` it is
/// written as `h(u) + i u ρ` with `ρ = r^2/(1+r^2)` and `h` accurate near 0;
/// otherwise it is evaluated directly, avoiding terms of size `|u|` that cancel.
#[inline]
fn levy_integrand(u: f64, r: f64) -> (Complex64, f64) {
    if abs(u) >= 1.0 {
        let v = Complex64::new(-2.0 * sin(0.5 * u) * sin(0.5 * u), sin(u) - u * inv_one_plus_sq(r));
        return (v, 8e-16 * (1.0 + abs(v.re) + abs(v.im)));
    }
    let rho = sq_over_one_plus_sq(r);
    let h = expi_m1_mi(u);
    let lin = u * rho;
    (h + Complex64::new(0.0, lin), 4e-16 * (abs(h.re) + abs(h.im) + abs(lin)))
}

/// `C_μ(z)` to absolute accuracy `tol`.
pub fn cumulant_tol(t: &LevyTriplet, z: &[f64], tol: f64) -> Result<CumulantValue> {
    check_dim(t, z)?;
    let d = t.dim();
    let mut v = Complex64::new(-0.5 * quad_form(&t.gauss, z), dot(&t.drift, z));
    let mut err = 1e-16 * v.norm();
    if !t.levy.components.is_empty() {
        let zn = norm(z);
        let env = Envelope::bounded(0.5 * zn * zn + zn, 2.0, 2.0 + 0.5 * zn);
        let (s, e) = sum_measure(&t.levy, &env, tol, |xi, r| {
            levy_integrand(r * dot(&xi[..d], z), r)
        })?;
        v += s;
        err += e;
    }
    Ok(CumulantValue { value: v, err })
}

/// `C_μ(z)` with the default tolerance.
pub fn cumulant(t: &LevyTriplet, z: &[f64]) -> Result<CumulantValue> {
    cumulant_tol(t, z, crate::DEFAULT_TOL)
}

/// Per-point series `Σ_{k≥0} C(k+m,m) g(b^{-k} u, r)` of the Lévy integrand.
#[derive(Debug, Clone)]
pub(crate) struct ScaleSeries {
    pub b: f64,
    pub m: u32,
    /// `Σ_k C(k+m,m) b^{-k} = (1 - 1/b)^{-(m+1)}`.
    pub p1: f64,
    /// `Σ_k C(k+m,m) b^{-2k} = (1 - b^{-2})^{-(m+1)}`.
    pub p2: f64,
}

const TAYLOR_SWITCH: f64 = 1e-3;

impl ScaleSeries {
    pub fn new(b: f64, m: u32) -> Self {
        ScaleSeries { b, m, p1: powi(1.0 - 1.0 / b, -(m as i32 + 1)), p2: powi(1.0 - 1.0 / (b * b), -(m as i32 + 1)) }
    }

    fn weight(&self, k: u64) -> f64 {
        binom_f64((k + self.m as u64) as f64, self.m)
    }

    /// `Σ_{i≥0} C(k+i+m, m) b^{-n i}`.
    fn tail_weights(&self, n: u32, k: u64) -> f64 {
        let y = powi(self.b, -(n as i32));
        if self.m == 0 {
            return 1.0 / (1.0 - y);
        }
        let mut term = self.weight(k);
        let mut sum = 0.0;
        let mut i = 0u64;
        loop {
            sum += term;
            let j = k + i;
            let ratio = (j + 1 + self.m as u64) as f64 / (j + 1) as f64 * y;
            term *= ratio;
            i += 1;
            if ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-17 * sum {
                return sum + term / (1.0 - ratio);
            }
            if i > 100_000 {
                return sum;
            }
        }
    }

    /// Value and error bound for a point at radius `r` with `u = <z, x>`.
    pub fn point(&self, u: f64, r: f64) -> (Complex64, f64) {
        if u == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let rho = sq_over_one_plus_sq(r);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut k = 0u64;
        let mut uk = u;
        let mut w = 1.0;
        while abs(uk) > TAYLOR_SWITCH {
            let (t, e) = levy_integrand(uk, r);
            acc += t * w;
            mag += w * (abs(t.re) + abs(t.im) + e * 1e16);
            k += 1;
            uk = u * powf(self.b, -(k as f64));
            w = self.weight(k);
        }
        // Remaining terms: Taylor expansion of h plus the linear part i u_k ρ.
        let u2 = uk * uk;
        let t1 = self.tail_weights(1, k);
        let t2 = self.tail_weights(2, k);
        let t3 = self.tail_weights(3, k);
        let t4 = self.tail_weights(4, k);
        let t5 = self.tail_weights(5, k);
        let tail = Complex64::new(-0.5 * u2 * t2 + u2 * u2 / 24.0 * t4, -u2 * uk / 6.0 * t3 + uk * rho * t1);
        acc += tail;
        let rem = powi(abs(uk), 5) / 120.0 * t5;
        (acc, rem + 4e-16 * (mag + abs(tail.re) + abs(tail.im)))
    }

    /// Kernel envelope for `|z| = zn`.
    pub fn envelope(&self, zn: f64) -> Envelope {
        let m = self.m as usize;
        let lb = ln(self.b);
        // N <= nu0 + L / ln b counts the terms with |b^{-k} z| r >= 1.
        let nu0 = if zn > 0.0 { (ln(zn) / lb + 1.0).max(0.0) } else { 0.0 };
        let a0 = nu0 + m as f64;
        let a1 = 1.0 / lb;
        let fact = |n: usize| (1..=n).fold(1.0, |acc, i| acc * i as f64);
        let mut poly = vec![0.0; m + 2];
        // (2 + |z|/2) (N+m)^{m+1}/(m+1)! + 1.5 P1 (N+m)^m/m!
        let c1 = (2.0 + 0.5 * zn) / fact(m + 1);
        let c2 = 1.5 * self.p1 / fact(m);
        for i in 0..=m + 1 {
            poly[i] += c1 * binom_f64((m + 1) as f64, i as u32) * powi(a0, (m + 1 - i) as i32) * powi(a1, i as i32);
        }
        for i in 0..=m {
            poly[i] += c2 * binom_f64(m as f64, i as u32) * powi(a0, (m - i) as i32) * powi(a1, i as i32);
        }
        Envelope { small_coef: 0.5 * zn * zn * self.p2 + zn * self.p1, small_pow: 2.0, large_pow: 0.0, large_poly: poly }
    }
}

/// `Σ_{k≥0} C(k+m,m) C_μ(b^{-k} z)`; requires the log^{m+1}-moment of `ν` to be finite.
pub(crate) fn scale_series_cumulant(t: &LevyTriplet, b: f64, m: u32, z: &[f64], tol: f64) -> Result<CumulantValue> {
    check_dim(t, z)?;
    let d = t.dim();
    let s = ScaleSeries::new(b, m);
    let mut v = Complex64::new(-0.5 * quad_form(&t.gauss, z) * s.p2, dot(&t.drift, z) * s.p1);
    let mut err = 1e-15 * v.norm();
    if !t.levy.components.is_empty() {
        let env = s.envelope(norm(z));
        let (sum, e) = sum_measure(&t.levy, &env, tol, |xi, r| s.point(r * dot(&xi[..d], z), r))?;
        v += sum;
        err += e;
    }
    Ok(CumulantValue { value: v, err })
}

/// `∫_{|x|>1} (log|x|)^p ν(dx)`, possibly `+∞`.
pub fn log_moment(nu: &LevyMeasure, p: u32) -> Result<f64> {
    let mut poly = vec![0.0; p as usize + 1];
    poly[p as usize] = 1.0;
    let mut total = 0.0;
    for c in &nu.components {
        match c {
            LevyComponent::Atoms { atoms } => {
                for a in atoms {
                    let r = norm(&a.x);
                    if r > 1.0 {
                        total += a.w * powi(ln(r), p as i32);
                    }
                }
            }
            LevyComponent::Lattice(l) => {
                let m = l.mass.canonical();
                let pivot = lattice_pivot(l);
                let (ln_a, lb) = (ln(l.anchor), ln(l.base));
                for piece in &m.pieces {
                    if piece.hi.is_some_and(|h| h < pivot) {
                        continue;
                    }
                    let start = piece.lo.map_or(pivot, |lo| lo.max(pivot));
                    let mut parts: Vec<f64> = Vec::new();
                    for t in &piece.terms {
                        parts.push(exact_weighted_sum(t, start, piece.hi, ln_a, lb, &poly)?);
                    }
                    if parts.iter().any(|x| x.is_infinite()) {
                        let all_pos = piece.terms.iter().zip(&parts).all(|(t, x)| !x.is_infinite() || t.coef > 0.0);
                        if all_pos {
                            return Ok(f64::INFINITY);
                        }
                        return Err(Error::Unsupported(alloc::string::String::from(
                            "log-moment of a lattice piece with cancelling divergent terms",
                        )));
                    }
                    total += parts.iter().sum::<f64>();
                }
            }
            LevyComponent::Radial(rd) => {
                let env = Envelope { small_coef: 0.0, small_pow: 2.0, large_pow: 0.0, large_poly: poly.clone() };
                let (v, _) = sum_radial(rd, &env, 1e-12, &[1.0], |s| if s > 1.0 { powi(ln(s), p as i32) } else { 0.0 })?;
                total += v;
            }
        }
    }
    Ok(total)
}
