//! Summation of radial kernels against Lévy measures with rigorous tail bounds.
//!
//! A kernel `f(ξ, r)` is summed over the support of a measure. Lattices are
//! walked outward from the index nearest `r = 1`; the walk on each side stops
//! once the analytic tail bound from the kernel [`Envelope`] is below the
//! requested tolerance. Radial densities are integrated on a log scale
//! between cut-offs chosen from the same envelope.

use alloc::vec::Vec;

use super::mass::{lower_tail_bound, upper_tail_bound, MassLaw};
use super::measure::{polar, LevyComponent, LevyMeasure, ScaleLattice};
use super::radial::RadialDensity;
use crate::error::{Error, Result};
use crate::fmath::{abs, ceil, exp, ln};
use crate::quad::{integrate, Accum};

/// Bounds `|f(r)| <= small_coef * r^small_pow` on `r <= 1` and
/// `|f(r)| <= r^large_pow * P(ln r)` on `r >= 1`.
#[derive(Debug, Clone)]
pub(crate) struct Envelope {
    pub small_coef: f64,
    pub small_pow: f64,
    pub large_pow: f64,
    pub large_poly: Vec<f64>,
}

impl Envelope {
    pub fn bounded(small_coef: f64, small_pow: f64, large_const: f64) -> Self {
        Envelope { small_coef, small_pow, large_pow: 0.0, large_poly: alloc::vec![large_const] }
    }
}

/// Largest `ln r` at which a lattice point is evaluated.
pub(crate) const MAX_LN_RADIUS: f64 = 700.0;

/// Maximum number of lattice indices visited per component.
pub(crate) const MAX_TERMS: usize = 200_000;

/// Σ_k m(k) f(r_k) over a lattice. `f` returns the value and a bound on its
/// own evaluation error. Returns the sum and the total error bound.
pub(crate) fn sum_lattice<T: Accum>(
    lat: &ScaleLattice,
    mass: &MassLaw,
    env: &Envelope,
    tol: f64,
    mut f: impl FnMut(f64) -> (T, f64),
) -> Result<(T, f64)> {
    let ln_a = ln(lat.anchor);
    let lb = ln(lat.base);
    let mut pivot = ceil(-ln_a / lb) as i64;
    while ln_a + (pivot - 1) as f64 * lb >= 0.0 {
        pivot -= 1;
    }
    while ln_a + pivot as f64 * lb < 0.0 {
        pivot += 1;
    }
    let pieces = &mass.pieces;
    let mut sum = T::zero();
    let mut err_pts = 0.0;
    let mut count = 0usize;

    // Upward from the pivot.
    let mut k = pivot;
    let mut up_bound;
    loop {
        up_bound = 0.0;
        for p in pieces.iter().filter(|p| p.hi.is_none_or(|h| h >= k)) {
            let start = p.lo.map_or(k, |l| l.max(k));
            for t in &p.terms {
                up_bound += upper_tail_bound(t, start, p.hi, ln_a, lb, env.large_pow, &env.large_poly);
            }
        }
        if up_bound <= 0.5 * tol {
            break;
        }
        let Some(p) = pieces.iter().find(|p| p.hi.is_none_or(|h| h >= k)) else { break };
        let idx = p.lo.map_or(k, |l| l.max(k));
        if lat.ln_radius(idx) > MAX_LN_RADIUS {
            return Err(Error::Tolerance { achieved: up_bound, requested: 0.5 * tol });
        }
        let m = p.value(idx);
        let (v, e) = f(lat.radius(idx));
        sum = sum + v * m;
        err_pts += abs(m) * e;
        k = idx + 1;
        count += 1;
        if count > MAX_TERMS {
            return Err(Error::Tolerance { achieved: up_bound, requested: 0.5 * tol });
        }
    }

    // Downward from below the pivot.
    let mut k = pivot - 1;
    let mut low_bound;
    loop {
        low_bound = 0.0;
        for p in pieces.iter().filter(|p| p.lo.is_none_or(|l| l <= k)) {
            let from = p.hi.map_or(k, |h| h.min(k));
            for t in &p.terms {
                low_bound += env.small_coef * lower_tail_bound(t, from, p.lo, ln_a, lb, env.small_pow);
            }
        }
        if low_bound <= 0.5 * tol {
            break;
        }
        let Some(p) = pieces.iter().rev().find(|p| p.lo.is_none_or(|l| l <= k)) else { break };
        let idx = p.hi.map_or(k, |h| h.min(k));
        let m = p.value(idx);
        let (v, e) = f(lat.radius(idx));
        sum = sum + v * m;
        err_pts += abs(m) * e;
        k = idx - 1;
        count += 1;
        if count > MAX_TERMS {
            return Err(Error::Tolerance { achieved: low_bound, requested: 0.5 * tol });
        }
    }
    Ok((sum, up_bound + low_bound + err_pts))
}

/// `∫ f(s) ν_r(ds)` for a radial density, with cut-offs from the envelope.
pub(crate) fn sum_radial<T: Accum>(
    rd: &RadialDensity,
    env: &Envelope,
    tol: f64,
    extra_breaks: &[f64],
    mut f: impl FnMut(f64) -> T,
) -> Result<(T, f64)> {
    let mut eps = 0.1 * rd.scale.min(1.0);
    let mut small = if env.small_coef == 0.0 { 0.0 } else { env.small_coef * rd.small_moment(eps, env.small_pow) };
    let mut it = 0;
    while small > 0.25 * tol {
        eps *= 0.25;
        small = env.small_coef * rd.small_moment(eps, env.small_pow);
        it += 1;
        if it > 200 {
            return Err(Error::Tolerance { achieved: small, requested: 0.25 * tol });
        }
    }
    let mut big_r = 10.0 * rd.scale.max(1.0);
    let mut large = rd.large_moment(big_r, env.large_pow, &env.large_poly);
    let mut it = 0;
    while large > 0.25 * tol {
        big_r *= 1.5;
        large = rd.large_moment(big_r, env.large_pow, &env.large_poly);
        it += 1;
        if it > 400 {
            return Err(Error::Tolerance { achieved: large, requested: 0.25 * tol });
        }
    }
    let mut breaks: Vec<f64> = rd.breakpoints();
    breaks.extend_from_slice(extra_breaks);
    let lbreaks: Vec<f64> = breaks.iter().filter(|b| **b > 0.0).map(|b| ln(*b)).collect();
    let q = integrate(
        |u| {
            let s = exp(u);
            let d = rd.density(s);
            if d == 0.0 {
                T::zero()
            } else {
                f(s) * (d * s)
            }
        },
        ln(eps),
        ln(big_r),
        &lbreaks,
        0.5 * tol,
        0.0,
        4000,
    )?;
    Ok((q.value, q.err + small + large))
}

/// Σ over all components of a measure, with the tolerance split evenly.
/// `f(ξ, r)` returns the kernel value and a bound on its evaluation error.
pub(crate) fn sum_measure<T: Accum>(
    nu: &LevyMeasure,
    env: &Envelope,
    tol: f64,
    mut f: impl FnMut(&[f64], f64) -> (T, f64),
) -> Result<(T, f64)> {
    let n = nu.components.len().max(1) as f64;
    let ctol = tol / n;
    let mut sum = T::zero();
    let mut err = 0.0;
    for c in &nu.components {
        match c {
            LevyComponent::Atoms { atoms } => {
                for a in atoms {
                    if a.w == 0.0 {
                        continue;
                    }
                    let (xi, r) = polar(&a.x);
                    let (v, e) = f(&xi, r);
                    sum = sum + v * a.w;
                    err += abs(a.w) * e;
                }
            }
            LevyComponent::Lattice(l) => {
                let mass = l.mass.canonical();
                let (v, e) = sum_lattice(l, &mass, env, ctol, |r| f(&l.direction, r))?;
                sum = sum + v;
                err += e;
            }
            LevyComponent::Radial(rd) => {
                let (v, e) = sum_radial(rd, env, ctol, &[], |s| f(&rd.direction, s).0)?;
                sum = sum + v;
                err += e;
            }
        }
    }
    Ok((sum, err))
}

/// Vector-valued sums `Σ ξ g(ξ, r)` of a scalar radial kernel.
pub(crate) fn sum_measure_vec(
    nu: &LevyMeasure,
    dim: usize,
    env: &Envelope,
    tol: f64,
    mut g: impl FnMut(f64) -> (f64, f64),
) -> Result<(Vec<f64>, f64)> {
    let n = nu.components.len().max(1) as f64;
    let ctol = tol / n;
    let mut out = alloc::vec![0.0; dim];
    let mut err = 0.0;
    for c in &nu.components {
        let single = LevyMeasure { components: alloc::vec![c.clone()] };
        match c {
            LevyComponent::Atoms { atoms } => {
                for a in atoms {
                    if a.w == 0.0 {
                        continue;
                    }
                    let (xi, r) = polar(&a.x);
                    let (v, e) = g(r);
                    for i in 0..dim {
                        out[i] += a.w * v * xi[i];
                    }
                    err += abs(a.w) * e;
                }
            }
            LevyComponent::Lattice(l) => {
                let (v, e) = sum_measure(&single, env, ctol, |_, r| g(r))?;
                for i in 0..dim {
                    out[i] += v * l.direction[i];
                }
                err += e;
            }
            LevyComponent::Radial(rd) => {
                let (v, e) = sum_measure(&single, env, ctol, |_, r| g(r))?;
                for i in 0..dim {
                    out[i] += v * rd.direction[i];
                }
                err += e;
            }
        }
    }
    Ok((out, err))
}
