//! Iterated mappings `Φ_b^{m+1}`, the nested classes `L_m(b)` and semi-stable laws.
//!
//! `Φ_b^{m+1}(μ)` is the law of `∫_0^∞ b^{-[f_m^*(t)]} dX_t` where
//! `f_m(u) = ∫_0^u C([v]+m, m) dv`. Its cumulant is
//! `Σ_{k≥0} C(k+m, m) C_μ(b^{-k} z)`, defined when `ν_μ` has a finite
//! `log^{m+1}`-moment.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::fmath::{abs, floor, inv_one_plus_sq, powf, sq_over_one_plus_sq};
use crate::idist::engine::{sum_measure_vec, Envelope};
use crate::idist::{cumulant_tol, scale_series_cumulant, CumulantValue, LevyComponent, LevyMeasure, LevyTriplet, MassLaw, ScaleLattice};
use crate::linalg::{dot, norm, scale, solve};
use crate::phi::{
    evidence_grid, factorization_check, phi_inverse, require_log_moment, LevelVerdict, MembershipCertificate, SpanConfig,
    Validity, Verdict,
};
use crate::special::{binom_f64, binom_u128};

/// Largest supported iteration order.
pub const M_MAX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IterConfig {
    pub b: f64,
    pub m: u32,
}

impl IterConfig {
    pub fn new(b: f64, m: u32) -> Result<Self> {
        let c = IterConfig { b, m };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        self.span().check()?;
        if self.m > M_MAX {
            return Err(invalid_arg(format!("m = {} exceeds the supported maximum {M_MAX}", self.m)));
        }
        Ok(())
    }

    pub fn span(&self) -> SpanConfig {
        SpanConfig { b: self.b }
    }
}

/// `f_m(k) = C(k+m, m+1)` in exact integers.
pub fn f_m_int(k: u64, m: u32) -> Option<u128> {
    binom_u128(k + m as u64, m as u64 + 1)
}

fn check_nonneg(x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid_arg("argument must be finite and nonnegative"));
    }
    Ok(())
}

/// `C(k+j, i)` for integer `k`, exact while it fits in 128 bits.
fn cell_binom(k: f64, j: u32, i: u32) -> f64 {
    if k < 1e15 {
        if let Some(v) = binom_u128(k as u64 + j as u64, i as u64) {
            return v as f64;
        }
    }
    binom_f64(k + j as f64, i)
}

/// `f_m(u) = ∫_0^u C([v]+m, m) dv`: slope `C(k+m, m)` on `[k, k+1)`.
pub fn f_m(u: f64, m: u32) -> Result<f64> {
    check_nonneg(u)?;
    let k = floor(u);
    Ok(cell_binom(k, m, m + 1) + (u - k) * cell_binom(k, m, m))
}

/// Inverse of [`f_m`].
pub fn f_m_star(t: f64, m: u32) -> Result<f64> {
    check_nonneg(t)?;
    let at = |k: f64| cell_binom(k, m, m + 1);
    // Largest integer k with f_m(k) <= t.
    let mut hi = 1.0;
    while at(hi) <= t {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1.0 {
        let mid = floor(0.5 * (lo + hi));
        if at(mid) <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (t - at(lo)) / cell_binom(lo, m, m))
}

/// `Σ_{j=0}^{n-k} C(n-j, k) = C(n+1, k+1)`, checked in integers.
pub fn binom_identity_check(n: u64, k: u64) -> Result<bool> {
    if k > n {
        return Err(invalid_arg("binomial identity needs k <= n"));
    }
    let overflow = || invalid_arg("binomial coefficient overflows 128 bits");
    let mut lhs: u128 = 0;
    for j in 0..=n - k {
        lhs = lhs.checked_add(binom_u128(n - j, k).ok_or_else(overflow)?).ok_or_else(overflow)?;
    }
    Ok(lhs == binom_u128(n + 1, k + 1).ok_or_else(overflow)?)
}

/// `C_{Φ_b^{m+1}(μ)}(z) = Σ_{k≥0} C(k+m, m) C_μ(b^{-k} z)` to absolute accuracy `tol`.
pub fn phi_iter_cumulant(mu: &LevyTriplet, cfg: &IterConfig, z: &[f64], tol: f64) -> Result<CumulantValue> {
    cfg.check()?;
    require_log_moment(mu, cfg.m + 1)?;
    let v = scale_series_cumulant(mu, cfg.b, cfg.m, z, tol)?;
    if v.err > tol {
        return Err(Error::Tolerance { achieved: v.err, requested: tol });
    }
    Ok(v)
}

/// Decide `μ ∈ L_m(b)` by taking `m + 1` successive factors.
///
/// Level `j` holds when the factors `ρ_1, ..., ρ_{j+1}` are all valid.
pub fn is_lm_member(mu: &LevyTriplet, cfg: &IterConfig) -> Result<MembershipCertificate> {
    cfg.check()?;
    mu.ensure_valid()?;
    if mu.levy.has_radial() {
        return Err(Error::Unsupported(String::from("membership of radial densities")));
    }
    let span = cfg.span();
    let mut levels = Vec::new();
    let mut factors = Vec::new();
    let mut current = mu.clone();
    let mut undecided = false;
    let mut residual_pair: Option<(LevyTriplet, LevyTriplet, u32)> = None;
    for j in 0..=cfg.m {
        let inv = phi_inverse(&current, &span)?;
        let mut verdict = Verdict::from_validity(&inv.validity);
        if undecided && verdict == Verdict::Member {
            verdict = Verdict::Undecided;
        }
        undecided |= verdict == Verdict::Undecided;
        if residual_pair.is_none() && (j == 0 || verdict == Verdict::NonMember) {
            if let Some(r) = &inv.rho_positive {
                residual_pair = Some((current.clone(), r.clone(), j));
            }
        }
        if verdict == Verdict::NonMember && j > 0 {
            // The level-0 pair is superseded by the failing level.
            if let Some(r) = &inv.rho_positive {
                residual_pair = Some((current.clone(), r.clone(), j));
            }
        }
        levels.push(LevelVerdict { level: j, verdict, validity: inv.validity.clone() });
        let Some(rho) = inv.rho else { break };
        factors.push(rho.clone());
        if verdict == Verdict::NonMember {
            break;
        }
        current = rho;
    }
    let verdict = if levels.len() as u32 == cfg.m + 1 {
        levels.last().map(|l| l.verdict).unwrap_or(Verdict::Undecided)
    } else {
        match levels.last().map(|l| l.verdict) {
            Some(Verdict::NonMember) => Verdict::NonMember,
            _ => Verdict::Undecided,
        }
    };
    let (residual, residual_level) = match residual_pair {
        Some((a, r, j)) => {
            let rep = factorization_check(&a, &r, &span, &evidence_grid(a.dim()), 1e-8).ok();
            (rep.map(|r| r.max_residual), j)
        }
        None => (None, 0),
    };
    Ok(MembershipCertificate { b: cfg.b, level: cfg.m, verdict, levels, factors, residual, residual_level })
}

/// A semi-stable law with span `b` and index `α ∈ (0, 2)`: lattices
/// `ν({r0 b^k ξ}) = w_ξ b^{-αk}`, `k ∈ Z`, one per direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SemiStableSpec {
    pub b: f64,
    pub alpha: f64,
    /// Unit directions with weights.
    pub directions: Vec<(Vec<f64>, f64)>,
    pub r0: f64,
}

impl SemiStableSpec {
    pub fn check(&self) -> Result<()> {
        SpanConfig { b: self.b }.check()?;
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(invalid_arg("semi-stable index must lie in (0, 2)"));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(invalid_arg("lattice anchor must be positive"));
        }
        if self.directions.is_empty() {
            return Err(invalid_arg("at least one direction is required"));
        }
        let d = self.directions[0].0.len();
        for (xi, w) in &self.directions {
            if xi.len() != d {
                return Err(Error::Dimension { expected: d, got: xi.len() });
            }
            if abs(norm(xi) - 1.0) > 1e-12 {
                return Err(invalid_arg("directions must be unit vectors"));
            }
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(invalid_arg("direction weights must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

/// The semi-stable triplet of `spec`, with drift making it strictly
/// semi-stable when `α ≠ 1`: `γ = ∫ x/(1+|x|^2) ν` for `α < 1`,
/// `γ = -∫ x|x|^2/(1+|x|^2) ν` (mean zero) for `α > 1`, and `γ = 0` for `α = 1`.
pub fn semi_stable_triplet(spec: &SemiStableSpec) -> Result<LevyTriplet> {
    spec.check()?;
    let d = spec.directions[0].0.len();
    let q = powf(spec.b, -spec.alpha);
    let comps: Vec<LevyComponent> = spec
        .directions
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(xi, w)| {
            LevyComponent::Lattice(ScaleLattice {
                direction: xi.clone(),
                base: spec.b,
                anchor: spec.r0,
                mass: MassLaw::geometric(*w, q, None, None),
            })
        })
        .collect();
    let levy = LevyMeasure { components: comps };
    let tol = 1e-14;
    let drift = if spec.alpha < 1.0 {
        let env = Envelope::bounded(1.0, 1.0, 1.0);
        sum_measure_vec(&levy, d, &env, tol, |r| (r * inv_one_plus_sq(r), 1e-16 * r))?.0
    } else if spec.alpha > 1.0 {
        let env = Envelope { small_coef: 1.0, small_pow: 3.0, large_pow: 1.0, large_poly: vec![1.0] };
        let v = sum_measure_vec(&levy, d, &env, tol, |r| {
            let g = r * sq_over_one_plus_sq(r);
            (g, 1e-16 * g)
        })?
        .0;
        scale(&v, -1.0)
    } else {
        vec![0.0; d]
    };
    Ok(LevyTriplet { gauss: vec![0.0; d * d], levy, drift })
}

/// Fitted scaling `a C(z) = C(bz) + i<c, z>` and its grid residual.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SemiStableFit {
    pub b: f64,
    pub a: f64,
    pub c: Vec<f64>,
    /// Grid point with the largest `|Re C|`, used to fit `a`.
    pub reference: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub semi_stable: bool,
}

/// Test `μ` for semi-stability with span `b` on `grid`.
pub fn is_semi_stable(mu: &LevyTriplet, b: f64, grid: &[Vec<f64>], tol: f64) -> Result<SemiStableFit> {
    SpanConfig { b }.check()?;
    let d = mu.dim();
    let et = 1e-3 * tol;
    let mut cz = Vec::with_capacity(grid.len());
    let mut cbz = Vec::with_capacity(grid.len());
    for z in grid {
        cz.push(cumulant_tol(mu, z, et)?.value);
        cbz.push(cumulant_tol(mu, &scale(z, b), et)?.value);
    }
    let (iref, _) = cz
        .iter()
        .enumerate()
        .fold((usize::MAX, 0.0f64), |(bi, bv), (i, c)| if abs(c.re) > bv { (i, abs(c.re)) } else { (bi, bv) });
    if iref == usize::MAX {
        return Err(invalid_arg("degenerate law: Re C vanishes on the grid"));
    }
    let a = cbz[iref].re / cz[iref].re;
    // Least squares for <c, z> = Im(a C(z) - C(bz)).
    let mut nm = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    for (i, z) in grid.iter().enumerate() {
        let y = (cz[i] * a - cbz[i]).im;
        for p in 0..d {
            rhs[p] += z[p] * y;
            for q in 0..d {
                nm[p * d + q] += z[p] * z[q];
            }
        }
    }
    let c = solve(&nm, &rhs).unwrap_or_else(|| vec![0.0; d]);
    let mut max_residual = 0.0f64;
    for (i, z) in grid.iter().enumerate() {
        let r = cz[i] * a - cbz[i] - Complex64::new(0.0, dot(&c, z));
        max_residual = max_residual.max(r.norm());
    }
    Ok(SemiStableFit {
        b,
        a,
        c,
        reference: grid[iref].clone(),
        max_residual,
        tol,
        semi_stable: a > 1.0 && max_residual < tol,
    })
}

/// Validity of every factor in a certificate, level by level.
pub fn factor_validities(cert: &MembershipCertificate) -> Vec<&Validity> {
    cert.levels.iter().map(|l| &l.validity).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idist::Atom;

    #[test]
    fn f_m_values() {
        assert_eq!(f_m(3.0, 1).unwrap(), 6.0);
        assert_eq!(f_m(2.0, 2).unwrap(), 4.0);
        assert_eq!(f_m_star(4.0, 2).unwrap(), 2.0);
        assert_eq!(f_m(2.5, 0).unwrap(), 2.5);
        for m in 0..=6 {
            for k in 0..=50u64 {
                // Hockey stick: Σ_{j<k} C(j+m, m).
                let direct: u128 = (0..k).map(|j| binom_u128(j + m as u64, m as u64).unwrap()).sum();
                assert_eq!(f_m_int(k, m), Some(direct));
                assert_eq!(f_m(k as f64, m).unwrap(), direct as f64);
            }
        }
    }

    #[test]
    fn gaussian_first_iterate() {
        let g = LevyTriplet::gaussian(vec![1.0]);
        let v = phi_iter_cumulant(&g, &IterConfig::new(2.0, 1).unwrap(), &[1.0], 1e-12).unwrap();
        assert!((v.value.re + 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn semi_stable_lattice_scales() {
        let spec = SemiStableSpec { b: 2.0, alpha: 1.0, directions: vec![(vec![1.0], 1.0)], r0: 1.0 };
        let t = semi_stable_triplet(&spec).unwrap();
        let cert = is_lm_member(&t, &IterConfig::new(2.0, 3).unwrap()).unwrap();
        assert!(cert.is_member());
        assert_eq!(cert.factors.len(), 4);
        let cp = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }]);
        let c = is_lm_member(&cp, &IterConfig::new(2.0, 0).unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::NonMember);
    }
}
