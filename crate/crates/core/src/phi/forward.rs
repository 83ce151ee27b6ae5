//! The forward map `Φ_b(ρ)`, with `C_{Φ_b(ρ)}(z) = Σ_{j≥0} C_ρ(b^{-j} z)`.

use alloc::string::String;
use alloc::vec::Vec;

use super::span::SpanForm;
use super::SpanConfig;
use crate::error::{domain, Error, Result};
use crate::fmath::{inv_one_plus_sq, powf, sq_over_one_plus_sq};
use crate::idist::engine::{sum_measure_vec, Envelope};
use crate::idist::{log_moment, scale_series_cumulant, CumulantValue, LevyTriplet, MassLaw, MassPiece, MassTerm};

/// Longest finite run of ratio-1 masses expanded point by point.
const MAX_POINT_EXPANSION: i64 = 10_000;

/// Fails unless `ρ` is valid and `∫_{|x|>1} (log|x|)^p ν_ρ(dx) < ∞`.
pub(crate) fn require_log_moment(rho: &LevyTriplet, p: u32) -> Result<()> {
    rho.ensure_valid()?;
    let lm = log_moment(&rho.levy, p)?;
    if !lm.is_finite() {
        return Err(domain(alloc::format!("log^{p}-moment of the Lévy measure is infinite")));
    }
    Ok(())
}

/// `C_{Φ_b(ρ)}(z)` to absolute accuracy `tol`.
pub fn phi_forward_cumulant(rho: &LevyTriplet, cfg: &SpanConfig, z: &[f64], tol: f64) -> Result<CumulantValue> {
    cfg.check()?;
    require_log_moment(rho, 1)?;
    let v = scale_series_cumulant(rho, cfg.b, 0, z, tol)?;
    if v.err > tol {
        return Err(Error::Tolerance { achieved: v.err, requested: tol });
    }
    Ok(v)
}

/// `F(k) = Σ_{j≥0} m(k + j)` for a canonical mass law.
pub(crate) fn forward_jsum(m: &MassLaw) -> Result<MassLaw> {
    let mut out: Vec<MassPiece> = Vec::new();
    let unsupported = |s: &str| Err(Error::Unsupported(String::from(s)));
    for p in &m.canonical().pieces {
        for t in &p.terms {
            if t.power != 0.0 {
                return unsupported("exact forward image of power-law masses");
            }
            let (c, q) = (t.coef, t.ratio);
            if q == 1.0 {
                match (p.lo, p.hi) {
                    (Some(a), Some(b)) if b - a < MAX_POINT_EXPANSION => {
                        for i in a..=b {
                            out.push(MassPiece { lo: None, hi: Some(i), terms: alloc::vec![MassTerm::new(c, 1.0)] });
                        }
                    }
                    _ => return unsupported("exact forward image of long constant mass runs"),
                }
                continue;
            }
            let g = MassTerm::new(c / (1.0 - q), q);
            match (p.lo, p.hi) {
                (lo, Some(h)) => {
                    let cut = MassTerm::new(-c * powf(q, (h + 1) as f64) / (1.0 - q), 1.0);
                    if !cut.coef.is_finite() {
                        return unsupported("forward image overflows");
                    }
                    out.push(MassPiece { lo, hi: Some(h), terms: alloc::vec![g, cut] });
                    if let Some(l) = lo {
                        let v = c * (powf(q, l as f64) - powf(q, (h + 1) as f64)) / (1.0 - q);
                        out.push(MassPiece { lo: None, hi: Some(l - 1), terms: alloc::vec![MassTerm::new(v, 1.0)] });
                    }
                }
                (lo, None) => {
                    if q > 1.0 {
                        return Err(domain("mass law is not summable at infinity"));
                    }
                    out.push(MassPiece { lo, hi: None, terms: alloc::vec![g] });
                    if let Some(l) = lo {
                        let v = c * powf(q, l as f64) / (1.0 - q);
                        out.push(MassPiece { lo: None, hi: Some(l - 1), terms: alloc::vec![MassTerm::new(v, 1.0)] });
                    }
                }
            }
        }
    }
    Ok(MassLaw { pieces: out }.canonical())
}

/// `S(r) = Σ_{j≥0} u_j (1/(1+u_j^2) - 1/(1+r^2))` with `u_j = b^{-j} r`.
pub(crate) fn forward_drift_point(b: f64, r: f64) -> (f64, f64) {
    let rho = sq_over_one_plus_sq(r);
    let inv = inv_one_plus_sq(r);
    let mut s = 0.0;
    let mut j = 0i32;
    let mut u = r;
    while u > 1e-3 {
        // u (r² - u²) / ((1 + u²)(1 + r²)) = u (ρ - u² / (1 + r²)) / (1 + u²)
        let iu = inv_one_plus_sq(u);
        s += u * iu * rho - u * (1.0 - iu) * inv;
        j += 1;
        u = r * powf(b, -(j as f64));
    }
    let u3 = u * u * u;
    s += rho * u / (1.0 - 1.0 / b) - u3 / (1.0 - powf(b, -3.0));
    let err = u3 * u * u / (1.0 - powf(b, -5.0)) + 1e-16 * (s + 1.0) * (j as f64 + 2.0);
    (s, err)
}

/// Exact triplet of `Φ_b(ρ)` for atomic and lattice measures.
pub fn phi_forward_triplet(rho: &LevyTriplet, cfg: &SpanConfig, tol: f64) -> Result<LevyTriplet> {
    cfg.check()?;
    require_log_moment(rho, 1)?;
    let b = cfg.b;
    let d = rho.dim();
    let f = SpanForm::from_measure(&rho.levy, b)?;
    if !f.incompatible.is_empty() {
        return Err(Error::Unsupported(String::from("lattice base incompatible with the span")));
    }
    let mut out = f.clone();
    for s in &mut out.skeletons {
        s.mass = forward_jsum(&s.mass)?;
    }
    let k = 1.0 / (1.0 - 1.0 / (b * b));
    let gauss = rho.gauss.iter().map(|v| v * k).collect();
    let env = Envelope::bounded(b / (b - 1.0), 2.0, 2.0 * b / (b - 1.0));
    let (corr, _) = sum_measure_vec(&rho.levy, d, &env, tol, |r| forward_drift_point(b, r))?;
    let drift = (0..d).map(|i| rho.drift[i] / (1.0 - 1.0 / b) + corr[i]).collect();
    Ok(LevyTriplet { gauss, levy: out.to_measure(), drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsum_matches_direct() {
        let m = MassLaw::geometric(2.0, 0.5, Some(-2), None)
            .plus(&MassLaw::geometric(1.0, 3.0, None, Some(1)))
            .plus(&MassLaw::points(&[(4, 0.7), (6, 0.2)]));
        let f = forward_jsum(&m).unwrap();
        for k in -30..20 {
            let direct: f64 = (0..400).map(|j| m.value(k + j)).sum();
            assert!((f.value(k) - direct).abs() < 1e-12 * direct.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn drift_point_matches_direct() {
        for b in [1.1, 2.0, 10.0] {
            for r in [1e-4, 0.3, 1.0, 7.0, 1e6] {
                let (s, e) = forward_drift_point(b, r);
                let direct: f64 = (0..3000)
                    .map(|j| {
                        let u = r * b.powi(-j);
                        u * (r * r - u * u) / ((1.0 + u * u) * (1.0 + r * r))
                    })
                    .sum();
                assert!((s - direct).abs() <= e + 1e-14 * direct.abs(), "b={b} r={r}");
            }
        }
    }
}
