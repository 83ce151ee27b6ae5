//! The span-`b` mapping `Φ_b(ρ) = L(∫_0^∞ b^{-[t]} dX_t)` and membership in `L_0(b)`.
//!
//! `μ` is semi-selfdecomposable with span `b` when `μ = μ(b^{-1}·) * ρ` for an
//! infinitely divisible `ρ`; then `μ = Φ_b(ρ)` and `ρ` has a finite
//! log-moment. For atomic and lattice Lévy measures the factor is computed
//! exactly and its nonnegativity decided on the span-canonical form.

mod certificate;
mod checks;
mod forward;
mod inverse;
pub(crate) mod span;

use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use certificate::{LevelVerdict, MembershipCertificate, Verdict};
pub use checks::{
    factorization_check, forward_factorization_check, injectivity_probe, FactorizationReport, InjectivityReport,
    ResidualPoint,
};
pub(crate) use forward::require_log_moment;
pub use forward::{phi_forward_cumulant, phi_forward_triplet};
pub use inverse::{phi_inverse, InverseResult, NegativeMass, Validity};

use crate::error::{invalid_arg, Error, Result};
use crate::fmath::{floor, ln, powf};
use crate::grid::axis_grid;
use crate::idist::{cumulant_tol, CumulantValue, KProfile, LevyComponent, LevyMeasure, LevyTriplet, RadialDensity, RadialProfile};
use crate::quad::integrate;

/// The span `b > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SpanConfig {
    pub b: f64,
}

impl SpanConfig {
    pub fn new(b: f64) -> Result<Self> {
        let c = SpanConfig { b };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.b.is_finite() && self.b > 1.0) {
            return Err(invalid_arg("span b must be finite and > 1"));
        }
        Ok(())
    }
}

/// Grid used for residual evidence in certificates.
pub(crate) fn evidence_grid(d: usize) -> Vec<Vec<f64>> {
    axis_grid(d, -5.0, 5.0, 21)
}

/// Decide `μ ∈ L_0(b)` and return the factor `ρ` as witness.
pub fn is_semi_selfdecomposable(mu: &LevyTriplet, cfg: &SpanConfig) -> Result<MembershipCertificate> {
    let inv = phi_inverse(mu, cfg)?;
    let verdict = Verdict::from_validity(&inv.validity);
    let residual = inv
        .rho_positive
        .as_ref()
        .and_then(|r| factorization_check(mu, r, cfg, &evidence_grid(mu.dim()), 1e-8).ok())
        .map(|r| r.max_residual);
    Ok(MembershipCertificate {
        b: cfg.b,
        level: 0,
        verdict,
        levels: alloc::vec![LevelVerdict { level: 0, verdict, validity: inv.validity.clone() }],
        factors: inv.rho.into_iter().collect(),
        residual,
        residual_level: 0,
    })
}

/// `b^{t/log b - [t/log b]}`, periodic in `t` with period `log b`.
pub fn period_function(b: f64, t: f64) -> f64 {
    let s = t / ln(b);
    powf(b, s - floor(s))
}

/// Cumulant of the image under the classic selfdecomposable map,
/// `∫_0^∞ C_μ(e^{-t} z) dt = ∫_0^1 C_μ(u z) du / u`.
pub fn classic_l_map_cumulant(mu: &LevyTriplet, z: &[f64], tol: f64) -> Result<CumulantValue> {
    require_log_moment(mu, 1)?;
    let d = mu.dim();
    if z.len() != d {
        return Err(Error::Dimension { expected: d, got: z.len() });
    }
    let mut failure: Option<Error> = None;
    let et = 1e-3 * tol;
    let mut uz = alloc::vec![0.0; d];
    let q = integrate(
        |u: f64| {
            for i in 0..d {
                uz[i] = u * z[i];
            }
            match cumulant_tol(mu, &uz, et) {
                Ok(c) => c.value / u,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        0.0,
        1.0,
        &[1e-8, 1e-6, 1e-4, 1e-2, 0.1],
        0.5 * tol,
        0.0,
        20_000,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CumulantValue { value: q.value, err: q.err + et * 40.0 })
}

/// One direction of a k-function: `λ({ξ}) = lambda` and radial profile `k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct KDirection {
    pub direction: Vec<f64>,
    pub lambda: f64,
    pub k: KProfile,
}

/// `ν(B) = ∫ λ(dξ) ∫ 1_B(rξ) k_ξ(r) dr / r` built from monotone profiles.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct KFunction {
    pub directions: Vec<KDirection>,
}

/// The measure `ν_b` with radial densities `(k_ξ(r) - k_ξ(b r)) / r`.
pub fn k_function_to_nu_b(k: &KFunction, cfg: &SpanConfig) -> Result<LevyMeasure> {
    cfg.check()?;
    let mut comps = Vec::new();
    for d in &k.directions {
        d.k.check().map_err(|e| invalid_arg(alloc::format!("k-function: {e}")))?;
        if !(d.lambda.is_finite() && d.lambda >= 0.0) {
            return Err(invalid_arg("k-function weight must be finite and nonnegative"));
        }
        comps.push(LevyComponent::Radial(RadialDensity {
            direction: d.direction.clone(),
            weight: d.lambda,
            scale: 1.0,
            profile: RadialProfile::KDifference { k: d.k.clone(), b: cfg.b },
        }));
    }
    Ok(LevyMeasure { components: comps })
}
