//! The inverse map: `ρ` with `μ = μ(b^{-1} ·) * ρ`, and its validity.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::span::SpanForm;
use super::SpanConfig;
use crate::error::{Error, Result};
use crate::fmath::powf;
use crate::idist::engine::{sum_measure_vec, Envelope};
use crate::idist::LevyTriplet;

/// Where the signed factor `ν - ν(b·)` is negative.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NegativeMass {
    pub direction: Vec<f64>,
    pub radius: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Validity {
    /// `ρ` is a valid triplet.
    Valid,
    /// `ν - ν(b·)` has negative mass, or is not expressible at this span.
    Invalid { detail: String, witness: Option<NegativeMass> },
    /// Nonnegativity could not be decided exactly.
    Undecided { reason: String },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InverseResult {
    pub b: f64,
    pub validity: Validity,
    /// The factor `(A(1-b^{-2}), ν - ν(b·), γ_ρ)`; its Lévy part may be
    /// signed when `validity` is not `Valid`.
    pub rho: Option<LevyTriplet>,
    /// `ρ` with the Lévy part replaced by its positive part.
    pub rho_positive: Option<LevyTriplet>,
}

/// `(r/b) (1/(1+r^2/b^2) - 1/(1+r^2))`.
pub(crate) fn inverse_drift_point(b: f64, r: f64) -> (f64, f64) {
    let r2 = r * r;
    let v = (r / b) * r2 * (1.0 - 1.0 / (b * b)) / ((1.0 + r2 / (b * b)) * (1.0 + r2));
    (v, 1e-16 * v)
}

/// `(1 - 1/b) γ - ∫ (x/b)(1/(1+|x/b|^2) - 1/(1+|x|^2)) ν(dx)`.
pub(crate) fn inverse_drift(mu: &LevyTriplet, b: f64, tol: f64) -> Result<Vec<f64>> {
    let d = mu.dim();
    let env = Envelope::bounded((1.0 - 1.0 / (b * b)) / b, 2.0, 0.5);
    let (corr, _) = sum_measure_vec(&mu.levy, d, &env, tol, |r| inverse_drift_point(b, r))?;
    Ok((0..d).map(|i| (1.0 - 1.0 / b) * mu.drift[i] - corr[i]).collect())
}

/// Compute `ρ` and decide whether it is a valid triplet.
pub fn phi_inverse(mu: &LevyTriplet, cfg: &SpanConfig) -> Result<InverseResult> {
    cfg.check()?;
    mu.ensure_valid()?;
    let b = cfg.b;
    let gauss: Vec<f64> = mu.gauss.iter().map(|v| v * (1.0 - 1.0 / (b * b))).collect();
    if mu.levy.has_radial() {
        return Ok(InverseResult {
            b,
            validity: Validity::Undecided { reason: String::from("radial densities are not decided exactly") },
            rho: None,
            rho_positive: None,
        });
    }
    let drift = inverse_drift(mu, b, 1e-13)?;
    let form = SpanForm::from_measure(&mu.levy, b)?;
    if !form.incompatible.is_empty() {
        return Ok(InverseResult {
            b,
            validity: Validity::Invalid {
                detail: format!("lattice components {:?} are not invariant under scaling by b", form.incompatible),
                witness: None,
            },
            rho: None,
            rho_positive: None,
        });
    }
    let mut diff = form.clone();
    let mut positive = form.clone();
    let mut validity = Validity::Valid;
    for (s, p) in diff.skeletons.iter_mut().zip(positive.skeletons.iter_mut()) {
        // ν(b·) puts the mass of index k + 1 on index k.
        s.mass = s.mass.plus(&s.mass.shifted(1).scaled(-1.0)).canonical();
        match s.mass.first_negative() {
            Ok(None) => p.mass = s.mass.clone(),
            Ok(Some(k)) => {
                if validity.is_valid() {
                    validity = Validity::Invalid {
                        detail: String::from("ν - ν(b·) has negative mass"),
                        witness: Some(NegativeMass {
                            direction: s.direction.clone(),
                            radius: s.anchor * powf(b, k as f64),
                            mass: s.mass.value(k),
                        }),
                    };
                }
                p.mass = s.mass.positive_part().unwrap_or_default();
            }
            Err(Error::Unsupported(reason)) => {
                if validity.is_valid() {
                    validity = Validity::Undecided { reason };
                }
                p.mass = s.mass.clone();
            }
            Err(e) => return Err(e),
        }
    }
    let rho = LevyTriplet { gauss: gauss.clone(), levy: diff.to_measure(), drift: drift.clone() };
    let rho_positive = if validity.is_valid() {
        rho.clone()
    } else {
        LevyTriplet { gauss, levy: positive.to_measure(), drift }
    };
    Ok(InverseResult { b, validity, rho: Some(rho), rho_positive: Some(rho_positive) })
}
