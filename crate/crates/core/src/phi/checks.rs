//! Numerical diagnostics: factorization residuals and injectivity probes.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::forward::phi_forward_cumulant;
use super::SpanConfig;
use crate::error::Result;
use crate::idist::{cumulant_tol, LevyTriplet};
use crate::linalg::scale;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ResidualPoint {
    pub z: Vec<f64>,
    pub residual: f64,
    /// Bound on the numerical error in `residual`.
    pub err: f64,
}

/// `|C_μ(z) - C_μ(z/b) - C_ρ(z)|` over a grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FactorizationReport {
    pub b: f64,
    pub tol: f64,
    pub points: Vec<ResidualPoint>,
    pub max_residual: f64,
    pub passed: bool,
}

fn report(b: f64, tol: f64, points: Vec<ResidualPoint>) -> FactorizationReport {
    let max_residual = points.iter().fold(0.0f64, |m, p| m.max(p.residual));
    FactorizationReport { b, tol, passed: max_residual <= tol, points, max_residual }
}

/// Residual of `μ = μ(b^{-1}·) * ρ` with `μ` given by its triplet.
pub fn factorization_check(
    mu: &LevyTriplet,
    rho: &LevyTriplet,
    cfg: &SpanConfig,
    grid: &[Vec<f64>],
    tol: f64,
) -> Result<FactorizationReport> {
    cfg.check()?;
    let et = 0.1 * tol;
    let mut pts = Vec::with_capacity(grid.len());
    for z in grid {
        let a = cumulant_tol(mu, z, et)?;
        let b = cumulant_tol(mu, &scale(z, 1.0 / cfg.b), et)?;
        let c = cumulant_tol(rho, z, et)?;
        pts.push(ResidualPoint { z: z.clone(), residual: (a.value - b.value - c.value).norm(), err: a.err + b.err + c.err });
    }
    Ok(report(cfg.b, tol, pts))
}

/// Residual of `Φ_b(ρ) = Φ_b(ρ)(b^{-1}·) * ρ` with `Φ_b(ρ)` evaluated by its series.
pub fn forward_factorization_check(rho: &LevyTriplet, cfg: &SpanConfig, grid: &[Vec<f64>], tol: f64) -> Result<FactorizationReport> {
    cfg.check()?;
    let et = 0.1 * tol;
    let mut pts = Vec::with_capacity(grid.len());
    for z in grid {
        let a = phi_forward_cumulant(rho, cfg, z, et)?;
        let b = phi_forward_cumulant(rho, cfg, &scale(z, 1.0 / cfg.b), et)?;
        let c = cumulant_tol(rho, z, et)?;
        pts.push(ResidualPoint { z: z.clone(), residual: (a.value - b.value - c.value).norm(), err: a.err + b.err + c.err });
    }
    Ok(report(cfg.b, tol, pts))
}

/// Distances between two inputs and between their images under `Φ_b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InjectivityReport {
    pub max_input_gap: f64,
    pub max_image_gap: f64,
    pub argmax_image: Vec<f64>,
    /// Largest numerical error bound among the image evaluations.
    pub err: f64,
}

impl InjectivityReport {
    /// Inputs differ on the grid and so do the images.
    pub fn images_separate(&self) -> bool {
        self.max_image_gap > self.err
    }
}

/// Compare `ρ1`, `ρ2` and `Φ_b(ρ1)`, `Φ_b(ρ2)` on a grid of cumulants.
pub fn injectivity_probe(
    rho1: &LevyTriplet,
    rho2: &LevyTriplet,
    cfg: &SpanConfig,
    grid: &[Vec<f64>],
    tol: f64,
) -> Result<InjectivityReport> {
    let mut out = InjectivityReport { max_input_gap: 0.0, max_image_gap: 0.0, argmax_image: Vec::new(), err: 0.0 };
    for z in grid {
        let a = cumulant_tol(rho1, z, tol)?;
        let b = cumulant_tol(rho2, z, tol)?;
        out.max_input_gap = out.max_input_gap.max((a.value - b.value).norm());
        let fa = phi_forward_cumulant(rho1, cfg, z, tol)?;
        let fb = phi_forward_cumulant(rho2, cfg, z, tol)?;
        let gap = (fa.value - fb.value).norm();
        out.err = out.err.max(fa.err + fb.err);
        if gap > out.max_image_gap || out.argmax_image.is_empty() {
            out.max_image_gap = gap;
            out.argmax_image = z.clone();
        }
    }
    Ok(out)
}
