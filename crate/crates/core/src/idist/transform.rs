//! Linear images and convolution powers of triplets.

use alloc::vec::Vec;

use super::engine::{sum_measure_vec, Envelope};
use super::measure::{Atom, LevyComponent, LevyMeasure, ScaleLattice};
use super::triplet::LevyTriplet;
use crate::error::{invalid_arg, Result};
use crate::fmath::abs;

/// Triplet of `a X_s` where `X` is the Lévy process with `X_1 ~ t`.
pub fn scale_and_time(t: &LevyTriplet, a: f64, s: f64, tol: f64) -> Result<LevyTriplet> {
    if !(a.is_finite() && a != 0.0 && s.is_finite() && s > 0.0) {
        return Err(invalid_arg("scale must be finite nonzero and time positive"));
    }
    let d = t.dim();
    let gauss: Vec<f64> = t.gauss.iter().map(|v| v * a * a * s).collect();
    let sign = if a > 0.0 { 1.0 } else { -1.0 };
    let aa = abs(a);
    let mut comps = Vec::new();
    for c in &t.levy.components {
        comps.push(match c {
            LevyComponent::Atoms { atoms } => LevyComponent::Atoms {
                atoms: atoms.iter().map(|at| Atom { x: at.x.iter().map(|v| v * a).collect(), w: at.w * s }).collect(),
            },
            LevyComponent::Lattice(l) => LevyComponent::Lattice(ScaleLattice {
                direction: l.direction.iter().map(|v| v * sign).collect(),
                base: l.base,
                anchor: l.anchor * aa,
                mass: l.mass.scaled(s),
            }),
            LevyComponent::Radial(r) => {
                let mut r = r.clone();
                r.direction = r.direction.iter().map(|v| v * sign).collect();
                r.scale *= aa;
                r.weight *= s;
                LevyComponent::Radial(r)
            }
        });
    }
    // γ' = s [a γ + ∫ a x (1/(1+a²|x|²) - 1/(1+|x|²)) ν(dx)]
    let k = abs(1.0 - a * a);
    let env = Envelope::bounded(aa * k, 2.0, 0.5 * k);
    let (corr, _) = sum_measure_vec(&t.levy, d, &env, tol, |r| {
        let r2 = r * r;
        (a * r * r2 * (1.0 - a * a) / ((1.0 + a * a * r2) * (1.0 + r2)), 1e-16 * r)
    })?;
    let drift = (0..d).map(|i| s * (a * t.drift[i] + corr[i])).collect();
    Ok(LevyTriplet { gauss, levy: LevyMeasure { components: comps }, drift })
}

/// Triplet of the convolution `μ1 * μ2`.
pub fn convolve(t1: &LevyTriplet, t2: &LevyTriplet) -> Result<LevyTriplet> {
    if t1.dim() != t2.dim() {
        return Err(crate::Error::Dimension { expected: t1.dim(), got: t2.dim() });
    }
    Ok(LevyTriplet {
        gauss: t1.gauss.iter().zip(&t2.gauss).map(|(x, y)| x + y).collect(),
        levy: t1.levy.plus(&t2.levy),
        drift: t1.drift.iter().zip(&t2.drift).map(|(x, y)| x + y).collect(),
    })
}
