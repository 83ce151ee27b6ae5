//! Lévy measures: finite atoms, geometric scale lattices and radial densities.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::mass::MassLaw;
use super::radial::RadialDensity;
use crate::fmath::{exp, floor, ln};
use crate::linalg::norm;

/// A point mass `weight * δ_x`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Atom {
    pub x: Vec<f64>,
    pub w: f64,
}

/// Masses `m(k)` on the points `anchor * base^k * direction`, `k ∈ Z`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ScaleLattice {
    /// Unit vector.
    pub direction: Vec<f64>,
    pub base: f64,
    pub anchor: f64,
    pub mass: MassLaw,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum LevyComponent {
    Atoms { atoms: Vec<Atom> },
    Lattice(ScaleLattice),
    Radial(RadialDensity),
}

/// A Lévy measure as a sum of components.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LevyMeasure {
    pub components: Vec<LevyComponent>,
}

impl ScaleLattice {
    pub fn ln_radius(&self, k: i64) -> f64 {
        ln(self.anchor) + k as f64 * ln(self.base)
    }

    /// `anchor * base^k`, correctly rounded power; these floating radii are
    /// the lattice points used by every sum over the lattice.
    pub fn radius(&self, k: i64) -> f64 {
        let r = self.anchor * crate::fmath::powf(self.base, k as f64);
        if r.is_finite() && r > 0.0 {
            r
        } else {
            exp(self.ln_radius(k))
        }
    }

    /// Same measure with the anchor moved into `[1, base)`.
    pub fn normalized(&self) -> ScaleLattice {
        let j = floor(ln(self.anchor) / ln(self.base) + 1e-12) as i64;
        let mut anchor = self.anchor / crate::fmath::powf(self.base, j as f64);
        let mut j = j;
        if anchor >= self.base * (1.0 - 1e-14) {
            anchor /= self.base;
            j += 1;
        }
        if anchor < 1.0 && anchor > 1.0 - 1e-14 {
            anchor = 1.0;
        }
        ScaleLattice {
            direction: self.direction.clone(),
            base: self.base,
            anchor,
            // x_k = anchor' * base^(k + j): new index k' = k + j
            mass: self.mass.shifted(-j).canonical(),
        }
    }
}

impl LevyMeasure {
    pub fn zero() -> Self {
        LevyMeasure { components: Vec::new() }
    }

    pub fn atoms(atoms: Vec<Atom>) -> Self {
        LevyMeasure { components: alloc::vec![LevyComponent::Atoms { atoms }] }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| match c {
            LevyComponent::Atoms { atoms } => atoms.iter().all(|a| a.w == 0.0),
            LevyComponent::Lattice(l) => l.mass.canonical().is_empty(),
            LevyComponent::Radial(r) => r.weight == 0.0 || r.is_null(),
        })
    }

    pub fn has_radial(&self) -> bool {
        self.components.iter().any(|c| matches!(c, LevyComponent::Radial(_)))
    }

    pub fn plus(&self, other: &LevyMeasure) -> LevyMeasure {
        let mut c = self.components.clone();
        c.extend(other.components.iter().cloned());
        LevyMeasure { components: c }
    }

    /// Number of point masses if the measure is finitely supported and atomic.
    pub fn finite_atoms(&self) -> Option<Vec<Atom>> {
        let mut out = Vec::new();
        for c in &self.components {
            match c {
                LevyComponent::Atoms { atoms } => out.extend(atoms.iter().cloned()),
                LevyComponent::Lattice(l) => {
                    let m = l.mass.canonical();
                    for p in &m.pieces {
                        let (Some(a), Some(b)) = (p.lo, p.hi) else { return None };
                        if b - a > 1_000_000 {
                            return None;
                        }
                        for k in a..=b {
                            let r = l.radius(k);
                            out.push(Atom { x: l.direction.iter().map(|d| d * r).collect(), w: p.value(k) });
                        }
                    }
                }
                LevyComponent::Radial(_) => return None,
            }
        }
        Some(out)
    }
}

/// Unit direction and radius of a nonzero vector.
pub(crate) fn polar(x: &[f64]) -> (Vec<f64>, f64) {
    let r = norm(x);
    (x.iter().map(|v| v / r).collect(), r)
}
