//! Polar decomposition `ν(B) = ∫ λ(dξ) ∫ 1_B(r ξ) ν_ξ(dr)` of atomic measures.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::mass::MassLaw;
use super::measure::{polar, LevyComponent, LevyMeasure};
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Radial lattice `m(k)` on radii `anchor * base^k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RadialLattice {
    pub base: f64,
    pub anchor: f64,
    pub mass: MassLaw,
}

/// The radial measure `ν_ξ` along one direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PolarDirection {
    pub direction: Vec<f64>,
    /// Spherical weight `λ({ξ})`; radial measures carry the mass, so this is 1.
    pub lambda: f64,
    /// `(r, w)` point masses.
    pub atoms: Vec<(f64, f64)>,
    pub lattices: Vec<RadialLattice>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PolarDecomposition {
    pub directions: Vec<PolarDirection>,
}

impl PolarDecomposition {
    /// Rebuild the Lévy measure.
    pub fn to_measure(&self) -> LevyMeasure {
        let mut comps = Vec::new();
        for d in &self.directions {
            if !d.atoms.is_empty() {
                let atoms = d
                    .atoms
                    .iter()
                    .map(|(r, w)| super::measure::Atom { x: d.direction.iter().map(|v| v * r).collect(), w: w * d.lambda })
                    .collect();
                comps.push(LevyComponent::Atoms { atoms });
            }
            for l in &d.lattices {
                comps.push(LevyComponent::Lattice(super::measure::ScaleLattice {
                    direction: d.direction.clone(),
                    base: l.base,
                    anchor: l.anchor,
                    mass: l.mass.scaled(d.lambda),
                }));
            }
        }
        LevyMeasure { components: comps }
    }
}

/// Group atoms and lattices by direction.
pub fn polar_atoms(nu: &LevyMeasure) -> Result<PolarDecomposition> {
    let mut dirs: Vec<PolarDirection> = Vec::new();
    let mut slot = |xi: Vec<f64>| -> usize {
        if let Some(i) = dirs.iter().position(|d| dot(&d.direction, &xi) > 1.0 - 1e-13) {
            return i;
        }
        dirs.push(PolarDirection { direction: xi, lambda: 1.0, atoms: Vec::new(), lattices: Vec::new() });
        dirs.len() - 1
    };
    let mut pending_atoms: Vec<(usize, f64, f64)> = Vec::new();
    let mut pending_lat: Vec<(usize, RadialLattice)> = Vec::new();
    for c in &nu.components {
        match c {
            LevyComponent::Atoms { atoms } => {
                for a in atoms {
                    let (xi, r) = polar(&a.x);
                    let i = slot(xi);
                    pending_atoms.push((i, r, a.w));
                }
            }
            LevyComponent::Lattice(l) => {
                let i = slot(l.direction.clone());
                pending_lat.push((i, RadialLattice { base: l.base, anchor: l.anchor, mass: l.mass.clone() }));
            }
            LevyComponent::Radial(_) => {
                return Err(Error::Unsupported(alloc::string::String::from("polar_atoms on a radial density")));
            }
        }
    }
    for (i, r, w) in pending_atoms {
        dirs[i].atoms.push((r, w));
    }
    for (i, l) in pending_lat {
        dirs[i].lattices.push(l);
    }
    Ok(PolarDecomposition { directions: dirs })
}
