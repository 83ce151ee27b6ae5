//! Span-`b` canonical form of atomic and lattice measures.
//!
//! Every point mass and every lattice whose base `β` satisfies `β^n = b`
//! is rewritten as a sum of base-`b` skeletons `anchor * b^k * ξ` with
//! `anchor ∈ [1, b)`. On a skeleton the scaling `x ↦ x / b` is the index
//! shift `k ↦ k - 1`, which makes `ν - ν(b·)` and `Σ_j ν(b^j ·)` exact.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath::{abs, ceil, floor, ln, powf, round};
use crate::idist::{Atom, LevyComponent, LevyMeasure, MassLaw, MassPiece, MassTerm, ScaleLattice};
use crate::linalg::dot;

const ANCHOR_REL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Skeleton {
    pub direction: Vec<f64>,
    pub anchor: f64,
    pub mass: MassLaw,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SpanForm {
    pub b: f64,
    pub skeletons: Vec<Skeleton>,
    /// Components whose lattice base is not a root of `b`.
    pub incompatible: Vec<usize>,
}

fn normalize_anchor(anchor: f64, b: f64) -> (f64, i64) {
    let j = floor(ln(anchor) / ln(b)) as i64;
    let mut a = anchor / powf(b, j as f64);
    let mut j = j;
    if a >= b * (1.0 - ANCHOR_REL) {
        a /= b;
        j += 1;
    } else if a < 1.0 {
        if a < 1.0 - ANCHOR_REL {
            a *= b;
            j -= 1;
        } else {
            a = 1.0;
        }
    }
    (a, j)
}

impl SpanForm {
    fn add(&mut self, direction: &[f64], anchor: f64, mass: MassLaw) {
        // anchor * b^k with anchor = a' b^j: index k' = k + j
        let (a, j) = normalize_anchor(anchor, self.b);
        let mass = mass.shifted(-j);
        if let Some(s) = self
            .skeletons
            .iter_mut()
            .find(|s| dot(&s.direction, direction) > 1.0 - 1e-13 && abs(s.anchor - a) <= ANCHOR_REL * a)
        {
            s.mass = s.mass.plus(&mass);
        } else {
            self.skeletons.push(Skeleton { direction: direction.to_vec(), anchor: a, mass });
        }
    }

    pub fn from_measure(nu: &LevyMeasure, b: f64) -> Result<SpanForm> {
        let mut f = SpanForm { b, skeletons: Vec::new(), incompatible: Vec::new() };
        for (ci, c) in nu.components.iter().enumerate() {
            match c {
                LevyComponent::Atoms { atoms } => {
                    for a in atoms {
                        if a.w == 0.0 {
                            continue;
                        }
                        let r = crate::linalg::norm(&a.x);
                        let xi: Vec<f64> = a.x.iter().map(|v| v / r).collect();
                        f.add(&xi, r, MassLaw::points(&[(0, a.w)]));
                    }
                }
                LevyComponent::Lattice(l) => {
                    let beta = l.base;
                    if abs(beta - b) <= 1e-12 * b {
                        f.add(&l.direction, l.anchor, l.mass.clone());
                        continue;
                    }
                    let n = round(ln(b) / ln(beta));
                    if n >= 2.0 && abs(powf(beta, n) - b) <= 1e-12 * b {
                        let n = n as i64;
                        for i in 0..n {
                            let mass = stride_mass(&l.mass, n, i);
                            if !mass.is_empty() {
                                f.add(&l.direction, l.anchor * powf(beta, i as f64), mass);
                            }
                        }
                    } else if let Some(atoms) = finite_lattice_atoms(l) {
                        for a in atoms {
                            let r = crate::linalg::norm(&a.x);
                            f.add(&l.direction, r, MassLaw::points(&[(0, a.w)]));
                        }
                    } else {
                        f.incompatible.push(ci);
                    }
                }
                LevyComponent::Radial(_) => {
                    return Err(Error::Unsupported(alloc::string::String::from("span canonical form of a radial density")));
                }
            }
        }
        for s in &mut f.skeletons {
            s.mass = s.mass.canonical();
        }
        Ok(f)
    }

    /// Back to Lévy measure components: finite skeletons become atoms,
    /// the others base-`b` lattices.
    pub fn to_measure(&self) -> LevyMeasure {
        let mut atoms: Vec<Atom> = Vec::new();
        let mut comps = Vec::new();
        for s in &self.skeletons {
            let m = s.mass.canonical();
            if m.is_empty() {
                continue;
            }
            let lat = ScaleLattice { direction: s.direction.clone(), base: self.b, anchor: s.anchor, mass: m };
            match finite_lattice_atoms(&lat) {
                Some(a) if a.len() <= 64 => atoms.extend(a.into_iter().filter(|a| a.w != 0.0)),
                _ => comps.push(LevyComponent::Lattice(lat)),
            }
        }
        if !atoms.is_empty() {
            comps.insert(0, LevyComponent::Atoms { atoms });
        }
        LevyMeasure { components: comps }
    }
}

fn finite_lattice_atoms(l: &ScaleLattice) -> Option<Vec<Atom>> {
    LevyMeasure { components: alloc::vec![LevyComponent::Lattice(l.clone())] }.finite_atoms()
}

/// `k' ↦ m(i + n k')`.
fn stride_mass(m: &MassLaw, n: i64, i: i64) -> MassLaw {
    let nf = n as f64;
    let mut pieces = Vec::new();
    for p in &m.pieces {
        let lo = p.lo.map(|l| ceil((l - i) as f64 / nf) as i64);
        let hi = p.hi.map(|h| floor((h - i) as f64 / nf) as i64);
        if let (Some(a), Some(b)) = (lo, hi) {
            if a > b {
                continue;
            }
        }
        let terms = p
            .terms
            .iter()
            .map(|t| MassTerm {
                coef: t.coef * powf(t.ratio, i as f64) * powf(nf, -t.power),
                ratio: powf(t.ratio, nf),
                power: t.power,
                shift: if t.power == 0.0 { 0.0 } else { (i as f64 + t.shift) / nf },
            })
            .collect();
        pieces.push(MassPiece { lo, hi, terms });
    }
    MassLaw { pieces }
}
