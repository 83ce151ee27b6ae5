//! Lévy–Khintchine triplets and their validation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::mass::{lower_tail_bound, upper_tail_bound};
use super::measure::{Atom, LevyComponent, LevyMeasure, ScaleLattice};
use crate::error::{Error, Result};
use crate::fmath::{abs, ceil, ln};
use crate::linalg::{asymmetry, norm, sym_eigen};

/// Tolerance on the smallest eigenvalue of `A` (relative to its scale).
pub const PSD_TOL: f64 = 1e-12;

/// An infinitely divisible law on `R^d` as a Lévy–Khintchine triplet.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LevyTriplet {
    /// Gaussian covariance, row-major `d x d`.
    pub gauss: Vec<f64>,
    pub levy: LevyMeasure,
    pub drift: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Violation {
    Dimension { detail: String },
    NonFinite { detail: String },
    GaussNotSymmetric { asymmetry: f64 },
    GaussNotPsd { min_eigenvalue: f64 },
    AtomAtOrigin { component: usize, index: usize },
    NegativeMass { component: usize, index: i64 },
    BadDirection { component: usize },
    BadParameter { component: usize, detail: String },
    /// `∫ min(1, |x|^2) ν(dx) = ∞`.
    Divergent { component: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl LevyTriplet {
    pub fn new(gauss: Vec<f64>, levy: LevyMeasure, drift: Vec<f64>) -> Self {
        LevyTriplet { gauss, levy, drift }
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    /// Centered Gaussian with covariance `a` (row-major).
    pub fn gaussian(a: Vec<f64>) -> Self {
        let d = crate::fmath::round(crate::fmath::sqrt(a.len() as f64)) as usize;
        LevyTriplet { gauss: a, levy: LevyMeasure::zero(), drift: vec![0.0; d] }
    }

    /// Point mass at `x` (pure drift).
    pub fn point_mass(x: Vec<f64>) -> Self {
        let d = x.len();
        LevyTriplet { gauss: vec![0.0; d * d], levy: LevyMeasure::zero(), drift: x }
    }

    /// Pure-jump law with Lévy measure `levy` and drift `drift`.
    pub fn pure_jump(levy: LevyMeasure, drift: Vec<f64>) -> Self {
        let d = drift.len();
        LevyTriplet { gauss: vec![0.0; d * d], levy, drift }
    }

    /// Compound Poisson law with jump measure `atoms`, without extra drift:
    /// the centering drift `∫ x/(1+|x|^2) ν(dx)` is included.
    pub fn compound_poisson(atoms: Vec<Atom>) -> Self {
        let d = atoms.first().map_or(1, |a| a.x.len());
        let mut drift = vec![0.0; d];
        for a in &atoms {
            let r2: f64 = a.x.iter().map(|v| v * v).sum();
            for i in 0..d {
                drift[i] += a.w * a.x[i] / (1.0 + r2);
            }
        }
        LevyTriplet { gauss: vec![0.0; d * d], levy: LevyMeasure::atoms(atoms), drift }
    }

    /// `A = 0` and `ν = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.gauss.iter().all(|v| *v == 0.0) && self.levy.is_zero()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let d = self.dim();
        if d == 0 {
            v.push(Violation::Dimension { detail: String::from("dimension must be >= 1") });
            return ValidationReport { violations: v };
        }
        if self.gauss.len() != d * d {
            v.push(Violation::Dimension { detail: format!("gauss has {} entries, expected {}", self.gauss.len(), d * d) });
            return ValidationReport { violations: v };
        }
        if self.gauss.iter().chain(&self.drift).any(|x| !x.is_finite()) {
            v.push(Violation::NonFinite { detail: String::from("gauss or drift") });
            return ValidationReport { violations: v };
        }
        let scale = self.gauss.iter().fold(0.0f64, |m, x| m.max(abs(*x)));
        let asym = asymmetry(&self.gauss, d);
        if asym > 1e-12 * scale.max(1e-300) && asym > 0.0 {
            v.push(Violation::GaussNotSymmetric { asymmetry: asym });
        } else if scale > 0.0 {
            let (w, _) = sym_eigen(&self.gauss, d);
            let min = w.iter().copied().fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL * scale {
                v.push(Violation::GaussNotPsd { min_eigenvalue: min });
            }
        }
        for (ci, c) in self.levy.components.iter().enumerate() {
            check_component(ci, c, d, &mut v);
        }
        ValidationReport { violations: v }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        match r.violations.first() {
            None => Ok(()),
            Some(x) => Err(Error::InvalidTriplet(format!("{x:?}"))),
        }
    }
}

fn unit(dir: &[f64]) -> bool {
    dir.iter().all(|x| x.is_finite()) && abs(norm(dir) - 1.0) <= 1e-10
}

fn check_component(ci: usize, c: &LevyComponent, d: usize, v: &mut Vec<Violation>) {
    match c {
        LevyComponent::Atoms { atoms } => {
            for (i, a) in atoms.iter().enumerate() {
                if a.x.len() != d {
                    v.push(Violation::Dimension { detail: format!("component {ci} atom {i}") });
                    continue;
                }
                if !a.w.is_finite() || a.x.iter().any(|x| !x.is_finite()) {
                    v.push(Violation::NonFinite { detail: format!("component {ci} atom {i}") });
                    continue;
                }
                if a.w < 0.0 {
                    v.push(Violation::NegativeMass { component: ci, index: i as i64 });
                }
                if a.w != 0.0 && a.x.iter().all(|x| *x == 0.0) {
                    v.push(Violation::AtomAtOrigin { component: ci, index: i });
                }
            }
        }
        LevyComponent::Lattice(l) => {
            if l.direction.len() != d {
                v.push(Violation::Dimension { detail: format!("component {ci} direction") });
                return;
            }
            if !unit(&l.direction) {
                v.push(Violation::BadDirection { component: ci });
            }
            if !(l.base.is_finite() && l.base > 1.0 && l.anchor.is_finite() && l.anchor > 0.0) {
                v.push(Violation::BadParameter { component: ci, detail: String::from("lattice needs base > 1 and anchor > 0") });
                return;
            }
            if let Err(e) = l.mass.check() {
                v.push(Violation::BadParameter { component: ci, detail: e });
                return;
            }
            match l.mass.first_negative() {
                Ok(Some(k)) => v.push(Violation::NegativeMass { component: ci, index: k }),
                Ok(None) => {}
                Err(e) => v.push(Violation::BadParameter { component: ci, detail: format!("{e}") }),
            }
            if let Some(detail) = lattice_divergence(l) {
                v.push(Violation::Divergent { component: ci, detail });
            }
        }
        LevyComponent::Radial(r) => {
            if r.direction.len() != d {
                v.push(Violation::Dimension { detail: format!("component {ci} direction") });
                return;
            }
            if !unit(&r.direction) {
                v.push(Violation::BadDirection { component: ci });
            }
            if !(r.weight.is_finite() && r.weight >= 0.0 && r.scale.is_finite() && r.scale > 0.0) {
                v.push(Violation::BadParameter { component: ci, detail: String::from("radial weight >= 0 and scale > 0 required") });
            }
            if let Err(e) = r.profile.check() {
                v.push(Violation::BadParameter { component: ci, detail: e });
            }
        }
    }
}

/// Index of the first lattice point with radius `>= 1`.
pub(crate) fn lattice_pivot(l: &ScaleLattice) -> i64 {
    let ln_a = ln(l.anchor);
    let lb = ln(l.base);
    let mut pivot = ceil(-ln_a / lb) as i64;
    while ln_a + (pivot - 1) as f64 * lb >= 0.0 {
        pivot -= 1;
    }
    while ln_a + pivot as f64 * lb < 0.0 {
        pivot += 1;
    }
    pivot
}

/// Describes why `∫ min(1,|x|^2) ν` diverges for a lattice, if it does.
fn lattice_divergence(l: &ScaleLattice) -> Option<String> {
    let m = l.mass.canonical();
    let pivot = lattice_pivot(l);
    let ln_a = ln(l.anchor);
    let lb = ln(l.base);
    for p in &m.pieces {
        for t in &p.terms {
            if p.hi.is_none_or(|h| h >= pivot) {
                let start = p.lo.map_or(pivot, |lo| lo.max(pivot));
                if upper_tail_bound(t, start, p.hi, ln_a, lb, 0.0, &[1.0]).is_infinite() {
                    return Some(String::from("infinite mass outside the unit ball"));
                }
            }
            if p.lo.is_none_or(|lo| lo < pivot) {
                let from = p.hi.map_or(pivot - 1, |h| h.min(pivot - 1));
                if lower_tail_bound(t, from, p.lo, ln_a, lb, 2.0).is_infinite() {
                    return Some(String::from("∫ |x|^2 ν(dx) diverges near the origin"));
                }
            }
        }
    }
    None
}
