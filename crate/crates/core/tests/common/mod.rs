#![allow(dead_code)]

use ssd_core::idist::{Atom, LevyComponent, LevyMeasure, LevyTriplet, MassLaw, ScaleLattice};

pub fn gaussian(d: usize) -> LevyTriplet {
    if d == 1 {
        LevyTriplet::gaussian(vec![1.3])
    } else {
        LevyTriplet::gaussian(vec![1.0, 0.3, 0.3, 0.5])
    }
}

pub fn atoms(d: usize) -> LevyTriplet {
    if d == 1 {
        LevyTriplet::compound_poisson(vec![
            Atom { x: vec![0.7], w: 1.0 },
            Atom { x: vec![-2.5], w: 0.4 },
            Atom { x: vec![3.0], w: 0.2 },
        ])
    } else {
        LevyTriplet::compound_poisson(vec![
            Atom { x: vec![0.7, -0.2], w: 1.0 },
            Atom { x: vec![-2.5, 1.0], w: 0.4 },
            Atom { x: vec![0.0, 3.0], w: 0.2 },
        ])
    }
}

pub fn lattice_measure(direction: Vec<f64>, base: f64, anchor: f64, mass: MassLaw) -> LevyMeasure {
    LevyMeasure { components: vec![LevyComponent::Lattice(ScaleLattice { direction, base, anchor, mass })] }
}

/// Two-sided geometric lattice with infinite activity and finite log-moment.
pub fn lattice(d: usize, base: f64) -> LevyTriplet {
    let dir = if d == 1 { vec![1.0] } else { vec![0.6, 0.8] };
    let mass = MassLaw::geometric(1.0, 1.0 / base, Some(0), None).plus(&MassLaw::geometric(0.5, base, None, Some(-1)));
    let mut drift = vec![0.0; d];
    drift[0] = 0.25;
    LevyTriplet::pure_jump(lattice_measure(dir, base, 1.3, mass), drift)
}

pub fn corpus(d: usize, base: f64) -> Vec<(&'static str, LevyTriplet)> {
    vec![("gaussian", gaussian(d)), ("atoms", atoms(d)), ("lattice", lattice(d, base))]
}
