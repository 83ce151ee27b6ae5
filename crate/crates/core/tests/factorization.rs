mod common;

use common::*;
use ssd_core::grid::axis_grid;
use ssd_core::idist::{cumulant_tol, Atom, LevyComponent, LevyTriplet, MassLaw};
use ssd_core::phi::{
    factorization_check, forward_factorization_check, injectivity_probe, is_semi_selfdecomposable, phi_forward_cumulant,
    phi_forward_triplet, phi_inverse, SpanConfig, Validity, Verdict,
};
use ssd_core::Error;

#[test]
fn forward_series_factorizes_on_corpus() {
    for d in [1, 2] {
        let grid = axis_grid(d, -5.0, 5.0, 101);
        for b in [1.1, 2.0, 10.0] {
            let cfg = SpanConfig::new(b).unwrap();
            for (name, rho) in corpus(d, 2.0) {
                let r = forward_factorization_check(&rho, &cfg, &grid, 1e-8).unwrap();
                assert!(r.passed, "{name} d={d} b={b}: {}", r.max_residual);
            }
        }
    }
}

#[test]
fn exact_forward_triplet_factorizes() {
    for d in [1, 2] {
        let grid = axis_grid(d, -5.0, 5.0, 41);
        for b in [1.1, 2.0, 10.0] {
            let cfg = SpanConfig::new(b).unwrap();
            for (name, rho) in corpus(d, b) {
                let mu = phi_forward_triplet(&rho, &cfg, 1e-13).unwrap();
                let r = factorization_check(&mu, &rho, &cfg, &grid, 1e-8).unwrap();
                assert!(r.passed, "{name} d={d} b={b}: {}", r.max_residual);
            }
        }
    }
}

#[test]
fn gaussian_forward_variance_is_geometric_sum() {
    for b in [1.1, 2.0, 10.0] {
        let mu = phi_forward_triplet(&LevyTriplet::gaussian(vec![1.0]), &SpanConfig::new(b).unwrap(), 1e-13).unwrap();
        let direct: f64 = (0..4000).map(|j| b.powi(-2 * j)).sum();
        assert!((mu.gauss[0] - direct).abs() <= 4.0 * f64::EPSILON * direct, "b={b}");
    }
    let mu = phi_forward_triplet(&LevyTriplet::gaussian(vec![1.0]), &SpanConfig::new(2.0).unwrap(), 1e-13).unwrap();
    assert!((mu.gauss[0] - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn roundtrip_recovers_input() {
    for d in [1, 2] {
        let grid = axis_grid(d, -3.0, 3.0, 13);
        for b in [1.1, 2.0, 10.0] {
            let cfg = SpanConfig::new(b).unwrap();
            for (name, rho) in corpus(d, b) {
                let mu = phi_forward_triplet(&rho, &cfg, 1e-13).unwrap();
                let inv = phi_inverse(&mu, &cfg).unwrap();
                assert_eq!(inv.validity, Validity::Valid, "{name} d={d} b={b}");
                let back = inv.rho.unwrap();
                for (x, y) in back.gauss.iter().zip(&rho.gauss) {
                    assert!((x - y).abs() <= 1e-10, "{name} gauss");
                }
                for (x, y) in back.drift.iter().zip(&rho.drift) {
                    assert!((x - y).abs() <= 1e-10, "{name} d={d} b={b} drift {x} vs {y}");
                }
                // Lévy parts may be stored differently; compare their cumulants.
                let lv = |t: &LevyTriplet| LevyTriplet::pure_jump(t.levy.clone(), vec![0.0; d]);
                for z in &grid {
                    let a = cumulant_tol(&lv(&back), z, 1e-13).unwrap().value;
                    let c = cumulant_tol(&lv(&rho), z, 1e-13).unwrap().value;
                    assert!((a - c).norm() <= 1e-10, "{name} d={d} b={b} z={z:?}");
                }
            }
        }
    }
}

#[test]
fn roundtrip_atoms_exactly() {
    let rho = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }]);
    let cfg = SpanConfig::new(2.0).unwrap();
    let mu = phi_forward_triplet(&rho, &cfg, 1e-13).unwrap();
    let back = phi_inverse(&mu, &cfg).unwrap().rho.unwrap();
    let atoms = back.levy.finite_atoms().unwrap();
    let live: Vec<&Atom> = atoms.iter().filter(|a| a.w != 0.0).collect();
    assert_eq!(live.len(), 1);
    assert!((live[0].x[0] - 1.0).abs() < 1e-15 && (live[0].w - 1.0).abs() < 1e-15);
}

#[test]
fn inverse_of_gaussian() {
    let cfg = SpanConfig::new(2.0).unwrap();
    let inv = phi_inverse(&LevyTriplet::gaussian(vec![1.0]), &cfg).unwrap();
    assert!(inv.validity.is_valid());
    assert!((inv.rho.unwrap().gauss[0] - 0.75).abs() < 1e-15);
}

#[test]
fn single_poisson_atom_is_not_a_member() {
    // ν - ν(2·) = δ_1 - δ_{1/2} has negative mass at 1/2.
    let mu = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }]);
    let cfg = SpanConfig::new(2.0).unwrap();
    let inv = phi_inverse(&mu, &cfg).unwrap();
    match &inv.validity {
        Validity::Invalid { witness: Some(w), .. } => {
            assert!((w.radius - 0.5).abs() < 1e-14);
            assert!((w.mass + 1.0).abs() < 1e-14);
        }
        v => panic!("unexpected {v:?}"),
    }
    let cert = is_semi_selfdecomposable(&mu, &cfg).unwrap();
    assert_eq!(cert.verdict, Verdict::NonMember);
    assert!(cert.residual.unwrap() > 1e-3);
}

#[test]
fn infinite_log_moment_is_rejected() {
    // m(k) = 1/k^2 on radii 2^k: finite mass, but Σ k m(k) diverges.
    let nu = lattice_measure(vec![1.0], 2.0, 1.0, MassLaw::power(1.0, 2.0, 1));
    let rho = LevyTriplet::pure_jump(nu, vec![0.0]);
    let cfg = SpanConfig::new(2.0).unwrap();
    assert!(matches!(phi_forward_cumulant(&rho, &cfg, &[1.0], 1e-10), Err(Error::DomainViolation(_))));
    assert!(matches!(phi_forward_triplet(&rho, &cfg, 1e-10), Err(Error::DomainViolation(_))));
}

#[test]
fn span_must_exceed_one() {
    assert!(SpanConfig::new(1.0).is_err());
    assert!(SpanConfig::new(f64::NAN).is_err());
}

#[test]
fn incompatible_lattice_base_is_flagged() {
    let rho = lattice(1, 3.0);
    let inv = phi_inverse(&rho, &SpanConfig::new(2.0).unwrap()).unwrap();
    assert!(matches!(inv.validity, Validity::Invalid { .. }));
}

#[test]
fn distinct_inputs_have_distinct_images() {
    let cfg = SpanConfig::new(2.0).unwrap();
    let grid = axis_grid(1, -5.0, 5.0, 21);
    let r = injectivity_probe(&atoms(1), &gaussian(1), &cfg, &grid, 1e-10).unwrap();
    assert!(r.max_input_gap > 0.1);
    assert!(r.images_separate());
}

#[test]
fn lattice_mass_keeps_structure() {
    let rho = lattice(1, 2.0);
    let mu = phi_forward_triplet(&rho, &SpanConfig::new(2.0).unwrap(), 1e-13).unwrap();
    assert!(mu.levy.components.iter().all(|c| matches!(c, LevyComponent::Lattice(_) | LevyComponent::Atoms { .. })));
}
