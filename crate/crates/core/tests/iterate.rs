mod common;

use common::*;
use num_complex::Complex64;
use ssd_core::grid::axis_grid;
use ssd_core::idist::{cumulant_tol, Atom, LevyTriplet, MassLaw};
use ssd_core::iterate::{
    binom_identity_check, f_m, f_m_int, f_m_star, is_lm_member, is_semi_stable, phi_iter_cumulant, semi_stable_triplet,
    IterConfig, SemiStableSpec,
};
use ssd_core::linalg::scale;
use ssd_core::phi::{phi_forward_cumulant, phi_forward_triplet, SpanConfig, Verdict};
use ssd_core::special::binom_u128;
use ssd_core::Error;

fn semi_stable(alpha: f64) -> LevyTriplet {
    semi_stable_triplet(&SemiStableSpec { b: 2.0, alpha, directions: vec![(vec![1.0], 1.0)], r0: 1.0 }).unwrap()
}

#[test]
fn time_change_integer_values() {
    for m in 0..=6u32 {
        for k in 0..=50u64 {
            assert_eq!(f_m_int(k, m), binom_u128(k + m as u64, m as u64 + 1));
        }
    }
    assert_eq!(f_m(0.0, 3).unwrap(), 0.0);
    assert_eq!(f_m(7.25, 0).unwrap(), 7.25);
    assert!(f_m(-1.0, 1).is_err());
}

#[test]
fn time_change_inverse() {
    for m in 0..=6 {
        for i in 0..=5000 {
            let u = i as f64 * 0.01;
            let back = f_m_star(f_m(u, m).unwrap(), m).unwrap();
            assert!((back - u).abs() <= 1e-12, "m={m} u={u} back={back}");
        }
        for k in 0..=50 {
            assert_eq!(f_m_star(f_m(k as f64, m).unwrap(), m).unwrap(), k as f64);
        }
    }
}

#[test]
fn binomial_identity() {
    for n in 0..=60 {
        for k in 0..=n {
            assert!(binom_identity_check(n, k).unwrap(), "n={n} k={k}");
        }
    }
    assert!(binom_identity_check(3, 4).is_err());
}

#[test]
fn gaussian_second_iterate() {
    let g = LevyTriplet::gaussian(vec![1.0]);
    let v = phi_iter_cumulant(&g, &IterConfig::new(2.0, 1).unwrap(), &[1.0], 1e-12).unwrap();
    assert!((v.value - Complex64::new(-8.0 / 9.0, 0.0)).norm() <= 1e-10);
}

#[test]
fn first_order_matches_forward_map() {
    let grid = axis_grid(1, -5.0, 5.0, 21);
    for (name, rho) in corpus(1, 2.0) {
        for z in &grid {
            let a = phi_iter_cumulant(&rho, &IterConfig::new(2.0, 0).unwrap(), z, 1e-10).unwrap();
            let b = phi_forward_cumulant(&rho, &SpanConfig::new(2.0).unwrap(), z, 1e-10).unwrap();
            assert!((a.value - b.value).norm() <= 2e-10, "{name} z={z:?}");
        }
    }
}

/// `Σ_{i≥0} C_{Φ_b^{n}(ρ)}(b^{-i} z)` with the inner map as a cumulant oracle.
fn compose(rho: &LevyTriplet, b: f64, depth: u32, z: &[f64], tol: f64) -> Complex64 {
    if depth == 0 {
        return cumulant_tol(rho, z, tol).unwrap().value;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut w = z.to_vec();
    loop {
        let t = compose(rho, b, depth - 1, &w, tol * 1e-2);
        sum += t;
        if t.norm() < tol * 1e-3 && w.iter().all(|v| v.abs() < 1e-6) {
            return sum;
        }
        w = scale(&w, 1.0 / b);
    }
}

#[test]
fn iterated_series_matches_composition() {
    for (name, rho) in corpus(1, 2.0) {
        for m in [1u32, 2] {
            // The depth-3 oracle is slow; use a coarser grid for m = 2.
            let grid = axis_grid(1, -5.0, 5.0, if m == 1 { 21 } else { 5 });
            for z in &grid {
                let series = phi_iter_cumulant(&rho, &IterConfig::new(2.0, m).unwrap(), z, 1e-9).unwrap();
                let direct = compose(&rho, 2.0, m + 1, z, 1e-9);
                assert!((series.value - direct).norm() <= 5e-8, "{name} m={m} z={z:?}");
            }
        }
    }
}

#[test]
fn semi_stable_is_member_at_every_level() {
    for alpha in [0.5, 1.0, 1.5] {
        let t = semi_stable(alpha);
        let cert = is_lm_member(&t, &IterConfig::new(2.0, 5).unwrap()).unwrap();
        assert_eq!(cert.verdict, Verdict::Member, "alpha={alpha}");
        assert_eq!(cert.factors.len(), 6);
        let f = 1.0 - 2f64.powf(-alpha);
        let levy = |t: &LevyTriplet| LevyTriplet::pure_jump(t.levy.clone(), vec![0.0]);
        for (j, rho) in cert.factors.iter().enumerate() {
            let k = f.powi(j as i32 + 1);
            for z in [0.3, 1.0, 4.0] {
                let a = cumulant_tol(&levy(rho), &[z], 1e-13).unwrap().value;
                let b = cumulant_tol(&levy(&t), &[z], 1e-13).unwrap().value * k;
                assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "alpha={alpha} level={j} z={z}");
            }
        }
    }
}

#[test]
fn nested_levels_of_poisson_images() {
    let cp = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }]);
    let c0 = is_lm_member(&cp, &IterConfig::new(2.0, 0).unwrap()).unwrap();
    assert_eq!(c0.verdict, Verdict::NonMember);
    let (level, witness) = c0.first_violation().unwrap();
    assert_eq!(level, 0);
    assert!((witness.unwrap().radius - 0.5).abs() < 1e-14);

    let mu = phi_forward_triplet(&cp, &SpanConfig::new(2.0).unwrap(), 1e-13).unwrap();
    let c = is_lm_member(&mu, &IterConfig::new(2.0, 1).unwrap()).unwrap();
    assert_eq!(c.levels[0].verdict, Verdict::Member);
    assert_eq!(c.levels[1].verdict, Verdict::NonMember);
    assert_eq!(c.verdict, Verdict::NonMember);
    assert_eq!(c.residual_level, 1);
    assert!(c.residual.unwrap() > 1e-3);
}

#[test]
fn gaussian_is_member_at_every_level() {
    let cert = is_lm_member(&LevyTriplet::gaussian(vec![2.0]), &IterConfig::new(2.0, 8).unwrap()).unwrap();
    assert_eq!(cert.verdict, Verdict::Member);
    assert!(cert.levels.iter().all(|l| l.verdict == Verdict::Member));
}

#[test]
fn iteration_domain_boundary() {
    // m(k) = 1/k^3 on radii 2^k: log-moment finite, log^2-moment infinite.
    // The series tail decays like 1/k, so only a loose tolerance is reachable.
    let nu = lattice_measure(vec![1.0], 2.0, 1.0, MassLaw::power(1.0, 3.0, 1));
    let rho = LevyTriplet::pure_jump(nu, vec![0.0]);
    for z in [-1.0, 1.0] {
        let v = phi_iter_cumulant(&rho, &IterConfig::new(2.0, 0).unwrap(), &[z], 1e-2).unwrap();
        assert!(v.value.re.is_finite() && v.value.im.is_finite());
        assert!(v.err.is_finite() && v.err <= 1e-2, "err {}", v.err);
    }
    assert!(matches!(
        phi_iter_cumulant(&rho, &IterConfig::new(2.0, 1).unwrap(), &[1.0], 1e-10),
        Err(Error::DomainViolation(_))
    ));
}

#[test]
fn order_above_maximum_is_rejected() {
    assert!(IterConfig::new(2.0, 9).is_err());
}

#[test]
fn semi_stable_scaling_is_recovered() {
    let grid = axis_grid(1, -3.0, 3.0, 13);
    for alpha in [0.5, 1.0, 1.5] {
        let fit = is_semi_stable(&semi_stable(alpha), 2.0, &grid, 1e-8).unwrap();
        assert!(fit.semi_stable, "alpha={alpha} residual={}", fit.max_residual);
        assert!((fit.a - 2f64.powf(alpha)).abs() <= 1e-8, "alpha={alpha} a={}", fit.a);
    }
    let g = is_semi_stable(&LevyTriplet::gaussian(vec![1.0]), 2.0, &grid, 1e-8).unwrap();
    assert!(g.semi_stable && (g.a - 4.0).abs() < 1e-10);
    let cp = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }]);
    let f = is_semi_stable(&cp, 2.0, &grid, 1e-8).unwrap();
    assert!(!f.semi_stable && f.max_residual > 1e-8);
}

#[test]
fn semi_stable_measure_scales_exactly() {
    let t = semi_stable(1.0);
    let levy = |t: &LevyTriplet| LevyTriplet::pure_jump(t.levy.clone(), vec![0.0]);
    // ν(2B) = ν(B)/2 means C_ν(z/2) relates to C_ν(z) up to a linear term; check via the atoms directly.
    let l = match &t.levy.components[0] {
        ssd_core::idist::LevyComponent::Lattice(l) => l.clone(),
        _ => unreachable!(),
    };
    for k in -20..20 {
        assert!((l.mass.value(k + 1) - 0.5 * l.mass.value(k)).abs() < 1e-15 * l.mass.value(k));
        assert!((l.radius(k) - 2f64.powi(k as i32)).abs() < 1e-12 * 2f64.powi(k as i32));
    }
    assert!(cumulant_tol(&levy(&t), &[1.0], 1e-12).is_ok());
    assert!(semi_stable_triplet(&SemiStableSpec { b: 2.0, alpha: 2.0, directions: vec![(vec![1.0], 1.0)], r0: 1.0 }).is_err());
}
