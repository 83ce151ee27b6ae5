mod common;

use common::*;
use ssd_core::grid::axis_grid;
use ssd_core::idist::{scale_and_time, Atom, LevyTriplet, SamplerConfig};
use ssd_core::ou::{
    closed_form_state, divergence_diagnostic, limit_cumulant, semistationary, solve_path, transition_cumulant,
    validate_limit, verify_langevin, InitSpec, OUConfig, SemiStationarySpec, Sequential, Simulator,
};
use ssd_core::phi::{phi_forward_cumulant, SpanConfig};
use ssd_core::Error;

fn cp1() -> LevyTriplet {
    LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }])
}

#[test]
fn noiseless_decay() {
    let cfg = OUConfig::new(3.0, 1.0, 0.0, 5.0).unwrap();
    let p = solve_path(&[2.0], &[0.0; 5], 0, &cfg).unwrap();
    for k in 0..=5 {
        let want = 2.0 * 3f64.powi(-(k as i32));
        assert!((p.state(k).unwrap()[0] - want).abs() <= 4.0 * f64::EPSILON * want);
    }
}

#[test]
fn missing_increments_are_rejected() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 5.0).unwrap();
    assert!(solve_path(&[0.0], &[1.0; 3], 0, &cfg).is_err());
}

#[test]
fn simulated_paths_satisfy_the_equation() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 200.0).unwrap();
    for (name, x1) in corpus(2, 2.0) {
        let sim = Simulator::new(&x1, &cfg, &InitSpec::Const { value: vec![5.0, -1.0] }, 0, &[], &SamplerConfig::default())
            .unwrap();
        for i in 0..20 {
            let p = sim.path(7, i, 200);
            let r = verify_langevin(&p);
            assert!(r.relative <= 1e-10, "{name} path {i}: {r:?}");
            for k in [0, 1, 50, 200] {
                let cf = closed_form_state(&p, k).unwrap();
                for (a, b) in cf.iter().zip(p.state(k).unwrap()) {
                    assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{name} k={k}");
                }
            }
        }
    }
}

#[test]
fn perturbed_state_breaks_the_equation() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 10.0).unwrap();
    let sim = Simulator::new(&gaussian(1), &cfg, &InitSpec::Zero, 0, &[], &SamplerConfig::default()).unwrap();
    let mut p = sim.path(1, 0, 10);
    p.states[4] += 1.0;
    assert!(verify_langevin(&p).max_residual >= 1.0 - 1e-12);
}

#[test]
fn state_is_initial_before_first_epoch() {
    let cfg = OUConfig::new(2.0, 2.0, 1.0, 3.0).unwrap();
    let sim = Simulator::new(&gaussian(1), &cfg, &InitSpec::Const { value: vec![4.0] }, cfg.first_epoch(), &[], &SamplerConfig::default())
        .unwrap();
    let p = sim.path(3, 0, cfg.steps());
    for t in [1.0, 1.2, 1.49] {
        assert_eq!(p.state_at(t).unwrap(), &[4.0]);
    }
    assert_ne!(p.state_at(1.5).unwrap(), &[4.0]);
}

#[test]
fn gaussian_limit_series() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 1.0).unwrap();
    for z in [0.0, 0.5, 2.0] {
        let v = limit_cumulant(&LevyTriplet::gaussian(vec![1.0]), &cfg, &[z], 1e-12).unwrap();
        assert!((v.value.re + z * z / 6.0).abs() < 1e-12);
    }
}

#[test]
fn limit_is_image_of_scaled_increment() {
    let grid = axis_grid(1, -5.0, 5.0, 21);
    for c in [1.0, 2.0, 0.5] {
        let cfg = OUConfig::new(2.0, c, 0.0, 1.0).unwrap();
        for (name, x1) in corpus(1, 2.0) {
            let rho = scale_and_time(&x1, 0.5, 1.0 / c, 1e-14).unwrap();
            for z in &grid {
                let a = limit_cumulant(&x1, &cfg, z, 1e-10).unwrap();
                let b = phi_forward_cumulant(&rho, &SpanConfig::new(2.0).unwrap(), z, 1e-10).unwrap();
                assert!((a.value - b.value).norm() <= 2e-10, "{name} c={c} z={z:?}");
            }
        }
    }
}

#[test]
fn transition_kernel_composes() {
    let cfg = OUConfig::new(2.0, 2.0, 0.0, 10.0).unwrap();
    let x1 = atoms(1);
    let x = [1.5];
    for z in [-2.0, 0.7, 3.0] {
        let id = transition_cumulant(&x1, &cfg, 0.1, 0.3, &x, &[z], 1e-12).unwrap();
        assert!((id.value.im - z * 1.5).abs() < 1e-15 && id.value.re == 0.0);
        // s -> u -> t: the state at u contributes through its own cumulant at the scaled argument.
        let (s, u, t) = (0.2, 1.3, 3.1);
        let st = transition_cumulant(&x1, &cfg, s, t, &x, &[z], 1e-12).unwrap().value;
        let n2 = cfg.epoch(t) - cfg.epoch(u);
        let zu = z * 2f64.powi(-(n2 as i32));
        let su = transition_cumulant(&x1, &cfg, s, u, &x, &[zu], 1e-12).unwrap().value;
        let ut0 = transition_cumulant(&x1, &cfg, u, t, &[0.0], &[z], 1e-12).unwrap().value;
        assert!((st - (su + ut0)).norm() < 1e-11);
        let far = transition_cumulant(&x1, &cfg, 0.0, 200.0, &[0.0], &[z], 1e-12).unwrap().value;
        let lim = limit_cumulant(&x1, &cfg, &[z], 1e-12).unwrap().value;
        assert!((far - lim).norm() < 1e-10);
    }
    assert!(transition_cumulant(&x1, &cfg, 1.0, 0.5, &x, &[1.0], 1e-12).is_err());
}

#[test]
fn limit_needs_log_moment() {
    let nu = lattice_measure(vec![1.0], 2.0, 1.0, ssd_core::idist::MassLaw::power(1.0, 2.0, 1));
    let x1 = LevyTriplet::pure_jump(nu, vec![0.0]);
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 1.0).unwrap();
    assert!(matches!(limit_cumulant(&x1, &cfg, &[1.0], 1e-8), Err(Error::DomainViolation(_))));
}

#[test]
fn terminal_law_matches_limit() {
    let grid = axis_grid(1, -3.0, 3.0, 21);
    for (name, x1) in [("gaussian", LevyTriplet::gaussian(vec![1.0])), ("poisson", cp1())] {
        for c in [1.0, 2.0] {
            let cfg = OUConfig::new(2.0, c, 0.0, 60.0).unwrap();
            let r = validate_limit(
                &x1,
                &cfg,
                [&InitSpec::Const { value: vec![3.0] }, &InitSpec::Limit],
                20_000,
                60,
                &grid,
                11,
                &SamplerConfig::default(),
                &Sequential,
            )
            .unwrap();
            assert!(r.passed, "{name} c={c}: {r:#?}");
            assert_eq!(r.runs[1].stationarity.len(), 5);
        }
    }
}

#[test]
fn zero_steps_from_origin_is_degenerate() {
    let grid = axis_grid(1, -3.0, 3.0, 7);
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 1.0).unwrap();
    let sim = Simulator::new(&gaussian(1), &cfg, &InitSpec::Zero, 0, &grid, &SamplerConfig::default()).unwrap();
    let out = Sequential.run_states(&sim, 5, 100, &[0]);
    assert!(out[0].iter().all(|v| *v == 0.0));
}

#[test]
fn semistationary_gaussian_variance() {
    let cfg = OUConfig::new(2.0, 2.0, 0.0, 4.0).unwrap();
    let grid = axis_grid(1, -3.0, 3.0, 7);
    let sim = Simulator::new(&LevyTriplet::gaussian(vec![1.0]), &cfg, &InitSpec::Limit, 0, &grid, &SamplerConfig::default())
        .unwrap();
    let n = 40_000;
    let out = Sequential.run_states(&sim, 3, n, &[0, 1, 4]);
    for s in &out {
        let var = s.iter().map(|v| v * v).sum::<f64>() / n as f64;
        // Var of the limit law: (1/c) Σ b^{-2k-2} = 1/6; sampling sd ≈ (1/6) sqrt(2/n).
        assert!((var - 1.0 / 6.0).abs() < 5.0 * (1.0 / 6.0) * (2.0 / n as f64).sqrt(), "var={var}");
    }
}

#[test]
fn semistationary_period() {
    let cfg = OUConfig::new(2.0, 2.0, 0.0, 5.0).unwrap();
    let spec = SemiStationarySpec::standard(2.0, axis_grid(1, -3.0, 3.0, 13));
    let r = semistationary(&cp1(), &cfg, &spec, 20_000, 5, &SamplerConfig::default(), &Sequential).unwrap();
    assert!(r.passed, "{r:#?}");
    assert!(r.negative_control_detected);
}

#[test]
fn noiseless_semistationary_is_zero() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 5.0).unwrap();
    let spec = SemiStationarySpec::standard(1.0, axis_grid(1, -3.0, 3.0, 7));
    let x1 = LevyTriplet::new(vec![0.0], Default::default(), vec![0.0]);
    let r = semistationary(&x1, &cfg, &spec, 100, 5, &SamplerConfig::default(), &Sequential).unwrap();
    assert!(r.passed && !r.negative_control_detected);
    assert!(r.marginal.iter().all(|c| c.max_deviation == 0.0));
}

#[test]
fn increments_do_not_settle() {
    let cfg = OUConfig::new(2.0, 1.0, 0.0, 40.0).unwrap();
    let r = divergence_diagnostic(&cp1(), &cfg, &[std::f64::consts::PI], &[10.0, 20.0, 40.0], 20_000, 9, &SamplerConfig::default(), &Sequential)
        .unwrap();
    assert!((r.bound - (-2.0f64).exp()).abs() < 1e-12);
    assert!(r.passed, "{r:#?}");
    let g = divergence_diagnostic(&gaussian(1), &cfg, &[1.0], &[10.0], 1000, 9, &SamplerConfig::default(), &Sequential).unwrap();
    assert!((g.bound - (-0.65f64).exp()).abs() < 1e-12);
    let drift_only = LevyTriplet::point_mass(vec![1.0]);
    assert!(matches!(
        divergence_diagnostic(&drift_only, &cfg, &[1.0], &[10.0], 100, 9, &SamplerConfig::default(), &Sequential),
        Err(Error::DomainViolation(_))
    ));
}
