mod common;

use common::*;
use ssd_core::idist::{
    convolve, cumulant_tol, ecf, log_moment, sample, scale_and_time, LevyTriplet, MassLaw, SamplerConfig, Violation,
    ECF_Q,
};
use ssd_core::phi::classic_l_map_cumulant;

fn lattice_triplet(mass: MassLaw) -> LevyTriplet {
    LevyTriplet::pure_jump(lattice_measure(vec![1.0], 2.0, 1.0, mass), vec![0.0])
}

fn divergent(t: &LevyTriplet) -> bool {
    t.validate().violations.iter().any(|v| matches!(v, Violation::Divergent { .. }))
}

#[test]
fn validation_boundaries() {
    let b: f64 = 2.0;
    // small jumps: m(k) r_k^2 = (q b^2)^k as k -> -inf
    let ok = lattice_triplet(MassLaw::geometric(1.0, 1.01 / (b * b), None, Some(0)));
    let bad = lattice_triplet(MassLaw::geometric(1.0, 1.0 / (b * b), None, Some(0)));
    assert!(ok.validate().is_valid(), "{:?}", ok.validate());
    assert!(divergent(&bad));
    // large jumps: total mass outside the unit ball
    let ok = lattice_triplet(MassLaw::power(1.0, 1.01, 1));
    let bad = lattice_triplet(MassLaw::power(1.0, 1.0, 1));
    assert!(ok.validate().is_valid());
    assert!(divergent(&bad));
    let ok = lattice_triplet(MassLaw::geometric(1.0, 0.999, Some(0), None));
    let bad = lattice_triplet(MassLaw::geometric(1.0, 1.0, Some(0), None));
    assert!(ok.validate().is_valid());
    assert!(divergent(&bad));
}

#[test]
fn validation_rejects_bad_gauss() {
    let t = LevyTriplet::gaussian(vec![1.0, 0.0, 0.0, -0.1]);
    assert!(matches!(t.validate().violations[0], Violation::GaussNotPsd { .. }));
    let t = LevyTriplet::gaussian(vec![1.0, 0.2, 0.0, 1.0]);
    assert!(matches!(t.validate().violations[0], Violation::GaussNotSymmetric { .. }));
}

#[test]
fn log_moment_matches_partial_sum() {
    let (anchor, base, q) = (1.3f64, 2.0f64, 0.9999f64);
    let nu = lattice_measure(vec![1.0], base, anchor, MassLaw::geometric(1.0, q, Some(0), None));
    for p in 1..=3u32 {
        let exact = log_moment(&nu, p).unwrap();
        let mut s = 0.0f64;
        let mut comp = 0.0f64;
        for k in 0..1_000_000i32 {
            let term = q.powi(k) * (anchor.ln() + k as f64 * base.ln()).powi(p as i32) - comp;
            let t = s + term;
            comp = (t - s) - term;
            s = t;
        }
        assert!((exact - s).abs() <= 1e-8 * s, "p={p}: {exact} vs {s}");
    }
    let heavy = lattice_measure(vec![1.0], base, anchor, MassLaw::power(1.0, 3.0, 1));
    assert!(log_moment(&heavy, 1).unwrap().is_finite());
    assert_eq!(log_moment(&heavy, 2).unwrap(), f64::INFINITY);
}

#[test]
fn classic_map_halves_gaussian() {
    let a0 = 1.7;
    let t = LevyTriplet::gaussian(vec![a0]);
    for z in [0.3, 1.0, 2.5] {
        let c = classic_l_map_cumulant(&t, &[z], 1e-12).unwrap();
        assert!((c.value.re + a0 * z * z / 4.0).abs() < 1e-10);
        assert!(c.value.im.abs() < 1e-12);
    }
}

#[test]
fn scaling_and_convolution() {
    let t = lattice(1, 2.0);
    let s = scale_and_time(&t, -0.7, 1.8, 1e-13).unwrap();
    let g = gaussian(1);
    let sum = convolve(&s, &g).unwrap();
    for z in [0.4, 1.1, 3.0] {
        let direct = cumulant_tol(&sum, &[z], 1e-12).unwrap().value;
        let expect = cumulant_tol(&t, &[-0.7 * z], 1e-12).unwrap().value * 1.8 + cumulant_tol(&g, &[z], 1e-12).unwrap().value;
        assert!((direct - expect).norm() < 1e-9, "z={z}");
    }
}

fn ecf_agrees(t: &LevyTriplet, time: f64, seed: u64) {
    let n = 100_000;
    let batch = sample(t, time, n, seed, &SamplerConfig::default()).unwrap();
    let grid: Vec<Vec<f64>> = (1..=12).map(|i| vec![0.25 * i as f64]).collect();
    let e = ecf(&batch.values, 1, &grid, ECF_Q).unwrap();
    for (z, v) in grid.iter().zip(&e.values) {
        let c = cumulant_tol(t, z, 1e-12).unwrap().value * time;
        let dev = (v - c.exp()).norm();
        assert!(dev <= e.radius, "z={z:?} dev={dev} radius={}", e.radius);
    }
}

#[test]
fn sample_ecf_gaussian() {
    ecf_agrees(&gaussian(1), 1.0, 11);
}

#[test]
fn sample_ecf_compound_poisson() {
    ecf_agrees(&atoms(1), 0.7, 12);
}

#[test]
fn sample_ecf_infinite_activity() {
    ecf_agrees(&lattice(1, 2.0), 1.0, 13);
}

#[test]
fn samples_are_reproducible() {
    let cfg = SamplerConfig::default();
    let a = sample(&lattice(2, 3.0), 0.5, 5000, 99, &cfg).unwrap();
    let b = sample(&lattice(2, 3.0), 0.5, 5000, 99, &cfg).unwrap();
    assert_eq!(a.values, b.values);
    let c = sample(&lattice(2, 3.0), 0.5, 5000, 100, &cfg).unwrap();
    assert_ne!(a.values, c.values);
}

#[test]
fn power_tails_past_float_range_are_refused() {
    // 1/k^2 on radii 2^k leaves mass ~1e-3 beyond e^700.
    let heavy = lattice_triplet(MassLaw::power(1.0, 2.0, 1));
    assert!(matches!(sample(&heavy, 1.0, 10, 1, &SamplerConfig::default()), Err(ssd_core::Error::Unsupported(_))));
    // A light tail is cut long before that.
    let light = lattice_triplet(MassLaw::geometric(1.0, 0.5, Some(0), None));
    assert!(sample(&light, 1.0, 10, 1, &SamplerConfig::default()).is_ok());
}
