mod common;

use common::*;
use proptest::prelude::*;
use ssd_core::idist::{cumulant_tol, Atom, LevyTriplet, MassLaw};
use ssd_core::iterate::{f_m, f_m_star};
use ssd_core::ou::{epoch_of, transition_cumulant, OUConfig};
use ssd_core::phi::{is_semi_selfdecomposable, period_function, phi_forward_triplet, SpanConfig};

fn random_triplet() -> impl Strategy<Value = LevyTriplet> {
    let gauss = (0.0..2.0f64, -1.0..1.0f64, 0.0..2.0f64);
    let atom = ((-4.0..4.0f64, -4.0..4.0f64), 0.01..2.0f64);
    let lat = (1.2..6.0f64, 0.3..3.0f64, 0.0..1.5f64, 0.0..1.0f64);
    (gauss, prop::collection::vec(atom, 0..4), lat, (-1.0..1.0f64, -1.0..1.0f64)).prop_map(|(g, atoms, l, drift)| {
        let (l11, l21, l22) = g;
        let gauss = vec![l11 * l11, l11 * l21, l11 * l21, l21 * l21 + l22 * l22];
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .filter(|((x, y), _)| x.hypot(*y) > 1e-3)
            .map(|((x, y), w)| Atom { x: vec![x, y], w })
            .collect();
        let (base, anchor, wl, wh) = l;
        let mass = MassLaw::geometric(wh, 1.0 / base, Some(0), None)
            .plus(&MassLaw::geometric(wl, base.powf(1.5), None, Some(-1)));
        let mut t = LevyTriplet::new(gauss, ssd_core::idist::LevyMeasure::atoms(atoms), vec![drift.0, drift.1]);
        t.levy = t.levy.plus(&lattice_measure(vec![0.6, 0.8], base, anchor, mass));
        t
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cumulant_vanishes_at_origin(t in random_triplet()) {
        let c = cumulant_tol(&t, &[0.0, 0.0], 1e-12).unwrap();
        prop_assert_eq!(c.value.re, 0.0);
        prop_assert_eq!(c.value.im, 0.0);
    }

    #[test]
    fn cumulant_conjugate_symmetric_and_damped(t in random_triplet(), z in point()) {
        let zn: Vec<f64> = z.iter().map(|v| -v).collect();
        let a = cumulant_tol(&t, &z, 1e-11).unwrap();
        let b = cumulant_tol(&t, &zn, 1e-11).unwrap();
        let tol = a.err + b.err + 1e-12;
        prop_assert!((a.value - b.value.conj()).norm() <= tol);
        prop_assert!(a.value.re <= a.err);
    }

    #[test]
    fn time_change_inverse(u in 0.0..50.0f64, m in 0u32..=8) {
        let t = f_m(u, m).unwrap();
        let back = f_m_star(t, m).unwrap();
        prop_assert!((back - u).abs() <= 1e-9 * (1.0 + u), "u={u} m={m} back={back}");
    }

    #[test]
    fn period_function_matches_lattice_decay(b in 1.01..20.0f64, t in 0.0..40.0f64) {
        let g = period_function(b, t);
        let n = (t / b.ln()).floor() as i32;
        let lhs = (-t).exp() * g;
        let rhs = b.powi(-n);
        prop_assert!((lhs - rhs).abs() <= 1e-12, "b={b} t={t} diff={}", lhs - rhs);
        prop_assert!((1.0..b * (1.0 + 1e-12)).contains(&g));
    }

    #[test]
    fn transition_composes(
        s in 0.0..3.0f64, du in 0.0..3.0f64, dt in 0.0..3.0f64,
        x in point(), z in point(), c in 0.5..3.0f64,
    ) {
        let t1 = gaussian(2);
        let x1 = LevyTriplet { levy: atoms(2).levy, ..t1 };
        let cfg = OUConfig::new(2.0, c, 0.0, 10.0).unwrap();
        let (u, t) = (s + du, s + du + dt);
        let whole = transition_cumulant(&x1, &cfg, s, t, &x, &z, 1e-12).unwrap();
        let n = epoch_of(c, t) - epoch_of(c, u);
        let zs: Vec<f64> = z.iter().map(|v| v * 2f64.powi(-(n as i32))).collect();
        let first = transition_cumulant(&x1, &cfg, s, u, &x, &zs, 1e-12).unwrap();
        let second = transition_cumulant(&x1, &cfg, u, t, &[0.0, 0.0], &z, 1e-12).unwrap();
        let diff = (whole.value - first.value - second.value).norm();
        prop_assert!(diff <= 1e-9, "diff {diff}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn images_are_members(b in prop::sample::select(vec![1.5, 2.0, 3.0]), w in 0.1..2.0f64, x in 0.2..5.0f64) {
        let rho = LevyTriplet::compound_poisson(vec![Atom { x: vec![x], w }, Atom { x: vec![-1.7 * x], w: 0.5 * w }]);
        let cfg = SpanConfig::new(b).unwrap();
        let mu = phi_forward_triplet(&rho, &cfg, 1e-12).unwrap();
        prop_assert!(is_semi_selfdecomposable(&mu, &cfg).unwrap().is_member());
    }

    #[test]
    fn proportional_growth_keeps_membership(c in 1.0..20.0f64, w in 0.1..2.0f64) {
        let rho = LevyTriplet::compound_poisson(vec![Atom { x: vec![1.3], w }]);
        let cfg = SpanConfig::new(2.0).unwrap();
        let mut mu = phi_forward_triplet(&rho, &cfg, 1e-12).unwrap();
        prop_assert!(is_semi_selfdecomposable(&mu, &cfg).unwrap().is_member());
        for comp in &mut mu.levy.components {
            if let ssd_core::idist::LevyComponent::Lattice(l) = comp {
                l.mass = l.mass.scaled(c);
            }
        }
        prop_assert!(is_semi_selfdecomposable(&mu, &cfg).unwrap().is_member());
    }
}
