//! Seeded property suites behind `ssd verify`.

use std::f64::consts::PI;

use ssd_core::Complex64;
use serde::Serialize;
use ssd_core::grid::axis_grid;
use ssd_core::idist::{cumulant_tol, Atom, LevyComponent, LevyMeasure, LevyTriplet, MassLaw, SamplerConfig, ScaleLattice};
use ssd_core::iterate::{
    binom_identity_check, f_m, f_m_int, f_m_star, is_lm_member, phi_iter_cumulant, semi_stable_triplet, IterConfig,
    SemiStableSpec,
};
use ssd_core::linalg::scale;
use ssd_core::ou::{
    divergence_diagnostic, semistationary, validate_limit, verify_langevin, InitSpec, OUConfig, SemiStationarySpec,
    Simulator,
};
use ssd_core::phi::{forward_factorization_check, phi_forward_cumulant, phi_forward_triplet, phi_inverse, SpanConfig, Validity, Verdict};
use ssd_core::special::binom_u128;
use ssd_core::Error;

use crate::runner::Parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Ou,
    Iterate,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub group: String,
    pub name: String,
    pub passed: bool,
    /// Measured quantity; compared against `threshold`.
    pub value: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub suite: Suite,
    pub seed: u64,
    pub paths: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Checks {
    group: &'static str,
    out: Vec<CheckResult>,
}

impl Checks {
    fn new(group: &'static str) -> Self {
        Checks { group, out: Vec::new() }
    }

    /// Passes when `value <= threshold`.
    fn le(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name.into(), value <= threshold, value, threshold, None);
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.push(name.into(), ok, if ok { 1.0 } else { 0.0 }, 1.0, None);
    }

    fn error(&mut self, name: impl Into<String>, e: &Error) {
        self.push(name.into(), false, f64::NAN, 0.0, Some(e.to_string()));
    }

    fn push(&mut self, name: String, passed: bool, value: f64, threshold: f64, detail: Option<String>) {
        self.out.push(CheckResult { group: self.group.into(), name, passed, value, threshold, detail });
    }
}

pub fn gaussian(d: usize) -> LevyTriplet {
    if d == 1 {
        LevyTriplet::gaussian(vec![1.3])
    } else {
        LevyTriplet::gaussian(vec![1.0, 0.3, 0.3, 0.5])
    }
}

pub fn atoms(d: usize) -> LevyTriplet {
    let pts: [(f64, f64, f64); 3] = [(0.7, -0.2, 1.0), (-2.5, 1.0, 0.4), (0.0, 3.0, 0.2)];
    LevyTriplet::compound_poisson(
        pts.iter()
            .map(|&(x, y, w)| Atom { x: if d == 1 { vec![if x == 0.0 { y } else { x }] } else { vec![x, y] }, w })
            .collect(),
    )
}

/// Two-sided geometric lattice: infinite activity, finite log-moments of every order.
pub fn lattice(d: usize, base: f64) -> LevyTriplet {
    let direction = if d == 1 { vec![1.0] } else { vec![0.6, 0.8] };
    let mass = MassLaw::geometric(1.0, 1.0 / base, Some(0), None).plus(&MassLaw::geometric(0.5, base, None, Some(-1)));
    let mut drift = vec![0.0; d];
    drift[0] = 0.25;
    LevyTriplet::pure_jump(
        LevyMeasure { components: vec![LevyComponent::Lattice(ScaleLattice { direction, base, anchor: 1.3, mass })] },
        drift,
    )
}

pub fn corpus(d: usize, base: f64) -> Vec<(&'static str, LevyTriplet)> {
    vec![("gaussian", gaussian(d)), ("atoms", atoms(d)), ("lattice", lattice(d, base))]
}

/// `m(k) = w k^{-p}` on radii `2^k`, `k >= 1`.
pub fn power_lattice(p: f64) -> LevyTriplet {
    let l = ScaleLattice { direction: vec![1.0], base: 2.0, anchor: 1.0, mass: MassLaw::power(1.0, p, 1) };
    LevyTriplet::pure_jump(LevyMeasure { components: vec![LevyComponent::Lattice(l)] }, vec![0.0])
}

pub fn poisson_one() -> LevyTriplet {
    LevyTriplet::compound_poisson(vec![Atom { x: vec![1.0], w: 1.0 }])
}

pub fn semi_stable(alpha: f64) -> LevyTriplet {
    semi_stable_triplet(&SemiStableSpec { b: 2.0, alpha, directions: vec![(vec![1.0], 1.0)], r0: 1.0 })
        .expect("valid semi-stable spec")
}

fn levy_part(t: &LevyTriplet) -> LevyTriplet {
    LevyTriplet::pure_jump(t.levy.clone(), vec![0.0; t.dim()])
}

pub fn factorization() -> Vec<CheckResult> {
    let mut c = Checks::new("factorization");
    for d in [1, 2] {
        let grid = axis_grid(d, -5.0, 5.0, 101);
        for b in [1.1, 2.0, 10.0] {
            let cfg = SpanConfig { b };
            for (name, rho) in corpus(d, 2.0) {
                let label = format!("{name} d={d} b={b}");
                match forward_factorization_check(&rho, &cfg, &grid, 1e-8) {
                    Ok(r) => c.le(label, r.max_residual, 1e-8),
                    Err(e) => c.error(label, &e),
                }
            }
        }
    }
    c.out
}

pub fn roundtrip() -> Vec<CheckResult> {
    let mut c = Checks::new("roundtrip");
    for d in [1, 2] {
        let grid = axis_grid(d, -3.0, 3.0, 13);
        for b in [1.1, 2.0, 10.0] {
            let cfg = SpanConfig { b };
            for (name, rho) in corpus(d, b) {
                let label = format!("{name} d={d} b={b}");
                let res = phi_forward_triplet(&rho, &cfg, 1e-13).and_then(|mu| phi_inverse(&mu, &cfg));
                let inv = match res {
                    Ok(inv) => inv,
                    Err(e) => {
                        c.error(label, &e);
                        continue;
                    }
                };
                let Some(back) = inv.rho.filter(|_| inv.validity == Validity::Valid) else {
                    c.flag(format!("{label} valid inverse"), false);
                    continue;
                };
                let mut worst = 0.0f64;
                for (x, y) in back.gauss.iter().zip(&rho.gauss).chain(back.drift.iter().zip(&rho.drift)) {
                    worst = worst.max((x - y).abs());
                }
                for z in &grid {
                    let a = cumulant_tol(&levy_part(&back), z, 1e-13);
                    let r = cumulant_tol(&levy_part(&rho), z, 1e-13);
                    match (a, r) {
                        (Ok(a), Ok(r)) => worst = worst.max((a.value - r.value).norm()),
                        (Err(e), _) | (_, Err(e)) => c.error(format!("{label} z={z:?}"), &e),
                    }
                }
                c.le(label, worst, 1e-10);
            }
        }
    }
    for b in [1.1, 2.0, 10.0] {
        let a = 1.7;
        match phi_forward_triplet(&LevyTriplet::gaussian(vec![a]), &SpanConfig { b }, 1e-13) {
            Ok(mu) => {
                let want = a / (1.0 - b.powi(-2));
                c.le(format!("gaussian variance b={b}"), (mu.gauss[0] - want).abs() / want, 4.0 * f64::EPSILON);
            }
            Err(e) => c.error(format!("gaussian variance b={b}"), &e),
        }
    }
    c.out
}

pub fn core_domain() -> Vec<CheckResult> {
    let mut c = Checks::new("domain");
    let heavy = power_lattice(2.0);
    let r = phi_forward_cumulant(&heavy, &SpanConfig { b: 2.0 }, &[1.0], 1e-8);
    c.flag("infinite log-moment rejected by the forward map", matches!(r, Err(Error::DomainViolation(_))));
    c.out
}

pub fn iteration() -> Vec<CheckResult> {
    let mut c = Checks::new("iteration");
    let mut exact = true;
    for m in 0..=6u32 {
        for k in 0..=50u64 {
            let want = binom_u128(k + m as u64, m as u64 + 1);
            exact &= f_m_int(k, m) == want && want.is_some_and(|w| f_m(k as f64, m).ok() == Some(w as f64));
        }
    }
    c.flag("time change at integers is binomial (k <= 50, m <= 6)", exact);

    let mut worst = 0.0f64;
    for m in 0..=6 {
        for i in 0..=5000 {
            let u = i as f64 * 0.01;
            match f_m(u, m).and_then(|t| f_m_star(t, m)) {
                Ok(back) => worst = worst.max((back - u).abs()),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    c.le("inverse time change on [0, 50]", worst, 1e-12);

    let ok = (0..=60).all(|n| (0..=n).all(|k| binom_identity_check(n, k).unwrap_or(false)));
    c.flag("binomial identity for n <= 60", ok);

    let g = phi_iter_cumulant(&LevyTriplet::gaussian(vec![1.0]), &IterConfig { b: 2.0, m: 1 }, &[1.0], 1e-12);
    match g {
        Ok(v) => c.le("gaussian m=1 b=2 z=1", (v.value - Complex64::new(-8.0 / 9.0, 0.0)).norm(), 1e-10),
        Err(e) => c.error("gaussian m=1 b=2 z=1", &e),
    }

    let grid = axis_grid(1, -5.0, 5.0, 21);
    for (name, rho) in corpus(1, 2.0) {
        let mut worst = 0.0f64;
        for z in &grid {
            match phi_iter_cumulant(&rho, &IterConfig { b: 2.0, m: 1 }, z, 1e-9) {
                Ok(s) => worst = worst.max((s.value - compose(&rho, 2.0, 2, z, 1e-9)).norm()),
                Err(e) => c.error(format!("composition {name} z={z:?}"), &e),
            }
        }
        c.le(format!("m=1 series vs composed map, {name}"), worst, 5e-8);
    }
    c.out
}

/// `Σ_{i≥0} C_{Φ^{depth-1}(ρ)}(b^{-i} z)`, each level evaluated as a plain sum.
fn compose(rho: &LevyTriplet, b: f64, depth: u32, z: &[f64], tol: f64) -> Complex64 {
    if depth == 0 {
        return cumulant_tol(rho, z, tol).map(|v| v.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut w = z.to_vec();
    loop {
        let t = compose(rho, b, depth - 1, &w, tol * 1e-2);
        sum += t;
        if !t.is_finite() || (t.norm() < tol * 1e-3 && w.iter().all(|v| v.abs() < 1e-6)) {
            return sum;
        }
        w = scale(&w, 1.0 / b);
    }
}

pub fn nesting() -> Vec<CheckResult> {
    let mut c = Checks::new("nesting");
    for alpha in [0.5, 1.0, 1.5] {
        let t = semi_stable(alpha);
        let label = format!("semi-stable alpha={alpha} levels 0..=5");
        let cert = match is_lm_member(&t, &IterConfig { b: 2.0, m: 5 }) {
            Ok(x) => x,
            Err(e) => {
                c.error(label, &e);
                continue;
            }
        };
        c.flag(label, cert.verdict == Verdict::Member && cert.factors.len() == 6);
        let f = 1.0 - 2f64.powf(-alpha);
        let mut worst = 0.0f64;
        for (j, rho) in cert.factors.iter().enumerate() {
            let k = f.powi(j as i32 + 1);
            for z in [0.3, 1.0, 4.0] {
                let a = cumulant_tol(&levy_part(rho), &[z], 1e-13);
                let b = cumulant_tol(&levy_part(&t), &[z], 1e-13);
                if let (Ok(a), Ok(b)) = (a, b) {
                    worst = worst.max((a.value - b.value * k).norm() / (1.0 + (b.value * k).norm()));
                } else {
                    worst = f64::INFINITY;
                }
            }
        }
        c.le(format!("semi-stable alpha={alpha} factors proportional"), worst, 1e-10);
    }
    let cp = poisson_one();
    match is_lm_member(&cp, &IterConfig { b: 2.0, m: 0 }) {
        Ok(cert) => c.flag("point-mass jumps fail level 0", cert.levels[0].verdict == Verdict::NonMember),
        Err(e) => c.error("point-mass jumps fail level 0", &e),
    }
    let image = phi_forward_triplet(&cp, &SpanConfig { b: 2.0 }, 1e-13)
        .and_then(|mu| is_lm_member(&mu, &IterConfig { b: 2.0, m: 1 }));
    match image {
        Ok(cert) => c.flag(
            "image of point-mass jumps passes level 0, fails level 1",
            cert.levels[0].verdict == Verdict::Member && cert.levels[1].verdict == Verdict::NonMember,
        ),
        Err(e) => c.error("image of point-mass jumps passes level 0, fails level 1", &e),
    }
    let g = is_lm_member(&LevyTriplet::gaussian(vec![2.0]), &IterConfig { b: 2.0, m: 8 });
    c.flag("gaussian member at every level", g.is_ok_and(|x| x.levels.iter().all(|l| l.verdict == Verdict::Member)));
    c.out
}

pub fn iterate_domain() -> Vec<CheckResult> {
    let mut c = Checks::new("domain");
    let rho = power_lattice(3.0);
    c.flag(
        "log-finite, log^2-infinite lattice accepted at m=0",
        phi_iter_cumulant(&rho, &IterConfig { b: 2.0, m: 0 }, &[1.0], 1e-2)
            .is_ok_and(|v| v.value.re.is_finite() && v.value.im.is_finite() && v.err <= 1e-2),
    );
    c.flag(
        "log-finite, log^2-infinite lattice rejected at m=1",
        matches!(phi_iter_cumulant(&rho, &IterConfig { b: 2.0, m: 1 }, &[1.0], 1e-10), Err(Error::DomainViolation(_))),
    );
    c.out
}

pub fn langevin(seed: u64) -> Vec<CheckResult> {
    let mut c = Checks::new("langevin");
    let cfg = OUConfig { b: 2.0, c: 1.0, t0: 0.0, horizon: 200.0 };
    for (name, x1) in corpus(2, 2.0) {
        let init = InitSpec::Const { value: vec![5.0, -1.0] };
        match Simulator::new(&x1, &cfg, &init, 0, &[], &SamplerConfig::default()) {
            Ok(sim) => {
                let worst = (0..100).map(|i| verify_langevin(&sim.path(seed, i, 200)).relative).fold(0.0, f64::max);
                c.le(format!("{name}: 100 paths x 200 epochs"), worst, 1e-10);
            }
            Err(e) => c.error(name, &e),
        }
    }
    c.out
}

pub fn limit(seed: u64, n: u64) -> Vec<CheckResult> {
    let mut c = Checks::new("limit");
    let grid = axis_grid(1, -3.0, 3.0, 21);
    let samp = SamplerConfig::default();
    for (name, x1) in [("gaussian", LevyTriplet::gaussian(vec![1.0])), ("poisson", poisson_one())] {
        for cc in [1.0, 2.0] {
            let cfg = OUConfig { b: 2.0, c: cc, t0: 0.0, horizon: 60.0 };
            let inits = [&InitSpec::Const { value: vec![3.0] }, &InitSpec::Limit];
            match validate_limit(&x1, &cfg, inits, n, 60, &grid, seed, &samp, &Parallel) {
                Ok(r) => {
                    for run in &r.runs {
                        c.le(
                            format!("{name} c={cc} {} start: terminal ECF", run.init),
                            run.terminal.max_excess,
                            0.0,
                        );
                        if !run.stationarity.is_empty() {
                            let worst = run.stationarity.iter().map(|s| s.max_excess).fold(f64::NEG_INFINITY, f64::max);
                            c.le(format!("{name} c={cc} limit start: {} intermediate epochs", run.stationarity.len()), worst, 0.0);
                        }
                    }
                    c.le(format!("{name} c={cc}: starts agree"), r.agreement.max_excess, 0.0);
                }
                Err(e) => c.error(format!("{name} c={cc}"), &e),
            }
        }
    }
    c.out
}

pub fn divergence(seed: u64, n: u64) -> Vec<CheckResult> {
    let mut c = Checks::new("divergence");
    let cfg = OUConfig { b: 2.0, c: 1.0, t0: 0.0, horizon: 40.0 };
    match divergence_diagnostic(&poisson_one(), &cfg, &[PI], &[10.0, 20.0, 40.0], n, seed, &SamplerConfig::default(), &Parallel)
    {
        Ok(r) => {
            for p in &r.points {
                c.le(format!("t={}", p.t), p.estimate, r.bound + r.radius);
            }
        }
        Err(e) => c.error("point-mass jumps at z0 = pi", &e),
    }
    c.out
}

pub fn semistationarity(seed: u64, n: u64) -> Vec<CheckResult> {
    let mut c = Checks::new("semistationarity");
    let cfg = OUConfig { b: 2.0, c: 2.0, t0: 0.0, horizon: 5.0 };
    let spec = SemiStationarySpec::standard(2.0, axis_grid(1, -3.0, 3.0, 13));
    match semistationary(&poisson_one(), &cfg, &spec, n, seed, &SamplerConfig::default(), &Parallel) {
        Ok(r) => {
            let worst = |v: &[ssd_core::ou::EcfCheck]| v.iter().map(|x| x.max_excess).fold(f64::NEG_INFINITY, f64::max);
            c.le("marginals invariant under the period", worst(&r.marginal), 0.0);
            c.le("pairs invariant under the period", worst(&r.joint), 0.0);
            c.flag("half-period shift detected", r.negative_control_detected);
        }
        Err(e) => c.error("point-mass jumps, b=2, c=2", &e),
    }
    c.out
}

pub fn run(suite: Suite, seed: u64, paths: u64) -> Summary {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        checks.extend(factorization());
        checks.extend(roundtrip());
        checks.extend(core_domain());
    }
    if matches!(suite, Suite::Iterate | Suite::All) {
        checks.extend(iteration());
        checks.extend(nesting());
        checks.extend(iterate_domain());
    }
    if matches!(suite, Suite::Ou | Suite::All) {
        checks.extend(langevin(seed));
        checks.extend(limit(seed, paths));
        checks.extend(divergence(seed, paths));
        checks.extend(semistationarity(seed, paths));
    }
    let passed = checks.iter().all(|c| c.passed);
    Summary { suite, seed, paths, checks, passed }
}
