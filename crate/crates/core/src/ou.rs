//! Ornstein–Uhlenbeck type processes driven by a Lévy process on the epoch grid.
//!
//! `Z_t = M + X_{[ct]/c} - X_{[ct0]/c} - (b-1) ∫_{t0}^t Z_s d[cs]` has the
//! solution `Z_k = b^{-1}(Z_{k-1} + ΔX_k)` at epochs `k = [ct]`, with
//! `ΔX_k ~ X_{1/c}` and `Z_{[ct0]} = M`. States are stored by epoch index;
//! real times are mapped with [`OUConfig::epoch`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;
use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid_arg, Error, Result};
use crate::fmath::{abs, exp, floor, powi, round};
use crate::idist::{
    cumulant_tol, ecf, scale_series_cumulant, stream_rng, CumulantValue, IncrementSampler, LevyTriplet, SamplerConfig,
    SamplerMeta, ECF_Q,
};
use crate::linalg::{dot, norm, scale};
use crate::phi::require_log_moment;

/// Largest number of series terms used to sample the limit law.
pub const MAX_LIMIT_TERMS: usize = 400;
/// Bound on the discarded cumulant tail when sampling the limit law.
pub const LIMIT_TAIL: f64 = 1e-4;

const EVAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OUConfig {
    pub b: f64,
    pub c: f64,
    pub t0: f64,
    pub horizon: f64,
}

/// `[c t]` with values within rounding of an integer snapped to it.
pub fn epoch_of(c: f64, t: f64) -> i64 {
    let x = c * t;
    let r = round(x);
    if abs(x - r) <= 1e-12 * r.abs().max(1.0) {
        r as i64
    } else {
        floor(x) as i64
    }
}

impl OUConfig {
    pub fn new(b: f64, c: f64, t0: f64, horizon: f64) -> Result<Self> {
        let cfg = OUConfig { b, c, t0, horizon };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.b.is_finite() && self.b > 1.0) {
            return Err(invalid_arg("b must be finite and > 1"));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(invalid_arg("c must be finite and > 0"));
        }
        if !(self.t0.is_finite() && self.horizon.is_finite() && self.horizon > self.t0) {
            return Err(invalid_arg("horizon must exceed t0"));
        }
        Ok(())
    }

    pub fn epoch(&self, t: f64) -> i64 {
        epoch_of(self.c, t)
    }

    pub fn time(&self, k: i64) -> f64 {
        k as f64 / self.c
    }

    pub fn first_epoch(&self) -> i64 {
        self.epoch(self.t0)
    }

    pub fn last_epoch(&self) -> i64 {
        self.epoch(self.horizon)
    }

    /// Number of epochs after the initial one.
    pub fn steps(&self) -> usize {
        (self.last_epoch() - self.first_epoch()) as usize
    }
}

/// Initial state `M`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum InitSpec {
    Zero,
    Const { value: Vec<f64> },
    /// `M` with the given infinitely divisible law.
    Law { law: LevyTriplet },
    /// `M` from the limit law of the process.
    Limit,
}

impl InitSpec {
    pub fn label(&self) -> &'static str {
        match self {
            InitSpec::Zero => "zero",
            InitSpec::Const { .. } => "const",
            InitSpec::Law { .. } => "law",
            InitSpec::Limit => "limit",
        }
    }
}

/// One path on epochs `k0..=k0+steps`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OUPath {
    pub dim: usize,
    pub b: f64,
    pub c: f64,
    pub k0: i64,
    /// `Z_{k0}, ..., Z_{k0+steps}`, row-major.
    pub states: Vec<f64>,
    /// `ΔX_{k0+1}, ..., ΔX_{k0+steps}`, row-major.
    pub increments: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

impl OUPath {
    pub fn steps(&self) -> usize {
        self.increments.len() / self.dim
    }

    pub fn init(&self) -> &[f64] {
        &self.states[..self.dim]
    }

    /// State at epoch `k`, or `None` outside the path.
    pub fn state(&self, k: i64) -> Option<&[f64]> {
        let j = k - self.k0;
        if j < 0 || j as usize > self.steps() {
            return None;
        }
        let j = j as usize;
        Some(&self.states[j * self.dim..(j + 1) * self.dim])
    }

    /// State at real time `t`, piecewise constant and right-continuous.
    pub fn state_at(&self, t: f64) -> Option<&[f64]> {
        self.state(epoch_of(self.c, t))
    }

    pub fn increment(&self, k: i64) -> Option<&[f64]> {
        let j = k - self.k0;
        if j < 1 || j as usize > self.steps() {
            return None;
        }
        let j = j as usize - 1;
        Some(&self.increments[j * self.dim..(j + 1) * self.dim])
    }
}

/// Run the recursion from `init` with the given increments.
pub fn solve_path(init: &[f64], increments: &[f64], k0: i64, cfg: &OUConfig) -> Result<OUPath> {
    cfg.check()?;
    let d = init.len();
    if d == 0 || increments.len() % d != 0 {
        return Err(invalid_arg("increments are not a multiple of the dimension"));
    }
    let steps = increments.len() / d;
    let need = cfg.steps();
    if steps < need {
        return Err(invalid_arg(format!("missing increments: have {steps}, need {need}")));
    }
    let mut states = Vec::with_capacity((steps + 1) * d);
    states.extend_from_slice(init);
    for j in 0..steps {
        for a in 0..d {
            let prev = states[j * d + a];
            states.push((prev + increments[j * d + a]) / cfg.b);
        }
    }
    Ok(OUPath { dim: d, b: cfg.b, c: cfg.c, k0, states, increments: increments.to_vec(), seed: 0, index: 0 })
}

/// `b^{-(k-k0)} M + Σ_{k0<ℓ≤k} b^{-(k-ℓ+1)} ΔX_ℓ`.
pub fn closed_form_state(path: &OUPath, k: i64) -> Option<Vec<f64>> {
    let n = k - path.k0;
    if n < 0 || n as usize > path.steps() {
        return None;
    }
    let d = path.dim;
    let b = path.b;
    let mut out = scale(path.init(), powi(b, -(n as i32)));
    for l in path.k0 + 1..=k {
        let w = powi(b, -((k - l + 1) as i32));
        let dx = path.increment(l)?;
        for a in 0..d {
            out[a] += w * dx[a];
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LangevinReport {
    pub max_residual: f64,
    /// Largest magnitude among the terms of the equation.
    pub scale: f64,
    pub relative: f64,
}

/// Max over epochs of `|Z_k - M - Σ ΔX + (b-1) Σ_{k0<ℓ≤k} Z_ℓ|`.
pub fn verify_langevin(path: &OUPath) -> LangevinReport {
    let d = path.dim;
    let mut sum_x = vec![0.0; d];
    let mut sum_z = vec![0.0; d];
    let m = path.init();
    let mut max_residual = 0.0f64;
    let mut sc = norm(m);
    for j in 0..=path.steps() {
        let z = &path.states[j * d..(j + 1) * d];
        if j > 0 {
            let dx = &path.increments[(j - 1) * d..j * d];
            for a in 0..d {
                sum_x[a] += dx[a];
                sum_z[a] += z[a];
            }
        }
        let r: Vec<f64> = (0..d).map(|a| z[a] - m[a] - sum_x[a] + (path.b - 1.0) * sum_z[a]).collect();
        max_residual = max_residual.max(norm(&r));
        sc = sc.max(norm(z)).max(norm(&sum_x)).max((path.b - 1.0) * norm(&sum_z));
    }
    let relative = if sc > 0.0 { max_residual / sc } else { max_residual };
    LangevinReport { max_residual, scale: sc, relative }
}

/// `(1/c) Σ_{k≥0} C_{X_1}(b^{-k-1} z)`, the cumulant of the limit law.
pub fn limit_cumulant(x1: &LevyTriplet, cfg: &OUConfig, z: &[f64], tol: f64) -> Result<CumulantValue> {
    cfg.check()?;
    require_log_moment(x1, 1)?;
    let v = scale_series_cumulant(x1, cfg.b, 0, &scale(z, 1.0 / cfg.b), cfg.c * tol)?;
    let out = CumulantValue { value: v.value / cfg.c, err: v.err / cfg.c };
    if out.err > tol {
        return Err(Error::Tolerance { achieved: out.err, requested: tol });
    }
    Ok(out)
}

/// Cumulant of `Z_t` given `Z_s = x`:
/// `i<z, b^{-n} x> + (1/c) Σ_{k<n} C_{X_1}(b^{-k-1} z)` with `n = [ct] - [cs]`.
pub fn transition_cumulant(
    x1: &LevyTriplet,
    cfg: &OUConfig,
    s: f64,
    t: f64,
    x: &[f64],
    z: &[f64],
    tol: f64,
) -> Result<CumulantValue> {
    cfg.check()?;
    if !(s <= t) {
        return Err(invalid_arg("transition needs s <= t"));
    }
    let n = cfg.epoch(t) - cfg.epoch(s);
    let mut value = Complex64::new(0.0, dot(z, x) * powi(cfg.b, -(n as i32)));
    let mut err = 0.0;
    let per = if n > 0 { cfg.c * tol / n as f64 } else { tol };
    let mut w = scale(z, 1.0 / cfg.b);
    for _ in 0..n {
        let v = cumulant_tol(x1, &w, per)?;
        value += v.value / cfg.c;
        err += v.err / cfg.c;
        w = scale(&w, 1.0 / cfg.b);
    }
    Ok(CumulantValue { value, err })
}

enum InitDraw {
    Fixed(Vec<f64>),
    Law(IncrementSampler),
    Limit(usize),
}

/// Draws paths of the process; path `i` of run `seed` uses RNG stream `i`.
pub struct Simulator {
    b: f64,
    c: f64,
    k0: i64,
    dim: usize,
    x1: LevyTriplet,
    noise: IncrementSampler,
    init: InitDraw,
    init_spec: InitSpec,
}

impl core::fmt::Debug for Simulator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Simulator")
            .field("b", &self.b)
            .field("c", &self.c)
            .field("k0", &self.k0)
            .field("init", &self.init_spec.label())
            .field("limit_terms", &self.limit_terms())
            .finish()
    }
}

impl Simulator {
    /// `bias_grid` is used to choose the number of series terms for a limit-law start.
    pub fn new(
        x1: &LevyTriplet,
        cfg: &OUConfig,
        init: &InitSpec,
        k0: i64,
        bias_grid: &[Vec<f64>],
        samp: &SamplerConfig,
    ) -> Result<Self> {
        cfg.check()?;
        x1.ensure_valid()?;
        let d = x1.dim();
        let noise = IncrementSampler::new(x1, 1.0 / cfg.c, samp)?;
        let draw = match init {
            InitSpec::Zero => InitDraw::Fixed(vec![0.0; d]),
            InitSpec::Const { value } => {
                if value.len() != d {
                    return Err(Error::Dimension { expected: d, got: value.len() });
                }
                InitDraw::Fixed(value.clone())
            }
            InitSpec::Law { law } => {
                if law.dim() != d {
                    return Err(Error::Dimension { expected: d, got: law.dim() });
                }
                InitDraw::Law(IncrementSampler::new(law, 1.0, samp)?)
            }
            InitSpec::Limit => InitDraw::Limit(limit_terms(x1, cfg, bias_grid)?),
        };
        Ok(Simulator { b: cfg.b, c: cfg.c, k0, dim: d, x1: x1.clone(), noise, init: draw, init_spec: init.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn first_epoch(&self) -> i64 {
        self.k0
    }

    pub fn noise_meta(&self) -> &SamplerMeta {
        self.noise.meta()
    }

    /// Series terms used for a limit-law start.
    pub fn limit_terms(&self) -> Option<usize> {
        match self.init {
            InitDraw::Limit(k) => Some(k),
            _ => None,
        }
    }

    fn config(&self) -> OUConfig {
        OUConfig { b: self.b, c: self.c, t0: 0.0, horizon: 1.0 }
    }

    fn draw_init<R: rand::Rng>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.init {
            InitDraw::Fixed(v) => out.copy_from_slice(v),
            InitDraw::Law(s) => s.draw(rng, out),
            InitDraw::Limit(k) => {
                out.iter_mut().for_each(|v| *v = 0.0);
                let mut dx = vec![0.0; self.dim];
                let mut w = 1.0 / self.b;
                for _ in 0..*k {
                    self.noise.draw(rng, &mut dx);
                    for a in 0..self.dim {
                        out[a] += w * dx[a];
                    }
                    w /= self.b;
                }
            }
        }
    }

    /// Full path `index` of run `seed` over `steps` epochs.
    pub fn path(&self, seed: u64, index: u64, steps: usize) -> OUPath {
        let d = self.dim;
        let mut rng = stream_rng(seed, index);
        let mut states = vec![0.0; (steps + 1) * d];
        let mut incs = vec![0.0; steps * d];
        self.draw_init(&mut rng, &mut states[..d]);
        for j in 0..steps {
            self.noise.draw(&mut rng, &mut incs[j * d..(j + 1) * d]);
            for a in 0..d {
                states[(j + 1) * d + a] = (states[j * d + a] + incs[j * d + a]) / self.b;
            }
        }
        OUPath { dim: d, b: self.b, c: self.c, k0: self.k0, states, increments: incs, seed, index }
    }

    /// Append the states at step offsets `record` of paths `paths` to `out[r]`.
    pub fn run_range(&self, seed: u64, paths: Range<u64>, record: &[usize], out: &mut [Vec<f64>]) {
        let d = self.dim;
        let last = record.iter().copied().max().unwrap_or(0);
        let mut z = vec![0.0; d];
        let mut dx = vec![0.0; d];
        for i in paths {
            let mut rng = stream_rng(seed, i);
            self.draw_init(&mut rng, &mut z);
            for step in 0..=last {
                if step > 0 {
                    self.noise.draw(&mut rng, &mut dx);
                    for a in 0..d {
                        z[a] = (z[a] + dx[a]) / self.b;
                    }
                }
                for (r, &s) in record.iter().enumerate() {
                    if s == step {
                        out[r].extend_from_slice(&z);
                    }
                }
            }
        }
    }

    /// Bound on `|φ_{Z}(z) - exp(L(z))|` for the state `steps` epochs after the start.
    pub fn bias(&self, z: &[f64], steps: usize) -> Result<f64> {
        let cfg = self.config();
        let y = scale(z, powi(self.b, -(steps as i32)));
        let grow = |w: f64| w * exp(w);
        match &self.init {
            InitDraw::Limit(k) => {
                let y = scale(&y, powi(self.b, -(*k as i32)));
                let w = limit_cumulant(&self.x1, &cfg, &y, EVAL_TOL)?;
                Ok(grow(w.value.norm() + w.err))
            }
            _ => {
                let w = limit_cumulant(&self.x1, &cfg, &y, EVAL_TOL)?;
                let wn = w.value.norm() + w.err;
                let m = match &self.init {
                    InitDraw::Fixed(v) => abs(dot(&y, v)),
                    InitDraw::Law(_) => match &self.init_spec {
                        InitSpec::Law { law } => {
                            let c = cumulant_tol(law, &y, EVAL_TOL)?;
                            c.value.norm() + c.err
                        }
                        _ => unreachable!(),
                    },
                    InitDraw::Limit(_) => unreachable!(),
                };
                Ok((m + wn) * exp(wn))
            }
        }
    }
}

/// Smallest `K` with `max_z |L(b^{-K} z)| <= LIMIT_TAIL` over `grid`.
fn limit_terms(x1: &LevyTriplet, cfg: &OUConfig, grid: &[Vec<f64>]) -> Result<usize> {
    require_log_moment(x1, 1)?;
    let mut f = 1.0;
    for k in 0..=MAX_LIMIT_TERMS {
        let mut worst = 0.0f64;
        for z in grid {
            let v = limit_cumulant(x1, cfg, &scale(z, f), EVAL_TOL)?;
            worst = worst.max(v.value.norm() + v.err);
        }
        if worst <= LIMIT_TAIL {
            return Ok(k);
        }
        f /= cfg.b;
    }
    Err(Error::Tolerance { achieved: f64::INFINITY, requested: LIMIT_TAIL })
}

/// Produces ensembles of recorded states; implementations may parallelize
/// over paths but must preserve path order.
pub trait Runner {
    /// For each offset in `record`, the row-major states of paths `0..n`.
    fn run(&self, sim: &Simulator, seed: u64, n: u64, record: &[usize]) -> Vec<Vec<f64>>;
}

/// Runs all paths on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Sequential {
    pub fn run_states(&self, sim: &Simulator, seed: u64, n: u64, record: &[usize]) -> Vec<Vec<f64>> {
        self.run(sim, seed, n, record)
    }
}

impl Runner for Sequential {
    fn run(&self, sim: &Simulator, seed: u64, n: u64, record: &[usize]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = record.iter().map(|_| Vec::with_capacity(n as usize * sim.dim())).collect();
        sim.run_range(seed, 0..n, record, &mut out);
        out
    }
}

/// Maximum deviation of an ECF from a target, against radius plus bias.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EcfCheck {
    pub label: String,
    pub max_deviation: f64,
    /// Largest `deviation - threshold`; negative when passing.
    pub max_excess: f64,
    pub radius: f64,
    pub max_bias: f64,
    pub passed: bool,
}

fn check(label: String, dev: &[f64], radius: f64, bias: &[f64]) -> EcfCheck {
    let mut out =
        EcfCheck { label, max_deviation: 0.0, max_excess: f64::NEG_INFINITY, radius, max_bias: 0.0, passed: true };
    for (i, d) in dev.iter().enumerate() {
        out.max_deviation = out.max_deviation.max(*d);
        out.max_bias = out.max_bias.max(bias[i]);
        out.max_excess = out.max_excess.max(d - radius - bias[i]);
    }
    out.passed = out.max_excess <= 0.0;
    out
}

fn ecf_values(samples: &[f64], dim: usize, grid: &[Vec<f64>]) -> Result<(Vec<Complex64>, f64)> {
    let e = ecf(samples, dim, grid, ECF_Q)?;
    Ok((e.values, e.radius))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InitRun {
    pub init: String,
    pub seed: u64,
    pub limit_terms: Option<usize>,
    pub terminal: EcfCheck,
    /// Intermediate epochs, checked only for a limit-law start.
    pub stationarity: Vec<EcfCheck>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LimitReport {
    pub n: u64,
    pub steps: usize,
    pub radius: f64,
    pub runs: Vec<InitRun>,
    /// Terminal ECFs of the two starts against each other.
    pub agreement: EcfCheck,
    pub passed: bool,
}

/// Offsets `round(steps * j / 6)`, `j = 1..=5`.
fn intermediate(steps: usize) -> Vec<usize> {
    (1..=5).map(|j| (steps * j + 3) / 6).collect()
}

/// Compare terminal ECFs after `steps` epochs from two starts with the limit law.
#[allow(clippy::too_many_arguments)]
pub fn validate_limit(
    x1: &LevyTriplet,
    cfg: &OUConfig,
    inits: [&InitSpec; 2],
    n: u64,
    steps: usize,
    grid: &[Vec<f64>],
    seed: u64,
    samp: &SamplerConfig,
    runner: &dyn Runner,
) -> Result<LimitReport> {
    cfg.check()?;
    require_log_moment(x1, 1)?;
    if n < 2 {
        return Err(invalid_arg("at least two paths are needed"));
    }
    let d = x1.dim();
    let target: Vec<Complex64> =
        grid.iter().map(|z| limit_cumulant(x1, cfg, z, EVAL_TOL).map(|v| v.value.exp())).collect::<Result<_>>()?;
    let mut runs = Vec::new();
    let mut terminals = Vec::new();
    let mut biases = Vec::new();
    let mut radius = 0.0;
    for (r, init) in inits.iter().enumerate() {
        let sim = Simulator::new(x1, cfg, init, cfg.first_epoch(), grid, samp)?;
        let run_seed = seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut record = vec![steps];
        if matches!(init, InitSpec::Limit) {
            record.extend(intermediate(steps));
        }
        let states = runner.run(&sim, run_seed, n, &record);
        let mut checks = Vec::new();
        for (i, &off) in record.iter().enumerate() {
            let (vals, rad) = ecf_values(&states[i], d, grid)?;
            radius = rad;
            let bias: Vec<f64> = grid.iter().map(|z| sim.bias(z, off)).collect::<Result<_>>()?;
            let dev: Vec<f64> = vals.iter().zip(&target).map(|(a, b)| (a - b).norm()).collect();
            checks.push(check(format!("{} start, step {off}", init.label()), &dev, rad, &bias));
            if i == 0 {
                terminals.push(vals);
                biases.push(bias);
            }
        }
        let terminal = checks.remove(0);
        runs.push(InitRun { init: String::from(init.label()), seed: run_seed, limit_terms: sim.limit_terms(), terminal, stationarity: checks });
    }
    let dev: Vec<f64> = terminals[0].iter().zip(&terminals[1]).map(|(a, b)| (a - b).norm()).collect();
    let bias: Vec<f64> = biases[0].iter().zip(&biases[1]).map(|(a, b)| radius + a + b).collect();
    let agreement = check(String::from("terminal agreement"), &dev, radius, &bias);
    let passed = agreement.passed && runs.iter().all(|r| r.terminal.passed && r.stationarity.iter().all(|c| c.passed));
    Ok(LimitReport { n, steps, radius, runs, agreement, passed })
}

/// Times and pairs tested for invariance under the shift `1/c`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SemiStationarySpec {
    pub times: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    /// Marginal grid; joint checks use `(z, z)` and `(z, -z)`.
    pub grid: Vec<Vec<f64>>,
    /// Epochs run before time 0.
    pub warmup: usize,
}

impl SemiStationarySpec {
    /// Times and pairs placed off the epoch grid of `c`.
    pub fn standard(c: f64, grid: Vec<Vec<f64>>) -> Self {
        SemiStationarySpec {
            times: vec![0.15 / c, 0.6 / c, 1.35 / c, 2.2 / c],
            pairs: vec![(0.0, 0.5 / c), (0.6 / c, 1.6 / c), (0.25 / c, 2.75 / c)],
            grid,
            warmup: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SemiStationaryReport {
    pub n: u64,
    pub period: f64,
    pub limit_terms: Option<usize>,
    pub marginal: Vec<EcfCheck>,
    pub joint: Vec<EcfCheck>,
    /// Joint checks at the half period; at least one should fail.
    pub half_period: Vec<EcfCheck>,
    pub negative_control_detected: bool,
    pub passed: bool,
}

/// Simulate the semi-stationary solution on `[0, horizon]` and test its
/// finite-dimensional laws for period `1/c`.
#[allow(clippy::too_many_arguments)]
pub fn semistationary(
    x1: &LevyTriplet,
    cfg: &OUConfig,
    spec: &SemiStationarySpec,
    n: u64,
    seed: u64,
    samp: &SamplerConfig,
    runner: &dyn Runner,
) -> Result<SemiStationaryReport> {
    cfg.check()?;
    require_log_moment(x1, 1)?;
    let d = x1.dim();
    let p = 1.0 / cfg.c;
    let k0 = -(spec.warmup as i64);
    let sim = Simulator::new(x1, cfg, &InitSpec::Limit, k0, &spec.grid, samp)?;
    let last = cfg.epoch(cfg.horizon);
    let mut epochs: Vec<i64> = Vec::new();
    let mut slot = |t: f64| -> Result<usize> {
        if t < 0.0 {
            return Err(invalid_arg("times must be nonnegative"));
        }
        let k = cfg.epoch(t);
        if k > last {
            return Err(invalid_arg(format!("time {t} beyond the horizon")));
        }
        Ok(match epochs.iter().position(|e| *e == k) {
            Some(i) => i,
            None => {
                epochs.push(k);
                epochs.len() - 1
            }
        })
    };
    let mut marg_idx = Vec::new();
    for &t in &spec.times {
        marg_idx.push((t, slot(t)?, slot(t + p)?));
    }
    let mut joint_idx = Vec::new();
    for &(s, t) in &spec.pairs {
        joint_idx.push((s, t, slot(s)?, slot(t)?, slot(s + p)?, slot(t + p)?, slot(s + 0.5 * p)?, slot(t + 0.5 * p)?));
    }
    let record: Vec<usize> = epochs.iter().map(|k| (k - k0) as usize).collect();
    let states = runner.run(&sim, seed, n, &record);
    let bias_of = |z: &[f64], k: i64| sim.bias(z, (k - k0) as usize);

    let mut marginal = Vec::new();
    for (t, a, b) in marg_idx {
        let (ea, rad) = ecf_values(&states[a], d, &spec.grid)?;
        let (eb, _) = ecf_values(&states[b], d, &spec.grid)?;
        let dev: Vec<f64> = ea.iter().zip(&eb).map(|(x, y)| (x - y).norm()).collect();
        let bias: Vec<f64> = spec
            .grid
            .iter()
            .map(|z| Ok(rad + bias_of(z, epochs[a])? + bias_of(z, epochs[b])?))
            .collect::<Result<_>>()?;
        marginal.push(check(format!("marginal t={t}"), &dev, rad, &bias));
    }

    let jgrid: Vec<Vec<f64>> = spec
        .grid
        .iter()
        .filter(|z| norm(z) > 0.0)
        .flat_map(|z| {
            let mut p1 = z.clone();
            p1.extend_from_slice(z);
            let mut p2 = z.clone();
            p2.extend(z.iter().map(|v| -v));
            [p1, p2]
        })
        .collect();
    let pair = |i: usize, j: usize| -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * states[i].len());
        for (x, y) in states[i].chunks_exact(d).zip(states[j].chunks_exact(d)) {
            out.extend_from_slice(x);
            out.extend_from_slice(y);
        }
        out
    };
    // Each marginal of a joint point has bias at most that of its larger component.
    let jbias = |i: usize, j: usize| -> Result<Vec<f64>> {
        jgrid
            .iter()
            .map(|z| {
                let zz = scale(&z[..d], 2.0);
                Ok(bias_of(&zz, epochs[i])?.max(bias_of(&zz, epochs[j])?))
            })
            .collect()
    };
    let mut joint = Vec::new();
    let mut half = Vec::new();
    for (s, t, a, b, a1, b1, ah, bh) in joint_idx {
        let (e0, rad) = ecf_values(&pair(a, b), 2 * d, &jgrid)?;
        let (e1, _) = ecf_values(&pair(a1, b1), 2 * d, &jgrid)?;
        let (eh, _) = ecf_values(&pair(ah, bh), 2 * d, &jgrid)?;
        let b0 = jbias(a, b)?;
        let bias1: Vec<f64> = b0.iter().zip(jbias(a1, b1)?).map(|(x, y)| rad + x + y).collect();
        let biash: Vec<f64> = b0.iter().zip(jbias(ah, bh)?).map(|(x, y)| rad + x + y).collect();
        let dev1: Vec<f64> = e0.iter().zip(&e1).map(|(x, y)| (x - y).norm()).collect();
        let devh: Vec<f64> = e0.iter().zip(&eh).map(|(x, y)| (x - y).norm()).collect();
        joint.push(check(format!("joint ({s}, {t}) shift {p}"), &dev1, rad, &bias1));
        half.push(check(format!("joint ({s}, {t}) shift {}", 0.5 * p), &devh, rad, &biash));
    }
    let negative_control_detected = half.iter().any(|c| !c.passed);
    let passed = marginal.iter().all(|c| c.passed) && joint.iter().all(|c| c.passed);
    Ok(SemiStationaryReport {
        n,
        period: p,
        limit_terms: sim.limit_terms(),
        marginal,
        joint,
        half_period: half,
        negative_control_detected,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DivergencePoint {
    pub t: f64,
    pub estimate: f64,
    pub within_bound: bool,
    /// `1 - estimate >= (1 - bound)/2 - radius`.
    pub away_from_one: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DivergenceReport {
    pub z0: Vec<f64>,
    /// `|μ̂(z0)|^{1/c}`.
    pub bound: f64,
    pub radius: f64,
    pub points: Vec<DivergencePoint>,
    pub passed: bool,
}

/// Estimate `|E exp(i<b z0, Z_t - Z_{t-1/c}>)|` from a zero start at `t0`.
#[allow(clippy::too_many_arguments)]
pub fn divergence_diagnostic(
    x1: &LevyTriplet,
    cfg: &OUConfig,
    z0: &[f64],
    times: &[f64],
    n: u64,
    seed: u64,
    samp: &SamplerConfig,
    runner: &dyn Runner,
) -> Result<DivergenceReport> {
    cfg.check()?;
    if x1.is_degenerate() {
        return Err(domain("the driving law is a point mass"));
    }
    let d = x1.dim();
    let c0 = cumulant_tol(x1, z0, EVAL_TOL)?;
    let bound = exp(c0.value.re / cfg.c);
    if bound >= 1.0 - 1e-12 {
        return Err(invalid_arg("|μ̂(z0)| = 1; choose another z0"));
    }
    let k0 = cfg.first_epoch();
    let sim = Simulator::new(x1, cfg, &InitSpec::Zero, k0, &[], samp)?;
    let mut record = Vec::new();
    for &t in times {
        let k = cfg.epoch(t);
        if k - 1 < k0 {
            return Err(invalid_arg(format!("time {t} is within one epoch of t0")));
        }
        record.push((k - k0) as usize);
        record.push((k - 1 - k0) as usize);
    }
    let states = runner.run(&sim, seed, n, &record);
    let bz = scale(z0, cfg.b);
    let radius = crate::idist::ecf_radius(n as usize, ECF_Q);
    let mut points = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let (s, c) = states[2 * i]
            .chunks_exact(d)
            .zip(states[2 * i + 1].chunks_exact(d))
            .map(|(a, b)| {
                let u: f64 = (0..d).map(|j| bz[j] * (a[j] - b[j])).sum();
                (crate::fmath::sin(u), crate::fmath::cos(u))
            })
            .fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        let estimate = Complex64::new(c / n as f64, s / n as f64).norm();
        points.push(DivergencePoint {
            t,
            estimate,
            within_bound: estimate <= bound + radius,
            away_from_one: 1.0 - estimate >= 0.5 * (1.0 - bound) - radius,
        });
    }
    let passed = points.iter().all(|p| p.within_bound && p.away_from_one);
    Ok(DivergenceReport { z0: z0.to_vec(), bound, radius, points, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_recursion() {
        let cfg = OUConfig::new(2.0, 1.0, 0.0, 2.0).unwrap();
        let p = solve_path(&[0.0], &[1.0, 0.0], 0, &cfg).unwrap();
        assert_eq!(p.state(1).unwrap(), &[0.5]);
        assert_eq!(p.state(2).unwrap(), &[0.25]);
        assert_eq!(p.state_at(0.999).unwrap(), &[0.0]);
        assert_eq!(verify_langevin(&p).max_residual, 0.0);
    }

    #[test]
    fn epoch_ties_are_right_continuous() {
        assert_eq!(epoch_of(3.0, 1.0 / 3.0), 1);
        assert_eq!(epoch_of(10.0, 0.3), 3);
        assert_eq!(epoch_of(2.0, 0.3), 0);
        assert_eq!(epoch_of(2.0, -0.1), -1);
    }

    #[test]
    fn gaussian_limit_variance() {
        let g = LevyTriplet::gaussian(vec![1.0]);
        let cfg = OUConfig::new(2.0, 1.0, 0.0, 1.0).unwrap();
        let v = limit_cumulant(&g, &cfg, &[1.0], 1e-12).unwrap();
        assert!((v.value.re + 1.0 / 6.0).abs() < 1e-12);
    }
}
