//! Exact and approximate sampling of `X_t` for a Lévy process with `X_1 ~ μ`.
//!
//! Finite-activity measures are sampled exactly as compound Poisson plus
//! Gaussian plus drift. Infinite-activity lattices replace jumps below a
//! threshold `ε` by a Gaussian with the same covariance; `ε` is chosen so
//! that the third-moment ratio `t ∫_{|x|<ε} |x|^3 ν / (t σ_ε^2)^{3/2}` is
//! below [`SamplerConfig::ratio`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::engine::MAX_LN_RADIUS;
use super::mass::{lower_tail_bound, upper_tail_bound, MassLaw};
use super::measure::{LevyComponent, ScaleLattice};
use super::triplet::{lattice_pivot, LevyTriplet};
use crate::error::{invalid_arg, Error, Result};
use crate::fmath::{abs, ln, powf, sq_over_one_plus_sq, sqrt};
use crate::linalg::sym_sqrt;

/// Samples per RNG stream.
pub const CHUNK: usize = 4096;

/// Deterministic RNG for stream `stream` of run `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SamplerConfig {
    /// Largest acceptable expected number of jumps per draw.
    pub max_expected_jumps: f64,
    /// Third-moment ratio threshold for the small-jump Gaussian.
    pub ratio: f64,
    /// Largest jump table.
    pub max_table: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { max_expected_jumps: 1e6, ratio: 0.01, max_table: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Scheme {
    Exact,
    SmallJumpGaussian { eps: f64, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SamplerMeta {
    pub scheme: Scheme,
    /// Expected number of jumps per draw.
    pub expected_jumps: f64,
    /// Upper bound on the jump mass left out of the table (per unit time).
    pub truncated_mass: f64,
    pub table_size: usize,
}

/// Sampler for the increment `X_t`.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    dim: usize,
    mean: Vec<f64>,
    gauss_sqrt: Option<Vec<f64>>,
    jumps: Vec<f64>,
    cdf: Vec<f64>,
    poisson: Option<Poisson<f64>>,
    meta: SamplerMeta,
}

struct Table {
    points: Vec<f64>,
    weights: Vec<f64>,
    truncated: f64,
}

impl Table {
    fn push(&mut self, x: &[f64], w: f64) {
        if w > 0.0 {
            self.points.extend_from_slice(x);
            self.weights.push(w);
        }
    }
}

fn point(l: &ScaleLattice, k: i64) -> Vec<f64> {
    let r = l.radius(k);
    l.direction.iter().map(|d| d * r).collect()
}

/// Index of the first lattice point with radius `>= eps` (`eps > 0`).
fn first_at_least(l: &ScaleLattice, eps: f64) -> i64 {
    let (ln_a, lb) = (ln(l.anchor), ln(l.base));
    let le = ln(eps);
    let mut k = ((le - ln_a) / lb) as i64;
    while ln_a + (k - 1) as f64 * lb >= le {
        k -= 1;
    }
    while ln_a + k as f64 * lb < le {
        k += 1;
    }
    k
}

fn lower_is_finite_mass(l: &ScaleLattice, m: &MassLaw) -> bool {
    let p = lattice_pivot(l);
    let (ln_a, lb) = (ln(l.anchor), ln(l.base));
    m.pieces.iter().filter(|pc| pc.lo.is_none()).all(|pc| {
        let from = pc.hi.map_or(p, |h| h.min(p));
        pc.terms.iter().all(|t| lower_tail_bound(t, from, None, ln_a, lb, 0.0).is_finite())
    })
}

/// `(Σ m r^2, Σ m r^3, Σ m r^3/(1+r^2))` over lattice points with `r < eps`.
fn small_moments(l: &ScaleLattice, m: &MassLaw, eps: f64) -> Result<(f64, f64, f64)> {
    let (ln_a, lb) = (ln(l.anchor), ln(l.base));
    let mut k = first_at_least(l, eps) - 1;
    let (mut m2, mut m3, mut d3) = (0.0, 0.0, 0.0);
    let mut steps = 0;
    loop {
        let mut bound = 0.0;
        for p in m.pieces.iter().filter(|p| p.lo.is_none_or(|lo| lo <= k)) {
            let from = p.hi.map_or(k, |h| h.min(k));
            for t in &p.terms {
                bound += lower_tail_bound(t, from, p.lo, ln_a, lb, 2.0);
            }
        }
        if bound <= 1e-16 * m2 || bound == 0.0 {
            return Ok((m2, m3, d3));
        }
        let Some(p) = m.pieces.iter().rev().find(|p| p.lo.is_none_or(|lo| lo <= k)) else {
            return Ok((m2, m3, d3));
        };
        let idx = p.hi.map_or(k, |h| h.min(k));
        let w = p.value(idx);
        let r = l.radius(idx);
        m2 += w * r * r;
        m3 += w * r * r * r;
        d3 += w * r * sq_over_one_plus_sq(r);
        k = idx - 1;
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Tolerance { achieved: bound, requested: 1e-16 * m2 });
        }
    }
}

/// Table of lattice points with `r >= eps` (all points when `eps == 0`).
fn lattice_table(l: &ScaleLattice, m: &MassLaw, eps: f64, cap: usize, tab: &mut Table) -> Result<()> {
    let (ln_a, lb) = (ln(l.anchor), ln(l.base));
    let start = if eps > 0.0 { first_at_least(l, eps) } else { lattice_pivot(l) };
    let mut acc = 0.0;
    let mut k = start;
    loop {
        let mut bound = 0.0;
        for p in m.pieces.iter().filter(|p| p.hi.is_none_or(|h| h >= k)) {
            let s = p.lo.map_or(k, |lo| lo.max(k));
            for t in &p.terms {
                bound += upper_tail_bound(t, s, p.hi, ln_a, lb, 0.0, &[1.0]);
            }
        }
        if bound == 0.0 || (bound <= 1e-14 * acc && acc > 0.0) {
            tab.truncated += bound;
            break;
        }
        let Some(p) = m.pieces.iter().find(|p| p.hi.is_none_or(|h| h >= k)) else { break };
        let idx = p.lo.map_or(k, |lo| lo.max(k));
        if l.ln_radius(idx) > MAX_LN_RADIUS {
            return Err(Error::Unsupported(format!(
                "jumps beyond radius e^{MAX_LN_RADIUS} carry mass {bound:e}, past floating-point range"
            )));
        }
        let w = p.value(idx);
        acc += w;
        tab.push(&point(l, idx), w);
        k = idx + 1;
        if tab.weights.len() > cap {
            return Err(Error::Tolerance { achieved: bound, requested: 1e-14 * acc });
        }
    }
    if eps > 0.0 {
        return Ok(());
    }
    let mut k = start - 1;
    loop {
        let mut bound = 0.0;
        for p in m.pieces.iter().filter(|p| p.lo.is_none_or(|lo| lo <= k)) {
            let from = p.hi.map_or(k, |h| h.min(k));
            for t in &p.terms {
                bound += lower_tail_bound(t, from, p.lo, ln_a, lb, 0.0);
            }
        }
        if bound == 0.0 || (bound <= 1e-14 * acc && acc > 0.0) {
            tab.truncated += bound;
            break;
        }
        let Some(p) = m.pieces.iter().rev().find(|p| p.lo.is_none_or(|lo| lo <= k)) else { break };
        let idx = p.hi.map_or(k, |h| h.min(k));
        let w = p.value(idx);
        acc += w;
        tab.push(&point(l, idx), w);
        k = idx - 1;
        if tab.weights.len() > cap {
            return Err(Error::Tolerance { achieved: bound, requested: 1e-14 * acc });
        }
    }
    Ok(())
}

impl IncrementSampler {
    pub fn new(t: &LevyTriplet, time: f64, cfg: &SamplerConfig) -> Result<Self> {
        t.ensure_valid()?;
        if !(time.is_finite() && time > 0.0) {
            return Err(invalid_arg("time must be positive"));
        }
        if t.levy.has_radial() {
            return Err(Error::Unsupported(String::from("sampling radial densities")));
        }
        let d = t.dim();
        let lattices: Vec<(&ScaleLattice, MassLaw)> = t
            .levy
            .components
            .iter()
            .filter_map(|c| match c {
                LevyComponent::Lattice(l) => Some((l, l.mass.canonical())),
                _ => None,
            })
            .collect();
        let infinite: Vec<usize> =
            (0..lattices.len()).filter(|&i| !lower_is_finite_mass(lattices[i].0, &lattices[i].1)).collect();

        // Small-jump threshold.
        let mut eps = 0.0;
        let mut ratio = 0.0;
        if !infinite.is_empty() {
            let mut chosen = None;
            let mut e = 1.0;
            for _ in 0..400 {
                let (mut m2, mut m3) = (0.0, 0.0);
                for &i in &infinite {
                    let (a, b, _) = small_moments(lattices[i].0, &lattices[i].1, e)?;
                    m2 += a;
                    m3 += b;
                }
                if m2 > 0.0 {
                    let r = m3 / (powf(m2, 1.5) * sqrt(time));
                    if r <= cfg.ratio {
                        chosen = Some((e, r));
                        break;
                    }
                }
                e *= 0.5;
            }
            let Some((e, r)) = chosen else {
                return Err(Error::Tolerance { achieved: f64::INFINITY, requested: cfg.ratio });
            };
            eps = e;
            ratio = r;
        }

        let mut tab = Table { points: Vec::new(), weights: Vec::new(), truncated: 0.0 };
        for c in &t.levy.components {
            if let LevyComponent::Atoms { atoms } = c {
                for a in atoms {
                    tab.push(&a.x, a.w);
                }
            }
        }
        let mut cov: Vec<f64> = t.gauss.iter().map(|v| v * time).collect();
        let mut mean: Vec<f64> = t.drift.iter().map(|v| v * time).collect();
        for (i, (l, m)) in lattices.iter().enumerate() {
            let e = if infinite.contains(&i) { eps } else { 0.0 };
            lattice_table(l, m, e, cfg.max_table, &mut tab)?;
            if e > 0.0 {
                let (m2, _, d3) = small_moments(l, m, e)?;
                for a in 0..d {
                    mean[a] += time * d3 * l.direction[a];
                    for b in 0..d {
                        cov[a * d + b] += time * m2 * l.direction[a] * l.direction[b];
                    }
                }
            }
        }
        let mut cdf = Vec::with_capacity(tab.weights.len());
        let mut acc = 0.0;
        for (j, w) in tab.weights.iter().enumerate() {
            acc += w;
            cdf.push(acc);
            let x = &tab.points[j * d..(j + 1) * d];
            let r2: f64 = x.iter().map(|v| v * v).sum();
            for a in 0..d {
                mean[a] -= time * w * x[a] / (1.0 + r2);
            }
        }
        let expected = acc * time;
        if expected > cfg.max_expected_jumps {
            return Err(Error::Tolerance { achieved: expected, requested: cfg.max_expected_jumps });
        }
        let poisson = if expected > 0.0 {
            Some(Poisson::new(expected).map_err(|e| invalid_arg(format!("poisson intensity: {e}")))?)
        } else {
            None
        };
        let gauss_sqrt = if cov.iter().any(|v| abs(*v) > 0.0) { Some(sym_sqrt(&cov, d)) } else { None };
        let scheme = if eps > 0.0 { Scheme::SmallJumpGaussian { eps, ratio } } else { Scheme::Exact };
        Ok(IncrementSampler {
            dim: d,
            mean,
            gauss_sqrt,
            jumps: tab.points,
            cdf,
            poisson,
            meta: SamplerMeta { scheme, expected_jumps: expected, truncated_mass: tab.truncated, table_size: tab.weights.len() },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> &SamplerMeta {
        &self.meta
    }

    /// Draw one increment into `out` (length `dim`).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim;
        out.copy_from_slice(&self.mean);
        if let Some(s) = &self.gauss_sqrt {
            let mut g = [0.0f64; 16];
            let mut gv;
            let g: &mut [f64] = if d <= 16 {
                &mut g[..d]
            } else {
                gv = vec![0.0; d];
                &mut gv
            };
            for v in g.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            for a in 0..d {
                let mut acc = 0.0;
                for b in 0..d {
                    acc += s[a * d + b] * g[b];
                }
                out[a] += acc;
            }
        }
        if let Some(p) = &self.poisson {
            let n = p.sample(rng) as u64;
            let total = *self.cdf.last().unwrap();
            for _ in 0..n {
                let u: f64 = rng.random::<f64>() * total;
                let j = self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1);
                for a in 0..d {
                    out[a] += self.jumps[j * d + a];
                }
            }
        }
    }

    /// Fill `out` with `out.len() / dim` draws from stream `(seed, chunk)`.
    pub fn draw_chunk(&self, seed: u64, chunk: u64, out: &mut [f64]) {
        let mut rng = stream_rng(seed, chunk);
        for row in out.chunks_exact_mut(self.dim) {
            self.draw(&mut rng, row);
        }
    }
}

/// Independent draws of `X_t`, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SampleBatch {
    pub dim: usize,
    pub time: f64,
    pub seed: u64,
    pub values: Vec<f64>,
    pub meta: SamplerMeta,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `n` draws of `X_t`; draw `i` uses stream `i / CHUNK` of `seed`.
pub fn sample(t: &LevyTriplet, time: f64, n: usize, seed: u64, cfg: &SamplerConfig) -> Result<SampleBatch> {
    let s = IncrementSampler::new(t, time, cfg)?;
    let d = s.dim();
    let mut values = vec![0.0; n * d];
    for (c, chunk) in values.chunks_mut(CHUNK * d).enumerate() {
        s.draw_chunk(seed, c as u64, chunk);
    }
    Ok(SampleBatch { dim: d, time, seed, values, meta: s.meta.clone() })
}
