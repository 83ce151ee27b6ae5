//! Radial Lévy densities `weight * h(s / scale) / scale ds` along one direction.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::fmath::{abs, exp, ln, powf};
use crate::special::binom_f64;

/// Monotone profile `k(r)` used in the construction `h(r) = (k(r) - k(b r)) / r`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum KProfile {
    /// `c * exp(-rate * r)`.
    Exponential { c: f64, rate: f64 },
    /// `c * 1{r < cutoff}`.
    Indicator { c: f64, cutoff: f64 },
    /// `c` for all `r`.
    Constant { c: f64 },
    /// `initial` on `(0, r_1)`, then `v_i` on `[r_i, r_{i+1})`.
    Steps { initial: f64, steps: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum RadialProfile {
    /// `c * s^(-1-alpha) * exp(-lambda * s)`.
    TemperedStable { c: f64, alpha: f64, lambda: f64 },
    /// `(k(s) - k(b s)) / s`.
    KDifference { k: KProfile, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RadialDensity {
    /// Unit vector.
    pub direction: Vec<f64>,
    pub weight: f64,
    pub scale: f64,
    pub profile: RadialProfile,
}

impl KProfile {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            KProfile::Exponential { c, rate } => c * exp(-rate * r),
            KProfile::Indicator { c, cutoff } => {
                if r < *cutoff {
                    *c
                } else {
                    0.0
                }
            }
            KProfile::Constant { c } => *c,
            KProfile::Steps { initial, steps } => {
                let mut v = *initial;
                for (ri, vi) in steps {
                    if r >= *ri {
                        v = *vi;
                    }
                }
                v
            }
        }
    }

    /// Nonnegative, finite and nonincreasing.
    pub fn check(&self) -> core::result::Result<(), String> {
        let ok = match self {
            KProfile::Exponential { c, rate } => c.is_finite() && rate.is_finite() && *c >= 0.0 && *rate >= 0.0,
            KProfile::Indicator { c, cutoff } => c.is_finite() && *c >= 0.0 && *cutoff > 0.0 && cutoff.is_finite(),
            KProfile::Constant { c } => c.is_finite() && *c >= 0.0,
            KProfile::Steps { initial, steps } => {
                let mut prev_v = *initial;
                let mut prev_r = 0.0;
                let mut ok = initial.is_finite() && *initial >= 0.0;
                for (r, v) in steps {
                    ok &= r.is_finite() && v.is_finite() && *r > prev_r && *v <= prev_v && *v >= 0.0;
                    prev_v = *v;
                    prev_r = *r;
                }
                ok
            }
        };
        if ok {
            Ok(())
        } else {
            Err(String::from("k must be finite, nonnegative and nonincreasing"))
        }
    }

    fn jumps(&self) -> Vec<f64> {
        match self {
            KProfile::Indicator { cutoff, .. } => alloc::vec![*cutoff],
            KProfile::Steps { steps, .. } => steps.iter().map(|(r, _)| *r).collect(),
            _ => Vec::new(),
        }
    }

    /// `[lo, hi]` outside of which `k(s) = k(b s)` for every `b > 1`.
    fn active_range(&self, b: f64) -> (f64, f64) {
        match self {
            KProfile::Exponential { rate, .. } if *rate > 0.0 => (0.0, f64::INFINITY),
            KProfile::Exponential { .. } | KProfile::Constant { .. } => (f64::INFINITY, f64::INFINITY),
            _ => {
                let j = self.jumps();
                if j.is_empty() {
                    (f64::INFINITY, f64::INFINITY)
                } else {
                    (j[0] / b, *j.last().unwrap())
                }
            }
        }
    }
}

/// Upper bound of `∫_R^∞ s^g (ln s)^j e^{-λ s} ds` for `R > 1`.
pub(crate) fn power_exp_tail(r: f64, g: f64, lambda: f64, j: u32) -> f64 {
    let lr = ln(r);
    let delta = if j == 0 { 0.0 } else { j as f64 / lr };
    let pre = if j == 0 { 1.0 } else { powf(lr, j as f64) * powf(r, -delta) };
    let g = g + delta;
    let base = if lambda > 0.0 {
        let k = lambda - g.max(0.0) / r;
        if k <= 0.0 {
            return f64::INFINITY;
        }
        powf(r, g) * exp(-lambda * r) / k
    } else if g < -1.0 {
        powf(r, g + 1.0) / (-g - 1.0)
    } else {
        return f64::INFINITY;
    };
    pre * base
}

impl RadialProfile {
    pub fn check(&self) -> core::result::Result<(), String> {
        match self {
            RadialProfile::TemperedStable { c, alpha, lambda } => {
                if !(c.is_finite() && *c >= 0.0 && alpha.is_finite() && lambda.is_finite() && *lambda >= 0.0) {
                    return Err(String::from("tempered-stable parameters must be finite, c >= 0, lambda >= 0"));
                }
                if *alpha >= 2.0 {
                    return Err(String::from("tempered-stable alpha must be < 2 (∫ min(1,|x|^2) ν diverges)"));
                }
                if *lambda == 0.0 && *alpha <= 0.0 {
                    return Err(String::from("untempered stable density needs alpha > 0 (infinite mass away from 0)"));
                }
                Ok(())
            }
            RadialProfile::KDifference { k, b } => {
                if !(b.is_finite() && *b > 1.0) {
                    return Err(String::from("k-difference span must be > 1"));
                }
                k.check()
            }
        }
    }

    /// Density at `s > 0`.
    pub fn density(&self, s: f64) -> f64 {
        match self {
            RadialProfile::TemperedStable { c, alpha, lambda } => c * powf(s, -1.0 - alpha) * exp(-lambda * s),
            RadialProfile::KDifference { k, b } => (k.value(s) - k.value(b * s)) / s,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::TemperedStable { .. } => Vec::new(),
            RadialProfile::KDifference { k, b } => {
                let mut v = k.jumps();
                let extra: Vec<f64> = v.iter().map(|r| r / b).collect();
                v.extend(extra);
                v
            }
        }
    }

    /// Bound on `∫_0^ε s^p h(s) ds`.
    fn small_moment(&self, eps: f64, p: f64) -> f64 {
        match self {
            RadialProfile::TemperedStable { c, alpha, .. } => {
                if p > *alpha {
                    c * powf(eps, p - alpha) / (p - alpha)
                } else {
                    f64::INFINITY
                }
            }
            RadialProfile::KDifference { k, b } => match k {
                KProfile::Exponential { c, rate } => c * rate * (b - 1.0) * powf(eps, p + 1.0) / (p + 1.0),
                _ => {
                    if eps <= k.active_range(*b).0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
            },
        }
    }

    /// Bound on `∫_R^∞ s^σ (ln s)^j h(s) ds`, `R > 1`.
    fn large_moment(&self, r: f64, sigma: f64, j: u32) -> f64 {
        match self {
            RadialProfile::TemperedStable { c, alpha, lambda } => c * power_exp_tail(r, sigma - 1.0 - alpha, *lambda, j),
            RadialProfile::KDifference { k, b } => match k {
                KProfile::Exponential { c, rate } => c * power_exp_tail(r, sigma - 1.0, *rate, j),
                _ => {
                    if r >= k.active_range(*b).1 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
            },
        }
    }

    fn is_null(&self) -> bool {
        match self {
            RadialProfile::TemperedStable { c, .. } => *c == 0.0,
            RadialProfile::KDifference { k, b } => k.active_range(*b).0.is_infinite(),
        }
    }
}

impl RadialDensity {
    pub fn tempered_stable(direction: Vec<f64>, c: f64, alpha: f64, lambda: f64) -> Self {
        RadialDensity { direction, weight: 1.0, scale: 1.0, profile: RadialProfile::TemperedStable { c, alpha, lambda } }
    }

    /// Density (per unit radius) at `s`.
    pub fn density(&self, s: f64) -> f64 {
        self.weight * self.profile.density(s / self.scale) / self.scale
    }

    pub fn is_null(&self) -> bool {
        self.profile.is_null()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.profile.breakpoints().into_iter().map(|r| r * self.scale).collect()
    }

    /// Bound on `∫_0^ε s^p ν_r(ds)`.
    pub(crate) fn small_moment(&self, eps: f64, p: f64) -> f64 {
        self.weight * powf(self.scale, p) * self.profile.small_moment(eps / self.scale, p)
    }

    /// Bound on `∫_R^∞ s^σ P(ln s) ν_r(ds)` for a polynomial `P` with
    /// nonnegative coefficients.
    pub(crate) fn large_moment(&self, r: f64, sigma: f64, poly: &[f64]) -> f64 {
        let u = r / self.scale;
        if u <= 1.0 {
            return f64::INFINITY;
        }
        let ls = abs(ln(self.scale));
        let mut tot = 0.0;
        for (j, cj) in poly.iter().enumerate() {
            if *cj == 0.0 {
                continue;
            }
            // (ln scale + ln u)^j <= Σ_i C(j,i) |ln scale|^(j-i) (ln u)^i
            for i in 0..=j {
                let w = cj * binom_f64(j as f64, i as u32) * powf(ls, (j - i) as f64);
                if w == 0.0 {
                    continue;
                }
                tot += w * self.profile.large_moment(u, sigma, i as u32);
            }
        }
        self.weight * powf(self.scale, sigma) * tot
    }
}
