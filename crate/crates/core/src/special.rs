//! Special functions and exact combinatorics.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fmath::{abs, cos, powf, sin};

/// Exact binomial coefficient `C(n, k)` by the multiplicative recurrence.
/// Returns `None` on `u128` overflow.
pub fn binom_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(n, k)` as a float for real `n >= k - 1` via the product formula.
pub fn binom_f64(n: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i as f64) / (i as f64 + 1.0);
    }
    acc
}

/// `S_j(q) = Σ_{n≥0} n^j q^n` for `j = 0..=deg`, `0 <= q < 1`.
pub fn poly_geom_sums(q: f64, deg: usize) -> Vec<f64> {
    let mut s = vec![0.0; deg + 1];
    s[0] = 1.0 / (1.0 - q);
    let f = q / (1.0 - q);
    for j in 1..=deg {
        let mut acc = 0.0;
        for (i, si) in s.iter().enumerate().take(j) {
            acc += binom_f64(j as f64, i as u32) * si;
        }
        s[j] = f * acc;
    }
    s
}

/// Coefficients (in `n`) of `Σ_j c_j (a + b n)^j`.
pub fn poly_compose_linear(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len().max(1)];
    for (j, cj) in c.iter().enumerate() {
        if *cj == 0.0 {
            continue;
        }
        let mut bi = 1.0;
        for i in 0..=j {
            out[i] += cj * binom_f64(j as f64, i as u32) * powf(a, (j - i) as f64) * bi;
            bi *= b;
        }
    }
    out
}

/// `Σ_i c_i x^i`.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

const BERNOULLI_2J: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (a + n)^{-s}` for `s > 1`, `a > 0`
/// (Euler–Maclaurin with eight Bernoulli corrections).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let n = (20.0 + s - a).max(0.0) as usize + 1;
    let mut sum = 0.0;
    for k in 0..n {
        sum += powf(a + k as f64, -s);
    }
    let x = a + n as f64;
    sum += powf(x, 1.0 - s) / (s - 1.0) + 0.5 * powf(x, -s);
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut xp = powf(x, -s - 1.0);
    for (j, b2j) in BERNOULLI_2J.iter().enumerate() {
        let term = b2j / fact * rising * xp;
        sum += term;
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        xp /= x * x;
        if abs(term) < 1e-18 * abs(sum) {
            break;
        }
    }
    sum
}

/// `e^{iu} - 1 - iu`, accurate for small `u`.
pub fn expi_m1_mi(u: f64) -> Complex64 {
    let h = sin(0.5 * u);
    let re = -2.0 * h * h;
    let im = if abs(u) < 0.1 {
        let u2 = u * u;
        // sin u - u = -u^3/6 (1 - u^2/20 (1 - u^2/42 (1 - u^2/72)))
        -u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    } else {
        sin(u) - u
    };
    Complex64::new(re, im)
}

/// `e^{iu}`.
pub fn expi(u: f64) -> Complex64 {
    Complex64::new(cos(u), sin(u))
}
