//! Exponential-polynomial mass laws on integer indices.
//!
//! A [`MassLaw`] assigns to each integer `k` the value
//! `Σ coef * ratio^k * (k + shift)^(-power)` summed over the terms of the
//! piece containing `k`. Pieces may overlap; [`MassLaw::canonical`] returns
//! an equivalent law with disjoint, sorted pieces.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmath::{abs, exp, ln, powf};
use crate::special::{binom_f64, hurwitz_zeta, poly_compose_linear, poly_geom_sums};

/// `coef * ratio^k * (k + shift)^(-power)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MassTerm {
    pub coef: f64,
    pub ratio: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub power: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub shift: f64,
}

/// Terms active on the index range `lo..=hi` (`None` = unbounded).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MassPiece {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub terms: Vec<MassTerm>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MassLaw {
    pub pieces: Vec<MassPiece>,
}

const SAME_RATIO_REL: f64 = 1e-13;
const DROP_REL: f64 = 1e-12;
const SCAN_CAP: i64 = 4_000_000;

impl MassTerm {
    pub fn new(coef: f64, ratio: f64) -> Self {
        MassTerm { coef, ratio, power: 0.0, shift: 0.0 }
    }

    pub fn value(&self, k: i64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        let kf = k as f64;
        let mut lg = kf * ln(self.ratio);
        if self.power != 0.0 {
            lg -= self.power * ln(kf + self.shift);
        }
        self.coef * exp(lg)
    }

    fn same_shape(&self, o: &MassTerm) -> bool {
        abs(self.ratio - o.ratio) <= SAME_RATIO_REL * self.ratio.max(o.ratio)
            && self.power == o.power
            && (self.power == 0.0 || self.shift == o.shift)
    }

    /// `m(k + n)` as a term in `k`.
    fn shifted(&self, n: i64) -> MassTerm {
        MassTerm {
            coef: self.coef * powf(self.ratio, n as f64),
            ratio: self.ratio,
            power: self.power,
            shift: if self.power == 0.0 { 0.0 } else { self.shift + n as f64 },
        }
    }
}

fn lo_le(a: Option<i64>, b: Option<i64>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x <= y,
    }
}
fn hi_ge(a: Option<i64>, b: Option<i64>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x >= y,
    }
}

impl MassPiece {
    pub fn contains(&self, k: i64) -> bool {
        self.lo.is_none_or(|l| k >= l) && self.hi.is_none_or(|h| k <= h)
    }

    pub fn value(&self, k: i64) -> f64 {
        self.terms.iter().map(|t| t.value(k)).sum()
    }

    fn abs_value(&self, k: i64) -> f64 {
        self.terms.iter().map(|t| abs(t.value(k))).sum()
    }

    pub fn is_point(&self) -> bool {
        matches!((self.lo, self.hi), (Some(a), Some(b)) if a == b)
    }

    pub fn len(&self) -> Option<u64> {
        match (self.lo, self.hi) {
            (Some(a), Some(b)) if b >= a => Some((b - a) as u64 + 1),
            (Some(_), Some(_)) => Some(0),
            _ => None,
        }
    }
}

impl MassLaw {
    pub fn empty() -> Self {
        MassLaw { pieces: Vec::new() }
    }

    /// `weight * ratio^k` on `lo..=hi`.
    pub fn geometric(weight: f64, ratio: f64, lo: Option<i64>, hi: Option<i64>) -> Self {
        MassLaw { pieces: vec![MassPiece { lo, hi, terms: vec![MassTerm::new(weight, ratio)] }] }
    }

    /// `weight * k^(-exponent)` for `k >= lo` (`lo >= 1`).
    pub fn power(weight: f64, exponent: f64, lo: i64) -> Self {
        MassLaw {
            pieces: vec![MassPiece {
                lo: Some(lo),
                hi: None,
                terms: vec![MassTerm { coef: weight, ratio: 1.0, power: exponent, shift: 0.0 }],
            }],
        }
    }

    /// Finitely many point masses `(k, w)`.
    pub fn points(pts: &[(i64, f64)]) -> Self {
        MassLaw {
            pieces: pts
                .iter()
                .map(|&(k, w)| MassPiece { lo: Some(k), hi: Some(k), terms: vec![MassTerm::new(w, 1.0)] })
                .collect(),
        }
    }

    pub fn value(&self, k: i64) -> f64 {
        self.pieces.iter().filter(|p| p.contains(k)).map(|p| p.value(k)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.iter().all(|p| p.terms.is_empty() || p.len() == Some(0))
    }

    /// Structural checks; returns a description of the first problem.
    pub fn check(&self) -> core::result::Result<(), String> {
        for (i, p) in self.pieces.iter().enumerate() {
            if let (Some(a), Some(b)) = (p.lo, p.hi) {
                if a > b {
                    return Err(format!("piece {i}: lo > hi"));
                }
            }
            for t in &p.terms {
                if !(t.coef.is_finite() && t.ratio.is_finite() && t.power.is_finite() && t.shift.is_finite()) {
                    return Err(format!("piece {i}: non-finite term"));
                }
                if t.ratio <= 0.0 {
                    return Err(format!("piece {i}: ratio must be positive"));
                }
                if t.power < 0.0 {
                    return Err(format!("piece {i}: power must be nonnegative"));
                }
                if t.power != 0.0 {
                    match p.lo {
                        Some(l) if l as f64 + t.shift > 0.0 => {}
                        _ => return Err(format!("piece {i}: power term needs lo + shift > 0")),
                    }
                }
            }
        }
        Ok(())
    }

    /// `k ↦ m(k + n)`.
    pub fn shifted(&self, n: i64) -> MassLaw {
        MassLaw {
            pieces: self
                .pieces
                .iter()
                .map(|p| MassPiece {
                    lo: p.lo.map(|l| l - n),
                    hi: p.hi.map(|h| h - n),
                    terms: p.terms.iter().map(|t| t.shifted(n)).collect(),
                })
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> MassLaw {
        let mut out = self.clone();
        for p in &mut out.pieces {
            for t in &mut p.terms {
                t.coef *= c;
            }
        }
        out
    }

    pub fn plus(&self, other: &MassLaw) -> MassLaw {
        let mut out = self.clone();
        out.pieces.extend(other.pieces.iter().cloned());
        out
    }

    /// Smallest index carrying a term (`None` if unbounded below or empty).
    pub fn lowest(&self) -> Option<Option<i64>> {
        let c = self.canonical();
        c.pieces.first().map(|p| p.lo)
    }

    /// Disjoint sorted pieces, like terms merged, zeros and empty intervals dropped.
    pub fn canonical(&self) -> MassLaw {
        let mut cuts: Vec<i64> = Vec::new();
        for p in &self.pieces {
            if p.terms.is_empty() || p.len() == Some(0) {
                continue;
            }
            if let Some(l) = p.lo {
                cuts.push(l);
            }
            if let Some(h) = p.hi {
                cuts.push(h.saturating_add(1));
            }
        }
        cuts.sort_unstable();
        cuts.dedup();
        let mut intervals: Vec<(Option<i64>, Option<i64>)> = Vec::new();
        if cuts.is_empty() {
            intervals.push((None, None));
        } else {
            intervals.push((None, Some(cuts[0] - 1)));
            for w in cuts.windows(2) {
                intervals.push((Some(w[0]), Some(w[1] - 1)));
            }
            intervals.push((Some(*cuts.last().unwrap()), None));
        }
        let mut out: Vec<MassPiece> = Vec::new();
        for (lo, hi) in intervals {
            let mut merged: Vec<(MassTerm, f64)> = Vec::new();
            for p in &self.pieces {
                if p.terms.is_empty() || p.len() == Some(0) {
                    continue;
                }
                if lo_le(p.lo, lo) && hi_ge(p.hi, hi) {
                    for t in &p.terms {
                        let mut t = *t;
                        if t.power == 0.0 {
                            t.shift = 0.0;
                        }
                        if let Some(m) = merged.iter_mut().find(|(m, _)| m.same_shape(&t)) {
                            m.0.coef += t.coef;
                            m.1 = m.1.max(abs(t.coef));
                        } else {
                            merged.push((t, abs(t.coef)));
                        }
                    }
                }
            }
            let mut terms: Vec<MassTerm> =
                merged.into_iter().filter(|(t, scale)| abs(t.coef) > DROP_REL * scale).map(|(t, _)| t).collect();
            if terms.is_empty() {
                continue;
            }
            terms.sort_by(|a, b| a.ratio.total_cmp(&b.ratio).then(a.power.total_cmp(&b.power)).then(a.shift.total_cmp(&b.shift)));
            if let Some(last) = out.last_mut() {
                let adjacent = matches!((last.hi, lo), (Some(h), Some(l)) if h + 1 == l);
                if adjacent && same_terms(&last.terms, &terms) {
                    last.hi = hi;
                    continue;
                }
            }
            out.push(MassPiece { lo, hi, terms });
        }
        MassLaw { pieces: out }
    }

    /// First index with a negative value, if any.
    pub fn first_negative(&self) -> Result<Option<i64>> {
        let c = self.canonical();
        for p in &c.pieces {
            if let Some(k) = analyze_piece(p, false)?.first_negative {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Pointwise positive part `max(m, 0)`.
    pub fn positive_part(&self) -> Result<MassLaw> {
        let c = self.canonical();
        let mut out = Vec::new();
        for p in &c.pieces {
            let a = analyze_piece(p, true)?;
            if a.first_negative.is_none() {
                out.push(p.clone());
                continue;
            }
            for (k, v) in a.explicit {
                if v > 0.0 {
                    out.push(MassPiece { lo: Some(k), hi: Some(k), terms: vec![MassTerm::new(v, 1.0)] });
                }
            }
            if let Some((lo, hi, positive)) = a.tail {
                if positive {
                    out.push(MassPiece { lo, hi, terms: p.terms.clone() });
                }
            }
        }
        Ok(MassLaw { pieces: out }.canonical())
    }
}

fn same_terms(a: &[MassTerm], b: &[MassTerm]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.same_shape(y) && abs(x.coef - y.coef) <= 1e-14 * abs(x.coef).max(abs(y.coef)))
}

// ---------------------------------------------------------------------------
// Sign analysis

struct PieceSign {
    first_negative: Option<i64>,
    /// Values on the explicitly scanned indices (only when requested).
    explicit: Vec<(i64, f64)>,
    /// Range after the scan with its constant sign.
    tail: Option<(Option<i64>, Option<i64>, bool)>,
}

/// Leading behaviour of a group of terms sharing ratio and power,
/// `a * q^k * (k + s)^(-p)` up to a relative error `eps(k)`.
#[derive(Clone, Copy)]
struct Effective {
    ln_a: f64,
    positive: bool,
    ln_q: f64,
    p: f64,
    s: f64,
    // eps(k) = err_c / (k - err_s)^1 * (1 - err_s/k)^(-err_e), zero when err_c == 0
    err_c: f64,
    err_s: f64,
    err_e: f64,
    start: f64,
}

impl Effective {
    fn eps(&self, k: f64) -> f64 {
        if self.err_c == 0.0 {
            0.0
        } else {
            self.err_c / k * powf(1.0 - self.err_s / k, -self.err_e)
        }
    }
    fn ln_mag(&self, k: f64) -> f64 {
        let mut l = self.ln_a + k * self.ln_q;
        if self.p != 0.0 {
            l -= self.p * ln(k + self.s);
        }
        l
    }
}

/// Terms in the "upward" orientation: index `j` runs to `+∞`.
fn effective_terms(terms: &[MassTerm], flip: bool) -> Result<Vec<Effective>> {
    let mut groups: Vec<Vec<MassTerm>> = Vec::new();
    for t in terms {
        let t = if flip { MassTerm { ratio: 1.0 / t.ratio, ..*t } } else { *t };
        if let Some(g) = groups.iter_mut().find(|g| abs(g[0].ratio - t.ratio) <= SAME_RATIO_REL * t.ratio && g[0].power == t.power) {
            g.push(t);
        } else {
            groups.push(vec![t]);
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let ln_q = ln(g[0].ratio);
        let p = g[0].power;
        if g.len() == 1 {
            let t = g[0];
            out.push(Effective {
                ln_a: ln(abs(t.coef)),
                positive: t.coef > 0.0,
                ln_q,
                p,
                s: t.shift,
                err_c: 0.0,
                err_s: 0.0,
                err_e: 0.0,
                start: if p != 0.0 { -t.shift } else { f64::NEG_INFINITY },
            });
            continue;
        }
        // Σ c_i (k + s_i)^(-p) = k^(-p) Σ_n C(-p, n) (Σ c_i s_i^n) k^(-n)
        let scale: f64 = g.iter().map(|t| abs(t.coef)).sum();
        let smax = g.iter().fold(0.0f64, |m, t| m.max(abs(t.shift)));
        let mut found = None;
        for n in 0..12u32 {
            let moment: f64 = g.iter().map(|t| t.coef * powf(t.shift, n as f64)).sum();
            let tol = 1e-11 * scale * powf(smax.max(1.0), n as f64);
            if abs(moment) > tol {
                found = Some((n, binom_f64(-p, n) * moment));
                break;
            }
        }
        let Some((n, a)) = found else {
            return Err(Error::Unsupported(String::from("mass law sign: cancelling terms")));
        };
        let b: f64 = g.iter().map(|t| abs(t.coef) * abs(binom_f64(-p, n + 1)) * powf(abs(t.shift), (n + 1) as f64)).sum();
        out.push(Effective {
            ln_a: ln(abs(a)),
            positive: a > 0.0,
            ln_q,
            p: p + n as f64,
            s: 0.0,
            err_c: b / abs(a),
            err_s: smax,
            err_e: p + n as f64 + 1.0,
            start: 2.0 * smax + 1.0,
        });
    }
    Ok(out)
}

/// Index beyond which `|e / d|` is decreasing in `k`.
fn monotone_from(e: &Effective, d: &Effective) -> f64 {
    let base = e.start.max(d.start).max(-e.s).max(-d.s);
    let dq = e.ln_q - d.ln_q;
    if dq < 0.0 {
        base + 1.0 + (abs(e.p) + abs(d.p)) / -dq
    } else {
        // equal ratio, e.p > d.p: p_d/(k+s_d) < p_e/(k+s_e)
        let denom = e.p - d.p;
        base.max((d.p * e.s - e.p * d.s) / denom) + 1.0
    }
}

fn analyze_piece(p: &MassPiece, want_values: bool) -> Result<PieceSign> {
    let mut res = PieceSign { first_negative: None, explicit: Vec::new(), tail: None };
    // Downward scans (lower-infinite pieces) keep the smallest negative index.
    let downward = p.lo.is_none() && p.hi.is_some();
    let push = move |res: &mut PieceSign, k: i64, v: f64, mag: f64| {
        if v < -1e-12 * mag && (res.first_negative.is_none() || downward) {
            res.first_negative = Some(k);
        }
        if want_values {
            res.explicit.push((k, v));
        }
    };
    if p.terms.len() == 1 {
        let positive = p.terms[0].coef > 0.0;
        if !positive {
            res.first_negative = Some(p.lo.or(p.hi).unwrap_or(0));
        }
        res.tail = Some((p.lo, p.hi, positive));
        return Ok(res);
    }
    if let Some(n) = p.len() {
        if n as i64 <= SCAN_CAP {
            let (a, b) = (p.lo.unwrap(), p.hi.unwrap());
            for k in a..=b {
                push(&mut res, k, p.value(k), p.abs_value(k));
            }
            return Ok(res);
        }
    }
    match (p.lo, p.hi) {
        (None, None) => {
            let lower = MassPiece { lo: None, hi: Some(-1), terms: p.terms.clone() };
            let upper = MassPiece { lo: Some(0), hi: None, terms: p.terms.clone() };
            let a = analyze_piece(&lower, want_values)?;
            let b = analyze_piece(&upper, want_values)?;
            res.first_negative = a.first_negative.or(b.first_negative);
            // Both halves are needed for the positive part; keep the simple
            // case only (no explicit values on a doubly infinite piece).
            if a.explicit.is_empty() && b.explicit.is_empty() {
                if let (Some(ta), Some(tb)) = (a.tail, b.tail) {
                    if ta.2 == tb.2 {
                        res.tail = Some((None, None, ta.2));
                        return Ok(res);
                    }
                }
            }
            if want_values && res.first_negative.is_some() {
                return Err(Error::Unsupported(String::from("positive part of a doubly infinite mixed-sign piece")));
            }
            Ok(res)
        }
        (Some(lo), hi) => scan_up(p, lo, hi, false, res, push),
        (None, Some(hi)) => scan_up(p, -hi, None, true, res, push),
    }
}

fn scan_up(
    p: &MassPiece,
    start: i64,
    end: Option<i64>,
    flip: bool,
    mut res: PieceSign,
    push: impl Fn(&mut PieceSign, i64, f64, f64),
) -> Result<PieceSign> {
    let eff = effective_terms(&p.terms, flip)?;
    let dom = *eff
        .iter()
        .max_by(|a, b| a.ln_q.total_cmp(&b.ln_q).then(b.p.total_cmp(&a.p)))
        .expect("non-empty");
    let mut k0 = start as f64;
    for e in &eff {
        if e.ln_q == dom.ln_q && e.p == dom.p && e.s == dom.s && e.ln_a == dom.ln_a {
            continue;
        }
        k0 = k0.max(monotone_from(e, &dom));
    }
    k0 = k0.max(dom.start + 1.0);
    let orig = |j: i64| if flip { -j } else { j };
    let mut j = start;
    loop {
        if let Some(e) = end {
            if j > e {
                return Ok(res);
            }
        }
        if j as f64 >= k0 {
            let jf = j as f64;
            let dom_eps = dom.eps(jf);
            if dom_eps < 1.0 {
                let ld = dom.ln_mag(jf) + ln(1.0 - dom_eps);
                let mut others = 0.0;
                for e in &eff {
                    if e.ln_q == dom.ln_q && e.p == dom.p && e.s == dom.s && e.ln_a == dom.ln_a {
                        continue;
                    }
                    others += exp(e.ln_mag(jf) - ld) * (1.0 + e.eps(jf));
                }
                if others < 1.0 - 1e-9 {
                    let positive = dom.positive;
                    if !positive && (res.first_negative.is_none() || flip) {
                        res.first_negative = Some(orig(j));
                    }
                    res.tail = Some(if flip { (None, Some(orig(j)), positive) } else { (Some(j), end, positive) });
                    return Ok(res);
                }
            }
        }
        if j - start > SCAN_CAP {
            return Err(Error::Unsupported(String::from("mass law sign undecided within scan cap")));
        }
        let k = orig(j);
        push(&mut res, k, p.value(k), p.abs_value(k));
        j += 1;
    }
}

// ---------------------------------------------------------------------------
// Weighted tail sums on a lattice `r_k = exp(ln_a + k ln_beta)`.

/// Upper bound of `Σ_{k=start}^{end} |term(k)| r_k^s P(ln r_k)` where
/// `P` has nonnegative coefficients and `r_start >= 1`.
pub(crate) fn upper_tail_bound(t: &MassTerm, start: i64, end: Option<i64>, ln_a: f64, ln_beta: f64, s: f64, poly: &[f64]) -> f64 {
    if let Some(e) = end {
        if e < start {
            return 0.0;
        }
    }
    let big_a = (ln_a + start as f64 * ln_beta).max(0.0);
    let w = poly_compose_linear(poly, big_a, ln_beta);
    let ln_rho = ln(t.ratio) + s * ln_beta;
    let pref_ln = ln(abs(t.coef)) + start as f64 * ln(t.ratio) + s * big_a;
    let base = start as f64 + t.shift;
    let pw = if t.power != 0.0 { powf(base, -t.power) } else { 1.0 };
    if ln_rho < -1e-15 {
        let sums = poly_geom_sums(exp(ln_rho), w.len() - 1);
        let tot: f64 = w.iter().zip(&sums).map(|(a, b)| a * b).sum();
        return exp(pref_ln) * pw * tot;
    }
    if let Some(e) = end {
        // Finite range with non-decaying ratio: count times largest term.
        let n = (e - start) as f64;
        let wmax = crate::special::poly_eval(&w, n);
        return (n + 1.0) * exp(pref_ln + n * ln_rho.max(0.0)) * pw * wmax;
    }
    if abs(ln_rho) <= 1e-15 && t.power > 0.0 {
        // Σ_n (base + n)^(-p) W(n) with W(n) <= Σ w_i (base + n)^i.
        let mut tot = 0.0;
        for (i, wi) in w.iter().enumerate() {
            if *wi == 0.0 {
                continue;
            }
            let e = t.power - i as f64;
            if e <= 1.0 {
                return f64::INFINITY;
            }
            tot += wi * (powf(base, -e) + powf(base, 1.0 - e) / (e - 1.0));
        }
        return exp(pref_ln) * tot;
    }
    f64::INFINITY
}

/// Upper bound of `Σ_{k=from}^{end} |term(k)| r_k^s` going downward
/// (`end` is the lowest index, `None` = unbounded), with `r_from <= 1`.
pub(crate) fn lower_tail_bound(t: &MassTerm, from: i64, end: Option<i64>, ln_a: f64, ln_beta: f64, s: f64) -> f64 {
    if let Some(e) = end {
        if e > from {
            return 0.0;
        }
    }
    let ln_rho = ln(t.ratio) + s * ln_beta;
    let ln_first = ln(abs(t.coef)) + from as f64 * ln(t.ratio) + s * (ln_a + from as f64 * ln_beta);
    match end {
        None => {
            if t.power != 0.0 || ln_rho <= 1e-15 {
                return f64::INFINITY;
            }
            exp(ln_first) / (1.0 - exp(-ln_rho))
        }
        Some(e) => {
            let n = (from - e) as f64;
            let pw_max = if t.power != 0.0 { powf(e as f64 + t.shift, -t.power) } else { 1.0 };
            if ln_rho > 1e-15 {
                exp(ln_first) / (1.0 - exp(-ln_rho)) * pw_max
            } else {
                (n + 1.0) * exp(ln_first - n * ln_rho) * pw_max
            }
        }
    }
}

/// Exact `Σ_{k=start}^{end} term(k) P(ln r_k)` for a polynomial `P`
/// with `r_start >= 1`; `+∞` when the series diverges.
pub(crate) fn exact_weighted_sum(t: &MassTerm, start: i64, end: Option<i64>, ln_a: f64, ln_beta: f64, poly: &[f64]) -> Result<f64> {
    if let Some(e) = end {
        if e < start {
            return Ok(0.0);
        }
        if e - start <= 200_000 {
            let mut s = 0.0;
            for k in start..=e {
                s += t.value(k) * crate::special::poly_eval(poly, ln_a + k as f64 * ln_beta);
            }
            return Ok(s);
        }
        if t.ratio < 1.0 && t.power == 0.0 {
            let a = exact_weighted_sum(t, start, None, ln_a, ln_beta, poly)?;
            let b = exact_weighted_sum(t, e + 1, None, ln_a, ln_beta, poly)?;
            return Ok(a - b);
        }
        return Err(Error::Unsupported(String::from("weighted sum over a long non-geometric range")));
    }
    let big_a = ln_a + start as f64 * ln_beta;
    let q = t.ratio;
    if t.power == 0.0 {
        if q >= 1.0 {
            return Ok(f64::INFINITY);
        }
        let w = poly_compose_linear(poly, big_a, ln_beta);
        let sums = poly_geom_sums(q, w.len() - 1);
        let tot: f64 = w.iter().zip(&sums).map(|(a, b)| a * b).sum();
        return Ok(t.coef * exp(start as f64 * ln(q)) * tot);
    }
    let base = start as f64 + t.shift;
    if q > 1.0 {
        return Ok(f64::INFINITY);
    }
    if q == 1.0 {
        // Rewrite P(ln r_k) as a polynomial in (base + n).
        let w = poly_compose_linear(poly, big_a - ln_beta * base, ln_beta);
        let mut tot = 0.0;
        for (i, wi) in w.iter().enumerate() {
            if *wi == 0.0 {
                continue;
            }
            let e = t.power - i as f64;
            if e <= 1.0 {
                return Ok(f64::INFINITY);
            }
            tot += wi * hurwitz_zeta(e, base);
        }
        return Ok(t.coef * tot);
    }
    // q < 1 with a power factor: direct summation with a geometric majorant.
    let mut s = 0.0;
    let mut k = start;
    loop {
        let v = t.value(k) * crate::special::poly_eval(poly, ln_a + k as f64 * ln_beta);
        s += v;
        let bound = upper_tail_bound(t, k + 1, None, ln_a, ln_beta, 0.0, &poly.iter().map(|c| abs(*c)).collect::<Vec<_>>());
        if bound <= 1e-16 * abs(s) || bound < 1e-300 {
            return Ok(s);
        }
        k += 1;
        if k - start > 10_000_000 {
            return Err(Error::Tolerance { achieved: bound, requested: 1e-16 * abs(s) });
        }
    }
}
