//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be summed and measured.
pub trait Accum: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Accum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        crate::fmath::abs(*self)
    }
}

impl Accum for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        crate::fmath::sqrt(self.norm_sqr())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<T: Accum>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let kv = k * h;
    let gv = g * h;
    (kv, (kv - gv).magnitude())
}

struct Seg<T> {
    a: f64,
    b: f64,
    val: T,
    err: f64,
}

impl<T> PartialEq for Seg<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Seg<T> {}
impl<T> PartialOrd for Seg<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Seg<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub err: f64,
}

/// Integrate `f` over `[a, b]` split at `breaks`, until the error estimate
/// is below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T: Accum>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<QuadResult<T>> {
    let mut pts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in pts.windows(2) {
        let (val, e) = gk15(&mut f, w[0], w[1]);
        total = total + val;
        err += e;
        heap.push(Seg { a: w[0], b: w[1], val, err: e });
    }
    let mut n = heap.len();
    while err > abs_tol.max(rel_tol * total.magnitude()) {
        if n >= max_segments {
            return Err(Error::Tolerance { achieved: err, requested: abs_tol.max(rel_tol * total.magnitude()) });
        }
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Tolerance { achieved: err, requested: abs_tol });
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        total = total - seg.val + v1 + v2;
        err += e1 + e2 - seg.err;
        heap.push(Seg { a: seg.a, b: m, val: v1, err: e1 });
        heap.push(Seg { a: m, b: seg.b, val: v2, err: e2 });
        n += 1;
    }
    // Re-sum to avoid drift from repeated subtraction.
    let mut value = T::zero();
    let mut e = 0.0;
    for s in heap.iter() {
        value = value + s.val;
        e += s.err;
    }
    Ok(QuadResult { value, err: e })
}
