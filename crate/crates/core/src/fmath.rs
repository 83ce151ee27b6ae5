//! Thin wrappers over `libm` so the crate stays `no_std`.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `1 / (1 + r²)` without overflowing `r²`.
pub fn inv_one_plus_sq(r: f64) -> f64 {
    if abs(r) > 1.0 {
        let s = 1.0 / r;
        s * s / (1.0 + s * s)
    } else {
        1.0 / (1.0 + r * r)
    }
}

/// `r² / (1 + r²)` without overflowing `r²`.
pub fn sq_over_one_plus_sq(r: f64) -> f64 {
    if abs(r) > 1.0 {
        let s = 1.0 / r;
        1.0 / (1.0 + s * s)
    } else {
        r * r / (1.0 + r * r)
    }
}
