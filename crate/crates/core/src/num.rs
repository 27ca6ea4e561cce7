//! Float math routed through `num_traits::Float` so the same call sites
//! compile with the platform libm (std) or the pure-Rust libm (no_std).

use num_traits::Float;

#[inline]
pub fn abs(x: f64) -> f64 {
    Float::abs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    Float::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    Float::cos(x)
}

#[inline]
pub fn sinh(x: f64) -> f64 {
    Float::sinh(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    Float::cosh(x)
}

#[inline]
pub fn tanh(x: f64) -> f64 {
    Float::tanh(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    Float::powf(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}
