//! Floating-point helpers usable without `std`.

use alloc::vec::Vec;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `x^l - y^l` evaluated from `x - y` without cancellation.
///
/// `diff` must equal `x - y`; it is passed separately because callers can
/// usually compute it exactly (e.g. from lattice differences).
pub fn pow_diff(x: f64, y: f64, diff: f64, l: u32) -> f64 {
    if l == 0 {
        return 0.0;
    }
    // x^l - y^l = (x - y) * sum_{i<l} x^{l-1-i} y^i
    let mut sum = 0.0;
    for i in 0..l {
        sum += powi(x, l - 1 - i) * powi(y, i);
    }
    diff * sum
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sqr(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(norm_sqr(a))
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `|a|^2 - |b|^2` computed as `(a - b) . (a + b)`.
pub fn norm_sqr_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x + y)).sum()
}

/// `|a|^{2l} - |b|^{2l}` without catastrophic cancellation.
pub fn energy_diff(a: &[f64], b: &[f64], l: u32) -> f64 {
    pow_diff(norm_sqr(a), norm_sqr(b), norm_sqr_diff(a, b), l)
}
