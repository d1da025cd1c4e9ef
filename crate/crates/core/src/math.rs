//! Float helpers that `core` does not provide.

pub(crate) use libm::{acos, cos, sin, sqrt};

pub(crate) const TAU: f64 = core::f64::consts::TAU;

/// Reduces an angle to `[0, 2π)`.
pub(crate) fn reduce_angle(x: f64) -> f64 {
    let r = libm::fmod(x, TAU);
    let r = if r < 0.0 { r + TAU } else { r };
    // fmod of a value just below zero can round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    sqrt(dot3(a, a))
}
