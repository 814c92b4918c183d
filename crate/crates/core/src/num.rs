//! Small float helpers that `core` does not provide without `std`.

use crate::C64;

// Needed for float methods in the bare build; with std in the graph the
// inherent methods take over, hence the `allow(unused_imports)` at use sites.
pub(crate) use num_traits::Float;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Argument in `[0, 2π)`.
pub(crate) fn arg_positive(z: C64) -> f64 {
    let a = Float::atan2(z.im, z.re);
    if a < 0.0 {
        a + 2.0 * core::f64::consts::PI
    } else {
        a
    }
}

pub(crate) fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub(crate) fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}
