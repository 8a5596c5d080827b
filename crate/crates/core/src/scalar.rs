//! Scalar abstraction shared by the Gram and trace modules.
//!
//! Everything that only needs field arithmetic, square roots and
//! trigonometry is written against [`Real`], so the same code runs in `f32`
//! and `f64`. The search, symmetry and landscape layers are `f64` only; their
//! tolerances are pinned to double precision.

use nalgebra::{Complex, RealField};

/// Real scalar usable by the generic core (`f32`, `f64`).
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Lossy conversion of an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion of a working scalar back into `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

/// Reduce an angle to `[0, 2π)`.
pub fn canonical_angle<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut r = x % two_pi;
    if r < T::zero() {
        r += two_pi;
    }
    // `x % 2π + 2π` can round up to exactly 2π for tiny negative x.
    if r >= two_pi {
        r = T::zero();
    }
    r
}
