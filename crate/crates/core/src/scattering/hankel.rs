//! Hankel functions of the first kind for the 2D outgoing Green's function.
//!
//! The real Bessel pieces come from `libm` (a port of the FreeBSD msun
//! routines), which is accurate to a few ulp over the whole positive axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Returns `(H0(x), H1(x))`, the Hankel functions of the first kind.
pub fn hankel_h0_h1(x: f64) -> Result<(Complex64, Complex64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Hankel functions need a positive finite argument, got {x}"
        )));
    }
    Ok(hankel_unchecked(x))
}

#[inline]
pub(crate) fn hankel_unchecked(x: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(libm::j0(x), libm::y0(x)),
        Complex64::new(libm::j1(x), libm::y1(x)),
    )
}

#[inline]
pub(crate) fn hankel0_unchecked(x: f64) -> Complex64 {
    Complex64::new(libm::j0(x), libm::y0(x))
}

/// Large-argument form `sqrt(2/(pi x)) exp(i(x - pi/4)) (1 - i/(8x))` of H0.
pub fn hankel_h0_asymptotic(x: f64) -> Complex64 {
    (2.0 / (PI * x)).sqrt() * Complex64::from_polar(1.0, x - PI / 4.0) * Complex64::new(1.0, -1.0 / (8.0 * x))
}
