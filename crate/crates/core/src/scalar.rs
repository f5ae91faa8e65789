//! Scalar abstraction shared by every module.
//!
//! All numerics are written against [`Real`], which is implemented for `f32`
//! and `f64`. Complex matrices use nalgebra's dense storage.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the toolkit.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    /// Tolerance `x`, raised to a small multiple of machine epsilon when
    /// the type cannot resolve it.
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::default_epsilon() * Self::lit(64.0))
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex dense matrix, the carrier for operators and bases.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

/// Complex dense column vector.
pub type ComplexVector<T> = DVector<Complex<T>>;

#[cfg(test)]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Point `e^{i t}` on the unit circle.
pub fn unimodular<T: Real>(t: T) -> Complex<T> {
    Complex::new(t.cos(), t.sin())
}

/// Argument normalized to `[0, 2π)`.
pub fn arg_0_2pi<T: Real>(z: Complex<T>) -> T {
    let a = z.im.atan2(z.re);
    if a < T::zero() {
        a + T::two_pi()
    } else {
        a
    }
}

pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

pub(crate) fn cabs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub(crate) fn to_pair<T: Real>(z: Complex<T>) -> (f64, f64) {
    (z.re.as_f64(), z.im.as_f64())
}

pub(crate) fn is_finite_matrix<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
