//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrix code is written against [`Real`], which is satisfied by `f32`
//! and `f64`. Complex arithmetic uses `nalgebra::Complex<T>` on top of it.

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;

/// Real floating-point scalar usable by the propagation, landscape and
/// optimization code.
pub trait Real:
    RealField + Copy + ToPrimitive + std::fmt::LowerExp + Default + 'static
{
}

impl<T> Real for T where
    T: RealField + Copy + ToPrimitive + std::fmt::LowerExp + Default + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts `x` to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Machine epsilon of `T`.
#[inline]
pub fn eps<T: Real>() -> T {
    T::default_epsilon()
}

/// Tolerance floored at a small multiple of the machine epsilon of `T`, so
/// that `f64` tolerances stay meaningful for `f32` instantiations.
#[inline]
pub fn scaled_tol<T: Real>(tol64: f64) -> T {
    lit(tol64.max(1e2 * to_f64(eps::<T>())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(lit::<f64>(0.25), 0.25);
        assert_eq!(lit::<f32>(0.25), 0.25f32);
        assert_eq!(to_f64(1.5f32), 1.5);
    }

    #[test]
    fn tolerance_scales_with_precision() {
        assert_eq!(scaled_tol::<f64>(1e-12), 1e-12);
        assert!(scaled_tol::<f32>(1e-12) > 1e-6);
    }
}
