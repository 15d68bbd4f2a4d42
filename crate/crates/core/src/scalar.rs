//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
///
/// All matrices are built from `Complex<T>` for some `T: Scalar`. The
/// tolerances quoted throughout the crate are tuned for `f64`; under `f32`
/// they are widened to a small multiple of machine epsilon by [`tol`].
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossless-enough conversion of an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// A tolerance of `x`, floored at 64 ulps of one so it stays meaningful for `f32`.
#[inline]
pub fn tol<T: Scalar>(x: f64) -> T {
    lit::<T>(x).max(T::epsilon() * lit(64.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_widens_for_single_precision() {
        assert_eq!(tol::<f64>(1e-12), 1e-12);
        assert!(tol::<f32>(1e-12) > 1e-6);
    }
}
