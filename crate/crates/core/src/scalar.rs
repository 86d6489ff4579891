//! Scalar abstraction: every numeric routine in this crate is generic over
//! an IEEE float type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for lifting an `f64` constant into the working scalar type.
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// A tolerance stated for `f64`, floored at a few ulps of the actual scalar
/// type so the same criterion stays meaningful for `f32`.
pub(crate) fn tol<T: Scalar>(f64_tol: f64) -> T {
    lit::<T>(f64_tol).max(T::epsilon() * lit(32.0))
}
