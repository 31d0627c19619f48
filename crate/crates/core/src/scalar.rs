//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate that does arithmetic is generic over [`Real`],
//! a floating-point trait alias satisfied by `f32` and `f64`.  The crate
//! root exports `f64` aliases for the common types; `f32` is mainly useful
//! for quick low-precision sweeps.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar usable by all kernels in this crate.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + num_traits::ToPrimitive + Debug + Display + LowerExp + Sum + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar type.
///
/// Panics only if `F` cannot represent any finite `f64` at all, which no
/// implementor of [`Real`] triggers (overflow maps to infinity, not `None`).
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Converts the working scalar into `f64` for reporting and serialization.
pub fn to_f64<F: Real>(x: F) -> f64 {
    x.to_f64().expect("scalar must convert into f64")
}
