//! Scalar abstraction shared by every numerical module.
//!
//! All of the linear algebra, transforms and solvers are written against
//! [`Real`], which is implemented for `f32` and `f64`. The double-precision
//! aliases at the crate root are what the simulator and CLI use; the tight
//! residual tolerances quoted throughout the docs assume `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar usable by the precoder pipeline.
///
/// `FftNum` brings `num_traits::Signed` along, which shares a few method
/// names with `Float` (`abs`, `signum`); call those through `Float::` to
/// keep method resolution unambiguous.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex sample over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    Float::abs(x)
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sqr<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    norm_sqr(v).sqrt()
}

/// Largest modulus in a complex vector (zero for an empty slice).
pub fn max_abs<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

/// Hermitian inner product `a^H b`.
pub fn dot_h<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}
