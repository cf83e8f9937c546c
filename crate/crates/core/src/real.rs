//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the library is generic over (`f32` or `f64`).
///
/// Accuracy contracts quoted in the docs (1e-12 and the like) refer to `f64`;
/// `f32` instantiations work but only to single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count or index.
    #[inline]
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Euclidean norm of a point.
pub fn norm<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&p, &q)| p * q).sum()
}

/// `a + s * b`, componentwise.
pub fn axpy<T: Real>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&p, &q)| p + s * q).collect()
}

/// The unit vector `e_1` scaled by `r` in `n` dimensions.
pub fn on_axis<T: Real>(n: usize, r: T) -> Vec<T> {
    let mut x = vec![T::zero(); n];
    x[0] = r;
    x
}
