//! Scalar abstraction shared by every estimator.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the estimators are generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> T {
        self.sum + self.carry
    }
}

/// Compensated sum of an iterator.
pub fn csum<T: Scalar, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Arithmetic mean with one refinement pass, so a constant series returns
/// its value exactly.
pub fn refined_mean<T: Scalar>(values: &[T]) -> T {
    let n = T::from_count(values.len());
    let mean = csum(values.iter().copied()) / n;
    let correction = csum(values.iter().map(|&v| v - mean)) / n;
    mean + correction
}
