//! Scalar abstraction for the numeric core.
//!
//! All signal-processing and statistics kernels are generic over [`Scalar`],
//! so the same code runs at f32 or f64 precision. The pipeline layers
//! (dataset files, learning, synthesis) pin `f64` through the aliases at the
//! crate root; f32 exists for memory-constrained extraction.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable by every numeric kernel in this crate.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from f64. Panics only for values outside the type's
    /// range, which no kernel produces.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 value not representable")
    }

    /// Widening (or identity) conversion to f64.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Exact conversion from a count. Counts in this crate stay far below
    /// the 2^24 / 2^53 integer limits of f32 / f64.
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize value not representable")
    }

    const PI: Self;
    const TAU: Self;
}

impl Scalar for f32 {
    const PI: Self = std::f32::consts::PI;
    const TAU: Self = std::f32::consts::TAU;
}

impl Scalar for f64 {
    const PI: Self = std::f64::consts::PI;
    const TAU: Self = std::f64::consts::TAU;
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle<S: Scalar>(a: S) -> S {
    if !a.is_finite() {
        return S::zero();
    }
    let mut a = a % S::TAU;
    if a <= -S::PI {
        a += S::TAU;
    } else if a > S::PI {
        a -= S::TAU;
    }
    a
}
