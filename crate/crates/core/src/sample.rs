//! Numeric traits for samples and filter coefficients.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficient arithmetic needed by polynomial manipulation.
///
/// Floats implement it, and so can exact rationals, which lets the
/// filter decomposition be checked without rounding.
pub trait Ring:
    Copy + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
}

macro_rules! int_ring {
    ($($t:ty),*) => {$(
        impl Ring for $t {
            #[inline(always)]
            fn zero() -> Self {
                0
            }
            #[inline(always)]
            fn one() -> Self {
                1
            }
        }
    )*};
}

int_ring!(i32, i64);

/// Floating point sample type.
pub trait Float: Ring + PartialOrd + Div<Output = Self> + Default + core::fmt::Debug {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Exact for `|i| < 2^24`.
    fn from_i32(i: i32) -> Self;
    fn floor(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    /// Largest value below one.
    fn below_one() -> Self;
}

macro_rules! float_impl {
    ($t:ty, $floor:path, $fabs:path) => {
        impl Ring for $t {
            #[inline(always)]
            fn zero() -> Self {
                0.0
            }
            #[inline(always)]
            fn one() -> Self {
                1.0
            }
        }

        impl Float for $t {
            #[inline(always)]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline(always)]
            fn from_i32(i: i32) -> Self {
                i as $t
            }
            #[inline(always)]
            fn floor(self) -> Self {
                $floor(self)
            }
            #[inline(always)]
            fn abs(self) -> Self {
                $fabs(self)
            }
            #[inline(always)]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline(always)]
            fn below_one() -> Self {
                1.0 - <$t>::EPSILON / 2.0
            }
        }
    };
}

float_impl!(f32, libm::floorf, libm::fabsf);
float_impl!(f64, libm::floor, libm::fabs);

/// `x - floor(x)`, in `[0, 1)` for every finite `x`.
///
/// For tiny negative `x` the exact result rounds up to one; it is clamped
/// to the largest value below one instead.
#[inline]
pub fn fraction<T: Float>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::below_one()
    } else {
        r
    }
}

/// Wraps `x` from `[0, 2)` into `[0, 1)` with one compare and subtract.
#[inline(always)]
pub(crate) fn wrap_once<T: Float>(x: T) -> T {
    x - if x >= T::one() { T::one() } else { T::zero() }
}
