//! Fixed-width sample packs.
//!
//! `Lanes<T, N>` holds `N` consecutive samples with lane 0 earliest in time.
//! Element-wise operations are plain array loops over a const width; after
//! inlining they compile to packed instructions on any target with SIMD
//! registers of at least `N` lanes.

use core::fmt;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::sample::Ring;

#[derive(Clone, Copy, PartialEq, Eq)]
#[repr(transparent)]
pub struct Lanes<T, const N: usize>(pub [T; N]);

/// `shift_up` was asked to move lanes further than the vector is wide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftError {
    pub shift: usize,
    pub lanes: usize,
}

impl fmt::Display for ShiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot shift {} lanes up by {}", self.lanes, self.shift)
    }
}

impl core::error::Error for ShiftError {}

impl<T: fmt::Debug, const N: usize> fmt::Debug for Lanes<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<T: Copy, const N: usize> Lanes<T, N> {
    /// Number of lanes.
    pub const WIDTH: usize = N;

    #[inline(always)]
    pub fn splat(x: T) -> Self {
        Lanes([x; N])
    }

    #[inline(always)]
    pub fn from_fn(f: impl FnMut(usize) -> T) -> Self {
        Lanes(core::array::from_fn(f))
    }

    #[inline(always)]
    pub fn map<U: Copy>(self, f: impl Fn(T) -> U) -> Lanes<U, N> {
        Lanes(self.0.map(f))
    }

    #[inline(always)]
    pub fn zip_with<U: Copy, V: Copy>(self, other: Lanes<U, N>, f: impl Fn(T, U) -> V) -> Lanes<V, N> {
        Lanes::from_fn(|i| f(self.0[i], other.0[i]))
    }

    /// Latest sample in the block.
    #[inline(always)]
    pub fn last(&self) -> T {
        self.0[N - 1]
    }

    #[inline(always)]
    pub fn to_array(self) -> [T; N] {
        self.0
    }
}

impl<T: Ring, const N: usize> Lanes<T, N> {
    /// `x↑n`: lane `i` takes lane `i - n`; the lowest `n` lanes become zero.
    pub fn shift_up(self, n: usize) -> Result<Self, ShiftError> {
        if n > N {
            return Err(ShiftError { shift: n, lanes: N });
        }
        Ok(self.shifted(n))
    }

    #[inline(always)]
    pub(crate) fn shifted(self, n: usize) -> Self {
        Lanes::from_fn(|i| if i >= n { self.0[i - n] } else { T::zero() })
    }

    /// Like `shifted`, but the lowest `n` lanes continue from `prev`, the block
    /// before this one.
    #[inline(always)]
    pub(crate) fn shifted_in(self, prev: Self, n: usize) -> Self {
        Lanes::from_fn(|i| if i >= n { self.0[i - n] } else { prev.0[N + i - n] })
    }

    #[inline(always)]
    pub fn scale(self, k: T) -> Self {
        self.map(|x| k * x)
    }

    /// `self + k · other` with the multiply applied lane-wise.
    #[inline(always)]
    pub(crate) fn mul_add(self, k: T, other: Self) -> Self {
        Lanes::from_fn(|i| self.0[i] + k * other.0[i])
    }
}

/// Inclusive prefix sum by `log2(N)` shift-add rounds:
/// `x ← x + x↑1`, `x ← x + x↑2`, `x ← x + x↑4`, …
#[inline]
pub fn cum_sum<T: Ring, const N: usize>(v: Lanes<T, N>) -> Lanes<T, N> {
    const { assert!(N.is_power_of_two()) };
    let mut x = v;
    let mut s = 1;
    while s < N {
        x = x + x.shifted(s);
        s *= 2;
    }
    x
}

impl<T, const N: usize> Index<usize> for Lanes<T, N> {
    type Output = T;

    #[inline(always)]
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Default + Copy, const N: usize> Default for Lanes<T, N> {
    fn default() -> Self {
        Lanes([T::default(); N])
    }
}

macro_rules! lane_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<T: Copy + $trait<Output = T>, const N: usize> $trait for Lanes<T, N> {
            type Output = Self;

            #[inline(always)]
            fn $method(self, rhs: Self) -> Self {
                Lanes::from_fn(|i| self.0[i] $op rhs.0[i])
            }
        }
    };
}

lane_op!(Add, add, +);
lane_op!(Sub, sub, -);
lane_op!(Mul, mul, *);

impl<T: Copy + Neg<Output = T>, const N: usize> Neg for Lanes<T, N> {
    type Output = Self;

    #[inline(always)]
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shift_up_examples() {
        let v = Lanes([1.0f32, 2.0, 3.0, 4.0]);
        assert_eq!(v.shift_up(1).unwrap(), Lanes([0.0, 1.0, 2.0, 3.0]));
        assert_eq!(v.shift_up(0).unwrap(), v);
        assert_eq!(v.shift_up(4).unwrap(), Lanes([0.0; 4]));
        assert_eq!(v.shift_up(5).unwrap_err(), ShiftError { shift: 5, lanes: 4 });
    }

    #[test]
    fn shifted_in_continues_previous_block() {
        let prev = Lanes([1.0f32, 2.0, 3.0, 4.0]);
        let cur = Lanes([5.0f32, 6.0, 7.0, 8.0]);
        assert_eq!(cur.shifted_in(prev, 1), Lanes([4.0, 5.0, 6.0, 7.0]));
        assert_eq!(cur.shifted_in(prev, 2), Lanes([3.0, 4.0, 5.0, 6.0]));
        assert_eq!(cur.shifted_in(prev, 4), prev);
    }

    #[test]
    fn cum_sum_examples() {
        assert_eq!(cum_sum(Lanes([1.0f32; 8])), Lanes([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]));
        assert_eq!(cum_sum(Lanes([3.5f64, 0.0, 0.0, 0.0])), Lanes([3.5; 4]));
        assert_eq!(cum_sum(Lanes([2.0f32])), Lanes([2.0]));
    }

    fn lanes4() -> impl Strategy<Value = Lanes<f64, 4>> {
        prop::array::uniform4(-1000i32..1000).prop_map(|a| Lanes(a.map(f64::from)))
    }

    proptest! {
        #[test]
        fn shift_up_is_linear(u in lanes4(), v in lanes4(), n in 0usize..=4) {
            prop_assert_eq!((u + v).shift_up(n).unwrap(), u.shift_up(n).unwrap() + v.shift_up(n).unwrap());
        }

        #[test]
        fn shifts_compose(v in lanes4(), a in 0usize..=4, b in 0usize..=4) {
            prop_assume!(a + b <= 4);
            prop_assert_eq!(v.shift_up(a).unwrap().shift_up(b).unwrap(), v.shift_up(a + b).unwrap());
        }
    }
}
