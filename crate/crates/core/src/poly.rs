//! Transfer-function algebra over `z⁻¹` for restructuring recursive filters.
//!
//! Multiplying numerator and denominator of `1 / d(z)` by the alternating
//! polynomial of `d` (odd-lag coefficients negated) cancels every odd lag in
//! the denominator. Repeating the step on the result, now a polynomial in
//! `z⁻²`, then `z⁻⁴`, … leaves a recursion whose lags are all multiples of the
//! stride, preceded by a short non-recursive filter. Lags at least as long as
//! the block width are exactly what a block-parallel engine can evaluate
//! without a serial dependency inside the block.

use alloc::vec;
use alloc::vec::Vec;

use crate::sample::Ring;

/// Coefficients over `z⁻¹`, index = lag.
pub type Poly<T> = Vec<T>;

pub fn poly_mul<T: Ring>(p: &[T], q: &[T]) -> Poly<T> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut r = vec![T::zero(); p.len() + q.len() - 1];
    for (i, &x) in p.iter().enumerate() {
        for (j, &y) in q.iter().enumerate() {
            r[i + j] = r[i + j] + x * y;
        }
    }
    r
}

/// `numerator / denominator` with `denominator[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFrac<T> {
    pub numerator: Poly<T>,
    pub denominator: Poly<T>,
}

impl<T: Ring> PolyFrac<T> {
    /// `1 / denominator`. Returns `None` unless the constant term is one.
    pub fn recursive(denominator: Poly<T>) -> Option<Self> {
        if denominator.first() != Some(&T::one()) {
            return None;
        }
        Some(PolyFrac { numerator: vec![T::one()], denominator })
    }

    /// Multiplies numerator and denominator by the same polynomial.
    pub fn extend(&self, m: &[T]) -> Self {
        PolyFrac { numerator: poly_mul(&self.numerator, m), denominator: poly_mul(&self.denominator, m) }
    }
}

/// Alternating polynomial of `d` viewed as a polynomial in `z^-step`:
/// coefficients at lags that are odd multiples of `step` are negated.
pub fn alternating<T: Ring>(d: &[T], step: usize) -> Poly<T> {
    d.iter().enumerate().map(|(lag, &c)| if lag % step == 0 && (lag / step) % 2 == 1 { -c } else { c }).collect()
}

/// Returns `(multiplier, product)` where the product `d · multiplier` has no
/// odd-lag terms.
pub fn eliminate_odd_lags<T: Ring>(d: &[T]) -> (Poly<T>, Poly<T>) {
    let m = alternating(d, 1);
    let p = poly_mul(d, &m);
    (m, p)
}

/// A recursive filter `1/d` rewritten as `fir(z) / (1 - Σ c·z^-lag)` with
/// every recursive lag a multiple of `stride`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterDecomposition<T> {
    /// Non-recursive part, index = lag.
    pub fir: Poly<T>,
    /// `(lag, c)` for `y[t] = u[t] + Σ c·y[t - lag]`; lags are multiples of `stride`.
    pub iir_strided: Vec<(usize, T)>,
    pub stride: usize,
    /// The multiplier applied in each elimination round, each a polynomial
    /// in `z^-(2^round)`.
    pub rounds: Vec<Poly<T>>,
}

impl<T: Ring> FilterDecomposition<T> {
    /// The long-term denominator `1 - Σ c·z^-lag` as a dense polynomial.
    pub fn denominator(&self) -> Poly<T> {
        let len = self.iir_strided.iter().map(|&(lag, _)| lag + 1).max().unwrap_or(1);
        let mut d = vec![T::zero(); len];
        d[0] = T::one();
        for &(lag, c) in &self.iir_strided {
            d[lag] = d[lag] - c;
        }
        d
    }
}

/// Eliminates lags that are not multiples of `stride` by repeated extension
/// with alternating polynomials, `log2(stride)` rounds in all.
///
/// Returns `None` if `stride` is not a power of two or `d[0] != 1`.
pub fn decompose_recursive<T: Ring>(d: &[T], stride: usize) -> Option<FilterDecomposition<T>> {
    if !stride.is_power_of_two() || d.first() != Some(&T::one()) {
        return None;
    }
    let mut frac = PolyFrac::recursive(d.to_vec())?;
    let mut rounds = Vec::new();
    let mut step = 1;
    while step < stride {
        let m = alternating(&frac.denominator, step);
        frac = frac.extend(&m);
        rounds.push(m);
        step *= 2;
    }
    let iir_strided = frac
        .denominator
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(lag, &c)| lag % stride == 0 && c != T::zero())
        .map(|(lag, &c)| (lag, -c))
        .collect();
    Some(FilterDecomposition { fir: frac.numerator, iir_strided, stride, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64 as Q;

    #[derive(Clone, Copy, Debug, PartialEq)]
    struct Exact(Q);

    impl core::ops::Add for Exact {
        type Output = Self;
        fn add(self, o: Self) -> Self {
            Exact(self.0 + o.0)
        }
    }
    impl core::ops::Sub for Exact {
        type Output = Self;
        fn sub(self, o: Self) -> Self {
            Exact(self.0 - o.0)
        }
    }
    impl core::ops::Mul for Exact {
        type Output = Self;
        fn mul(self, o: Self) -> Self {
            Exact(self.0 * o.0)
        }
    }
    impl core::ops::Neg for Exact {
        type Output = Self;
        fn neg(self) -> Self {
            Exact(-self.0)
        }
    }
    impl Ring for Exact {
        fn zero() -> Self {
            Exact(Q::from_integer(0))
        }
        fn one() -> Self {
            Exact(Q::from_integer(1))
        }
    }

    fn q(n: i64, d: i64) -> Exact {
        Exact(Q::new(n, d))
    }

    #[test]
    fn second_order_elimination_matches_closed_form() {
        let (a, b) = (q(3, 5), q(1, 5));
        let (m, p) = eliminate_odd_lags(&[Exact::one(), -a, b]);
        assert_eq!(m, [Exact::one(), a, b]);
        // 1 - (a² - 2b) z⁻² + b² z⁻⁴
        assert_eq!(p, [Exact::one(), Exact::zero(), -(a * a - b - b), Exact::zero(), b * b]);
    }

    #[test]
    fn first_order_elimination() {
        let k = q(-7, 9);
        let (m, p) = eliminate_odd_lags(&[Exact::one(), -k]);
        assert_eq!(m, [Exact::one(), k]);
        assert_eq!(p, [Exact::one(), Exact::zero(), -(k * k)]);
    }

    #[test]
    fn unit_coefficients() {
        let (_, p) = eliminate_odd_lags(&[1.0f64, -1.0, 1.0]);
        assert_eq!(p, [1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn first_order_stride_four() {
        let k = q(2, 3);
        let dec = decompose_recursive(&[Exact::one(), -k], 4).unwrap();
        let expected_fir = poly_mul(&[Exact::one(), k], &[Exact::one(), Exact::zero(), k * k]);
        assert_eq!(dec.fir, expected_fir);
        assert_eq!(dec.iir_strided, [(4, k * k * k * k)]);
    }

    #[test]
    fn stride_one_is_identity() {
        let d = [1.0f64, -0.3, 0.1];
        let dec = decompose_recursive(&d, 1).unwrap();
        assert_eq!(dec.fir, [1.0]);
        assert_eq!(dec.denominator(), d);
        assert!(dec.rounds.is_empty());
    }

    #[test]
    fn second_order_stride_four_exact() {
        // Frozen from an independent exact-rational iteration of the identity.
        let dec = decompose_recursive(&[Exact::one(), -q(3, 5), q(1, 5)], 4).unwrap();
        let fir = [q(1, 1), q(3, 5), q(4, 25), q(-3, 125), q(4, 125), q(3, 125), q(1, 125)];
        assert_eq!(dec.fir, fir);
        assert_eq!(dec.iir_strided, [(4, q(-49, 625)), (8, q(-1, 625))]);
        let d = [Exact::one(), -q(3, 5), q(1, 5)];
        assert_eq!(poly_mul(&dec.fir, &d), dec.denominator());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(decompose_recursive(&[1.0f64, 0.5], 3).is_none());
        assert!(decompose_recursive(&[2.0f64, 0.5], 4).is_none());
        assert!(PolyFrac::recursive(alloc::vec![0.5f64]).is_none());
    }
}
