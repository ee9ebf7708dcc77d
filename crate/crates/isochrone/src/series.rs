//! Truncated power series with exact rational coefficients.
//!
//! All arithmetic is carried out modulo `x^(N+1)` where `N` is the
//! truncation order. Binary operations insist that both operands share the
//! same order; mixing orders silently is a classic source of wrong
//! coefficients, so it is a hard error here. Coefficients are
//! arbitrary-precision rationals, kept reduced with a positive denominator
//! by `BigRational` itself.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Shorthand constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational equal to the given finite double (every finite `f64` is a
/// dyadic rational). Returns `None` for NaN or infinities.
pub fn rat_from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// Truncated Taylor series; index `k` holds the coefficient of `x^k`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<Rational>,
}

impl RationalSeries {
    /// Zero series of the given truncation order.
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); order + 1] }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// The series `x`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    /// Build from an explicit coefficient list; the order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    /// Coefficient as `f64` (best double approximation).
    pub fn coeff_f64(&self, k: usize) -> f64 {
        self.coeffs[k].to_f64().unwrap_or(f64::NAN)
    }

    pub fn set_coeff(&mut self, k: usize, value: Rational) {
        self.coeffs[k] = value;
    }

    /// Copy truncated (or zero-extended) to a new order.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rational::zero());
        coeffs.truncate(order + 1);
        Self { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * factor).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(Self { coeffs })
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exponent: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exponent {
            acc = acc.mul(self).expect("orders match by construction");
        }
        acc
    }

    /// Multiplicative inverse: `v` with `self * v = 1 mod x^(N+1)`.
    /// Requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let n = self.order();
        let inv0 = c0.recip();
        let mut out = vec![Rational::zero(); n + 1];
        out[0] = inv0.clone();
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() && !out[m - k].is_zero() {
                    acc += &self.coeffs[k] * &out[m - k];
                }
            }
            out[m] = -(acc * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    /// Composition `self(inner(x))`, by Horner evaluation over the series
    /// ring. The inner series must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionConstant);
        }
        let n = self.order();
        let mut acc = Self::zero(n);
        for k in (0..=n).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=n)
            .map(|k| &self.coeffs[k] * rat(k as i64, 1))
            .collect();
        Self { coeffs }
    }

    /// Formal antiderivative with zero constant term; the order grows by one.
    pub fn integral(&self) -> Self {
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 2);
        coeffs.push(Rational::zero());
        for k in 0..=n {
            coeffs.push(&self.coeffs[k] / rat(k as i64 + 1, 1));
        }
        Self { coeffs }
    }

    /// Divide by `x^k`; errors if any of the first `k` coefficients is
    /// nonzero. The order drops by `k`.
    pub fn shifted_down(&self, k: usize) -> Result<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return Err(Error::NonInvertibleSeries);
        }
        if self.order() < k {
            return Err(Error::OrderTooSmall(self.order(), "cannot shift below the constant term"));
        }
        Ok(Self { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Binomial series `(1 + t)^e` for a rational exponent.
    pub fn binomial(exponent: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(Rational::one());
        let mut acc = Rational::one();
        for k in 0..order {
            let factor = (exponent - rat(k as i64, 1)) / rat(k as i64 + 1, 1);
            acc *= factor;
            coeffs.push(acc.clone());
        }
        Self { coeffs }
    }

    /// Compositional inverse: the series `v` with `self(v(x)) = x`.
    /// Requires `self = x + O(x^2)`. Fixed-point iteration gains one exact
    /// order per pass, so `N - 1` passes suffice.
    pub fn reverted(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || !self.coeffs[1].is_one() {
            return Err(Error::NotReversible);
        }
        let n = self.order();
        let mut tail = self.clone();
        tail.coeffs[1] = Rational::zero(); // self - x
        let x = Self::identity(n);
        let mut v = x.clone();
        for _ in 0..n {
            v = x.sub(&tail.compose(&v)?)?;
        }
        Ok(v)
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// True when the series is a normalized restoring force:
    /// `g(0) = 0`, `g'(0) = 1`.
    pub fn is_normalized_force(&self) -> bool {
        self.order() >= 1 && self.coeffs[0].is_zero() && self.coeffs[1].is_one()
    }
}

impl fmt::Debug for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => {
                    if a.is_one() {
                        write!(f, "x")?
                    } else {
                        write!(f, "{a}*x")?
                    }
                }
                _ => {
                    if a.is_one() {
                        write!(f, "x^{k}")?
                    } else {
                        write!(f, "{a}*x^{k}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(coeffs: &[(i64, i64)]) -> RationalSeries {
        RationalSeries::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn add_basics() {
        let x = RationalSeries::identity(3);
        let two_x = x.add(&x).unwrap();
        assert_eq!(two_x.coeff(1), &rat(2, 1));

        let u = series(&[(1, 1), (0, 1), (-5, 6), (7, 2)]);
        assert_eq!(u.add(&RationalSeries::zero(3)).unwrap(), u);

        let a = series(&[(0, 1), (0, 1), (1, 2)]);
        let b = series(&[(0, 1), (0, 1), (1, 3)]);
        assert_eq!(a.add(&b).unwrap().coeff(2), &rat(5, 6));
    }

    #[test]
    fn mul_basics() {
        let x = RationalSeries::identity(4);
        assert_eq!(x.mul(&x).unwrap(), series(&[(0, 1), (0, 1), (1, 1), (0, 1), (0, 1)]));

        let u = series(&[(3, 1), (-1, 2), (0, 1), (2, 7), (1, 1)]);
        assert_eq!(u.mul(&RationalSeries::one(4)).unwrap(), u);

        let p = series(&[(1, 1), (1, 1), (0, 1)]);
        let m = series(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(p.mul(&m).unwrap(), series(&[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = RationalSeries::identity(3);
        let b = RationalSeries::identity(4);
        assert!(matches!(a.add(&b), Err(Error::OrderMismatch(3, 4))));
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch(3, 4))));
    }

    #[test]
    fn reciprocal_geometric() {
        // 1/(1-x) = 1 + x + x^2 + ...
        let u = series(&[(1, 1), (-1, 1), (0, 1), (0, 1)]);
        let v = u.reciprocal().unwrap();
        for k in 0..=3 {
            assert_eq!(v.coeff(k), &rat(1, 1));
        }

        assert_eq!(RationalSeries::one(5).reciprocal().unwrap(), RationalSeries::one(5));

        // 1/(1+2x) = 1 - 2x + 4x^2 - 8x^3
        let u = series(&[(1, 1), (2, 1), (0, 1), (0, 1)]);
        let v = u.reciprocal().unwrap();
        assert_eq!(v.coeff(2), &rat(4, 1));
        assert_eq!(v.coeff(3), &rat(-8, 1));

        assert!(matches!(
            RationalSeries::identity(3).reciprocal(),
            Err(Error::NonInvertibleSeries)
        ));
    }

    #[test]
    fn compose_basics() {
        // (1+t) o x^2 = 1 + x^2
        let outer = series(&[(1, 1), (1, 1), (0, 1)]);
        let inner = series(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(outer.compose(&inner).unwrap(), series(&[(1, 1), (0, 1), (1, 1)]));

        let outer = series(&[(2, 1), (-1, 3), (5, 1), (0, 1)]);
        assert_eq!(outer.compose(&RationalSeries::identity(3)).unwrap(), outer);

        // t^2 o (x + x^2) = x^2 + 2x^3 + x^4
        let outer = series(&[(0, 1), (0, 1), (1, 1), (0, 1), (0, 1)]);
        let inner = series(&[(0, 1), (1, 1), (1, 1), (0, 1), (0, 1)]);
        let got = outer.compose(&inner).unwrap();
        assert_eq!(got, series(&[(0, 1), (0, 1), (1, 1), (2, 1), (1, 1)]));

        assert!(matches!(
            RationalSeries::identity(2).compose(&RationalSeries::one(2)),
            Err(Error::CompositionConstant)
        ));
    }

    #[test]
    fn derive_integrate_basics() {
        // d/dx (x^2/2) = x
        let u = series(&[(0, 1), (0, 1), (1, 2)]);
        assert_eq!(u.derivative(), series(&[(0, 1), (1, 1)]));

        // integral of x is x^2/2
        let x = RationalSeries::identity(1);
        assert_eq!(x.integral(), series(&[(0, 1), (0, 1), (1, 2)]));

        // integral of x + a2 x^2 is x^2/2 + (a2/3) x^3, with a2 = 4/7
        let u = series(&[(0, 1), (1, 1), (4, 7)]);
        let v = u.integral();
        assert_eq!(v.coeff(2), &rat(1, 2));
        assert_eq!(v.coeff(3), &rat(4, 21));
    }

    #[test]
    fn binomial_series_values() {
        let half = RationalSeries::binomial(&rat(1, 2), 4);
        assert_eq!(half.coeff(1), &rat(1, 2));
        assert_eq!(half.coeff(2), &rat(-1, 8));
        assert_eq!(half.coeff(3), &rat(1, 16));

        let m3 = RationalSeries::binomial(&rat(-3, 1), 3);
        assert_eq!(m3.coeff(1), &rat(-3, 1));
        assert_eq!(m3.coeff(2), &rat(6, 1));
        assert_eq!(m3.coeff(3), &rat(-10, 1));
    }

    #[test]
    fn revert_round_trip() {
        let u = series(&[(0, 1), (1, 1), (1, 1), (0, 1), (0, 1), (0, 1)]);
        let v = u.reverted().unwrap();
        let id = u.compose(&v).unwrap();
        assert_eq!(id, RationalSeries::identity(5));
        assert!(matches!(RationalSeries::one(3).reverted(), Err(Error::NotReversible)));
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let r = rat_from_f64(0.3).unwrap();
        assert_eq!(r.to_f64().unwrap(), 0.3);
        assert!(rat_from_f64(f64::NAN).is_none());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
    }

    fn unit_series(order: usize) -> impl Strategy<Value = RationalSeries> {
        proptest::collection::vec(small_rational(), order)
            .prop_map(move |mut tail| {
                let mut coeffs = vec![Rational::one()];
                coeffs.append(&mut tail);
                RationalSeries::from_coeffs(coeffs)
            })
    }

    fn vanishing_series(order: usize) -> impl Strategy<Value = RationalSeries> {
        proptest::collection::vec(small_rational(), order)
            .prop_map(move |mut tail| {
                let mut coeffs = vec![Rational::zero()];
                coeffs.append(&mut tail);
                RationalSeries::from_coeffs(coeffs)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reciprocal_is_exact_inverse(u in unit_series(10)) {
            let v = u.reciprocal().unwrap();
            prop_assert_eq!(u.mul(&v).unwrap(), RationalSeries::one(10));
        }

        #[test]
        fn composition_is_associative(
            f in vanishing_series(8),
            g in vanishing_series(8),
            h in vanishing_series(8),
        ) {
            let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
            let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivative_of_integral_is_identity(u in unit_series(9)) {
            prop_assert_eq!(u.integral().derivative(), u);
        }

        #[test]
        fn reversion_inverts_composition(tail in proptest::collection::vec(small_rational(), 6)) {
            let mut coeffs = vec![Rational::zero(), Rational::one()];
            coeffs.extend(tail);
            let u = RationalSeries::from_coeffs(coeffs);
            let v = u.reverted().unwrap();
            prop_assert_eq!(u.compose(&v).unwrap(), RationalSeries::identity(7));
            prop_assert_eq!(v.compose(&u).unwrap(), RationalSeries::identity(7));
        }
    }
}
