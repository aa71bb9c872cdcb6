//! Coefficient rings shared by the exact and floating-point paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Build an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Lossy conversion of an exact rational to a double.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A commutative ring with a rational action.
///
/// Method names avoid the `std::ops` names so that `BigRational` and `f64`
/// keep their operator impls unambiguous.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + Zero + One {
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiply by an exact rational.
    fn scale(&self, r: &Rational) -> Self;
    /// Embed an exact rational.
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * rat_to_f64(r)
    }
    fn from_rational(r: &Rational) -> Self {
        rat_to_f64(r)
    }
}

/// Absolute value of an exact rational.
pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}
