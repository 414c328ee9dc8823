//! Coefficient rings: exact rationals, truncated power series in `t`, and `f64`.

use std::fmt::Debug;

use crate::rational::Rational;

/// Commutative coefficient ring used by formal elements and connection data.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Multiplicative inverse when the element is a unit.
    fn inv(&self) -> Option<Self>;
    /// Whether the element is a unit (used for pivoting).
    fn is_unit(&self) -> bool {
        self.inv().is_some()
    }
    /// Square root when it exists in the ring.
    fn sqrt(&self) -> Option<Self>;
    /// Size estimate used for residual reporting.
    fn magnitude(&self) -> f64;

    /// Nearest representable value of a float (exact for binary fractions).
    fn from_f64(x: f64) -> Self;

    /// Real value (constant term for series).
    fn approx(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n))
    }

    fn half() -> Self {
        Self::from_rational(&Rational::new(1, 2))
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn sqrt(&self) -> Option<Self> {
        self.sqrt_exact()
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_f64(x)
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else {
            None
        }
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn approx(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}
