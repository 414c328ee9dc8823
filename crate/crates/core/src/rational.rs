//! Exact rationals with an inline fast path for values that fit in `i64`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational number kept in lowest terms with a positive denominator.
///
/// Small values are stored inline; anything that overflows `i64` falls back
/// to a `BigRational`. The representation is canonical, so derived equality
/// and hashing agree with numeric equality.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

fn from_i128(n: i128, d: i128) -> Rational {
    debug_assert!(d != 0);
    let (mut n, mut d) = (n, d);
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    if n.abs() <= i64::MAX as i128 && d <= i64::MAX as i128 {
        Rational(Repr::Small(n as i64, d as i64))
    } else {
        Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
    }
}

fn from_big(r: BigRational) -> Rational {
    // BigRational arithmetic already reduces; only the size check is needed.
    let (n, d) = (r.numer(), r.denom());
    if let (Some(n64), Some(d64)) = (n.to_i64(), d.to_i64()) {
        if n64 != i64::MIN && d64 > 0 {
            return Rational(Repr::Small(n64, d64));
        }
    }
    Rational(Repr::Big(r))
}

impl Rational {
    pub fn new(n: i64, d: i64) -> Rational {
        assert!(d != 0, "zero denominator");
        from_i128(n as i128, d as i128)
    }

    pub fn from_integer(n: i64) -> Rational {
        from_i128(n as i128, 1)
    }

    pub fn from_bigints(n: BigInt, d: BigInt) -> Result<Rational> {
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(from_big(BigRational::new(n, d)))
    }

    pub fn zero() -> Rational {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Rational {
        Rational(Repr::Small(1, 1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rational {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn recip(&self) -> Option<Rational> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Some(from_big(r.recip())),
        }
    }

    pub fn pow(&self, e: u32) -> Rational {
        let mut acc = Rational::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root when both numerator and denominator are perfect squares.
    pub fn sqrt_exact(&self) -> Option<Rational> {
        if self.signum() < 0 {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let (sn, sd) = (n.sqrt(), d.sqrt());
        if &sn * &sn == n && &sd * &sd == d {
            Some(from_big(BigRational::new(sn, sd)))
        } else {
            None
        }
    }

    /// Exact value of a finite float; non-finite input maps to zero.
    pub fn from_f64(x: f64) -> Rational {
        BigRational::from_float(x).map(from_big).unwrap_or_else(Rational::zero)
    }

    /// Generalized binomial coefficient `binom(alpha, r)`.
    pub fn binomial(alpha: &Rational, r: usize) -> Rational {
        let mut acc = Rational::one();
        for i in 0..r {
            let num = alpha - &Rational::from_integer(i as i64);
            acc = &(&acc * &num) / &Rational::from_integer(i as i64 + 1);
        }
        acc
    }

    /// Canonical `"num/den"` form used in serialized output.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rational> {
        let s = s.trim();
        let parse = |x: &str| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((a, b)) => Rational::from_bigints(parse(a)?, parse(b)?),
            None => Ok(from_big(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return from_i128(a + c, b);
            }
            if let (Some(x), Some(y)) = ((a * d).checked_add(c * b), b.checked_mul(d)) {
                return from_i128(x, y);
            }
        }
        from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            let g1 = a.gcd(&d).max(1);
            let g2 = c.gcd(&b).max(1);
            return from_i128((a / g1) * (c / g2), (b / g2) * (d / g1));
        }
        from_big(self.to_big() * rhs.to_big())
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip().expect("division by zero rational")
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(r) => from_big(-r.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);
