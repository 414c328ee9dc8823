//! The algebra contract shared by the formal and matrix backends.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::formal::FormalElement;
use crate::matrix::DenseMatrix;
use crate::rational::Rational;
use crate::ring::Coeff;

const MAX_SERIES_TERMS: usize = 200;
const MAX_NEWTON_ITER: usize = 100;

/// A unital real algebra with the operations the orthogonalization
/// algorithms need. Exact backends terminate series on exact zeros;
/// inexact ones stop on a relative tolerance.
pub trait Algebra: Clone + Debug + Send + Sync + 'static {
    type Scalar: Coeff;
    /// Whether arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Self::Scalar) -> Self;
    fn inverse(&self) -> Result<Self>;
    /// Size used for residual reporting.
    fn norm(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// A scalar `c` such that `self − c·1` is nilpotent, when there is one.
    fn scalar_split(&self) -> Option<Self::Scalar> {
        None
    }

    /// Scaling hint for Newton-type iterations.
    fn newton_scale(&self) -> f64 {
        1.0
    }

    /// Number of fixed-point sweeps after which exact iterations have
    /// converged (the filtration length); `None` for complete algebras.
    fn filtration_cap(&self) -> Option<usize> {
        None
    }

    /// Cheap (anti)symmetrization with respect to `q` when the backend
    /// recognizes `q` as a monomial.
    fn symmetrize_fast(&self, _q: &Self, _parity: u32) -> Option<Self> {
        None
    }

    /// Smallest real part over the spectrum, when it can be determined.
    fn spectral_margin(&self) -> Option<f64> {
        self.scalar_split().map(|c| c.approx())
    }

    fn from_scalar(&self, c: &Self::Scalar) -> Self {
        self.one_like().scale(c)
    }

    fn half(&self) -> Self {
        self.scale(&Self::Scalar::half())
    }

    fn exp(&self) -> Result<Self> {
        if Self::EXACT && !self.scalar_split().is_some_and(|c| c.is_zero()) {
            return Err(Error::NonNilpotentArgument);
        }
        let mut acc = self.one_like();
        let mut term = acc.clone();
        for k in 1..MAX_SERIES_TERMS {
            let f = Self::Scalar::from_rational(&Rational::new(1, k as i64));
            term = term.mul(self).scale(&f);
            if term.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&term);
            if !Self::EXACT && term.norm() <= 1e-18 * acc.norm() {
                return Ok(acc);
            }
        }
        Err(Error::NoConvergence("exponential series".into()))
    }

    /// `pol H = H(-H²)^{-1/2}`: binomial series when `-H²` is a scalar plus
    /// a nilpotent, scaled Newton iteration otherwise.
    fn pol(&self) -> Result<Self> {
        let s = self.mul(self).neg();
        if let Some(c) = s.scalar_split() {
            let root = c.sqrt().ok_or(Error::BadLeadingTerm)?;
            let root_inv = root.inv().ok_or(Error::BadLeadingTerm)?;
            let c_inv = c.inv().ok_or(Error::BadLeadingTerm)?;
            let t = s.scale(&c_inv).sub(&s.one_like());
            let half = Rational::new(-1, 2);
            let mut acc = s.one_like();
            let mut power = acc.clone();
            for r in 1..MAX_SERIES_TERMS {
                power = power.mul(&t);
                if power.is_zero() {
                    return Ok(self.mul(&acc).scale(&root_inv));
                }
                acc = acc.add(&power.scale(&Self::Scalar::from_rational(&Rational::binomial(&half, r))));
                if !Self::EXACT && power.norm() <= 1e-18 {
                    return Ok(self.mul(&acc).scale(&root_inv));
                }
            }
            return Err(Error::NoConvergence("polarization series".into()));
        }
        if Self::EXACT {
            return Err(Error::BadLeadingTerm);
        }
        let mut x = self.clone();
        let mut scaling = true;
        for _ in 0..MAX_NEWTON_ITER {
            let mu = if scaling { x.newton_scale() } else { 1.0 };
            let mx = x.scale(&Self::Scalar::from_f64(mu));
            let next = mx.sub(&mx.inverse()?).half();
            let change = next.sub(&x).norm() / next.norm().max(f64::MIN_POSITIVE);
            x = next;
            if change < 1e-2 {
                scaling = false;
            }
            if change < 1e-14 {
                return Ok(x);
            }
        }
        Err(Error::NoConvergence("polarization".into()))
    }

    fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }
}

impl<C: Coeff> Algebra for FormalElement<C> {
    type Scalar = C;
    const EXACT: bool = true;

    fn zero_like(&self) -> Self {
        FormalElement::zero(self.n(), self.cap())
    }
    fn one_like(&self) -> Self {
        FormalElement::one(self.n(), self.cap())
    }
    fn add(&self, o: &Self) -> Self {
        FormalElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        FormalElement::sub(self, o)
    }
    fn neg(&self) -> Self {
        FormalElement::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        FormalElement::mul(self, o)
    }
    fn scale(&self, c: &C) -> Self {
        FormalElement::scale(self, c)
    }
    fn inverse(&self) -> Result<Self> {
        FormalElement::inverse(self)
    }
    fn norm(&self) -> f64 {
        self.max_magnitude()
    }
    fn is_zero(&self) -> bool {
        FormalElement::is_zero(self)
    }
    fn scalar_split(&self) -> Option<C> {
        self.degree0_scalar()
    }
    fn filtration_cap(&self) -> Option<usize> {
        Some(self.cap())
    }
    fn symmetrize_fast(&self, q: &Self, parity: u32) -> Option<Self> {
        q.as_blade().map(|mu| self.symmetrize_blade(mu, parity))
    }
    fn exp(&self) -> Result<Self> {
        FormalElement::exp(self)
    }
    fn pol(&self) -> Result<Self> {
        FormalElement::pol(self)
    }
}

impl Algebra for DenseMatrix {
    type Scalar = f64;
    const EXACT: bool = false;

    fn zero_like(&self) -> Self {
        DenseMatrix::zeros(self.d())
    }
    fn one_like(&self) -> Self {
        DenseMatrix::identity(self.d())
    }
    fn add(&self, o: &Self) -> Self {
        DenseMatrix::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        DenseMatrix::sub(self, o)
    }
    fn neg(&self) -> Self {
        DenseMatrix::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        DenseMatrix::mul(self, o)
    }
    fn scale(&self, c: &f64) -> Self {
        DenseMatrix::scale(self, *c)
    }
    fn inverse(&self) -> Result<Self> {
        DenseMatrix::inverse(self)
    }
    fn norm(&self) -> f64 {
        DenseMatrix::norm(self)
    }
    fn is_zero(&self) -> bool {
        self.na().iter().all(|x| *x == 0.0)
    }
    fn newton_scale(&self) -> f64 {
        let d = self.determinant().abs();
        if d > 0.0 && d.is_finite() {
            d.powf(-1.0 / self.d() as f64)
        } else {
            1.0
        }
    }
    fn spectral_margin(&self) -> Option<f64> {
        let sp = self.spectrum().ok()?;
        sp.eigenvalues.iter().map(|z| z.re).reduce(f64::min)
    }
    fn exp(&self) -> Result<Self> {
        Ok(DenseMatrix::exp(self))
    }
    fn pol(&self) -> Result<Self> {
        DenseMatrix::pol(self)
    }
}

/// Helpers on tuples of algebra elements.
pub fn tuple_add<A: Algebra>(a: &[A], b: &[A]) -> Vec<A> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn tuple_sub<A: Algebra>(a: &[A], b: &[A]) -> Vec<A> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn tuple_scale<A: Algebra>(a: &[A], c: &A::Scalar) -> Vec<A> {
    a.iter().map(|x| x.scale(c)).collect()
}

/// Largest component norm.
pub fn tuple_norm<A: Algebra>(a: &[A]) -> f64 {
    a.iter().map(Algebra::norm).fold(0.0, f64::max)
}

/// Affine combination `t·a + (1−t)·b`.
pub fn tuple_affine<A: Algebra>(a: &[A], b: &[A], t: &A::Scalar) -> Vec<A> {
    let s = A::Scalar::one().sub(t);
    a.iter().zip(b).map(|(x, y)| x.scale(t).add(&y.scale(&s))).collect()
}
