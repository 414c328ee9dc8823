//! 2×2 block matrices over an algebra.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::ring::Coeff;

/// `[[a, b], [c, d]]` with entries in `A`.
#[derive(Clone, Debug)]
pub struct Block2<A: Algebra> {
    pub a: A,
    pub b: A,
    pub c: A,
    pub d: A,
}

impl<A: Algebra> Block2<A> {
    pub fn new(a: A, b: A, c: A, d: A) -> Self {
        Block2 { a, b, c, d }
    }

    pub fn diag(a: A, d: A) -> Self {
        let z = a.zero_like();
        Block2 { a, b: z.clone(), c: z, d }
    }

    pub fn antidiag(b: A, c: A) -> Self {
        let z = b.zero_like();
        Block2 { a: z.clone(), b, c, d: z }
    }

    fn map(&self, f: impl Fn(&A) -> A) -> Self {
        Block2 { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }

    fn zip(&self, o: &Self, f: impl Fn(&A, &A) -> A) -> Self {
        Block2 { a: f(&self.a, &o.a), b: f(&self.b, &o.b), c: f(&self.c, &o.c), d: f(&self.d, &o.d) }
    }

    /// Schur-complement inverse with pivot block `a`.
    fn schur_inverse(&self) -> Result<Self> {
        let ai = self.a.inverse()?;
        let s = self.d.sub(&self.c.mul(&ai).mul(&self.b));
        let si = s.inverse()?;
        let aib = ai.mul(&self.b);
        let cai = self.c.mul(&ai);
        Ok(Block2 {
            a: ai.add(&aib.mul(&si).mul(&cai)),
            b: aib.mul(&si).neg(),
            c: si.mul(&cai).neg(),
            d: si,
        })
    }
}

impl<A: Algebra> Algebra for Block2<A> {
    type Scalar = A::Scalar;
    const EXACT: bool = A::EXACT;

    fn zero_like(&self) -> Self {
        let z = self.a.zero_like();
        Block2::diag(z.clone(), z)
    }
    fn one_like(&self) -> Self {
        let e = self.a.one_like();
        Block2::diag(e.clone(), e)
    }
    fn add(&self, o: &Self) -> Self {
        self.zip(o, A::add)
    }
    fn sub(&self, o: &Self) -> Self {
        self.zip(o, A::sub)
    }
    fn neg(&self) -> Self {
        self.map(A::neg)
    }
    fn mul(&self, o: &Self) -> Self {
        Block2 {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }
    fn scale(&self, s: &A::Scalar) -> Self {
        self.map(|x| x.scale(s))
    }
    fn inverse(&self) -> Result<Self> {
        if let Ok(inv) = self.schur_inverse() {
            return Ok(inv);
        }
        // Swap the block columns, invert, and swap the block rows back.
        let swapped = Block2 { a: self.b.clone(), b: self.a.clone(), c: self.d.clone(), d: self.c.clone() };
        let inv = swapped.schur_inverse().map_err(|_| Error::Singular)?;
        Ok(Block2 { a: inv.c, b: inv.d, c: inv.a, d: inv.b })
    }
    fn norm(&self) -> f64 {
        self.a.norm() + self.b.norm() + self.c.norm() + self.d.norm()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }
    fn scalar_split(&self) -> Option<A::Scalar> {
        let x = self.a.scalar_split()?;
        let y = self.d.scalar_split()?;
        let off = self.b.scalar_split()?.is_zero() && self.c.scalar_split()?.is_zero();
        if x == y && off {
            Some(x)
        } else {
            None
        }
    }
    fn filtration_cap(&self) -> Option<usize> {
        self.a.filtration_cap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::FormalElement;
    use crate::Rational;

    #[test]
    fn inverse_with_zero_pivot() {
        let q1 = FormalElement::<Rational>::q_gen(2, 2, 1);
        let r = FormalElement::r_var(2, 2, 2);
        let m = Block2::antidiag(q1.add(&r), q1.clone());
        let inv = Algebra::inverse(&m).unwrap();
        let prod = Algebra::mul(&m, &inv);
        assert!(Algebra::sub(&prod, &m.one_like()).is_zero());
    }
}
