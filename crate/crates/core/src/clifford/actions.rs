//! Adjoint actions on tuples, the opposite-algebra pairs, and the Δ/∇ maps.

use crate::algebra::Algebra;
use crate::clifford::decomp::Symmetrizer;
use crate::error::Result;

/// `(Ad X)A = (XA_iX^{-1})_i`.
pub fn ad_big<A: Algebra>(x: &A, a: &[A]) -> Result<Vec<A>> {
    let xi = x.inverse()?;
    Ok(a.iter().map(|ai| x.mul(ai).mul(&xi)).collect())
}

/// `(ad X)A = ([X, A_i])_i`.
pub fn ad<A: Algebra>(x: &A, a: &[A]) -> Vec<A> {
    a.iter().map(|ai| x.commutator(ai)).collect()
}

/// An element `(X, Y^opp)` of `𝔄 × 𝔄^opp`; products are `(X,Y)(X',Y') = (XX', Y'Y)`.
#[derive(Clone, Debug)]
pub struct FPair<A: Algebra> {
    pub x: A,
    pub y: A,
}

impl<A: Algebra> FPair<A> {
    pub fn new(x: A, y: A) -> Self {
        FPair { x, y }
    }

    pub fn one_like(a: &A) -> Self {
        FPair { x: a.one_like(), y: a.one_like() }
    }

    pub fn add(&self, o: &Self) -> Self {
        FPair { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FPair { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn scale(&self, c: &A::Scalar) -> Self {
        FPair { x: self.x.scale(c), y: self.y.scale(c) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        FPair { x: self.x.mul(&o.x), y: o.y.mul(&self.y) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(FPair { x: self.x.inverse()?, y: self.y.inverse()? })
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(FPair { x: self.x.exp()?, y: self.y.exp()? })
    }

    pub fn norm(&self) -> f64 {
        self.x.norm().max(self.y.norm())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

/// `(Ad^f(X, Y))A = (XA_iY)_i`.
pub fn ad_f_big<A: Algebra>(p: &FPair<A>, a: &[A]) -> Vec<A> {
    a.iter().map(|ai| p.x.mul(ai).mul(&p.y)).collect()
}

/// `(ad^f(X, Y))A = (XA_i + A_iY)_i`.
pub fn ad_f<A: Algebra>(p: &FPair<A>, a: &[A]) -> Vec<A> {
    a.iter().map(|ai| p.x.mul(ai).add(&ai.mul(&p.y))).collect()
}

/// `Δ: X ↦ (X, −X)`.
pub fn delta<A: Algebra>(x: &A) -> FPair<A> {
    FPair { x: x.clone(), y: x.neg() }
}

/// `δ: X ↦ (X, X^{-1})`.
pub fn delta_group<A: Algebra>(x: &A) -> Result<FPair<A>> {
    Ok(FPair { x: x.clone(), y: x.inverse()? })
}

/// `∇: (X, Y) ↦ ½(X − Y)`.
pub fn nabla<A: Algebra>(p: &FPair<A>) -> A {
    p.x.sub(&p.y).half()
}

/// `∇` on tangent tuples: `(X_i) ↦ ((X_i)^1_{Q_i})`.
pub fn nabla_tuple<A: Algebra>(q: &[A], xs: &[A]) -> Result<Vec<A>> {
    q.iter().zip(xs).map(|(qi, xi)| Ok(Symmetrizer::new(qi)?.apply(xi, 1))).collect()
}

/// Projection onto `T_Q𝔄`: removes the part commuting with every `Q_h`.
pub fn project_tangent<A: Algebra>(q: &[A], x: &A) -> Result<A> {
    let mut c = x.clone();
    for qh in q {
        c = Symmetrizer::new(qh)?.apply(&c, 0);
    }
    Ok(x.sub(&c))
}
