//! Truncated polynomials `Σ_k x_k ε^k` with coefficients in an algebra.
//!
//! Jets carry forward-mode derivatives of any generic algorithm: running an
//! algorithm on `a + ε·v` yields its directional derivatives in `v`.

use crate::algebra::Algebra;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Jet<A: Algebra> {
    c: Vec<A>,
}

impl<A: Algebra> Jet<A> {
    /// Coefficients `x_0, …, x_m`; the order is `coeffs.len() − 1`.
    pub fn new(coeffs: Vec<A>) -> Jet<A> {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { c: coeffs }
    }

    pub fn constant(a: A, order: usize) -> Jet<A> {
        let z = a.zero_like();
        let mut c = vec![a];
        c.resize(order + 1, z);
        Jet { c }
    }

    /// `a + ε·v`.
    pub fn line(a: A, v: A, order: usize) -> Jet<A> {
        let mut j = Jet::constant(a, order.max(1));
        j.c[1] = v;
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &A {
        &self.c[k]
    }

    pub fn coeffs(&self) -> &[A] {
        &self.c
    }

    pub fn base(&self) -> &A {
        &self.c[0]
    }

    /// Value of the polynomial at `ε = s`.
    pub fn eval(&self, s: &A::Scalar) -> A {
        let mut acc = self.c[self.order()].clone();
        for x in self.c.iter().rev().skip(1) {
            acc = acc.scale(s).add(x);
        }
        acc
    }

    fn zip(&self, o: &Self, f: impl Fn(&A, &A) -> A) -> Self {
        assert_eq!(self.order(), o.order(), "jet orders differ");
        Jet { c: self.c.iter().zip(&o.c).map(|(x, y)| f(x, y)).collect() }
    }

    fn map(&self, f: impl Fn(&A) -> A) -> Self {
        Jet { c: self.c.iter().map(f).collect() }
    }

    fn is_constant(&self) -> bool {
        self.c.iter().skip(1).all(Algebra::is_zero)
    }
}

impl<A: Algebra> Algebra for Jet<A> {
    type Scalar = A::Scalar;
    const EXACT: bool = A::EXACT;

    fn zero_like(&self) -> Self {
        Jet::constant(self.c[0].zero_like(), self.order())
    }
    fn one_like(&self) -> Self {
        Jet::constant(self.c[0].one_like(), self.order())
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
        assert_eq!(self.order(), o.order(), "jet orders differ");
        let m = self.order();
        let mut c: Vec<A> = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut acc = self.c[0].zero_like();
            for i in 0..=k {
                if self.c[i].is_zero() || o.c[k - i].is_zero() {
                    continue;
                }
                acc = acc.add(&self.c[i].mul(&o.c[k - i]));
            }
            c.push(acc);
        }
        Jet { c }
    }
    fn scale(&self, s: &A::Scalar) -> Self {
        self.map(|x| x.scale(s))
    }
    fn inverse(&self) -> Result<Self> {
        let y0 = self.c[0].inverse()?;
        let mut out = vec![y0.clone()];
        for k in 1..=self.order() {
            let mut acc = self.c[0].zero_like();
            for i in 1..=k {
                if self.c[i].is_zero() {
                    continue;
                }
                acc = acc.add(&self.c[i].mul(&out[k - i]));
            }
            out.push(y0.mul(&acc).neg());
        }
        Ok(Jet { c: out })
    }
    fn norm(&self) -> f64 {
        self.c.iter().map(Algebra::norm).sum()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Algebra::is_zero)
    }
    fn scalar_split(&self) -> Option<A::Scalar> {
        self.c[0].scalar_split()
    }
    fn newton_scale(&self) -> f64 {
        self.c[0].newton_scale()
    }
    fn spectral_margin(&self) -> Option<f64> {
        self.c[0].spectral_margin()
    }
    fn filtration_cap(&self) -> Option<usize> {
        Some(self.c[0].filtration_cap().unwrap_or(0) + self.order())
    }
    fn symmetrize_fast(&self, q: &Self, parity: u32) -> Option<Self> {
        if !q.is_constant() {
            return None;
        }
        let c = self
            .c
            .iter()
            .map(|x| x.symmetrize_fast(&q.c[0], parity))
            .collect::<Option<Vec<A>>>()?;
        Some(Jet { c })
    }
    fn exp(&self) -> Result<Self> {
        if self.c[0].is_zero() {
            // Nilpotent: the series has at most `order` nonzero powers.
            let mut acc = self.one_like();
            let mut term = acc.clone();
            for k in 1..=self.order() {
                let f = <A::Scalar as crate::ring::Coeff>::from_rational(&crate::Rational::new(1, k as i64));
                term = term.mul(self).scale(&f);
                acc = acc.add(&term);
            }
            return Ok(acc);
        }
        // Default series otherwise.
        let mut acc = self.one_like();
        let mut term = acc.clone();
        for k in 1..200 {
            let f = <A::Scalar as crate::ring::Coeff>::from_rational(&crate::Rational::new(1, k as i64));
            term = term.mul(self).scale(&f);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
            if !A::EXACT && term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        Ok(acc)
    }
}
