//! Sparse linear combinations of normal-form words, truncated at a filtration degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::word::{mono_mul, Letter, Mask, Word, MAX_GENERATORS};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::ring::Coeff;
use crate::tpoly::TPoly;

/// Default truncation degree: enough for all degree-2 tables plus one guard degree.
pub const DEFAULT_DEGREE_CAP: usize = 3;

/// An element of the truncated algebra over `Q_1..Q_n` and the typed letters.
///
/// No zero coefficients are stored and every word has degree `<= cap`.
#[derive(Clone, PartialEq)]
pub struct FormalElement<C: Coeff = Rational> {
    n: usize,
    cap: usize,
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> FormalElement<C> {
    pub fn zero(n: usize, cap: usize) -> Self {
        assert!(n >= 1 && n <= MAX_GENERATORS, "unsupported generator count {n}");
        FormalElement { n, cap, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, cap: usize, c: C) -> Self {
        Self::monomial(n, cap, Word::one(), c)
    }

    pub fn one(n: usize, cap: usize) -> Self {
        Self::scalar(n, cap, C::one())
    }

    pub fn monomial(n: usize, cap: usize, w: Word, c: C) -> Self {
        let mut e = Self::zero(n, cap);
        if w.degree() <= cap && !c.is_zero() {
            e.terms.insert(w, c);
        }
        e
    }

    /// The generator `Q_i` (1-based).
    pub fn q_gen(n: usize, cap: usize, i: usize) -> Self {
        Self::blade(n, cap, 1 << (i - 1))
    }

    pub fn blade(n: usize, cap: usize, q: Mask) -> Self {
        Self::monomial(n, cap, Word::blade(q), C::one())
    }

    pub fn r_letter(n: usize, cap: usize, j: usize, iota: Mask) -> Self {
        Self::monomial(n, cap, Word::letter(Letter::new(j, iota)), C::one())
    }

    /// The free perturbation `R_j = Σ_ι r_{j,ι} Q_j`.
    pub fn r_var(n: usize, cap: usize, j: usize) -> Self {
        let mut e = Self::zero(n, cap);
        if cap == 0 {
            return e;
        }
        for iota in 0..(1u32 << n) {
            let w = Word { letters: vec![Letter::new(j, iota as Mask)], q: 1 << (j - 1) };
            e.terms.insert(w, C::one());
        }
        e
    }

    /// The generic input tuple `A_j = Q_j + R_j`.
    pub fn generic_input(n: usize, cap: usize) -> Vec<Self> {
        (1..=n).map(|j| Self::q_gen(n, cap, j).add(&Self::r_var(n, cap, j))).collect()
    }

    /// The base Clifford system `(Q_1, …, Q_n)`.
    pub fn base_system(n: usize, cap: usize) -> Vec<Self> {
        (1..=n).map(|j| Self::q_gen(n, cap, j)).collect()
    }

    pub fn from_terms(n: usize, cap: usize, terms: impl IntoIterator<Item = (Word, C)>) -> Self {
        let mut e = Self::zero(n, cap);
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Word, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    fn add_term(&mut self, w: Word, c: C) {
        if w.degree() > self.cap || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.cap != other.cap {
            return Err(Error::Mismatch(format!(
                "(n={}, D={}) vs (n={}, D={})",
                self.n, self.cap, other.n, other.cap
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Sum; panics when `n` or the degree cap differ (see `checked_add`).
    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("formal add")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.n, self.cap);
        }
        self.map_coeffs(|c| c.mul(s))
    }

    /// Product; panics when `n` or the degree cap differ (see `checked_mul`).
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("formal mul")
    }

    fn by_degree(&self) -> Vec<Vec<(&Word, &C)>> {
        let mut buckets = vec![Vec::new(); self.cap + 1];
        for (w, c) in &self.terms {
            buckets[w.degree()].push((w, c));
        }
        buckets
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let a = self.by_degree();
        let b = other.by_degree();
        let mut acc: HashMap<Word, C> = HashMap::new();
        for (da, ta) in a.iter().enumerate() {
            for tb in b.iter().take(self.cap + 1 - da) {
                for (wa, ca) in ta {
                    for (wb, cb) in tb {
                        let (neg, w) = mono_mul(wa, wb);
                        let mut c = ca.mul(cb);
                        if c.is_zero() {
                            continue;
                        }
                        if neg {
                            c = c.neg();
                        }
                        match acc.get_mut(&w) {
                            Some(old) => *old = old.add(&c),
                            None => {
                                acc.insert(w, c);
                            }
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        FormalElement { n: self.n, cap: self.cap, terms }
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        FormalElement { n: self.n, cap: self.cap, terms }
    }

    /// Change of coefficient ring.
    pub fn convert<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FormalElement<D> {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        FormalElement { n: self.n, cap: self.cap, terms }
    }

    pub fn filter_terms(&self, keep: impl Fn(&Word, &C) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, c)| keep(w, c))
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FormalElement { n: self.n, cap: self.cap, terms }
    }

    /// Drop all words of degree `> d` (keeps the cap unchanged).
    pub fn truncate(&self, d: usize) -> Self {
        self.filter_terms(|w, _| w.degree() <= d)
    }

    /// Same element viewed with a smaller (or equal) degree cap.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut e = self.truncate(cap);
        e.cap = cap;
        e
    }

    pub fn degree_part(&self, d: usize) -> Self {
        self.filter_terms(|w, _| w.degree() == d)
    }

    /// Lowest degree among stored words; `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).min()
    }

    /// Degree-0 part as a dense vector indexed by blade mask.
    pub fn degree0_vector(&self) -> Vec<C> {
        let mut v = vec![C::zero(); 1 << self.n];
        for (w, c) in &self.terms {
            if w.degree() == 0 {
                v[w.q as usize] = c.clone();
            }
        }
        v
    }

    /// Coefficient of the unit word when the degree-0 part is a pure scalar.
    pub fn degree0_scalar(&self) -> Option<C> {
        let v = self.degree0_vector();
        if v.iter().skip(1).all(Coeff::is_zero) {
            Some(v[0].clone())
        } else {
            None
        }
    }

    /// If the element is `c·Q^μ` for a single blade, returns `μ`.
    pub fn as_blade(&self) -> Option<Mask> {
        if self.terms.len() != 1 {
            return None;
        }
        let (w, _) = self.terms.iter().next()?;
        if w.degree() == 0 {
            Some(w.q)
        } else {
            None
        }
    }

    /// Keep the terms with the given parity under conjugation by `Q^μ`;
    /// this is the (anti)symmetrization with respect to `±Q^μ`.
    pub fn symmetrize_blade(&self, mu: Mask, parity: u32) -> Self {
        self.filter_terms(|w, _| w.conjugation_parity(mu) == parity % 2)
    }

    /// Inverse of the degree-0 part inside the `2^n`-dimensional Clifford
    /// subalgebra, solved from the regular representation.
    fn degree0_inverse(&self) -> Result<Self> {
        let dim = 1usize << self.n;
        let x0 = self.degree0_vector();
        // Column `m` of the left-regular matrix holds `x0 · Q^m`.
        let mut a: Vec<Vec<C>> = vec![vec![C::zero(); dim + 1]; dim];
        for (m, _) in (0..dim).enumerate() {
            for (k, c) in x0.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (neg, w) = mono_mul(&Word::blade(k as Mask), &Word::blade(m as Mask));
                let v = if neg { c.neg() } else { c.clone() };
                let row = w.q as usize;
                a[row][m] = a[row][m].add(&v);
            }
        }
        a[0][dim] = C::one();
        for col in 0..dim {
            let pivot = (col..dim).find(|&r| a[r][col].is_unit()).ok_or(Error::SingularLeadingTerm)?;
            a.swap(col, pivot);
            let inv = a[col][col].inv().ok_or(Error::SingularLeadingTerm)?;
            for v in a[col].iter_mut() {
                *v = v.mul(&inv);
            }
            for r in 0..dim {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for k in col..=dim {
                    let t = a[col][k].mul(&f);
                    a[r][k] = a[r][k].sub(&t);
                }
            }
        }
        let terms = (0..dim).map(|m| (Word::blade(m as Mask), a[m][dim].clone()));
        Ok(Self::from_terms(self.n, self.cap, terms))
    }

    /// `x^{-1} = Σ_k (-x_0^{-1} x_+)^k x_0^{-1}`; exact up to the degree cap.
    pub fn inverse(&self) -> Result<Self> {
        let y0 = self.degree0_inverse()?;
        let plus = self.filter_terms(|w, _| w.degree() > 0);
        let t = y0.mul(&plus).neg();
        let mut acc = Self::one(self.n, self.cap);
        let mut power = acc.clone();
        for _ in 0..self.cap {
            power = power.mul(&t);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.mul(&y0))
    }

    /// Exponential series; the argument must have no degree-0 part.
    pub fn exp(&self) -> Result<Self> {
        if self.terms.keys().any(|w| w.degree() == 0) {
            return Err(Error::NonNilpotentArgument);
        }
        let mut acc = Self::one(self.n, self.cap);
        let mut power = acc.clone();
        for k in 1..=self.cap {
            let f = C::from_rational(&Rational::new(1, k as i64));
            power = power.mul(self).scale(&f);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    /// `s^{-1/2}` for `s = c(1 + T)` with `c` a scalar admitting a square root
    /// in the coefficient ring and `T` of positive degree.
    pub fn inv_sqrt(&self) -> Result<Self> {
        let c = self.degree0_scalar().ok_or(Error::BadLeadingTerm)?;
        let root = c.sqrt().ok_or(Error::BadLeadingTerm)?;
        let c_inv = c.inv().ok_or(Error::BadLeadingTerm)?;
        let root_inv = root.inv().ok_or(Error::BadLeadingTerm)?;
        let t = self.scale(&c_inv).sub(&Self::one(self.n, self.cap));
        let half = Rational::new(-1, 2);
        let mut acc = Self::one(self.n, self.cap);
        let mut power = acc.clone();
        for r in 1..=self.cap {
            power = power.mul(&t);
            if power.is_zero() {
                break;
            }
            let b = C::from_rational(&Rational::binomial(&half, r));
            acc = acc.add(&power.scale(&b));
        }
        Ok(acc.scale(&root_inv))
    }

    /// `pol H = H (-H²)^{-1/2}`; requires `-H²` to have a scalar degree-0 part.
    pub fn pol(&self) -> Result<Self> {
        let s = self.mul(self).neg();
        Ok(self.mul(&s.inv_sqrt()?))
    }

    /// `pol(Q_k + R)` with the degree-0 part checked to be exactly `Q_k`.
    pub fn pol_at(&self, k: usize) -> Result<Self> {
        let expected = Self::q_gen(self.n, self.cap, k);
        if self.truncate(0) != expected {
            return Err(Error::BadDecomposition(k));
        }
        self.pol()
    }

    /// Sum of `|coefficient magnitude|` maxima, used as a residual size.
    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({c:?}) {}", w.display(self.n)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl FormalElement<TPoly> {
    /// Coefficientwise value at `t = 0`.
    pub fn at_t0(&self) -> FormalElement<Rational> {
        self.convert(|c| c.coeff(0))
    }

    /// Coefficientwise value at a rational `t` (uses the known coefficients).
    pub fn eval_t(&self, t: &Rational) -> FormalElement<Rational> {
        self.convert(|c| c.eval(t))
    }

    /// Lowest `t`-power present in any coefficient.
    pub fn t_valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(TPoly::valuation).min()
    }
}

impl FormalElement<Rational> {
    pub fn to_tpoly(&self, prec: Option<usize>) -> FormalElement<TPoly> {
        self.convert(|c| TPoly::new(vec![c.clone()], prec))
    }
}

impl<C: Coeff> fmt::Debug for FormalElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalElement(n={}, D={}; {})", self.n, self.cap, self.display())
    }
}
