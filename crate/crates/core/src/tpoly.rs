//! Truncated power series in a commuting variable `t` with rational coefficients.

use std::fmt;

use crate::rational::Rational;
use crate::ring::Coeff;

/// `Σ c_k t^k`, known modulo `t^(prec+1)`; `prec = None` means the value is an
/// exact polynomial (ring constants and literals).
///
/// Operations take the smaller precision of their operands.
#[derive(Clone)]
pub struct TPoly {
    c: Vec<Rational>,
    prec: Option<usize>,
}

fn min_prec(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl TPoly {
    pub fn new(coeffs: Vec<Rational>, prec: Option<usize>) -> TPoly {
        let mut p = TPoly { c: coeffs, prec };
        p.normalize();
        p
    }

    pub fn exact(coeffs: Vec<Rational>) -> TPoly {
        TPoly::new(coeffs, None)
    }

    pub fn constant(r: Rational) -> TPoly {
        TPoly::new(vec![r], None)
    }

    /// The variable `t` itself, tracked to precision `prec`.
    pub fn t(prec: usize) -> TPoly {
        TPoly::new(vec![Rational::zero(), Rational::one()], Some(prec))
    }

    pub fn prec(&self) -> Option<usize> {
        self.prec
    }

    pub fn with_prec(&self, prec: usize) -> TPoly {
        TPoly::new(self.c.clone(), min_prec(self.prec, Some(prec)))
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.c.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    /// Sum of the known coefficients at a rational point.
    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for x in self.c.iter().rev() {
            acc = &(&acc * t) + x;
        }
        acc
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            self.c.truncate(p + 1);
        }
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
    }
}

impl PartialEq for TPoly {
    fn eq(&self, other: &Self) -> bool {
        let len = match min_prec(self.prec, other.prec) {
            Some(p) => p + 1,
            None => self.c.len().max(other.c.len()),
        };
        (0..len).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            parts.push(match k {
                0 => format!("{x}"),
                1 => format!("{x}*t"),
                _ => format!("{x}*t^{k}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(p) = self.prec {
            parts.push(format!("O(t^{})", p + 1));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Coeff for TPoly {
    fn zero() -> Self {
        TPoly::exact(vec![])
    }
    fn one() -> Self {
        TPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let c = (0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        TPoly::new(c, min_prec(self.prec, other.prec))
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        let prec = min_prec(self.prec, other.prec);
        if self.c.is_empty() || other.c.is_empty() {
            return TPoly::new(vec![], prec);
        }
        let mut len = self.c.len() + other.c.len() - 1;
        if let Some(p) = prec {
            len = len.min(p + 1);
        }
        let mut c = vec![Rational::zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        TPoly::new(c, prec)
    }
    fn neg(&self) -> Self {
        TPoly::new(self.c.iter().map(|x| -x).collect(), self.prec)
    }
    fn from_rational(r: &Rational) -> Self {
        TPoly::constant(r.clone())
    }
    fn inv(&self) -> Option<Self> {
        let c0 = self.c.first()?.recip()?;
        if self.c.len() == 1 {
            return Some(TPoly::new(vec![c0], self.prec));
        }
        let p = self.prec?;
        let mut out = vec![c0.clone()];
        for k in 1..=p {
            let mut s = Rational::zero();
            for i in 1..=k {
                s = &s + &(&self.coeff(i) * &out[k - i]);
            }
            out.push(-&(&s * &c0));
        }
        Some(TPoly::new(out, Some(p)))
    }
    fn is_unit(&self) -> bool {
        match self.c.first() {
            Some(c0) if !c0.is_zero() => self.c.len() == 1 || self.prec.is_some(),
            _ => false,
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if self.c.is_empty() {
            return Some(self.clone());
        }
        let s0 = self.c[0].sqrt_exact()?;
        if s0.is_zero() {
            return None;
        }
        if self.c.len() == 1 {
            return Some(TPoly::new(vec![s0], self.prec));
        }
        let p = self.prec?;
        let two_s0 = &s0 + &s0;
        let mut out = vec![s0];
        for k in 1..=p {
            let mut s = self.coeff(k);
            for i in 1..k {
                s = &s - &(&out[i] * &out[k - i]);
            }
            out.push(&s / &two_s0);
        }
        Some(TPoly::new(out, Some(p)))
    }
    fn approx(&self) -> f64 {
        self.coeff(0).to_f64()
    }
    fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }
    fn from_f64(x: f64) -> Self {
        TPoly::constant(Rational::from_f64(x))
    }
}
