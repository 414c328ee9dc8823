//! Evaluation of formal elements in a matrix algebra.

use std::collections::BTreeMap;

use crate::clifford::decomp::{decomp_all, Side};
use crate::clifford::system::clifford_residual;
use crate::error::{Error, Result};
use crate::formal::{FormalElement, Letter, Mask, Word};
use crate::matrix::DenseMatrix;
use crate::rational::Rational;

/// Matrices for the generators `Q_h` and the typed letters `r_{j,ι}`.
/// Letters without an entry evaluate to zero.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub q: Vec<DenseMatrix>,
    pub r: BTreeMap<Letter, DenseMatrix>,
}

impl Assignment {
    /// Checks the Clifford relations and the typed commutation rules,
    /// relative to the size of the matrices involved.
    pub fn new(q: Vec<DenseMatrix>, r: BTreeMap<Letter, DenseMatrix>, tol: f64) -> Result<Self> {
        let residual = clifford_residual(&q);
        if residual > tol {
            return Err(Error::RelationViolation { relation: "Q_iQ_j + Q_jQ_i = -2δ_ij".into(), residual });
        }
        for (l, m) in &r {
            let scale = m.norm().max(1e-300);
            for (h, qh) in q.iter().enumerate() {
                let anti = (l.iota >> h) & 1 == 1;
                let x = if anti { qh.anticommutator(m) } else { qh.commutator(m) };
                let residual = x.norm() / (scale * qh.norm().max(1.0));
                if residual > tol {
                    let kind = if anti { "anticommutes" } else { "commutes" };
                    return Err(Error::RelationViolation {
                        relation: format!("r_{{{},{:b}}} {kind} with Q_{}", l.j, l.iota, h + 1),
                        residual,
                    });
                }
            }
        }
        Ok(Assignment { q, r })
    }

    /// Assignment induced by a perturbation tuple: `r_{j,ι} = (R/Q)_j^ι`,
    /// so that `R_j` evaluates to the given matrix.
    pub fn from_perturbation(q: &[DenseMatrix], r: &[DenseMatrix], tol: f64) -> Result<Self> {
        let n = q.len();
        let d = decomp_all(r, q, Side::Right)?;
        let mut letters = BTreeMap::new();
        for (j, parts) in d.into_iter().enumerate() {
            for (iota, m) in parts.into_iter().enumerate() {
                letters.insert(Letter::new(j + 1, iota as Mask), m);
            }
        }
        debug_assert!(letters.len() == n << n);
        Self::new(q.to_vec(), letters, tol)
    }

    fn dim(&self) -> usize {
        self.q[0].d()
    }

    fn blade(&self, kappa: Mask) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.dim());
        for (h, qh) in self.q.iter().enumerate() {
            if (kappa >> h) & 1 == 1 {
                m = m.mul(qh);
            }
        }
        m
    }

    fn word(&self, w: &Word) -> Option<DenseMatrix> {
        let mut m = DenseMatrix::identity(self.dim());
        for l in &w.letters {
            m = m.mul(self.r.get(l)?);
        }
        Some(m.mul(&self.blade(w.q)))
    }
}

/// Evaluates `e` under the homomorphism fixed by `assignment`.
pub fn eval_into_matrices(e: &FormalElement<Rational>, assignment: &Assignment) -> Result<DenseMatrix> {
    if assignment.q.len() != e.n() {
        return Err(Error::Mismatch(format!("{} generators assigned, element has n = {}", assignment.q.len(), e.n())));
    }
    let mut acc = DenseMatrix::zeros(assignment.dim());
    for (w, c) in e.terms() {
        if let Some(m) = assignment.word(w) {
            acc = acc.add(&m.scale(c.to_f64()));
        }
    }
    Ok(acc)
}

/// Evaluates a tuple of formal elements.
pub fn eval_tuple(e: &[FormalElement<Rational>], assignment: &Assignment) -> Result<Vec<DenseMatrix>> {
    e.iter().map(|x| eval_into_matrices(x, assignment)).collect()
}
