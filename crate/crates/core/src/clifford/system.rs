//! Verified Clifford and floating Clifford systems.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::ring::Coeff;

/// Default relative tolerance for relation checks in inexact backends.
pub const SYSTEM_TOL: f64 = 1e-8;

/// Residual size: exact backends report `0.0` only for an exact zero.
pub fn residual_of<A: Algebra>(x: &A) -> f64 {
    if A::EXACT {
        if x.is_zero() {
            0.0
        } else {
            x.norm().max(f64::MIN_POSITIVE)
        }
    } else {
        x.norm()
    }
}

/// Whether a residual passes: exactly zero for exact backends, `<= tol` otherwise.
pub fn passes<A: Algebra>(residual: f64, tol: f64) -> bool {
    if A::EXACT {
        residual == 0.0
    } else {
        residual <= tol
    }
}

fn scale_of<A: Algebra>(items: &[A]) -> f64 {
    if A::EXACT {
        1.0
    } else {
        items.iter().map(|x| x.norm() * x.norm()).fold(1.0, f64::max)
    }
}

/// `max_{i,j} |C_iC_j + C_jC_i + 2δ_ij|`, relative to the entry sizes for matrices.
pub fn clifford_residual<A: Algebra>(items: &[A]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..items.len() {
        for j in i..items.len() {
            let mut r = items[i].mul(&items[j]).add(&items[j].mul(&items[i]));
            if i == j {
                r = r.add(&r.one_like().scale(&A::Scalar::from_i64(2)));
            }
            worst = worst.max(residual_of(&r));
        }
    }
    worst / scale_of(items)
}

/// `max_{i,j≠k} |Q_iQ_k^{-1}Q_j + Q_jQ_k^{-1}Q_i + 2δ_ij Q_k|` for anchor `k` (0-based).
pub fn floating_residual<A: Algebra>(items: &[A], k: usize) -> Result<f64> {
    let qk_inv = items[k].inverse()?;
    let mut worst: f64 = 0.0;
    for i in 0..items.len() {
        if i == k {
            continue;
        }
        for j in i..items.len() {
            if j == k {
                continue;
            }
            let mut r = items[i].mul(&qk_inv).mul(&items[j]).add(&items[j].mul(&qk_inv).mul(&items[i]));
            if i == j {
                r = r.add(&items[k].scale(&A::Scalar::from_i64(2)));
            }
            worst = worst.max(residual_of(&r));
        }
    }
    Ok(worst / scale_of(items))
}

/// A tuple verified to satisfy `C_iC_j + C_jC_i = −2δ_ij`.
#[derive(Clone, Debug)]
pub struct CliffordSystem<A: Algebra> {
    pub items: Vec<A>,
    pub residual: f64,
}

impl<A: Algebra> CliffordSystem<A> {
    pub fn verify(items: Vec<A>, tol: f64) -> Result<Self> {
        let residual = clifford_residual(&items);
        if !passes::<A>(residual, tol) {
            return Err(Error::RelationViolation { relation: "C_iC_j + C_jC_i = -2δ_ij".into(), residual });
        }
        Ok(CliffordSystem { items, residual })
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }
}

/// A tuple whose ratios `C_iC_k^{-1}` (`i ≠ k`) form a Clifford system.
#[derive(Clone, Debug)]
pub struct FloatingSystem<A: Algebra> {
    pub items: Vec<A>,
    pub anchor: usize,
    pub residual: f64,
}

impl<A: Algebra> FloatingSystem<A> {
    pub fn verify(items: Vec<A>, anchor: usize, tol: f64) -> Result<Self> {
        let residual = floating_residual(&items, anchor)?;
        if !passes::<A>(residual, tol) {
            return Err(Error::RelationViolation {
                relation: "Q_iQ_k^-1Q_j + Q_jQ_k^-1Q_i = -2δ_ij Q_k".into(),
                residual,
            });
        }
        Ok(FloatingSystem { items, anchor, residual })
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }
}
