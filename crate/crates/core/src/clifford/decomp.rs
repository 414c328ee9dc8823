//! (Anti)symmetrizations and the `(R/Q)` decompositions.

use crate::algebra::Algebra;
use crate::clifford::system::{clifford_residual, passes, residual_of, SYSTEM_TOL};
use crate::error::{Error, Result};
use crate::formal::Mask;

/// Which side the base element is divided from: `R_jQ_j^{-1}` or `Q_j^{-1}R_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// `R_Q^p = ½(R + (−1)^p Q^{-1}RQ)` with a precomputed inverse.
#[derive(Clone, Debug)]
pub struct Symmetrizer<A: Algebra> {
    q: A,
    q_inv: A,
}

impl<A: Algebra> Symmetrizer<A> {
    pub fn new(q: &A) -> Result<Self> {
        Ok(Symmetrizer { q: q.clone(), q_inv: q.inverse()? })
    }

    pub fn apply(&self, r: &A, parity: u32) -> A {
        if let Some(x) = r.symmetrize_fast(&self.q, parity) {
            return x;
        }
        let conj = self.q_inv.mul(r).mul(&self.q);
        let sum = if parity % 2 == 0 { r.add(&conj) } else { r.sub(&conj) };
        sum.half()
    }

    /// Both parts at once: `(R_Q^0, R_Q^1)`.
    pub fn split(&self, r: &A) -> (A, A) {
        if let (Some(a), Some(b)) = (r.symmetrize_fast(&self.q, 0), r.symmetrize_fast(&self.q, 1)) {
            return (a, b);
        }
        let conj = self.q_inv.mul(r).mul(&self.q);
        (r.add(&conj).half(), r.sub(&conj).half())
    }
}

/// `R_Q^p`; requires `q² = ±1`.
pub fn symmetrize<A: Algebra>(r: &A, q: &A, parity: u32) -> Result<A> {
    let q2 = q.mul(q);
    let one = q2.one_like();
    let ok = passes::<A>(residual_of(&q2.add(&one)), SYSTEM_TOL) || passes::<A>(residual_of(&q2.sub(&one)), SYSTEM_TOL);
    if !ok {
        return Err(Error::NotInvolution);
    }
    Ok(Symmetrizer::new(q)?.apply(r, parity))
}

/// Splits `x` along a sequence of elements: entry `m` of the result is the
/// component with parity bit `h` of `m` under the `h`-th symmetrizer.
pub fn split_tree<A: Algebra>(x: &A, syms: &[Option<Symmetrizer<A>>]) -> Vec<A> {
    let mut parts = vec![x.clone()];
    for (h, s) in syms.iter().enumerate() {
        let mut next = vec![x.zero_like(); parts.len() * 2];
        for (m, p) in parts.iter().enumerate() {
            match s {
                Some(s) => {
                    let (a, b) = s.split(p);
                    next[m] = a;
                    next[m | (1 << h)] = b;
                }
                None => next[m] = p.clone(),
            }
        }
        parts = next;
    }
    parts
}

/// All components `(R/Q)_j^ι` (or `(Q∖R)_j^ι`), indexed `[j−1][ι]`.
pub fn decomp_all<A: Algebra>(r: &[A], q: &[A], side: Side) -> Result<Vec<Vec<A>>> {
    let syms = q.iter().map(|x| Symmetrizer::new(x).map(Some)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(r.len());
    for (rj, s) in r.iter().zip(&syms) {
        let qj_inv = &s.as_ref().expect("symmetrizer").q_inv;
        let x = match side {
            Side::Right => rj.mul(qj_inv),
            Side::Left => qj_inv.mul(rj),
        };
        out.push(split_tree(&x, &syms));
    }
    Ok(out)
}

/// Single component `(R/Q)_j^ι` (`j` 1-based).
pub fn decomp<A: Algebra>(r: &[A], q: &[A], j: usize, iota: Mask, side: Side) -> Result<A> {
    let syms = q.iter().map(Symmetrizer::new).collect::<Result<Vec<_>>>()?;
    let qj_inv = &syms[j - 1].q_inv;
    let mut x = match side {
        Side::Right => r[j - 1].mul(qj_inv),
        Side::Left => qj_inv.mul(&r[j - 1]),
    };
    for (h, s) in syms.iter().enumerate() {
        x = s.apply(&x, ((iota >> h) & 1) as u32);
    }
    Ok(x)
}

/// Floating components `(R/Q)_j^{fℓ}` and `(Q∖R)_j^{fℓ}` with anchor `k`
/// (0-based), indexed `[j−1][ℓ]` over all `ℓ ∈ {0,1}^n` (so `ℓ` and its
/// complement share a value).
pub fn decomp_floating_all<A: Algebra>(r: &[A], q: &[A], k: usize, side: Side) -> Result<Vec<Vec<A>>> {
    let n = q.len();
    let qk_inv = q[k].inverse()?;
    let syms = (0..n)
        .map(|s| {
            if s == k {
                return Ok(None);
            }
            let u = match side {
                Side::Right => q[s].mul(&qk_inv),
                Side::Left => qk_inv.mul(&q[s]),
            };
            Symmetrizer::new(&u).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n);
    for (rj, qj) in r.iter().zip(q) {
        let qj_inv = qj.inverse()?;
        let x = match side {
            Side::Right => rj.mul(&qj_inv),
            Side::Left => qj_inv.mul(rj),
        };
        // split_tree indexes by the parity pattern `ℓ_s − ℓ_k`.
        let parts = split_tree(&x, &syms);
        let all = (1usize << n) - 1;
        let full = (0..=all)
            .map(|l| {
                let rel = if (l >> k) & 1 == 1 { l ^ all } else { l };
                parts[rel].clone()
            })
            .collect();
        out.push(full);
    }
    Ok(out)
}

/// Tangency at a Clifford system: all `R_iQ_j + R_jQ_i + Q_iR_j + Q_jR_i` vanish.
pub fn is_tangent<A: Algebra>(q: &[A], r: &[A], tol: f64) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    for i in 0..q.len() {
        for j in i..q.len() {
            let x = r[i].mul(&q[j]).add(&r[j].mul(&q[i])).add(&q[i].mul(&r[j])).add(&q[j].mul(&r[i]));
            worst = worst.max(residual_of(&x));
        }
    }
    (passes::<A>(worst, tol), worst)
}

/// Clifford-system check used by routines that require one.
pub fn require_clifford<A: Algebra>(q: &[A], tol: f64) -> Result<()> {
    let residual = clifford_residual(q);
    if passes::<A>(residual, tol) {
        Ok(())
    } else {
        Err(Error::RelationViolation { relation: "C_iC_j + C_jC_i = -2δ_ij".into(), residual })
    }
}
