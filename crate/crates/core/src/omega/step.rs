//! The iterator `Step_A^ω` and the fixed point `O^ω`.

use crate::algebra::{tuple_sub, Algebra};
use crate::clifford::actions::{ad_big, ad_f_big};
use crate::clifford::connection::{connection_apply, connection_apply_floating, ConnectionData};
use crate::error::{Error, Result};
use crate::gram_schmidt::{ofgs_raw, ogs_raw};
use crate::rational::Rational;
use crate::ring::Coeff;

/// `Step_A^ω Q = (Ad exp Π_Q^ω(A − Q))Q`, or `(Ad^f exp Π_Q^{fω}(A − Q))Q`.
pub fn step<A: Algebra>(omega: &ConnectionData<A::Scalar>, a: &[A], q: &[A], floating: bool) -> Result<Vec<A>> {
    let r = tuple_sub(a, q);
    if floating {
        let p = connection_apply_floating(omega, q, &r)?;
        if p.is_zero() {
            return Ok(q.to_vec());
        }
        Ok(ad_f_big(&p.exp()?, q))
    } else {
        let x = connection_apply(omega, q, &r)?;
        if x.is_zero() {
            return Ok(q.to_vec());
        }
        ad_big(&x.exp()?, q)
    }
}

/// The connection residual `Π_Q^ω(A − Q)`; in the floating case both halves
/// are returned as `(x, y)`, otherwise `y` is zero.
pub fn step_residual<A: Algebra>(omega: &ConnectionData<A::Scalar>, a: &[A], q: &[A], floating: bool) -> Result<(A, A)> {
    let r = tuple_sub(a, q);
    if floating {
        let p = connection_apply_floating(omega, q, &r)?;
        Ok((p.x, p.y))
    } else {
        let x = connection_apply(omega, q, &r)?;
        let z = x.zero_like();
        Ok((x, z))
    }
}

/// Applies `Step` `steps` times starting from `q0`; stops early at an exact fixed point.
pub fn iterate<A: Algebra>(
    omega: &ConnectionData<A::Scalar>,
    a: &[A],
    q0: &[A],
    floating: bool,
    steps: usize,
) -> Result<Vec<A>> {
    if !floating {
        return iterate_gauged(omega, a, q0, steps);
    }
    let mut q = q0.to_vec();
    for _ in 0..steps {
        let (x, y) = step_residual(omega, a, &q, true)?;
        if x.is_zero() && y.is_zero() {
            break;
        }
        q = step(omega, a, &q, true)?;
    }
    Ok(q)
}

/// Ordinary iteration carried out in the frame of `q0`: with `Q^{[k]} = (Ad g_k)q0`
/// and `A_k = (Ad g_k)^{-1}A`, naturality of the connection gives
/// `g_{k+1} = g_k exp Π_{q0}(A_k − q0)`. The symmetrizers of `q0` are reused.
fn iterate_gauged<A: Algebra>(omega: &ConnectionData<A::Scalar>, a: &[A], q0: &[A], steps: usize) -> Result<Vec<A>> {
    let mut g = q0[0].one_like();
    let mut ak = a.to_vec();
    for _ in 0..steps {
        let y = connection_apply(omega, q0, &tuple_sub(&ak, q0))?;
        if y.is_zero() {
            break;
        }
        let e = y.exp()?;
        let ei = e.inverse()?;
        ak = ak.iter().map(|v| ei.mul(v).mul(&e)).collect();
        g = g.mul(&e);
    }
    ad_big(&g, q0)
}

/// Formal `O^ω(A)` (or `O^{fω}`): `D` steps from `O^GS(A)` (resp. `O^fGS`),
/// where `D` is the degree cap. Exact because each step gains one degree.
pub fn o_omega<A: Algebra>(omega: &ConnectionData<A::Scalar>, a: &[A], floating: bool) -> Result<Vec<A>> {
    let steps = a
        .first()
        .ok_or_else(|| Error::Mismatch("empty input tuple".into()))?
        .filtration_cap()
        .ok_or_else(|| Error::Mismatch("exact fixed point needs a filtered backend; use the analytic iteration".into()))?;
    if omega.n != a.len() {
        return Err(Error::Mismatch(format!("connection of size {} for {} inputs", omega.n, a.len())));
    }
    let q0 = if floating { ofgs_raw(a)? } else { ogs_raw(a)? };
    // The fixed point only sees A up to a positive scalar, but the degree gain per
    // step needs A − Q of degree ≥ 1, so a uniform factor c is divided out first.
    let mut scales = Vec::with_capacity(a.len());
    for (x, q) in a.iter().zip(&q0) {
        scales.push(x.mul(&q.inverse()?).scalar_split());
    }
    if let Some(Some(c)) = scales.first() {
        if scales.iter().any(|s| s.as_ref() != Some(c)) {
            if scales.iter().all(Option::is_some) {
                return Err(Error::Mismatch("degree-0 part is not a uniform multiple of a Clifford system".into()));
            }
        } else if *c != A::Scalar::one() {
            let inv = c.inv().ok_or(Error::BadLeadingTerm)?;
            let a: Vec<A> = a.iter().map(|x| x.scale(&inv)).collect();
            return iterate(omega, &a, &q0, floating, steps);
        }
    }
    iterate(omega, a, &q0, floating, steps)
}

/// Operations on tuples that can run over any backend.
pub trait TupleOp {
    fn apply<A: Algebra>(&self, a: &[A]) -> Result<Vec<A>>;
}

/// `O^GS`.
#[derive(Clone, Copy, Debug)]
pub struct GsOp;

impl TupleOp for GsOp {
    fn apply<A: Algebra>(&self, a: &[A]) -> Result<Vec<A>> {
        ogs_raw(a)
    }
}

/// `O^fGS`.
#[derive(Clone, Copy, Debug)]
pub struct FGsOp;

impl TupleOp for FGsOp {
    fn apply<A: Algebra>(&self, a: &[A]) -> Result<Vec<A>> {
        ofgs_raw(a)
    }
}

/// The identity operation.
#[derive(Clone, Copy, Debug)]
pub struct IdentityOp;

impl TupleOp for IdentityOp {
    fn apply<A: Algebra>(&self, a: &[A]) -> Result<Vec<A>> {
        Ok(a.to_vec())
    }
}

/// Formal `O^ω` or `O^{fω}` with rational connection data.
#[derive(Clone, Debug)]
pub struct OmegaOp {
    pub data: ConnectionData<Rational>,
    pub floating: bool,
}

impl OmegaOp {
    pub fn new(data: ConnectionData<Rational>, floating: bool) -> Self {
        OmegaOp { data, floating }
    }
}

impl TupleOp for OmegaOp {
    fn apply<A: Algebra>(&self, a: &[A]) -> Result<Vec<A>> {
        let data = self.data.convert(A::Scalar::from_rational);
        o_omega(&data, a, self.floating)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::connection::{zero_set_predicate, PredicateKind};
    use crate::clifford::system::{clifford_residual, floating_residual};
    use crate::formal::{FormalElement, Letter, Word};

    type F = FormalElement<Rational>;

    fn min_degree(x: &F) -> usize {
        x.min_degree().unwrap_or(usize::MAX)
    }

    #[test]
    fn fixed_point_at_clifford_input() {
        let q = F::base_system(2, 3);
        let sy = ConnectionData::<Rational>::sy(2);
        assert_eq!(step(&sy, &q, &q, false).unwrap(), q);
        assert_eq!(o_omega(&sy, &q, false).unwrap(), q);
        assert_eq!(o_omega(&sy, &q, true).unwrap(), q);
    }

    #[test]
    fn gs_data_reproduces_ogs() {
        let a = F::generic_input(2, 3);
        let gs = ConnectionData::<Rational>::gs(2);
        assert_eq!(o_omega(&gs, &a, false).unwrap(), ogs_raw(&a).unwrap());
        assert_eq!(o_omega(&gs, &a, true).unwrap(), ofgs_raw(&a).unwrap());
    }

    #[test]
    fn each_step_gains_a_degree() {
        let d = 4;
        let a = F::generic_input(2, d);
        let sy = ConnectionData::<Rational>::sy(2);
        let mut q = F::base_system(2, d);
        for k in 0..=3 {
            let (x, _) = step_residual(&sy, &a, &q, false).unwrap();
            assert!(min_degree(&x) >= k + 1, "k = {k}");
            q = step(&sy, &a, &q, false).unwrap();
            assert_eq!(clifford_residual(&q), 0.0);
        }
    }

    #[test]
    fn gauged_and_direct_iterations_agree() {
        let a = F::generic_input(2, 3);
        let sy = ConnectionData::<Rational>::sy(2);
        let q0 = ogs_raw(&a).unwrap();
        let mut q = q0.clone();
        for _ in 0..3 {
            q = step(&sy, &a, &q, false).unwrap();
        }
        assert_eq!(iterate(&sy, &a, &q0, false, 3).unwrap(), q);
    }

    #[test]
    fn characterization_of_the_fixed_point() {
        let a = F::generic_input(2, 3);
        let sy = ConnectionData::<Rational>::sy(2);
        let q = o_omega(&sy, &a, false).unwrap();
        assert_eq!(clifford_residual(&q), 0.0);
        assert!(step_residual(&sy, &a, &q, false).unwrap().0.is_zero());
        assert!(zero_set_predicate(&PredicateKind::Sy, &q, &a, 0.0).unwrap().0);
        for (x, y) in a.iter().zip(&q) {
            assert!(min_degree(&x.sub(y)) >= 1);
        }
        let fq = o_omega(&sy, &a, true).unwrap();
        assert_eq!(floating_residual(&fq, 0).unwrap(), 0.0);
        assert!(zero_set_predicate(&PredicateKind::FSy, &fq, &a, 0.0).unwrap().0);
    }

    #[test]
    fn fixed_point_is_unique() {
        // Restarting from an iterate disturbed in top degree lands on the same point.
        let d = 3;
        let a = F::generic_input(2, d);
        let sy = ConnectionData::<Rational>::sy(2);
        let target = o_omega(&sy, &a, false).unwrap();
        let w = Word { letters: vec![Letter::new(1, 0b01); d], q: 0 };
        let kick = F::monomial(2, d, w, Rational::new(3, 7)).add(&F::one(2, d));
        let start = ad_big(&kick, &ogs_raw(&a).unwrap()).unwrap();
        assert_eq!(iterate(&sy, &a, &start, false, d + 1).unwrap(), target);
    }
}
