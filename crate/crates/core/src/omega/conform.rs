//! Extension of formal FQ operations to conform-operations through 2×2 blocks.

use crate::algebra::Algebra;
use crate::block2::Block2;
use crate::error::{Error, Result};
use crate::omega::step::TupleOp;

fn check_len<A>(a: &[A], k: usize) -> Result<()> {
    if a.is_empty() || k == 0 || k > a.len() {
        return Err(Error::Mismatch(format!("anchor {k} out of range for {} inputs", a.len())));
    }
    Ok(())
}

/// Block construction anchored at `A_k`:
/// `B_i = [[0, A_iA_k^{-1}], [s_i·A_iA_k^{-1}, 0]]` with `s_k = −1`, `s_i = 1` otherwise;
/// the result is `(Ψ(B)_i)_{12}·A_k`.
pub fn conform_extend_block<P: TupleOp, A: Algebra>(psi: &P, a: &[A], k: usize) -> Result<Vec<A>> {
    check_len(a, k)?;
    let ak = &a[k - 1];
    let ak_inv = ak.inverse()?;
    let blocks: Vec<Block2<A>> = a
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let c = ai.mul(&ak_inv);
            let lower = if i == k - 1 { c.neg() } else { c.clone() };
            Block2::antidiag(c, lower)
        })
        .collect();
    Ok(psi.apply(&blocks)?.into_iter().map(|o| o.b.mul(ak)).collect())
}

/// Scalar and vectorial parts in ratio form: with `C_i = A_iA_1^{-1}`,
/// returns `(B̃_1, …, B̃_n)` so that the extension is `(B̃_1A_1, …, B̃_nA_1)`.
pub fn conform_ratio_parts<P: TupleOp, A: Algebra>(psi: &P, ratios: &[A]) -> Result<Vec<A>> {
    let one = match ratios.first() {
        Some(c) => c.one_like(),
        None => return Err(Error::Mismatch("no ratios".into())),
    };
    // C_1 = 1 gives the block J = [[0, 1], [−1, 0]].
    let mut blocks = vec![Block2::antidiag(one.clone(), one.neg())];
    blocks.extend(ratios[1..].iter().map(|c| Block2::antidiag(c.clone(), c.clone())));
    Ok(psi.apply(&blocks)?.into_iter().map(|o| o.b).collect())
}

/// Conform extension `Ψ^e` of `ψ`, computed in ratio form.
pub fn conform_extend<P: TupleOp, A: Algebra>(psi: &P, a: &[A]) -> Result<Vec<A>> {
    check_len(a, 1)?;
    let a1_inv = a[0].inverse()?;
    let ratios: Vec<A> = a.iter().map(|x| x.mul(&a1_inv)).collect();
    Ok(conform_ratio_parts(psi, &ratios)?.into_iter().map(|b| b.mul(&a[0])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::connection::ConnectionData;
    use crate::clifford::system::floating_residual;
    use crate::formal::FormalElement;
    use crate::omega::step::{FGsOp, IdentityOp, OmegaOp};
    use crate::rational::Rational;

    type F = FormalElement<Rational>;
    const CAP: usize = 2;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn theta(n: usize, seed: i64) -> F {
        let x = F::r_letter(n, CAP, 1, 0b10)
            .scale(&r(seed, 3))
            .add(&F::r_letter(n, CAP, 2, 0b11).mul(&F::q_gen(n, CAP, 2)).scale(&r(1, seed + 1)));
        F::one(n, CAP).add(&x)
    }

    fn times(a: &[F], w: &F) -> Vec<F> {
        a.iter().map(|x| x.mul(w)).collect()
    }

    /// A floating-based input: the generic input multiplied by a non-scalar unit.
    fn floating_input() -> Vec<F> {
        let w = F::one(2, CAP).scale(&r(3, 5)).add(&F::q_gen(2, CAP, 1).scale(&r(4, 5)));
        times(&F::generic_input(2, CAP), &w)
    }

    #[test]
    fn identity_extends_to_identity() {
        let a = floating_input();
        assert_eq!(conform_extend(&IdentityOp, &a).unwrap(), a);
    }

    #[test]
    fn bivariant_operations_are_reproduced() {
        let a = F::generic_input(2, CAP);
        let fsy = OmegaOp::new(ConnectionData::sy(2), true);
        assert_eq!(conform_extend(&fsy, &a).unwrap(), fsy.apply(&a).unwrap());
        assert_eq!(conform_extend(&FGsOp, &a).unwrap(), FGsOp.apply(&a).unwrap());
        let b = floating_input();
        assert_eq!(conform_extend(&fsy, &b).unwrap(), fsy.apply(&b).unwrap());
    }

    #[test]
    fn extension_is_bivariant() {
        let sy = OmegaOp::new(ConnectionData::sy(2), false);
        let a = floating_input();
        let (t1, t2) = (theta(2, 1), theta(2, 2));
        let moved: Vec<F> = a.iter().map(|x| t1.mul(x).mul(&t2)).collect();
        let lhs = conform_extend(&sy, &moved).unwrap();
        let rhs: Vec<F> = conform_extend(&sy, &a).unwrap().iter().map(|x| t1.mul(x).mul(&t2)).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn extension_is_floating_orthogonalization() {
        let sy = OmegaOp::new(ConnectionData::sy(2), false);
        let out = conform_extend(&sy, &floating_input()).unwrap();
        assert_eq!(floating_residual(&out, 0).unwrap(), 0.0);
    }

    #[test]
    fn rotation_by_anticommuting_unit() {
        // u = exp(tH) with H = Q_1Q_2, cos t = 3/5, sin t = 4/5
        let h = F::q_gen(2, CAP, 1).mul(&F::q_gen(2, CAP, 2));
        let u = F::one(2, CAP).scale(&r(3, 5)).add(&h.scale(&r(4, 5)));
        let a = F::generic_input(2, CAP);
        for psi in [OmegaOp::new(ConnectionData::sy(2), false), OmegaOp::new(ConnectionData::gs(2), false)] {
            let lhs = conform_extend(&psi, &times(&a, &u)).unwrap();
            assert_eq!(lhs, times(&conform_extend(&psi, &a).unwrap(), &u));
        }
    }

    #[test]
    fn block_anchor_matches_ratio_form() {
        let a = floating_input();
        let fsy = OmegaOp::new(ConnectionData::sy(2), true);
        let ratio = conform_extend(&fsy, &a).unwrap();
        assert_eq!(conform_extend_block(&fsy, &a, 1).unwrap(), ratio);
        assert_eq!(conform_extend_block(&fsy, &a, 2).unwrap(), ratio);
        let sy = OmegaOp::new(ConnectionData::sy(2), false);
        assert_eq!(conform_extend_block(&sy, &a, 1).unwrap(), conform_extend(&sy, &a).unwrap());
    }
}
