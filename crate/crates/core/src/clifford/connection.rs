//! Connection data `ω_j^ι` and the connections `Π_Q^ω`, `Π_Q^{fω}`, `Π_Q^η`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::algebra::Algebra;
use crate::clifford::actions::FPair;
use crate::clifford::decomp::{decomp_all, decomp_floating_all, Side, Symmetrizer};
use crate::clifford::system::{passes, residual_of};
use crate::error::{Error, Result};
use crate::formal::Mask;
use crate::rational::Rational;
use crate::ring::Coeff;
use crate::tpoly::TPoly;

/// Coefficients `ω_j^ι` with `ω_j^ι = 0` when `ι_j = 0` (support) and
/// `Σ_j ω_j^ι = 1` for `ι ≠ 0` (normalization). Zero entries are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData<S: Coeff = Rational> {
    pub n: usize,
    pub omega: BTreeMap<(usize, Mask), S>,
}

impl<S: Coeff> ConnectionData<S> {
    fn from_fn(n: usize, f: impl Fn(usize, Mask) -> S) -> Self {
        let mut omega = BTreeMap::new();
        for iota in 1..(1u32 << n) {
            let iota = iota as Mask;
            for j in 1..=n {
                if (iota >> (j - 1)) & 1 == 1 {
                    let c = f(j, iota);
                    if !c.is_zero() {
                        omega.insert((j, iota), c);
                    }
                }
            }
        }
        ConnectionData { n, omega }
    }

    /// Gram–Schmidt data: weight 1 on the lowest set index of `ι`.
    pub fn gs(n: usize) -> Self {
        Self::from_fn(n, |j, iota| if iota.trailing_zeros() as usize == j - 1 { S::one() } else { S::zero() })
    }

    /// Reverse Gram–Schmidt data: weight 1 on the highest set index of `ι`.
    pub fn reverse_gs(n: usize) -> Self {
        Self::from_fn(n, |j, iota| if 16 - iota.leading_zeros() as usize == j { S::one() } else { S::zero() })
    }

    /// Symmetric data `ι_j / |ι|`.
    pub fn sy(n: usize) -> Self {
        Self::from_fn(n, |_, iota| S::from_rational(&Rational::new(1, iota.count_ones() as i64)))
    }

    /// Weighted data `w_jι_j / Σ_h w_hι_h`, without a positivity check.
    pub fn weighted_unchecked(w: &[S]) -> Result<Self> {
        let n = w.len();
        let mut omega = BTreeMap::new();
        for iota in 1..(1u32 << n) {
            let iota = iota as Mask;
            let mut total = S::zero();
            for (h, wh) in w.iter().enumerate() {
                if (iota >> h) & 1 == 1 {
                    total = total.add(wh);
                }
            }
            let inv = total.inv().ok_or(Error::NonPositiveWeight)?;
            for (h, wh) in w.iter().enumerate() {
                if (iota >> h) & 1 == 1 && !wh.is_zero() {
                    omega.insert((h + 1, iota), wh.mul(&inv));
                }
            }
        }
        Ok(ConnectionData { n, omega })
    }

    pub fn get(&self, j: usize, iota: Mask) -> S {
        self.omega.get(&(j, iota)).cloned().unwrap_or_else(S::zero)
    }

    pub fn convert<T: Coeff>(&self, f: impl Fn(&S) -> T) -> ConnectionData<T> {
        let omega = self.omega.iter().map(|(k, v)| (*k, f(v))).filter(|(_, v)| !v.is_zero()).collect();
        ConnectionData { n: self.n, omega }
    }

    /// Checks support and normalization.
    pub fn validate(&self) -> Result<()> {
        for &(j, iota) in self.omega.keys() {
            if (iota >> (j - 1)) & 1 == 0 {
                return Err(Error::Parse(format!("ω_{j}^ι nonzero outside the support, ι={iota:b}")));
            }
        }
        for iota in 1..(1u32 << self.n) {
            let sum = (1..=self.n).fold(S::zero(), |acc, j| acc.add(&self.get(j, iota as Mask)));
            if sum != S::one() {
                return Err(Error::Parse(format!("weights do not sum to 1 at ι={iota:b}")));
            }
        }
        Ok(())
    }
}

impl ConnectionData<Rational> {
    pub fn weighted(w: &[Rational]) -> Result<Self> {
        if w.iter().any(|x| x.signum() <= 0) {
            return Err(Error::NonPositiveWeight);
        }
        Self::weighted_unchecked(w)
    }

    /// `GS(t)` weights `(1, t, …, t^{n−1})` at a rational `t > 0`.
    pub fn gs_t_at(n: usize, t: &Rational) -> Result<Self> {
        let w: Vec<Rational> = (0..n).map(|k| t.pow(k as u32)).collect();
        Self::weighted(&w)
    }
}

impl ConnectionData<f64> {
    pub fn weighted_f64(w: &[f64]) -> Result<Self> {
        if w.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::NonPositiveWeight);
        }
        Self::weighted_unchecked(w)
    }
}

impl ConnectionData<TPoly> {
    /// `GS(t)` data as power series in `t` known to order `prec`.
    ///
    /// `t^{j−1} / Σ_h t^{h−1}ι_h` is rewritten as `t^{j−m} / Σ_h t^{h−m}ι_h`
    /// with `m` the lowest set index, so that the denominator is a unit.
    pub fn gs_t(n: usize, prec: usize) -> Self {
        Self::from_fn(n, |j, iota| {
            let m = iota.trailing_zeros() as usize + 1;
            let mut den = vec![Rational::zero(); n];
            for h in m..=n {
                if (iota >> (h - 1)) & 1 == 1 {
                    den[h - m] = Rational::one();
                }
            }
            let mut num = vec![Rational::zero(); j - m + 1];
            num[j - m] = Rational::one();
            let den = TPoly::new(den, Some(prec));
            TPoly::new(num, Some(prec)).mul(&den.inv().expect("unit denominator"))
        })
    }
}

/// `η = U diag(w) Uᵀ` with `U` orthogonal; rows of `u` are indexed by the
/// original coordinates.
#[derive(Clone, Debug)]
pub struct EtaForm<S: Coeff> {
    pub u: Vec<Vec<S>>,
    pub w: Vec<S>,
}

impl EtaForm<f64> {
    /// Diagonalizes a symmetric positive definite `η`.
    pub fn from_eta(eta: &[Vec<f64>]) -> Result<Self> {
        let n = eta.len();
        if eta.iter().any(|r| r.len() != n) {
            return Err(Error::EtaNotSpd);
        }
        let m = DMatrix::from_fn(n, n, |i, j| eta[i][j]);
        if (&m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()) {
            return Err(Error::EtaNotSpd);
        }
        let eig = m.symmetric_eigen();
        if eig.eigenvalues.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::EtaNotSpd);
        }
        let u = (0..n).map(|i| (0..n).map(|a| eig.eigenvectors[(i, a)]).collect()).collect();
        Ok(EtaForm { u, w: eig.eigenvalues.iter().cloned().collect() })
    }
}

impl<S: Coeff> EtaForm<S> {
    pub fn eta(&self) -> Vec<Vec<S>> {
        let n = self.w.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(S::zero(), |acc, a| acc.add(&self.u[i][a].mul(&self.w[a]).mul(&self.u[j][a])))
                    })
                    .collect()
            })
            .collect()
    }

    /// Rotated tuple `X'_a = Σ_i U_{ia} X_i`.
    pub fn rotate<A: Algebra<Scalar = S>>(&self, x: &[A]) -> Vec<A> {
        let n = x.len();
        (0..n)
            .map(|a| (0..n).fold(x[0].zero_like(), |acc, i| acc.add(&x[i].scale(&self.u[i][a]))))
            .collect()
    }
}

/// `Π_Q^ω R = ½ Σ_{j,ι} ω_j^ι (R/Q)_j^ι`.
pub fn connection_apply<A: Algebra>(omega: &ConnectionData<A::Scalar>, q: &[A], r: &[A]) -> Result<A> {
    check_size(omega.n, q, r)?;
    let d = decomp_all(r, q, Side::Right)?;
    let mut acc = q[0].zero_like();
    for (&(j, iota), c) in &omega.omega {
        acc = acc.add(&d[j - 1][iota as usize].scale(c));
    }
    Ok(acc.half())
}

/// `Π_Q^{fω}R = (½(R/Q)^{fω}, ½(Q∖R)^{fω})`, anchor `k` (0-based).
pub fn connection_apply_floating<A: Algebra>(
    omega: &ConnectionData<A::Scalar>,
    q: &[A],
    r: &[A],
) -> Result<FPair<A>> {
    check_size(omega.n, q, r)?;
    let right = decomp_floating_all(r, q, 0, Side::Right)?;
    let left = decomp_floating_all(r, q, 0, Side::Left)?;
    let mut x = q[0].zero_like();
    let mut y = q[0].zero_like();
    for (&(j, iota), c) in &omega.omega {
        x = x.add(&right[j - 1][iota as usize].scale(c));
        y = y.add(&left[j - 1][iota as usize].scale(c));
    }
    Ok(FPair::new(x.half(), y.half()))
}

/// `Π_Q^η R` through the orthogonal reduction to weighted data.
pub fn connection_eta<A: Algebra>(eta: &EtaForm<A::Scalar>, q: &[A], r: &[A]) -> Result<A> {
    let data = ConnectionData::weighted_unchecked(&eta.w)?;
    connection_apply(&data, &eta.rotate(q), &eta.rotate(r))
}

/// Floating `Π_Q^{fη} R` through the same reduction.
pub fn connection_eta_floating<A: Algebra>(eta: &EtaForm<A::Scalar>, q: &[A], r: &[A]) -> Result<FPair<A>> {
    let data = ConnectionData::weighted_unchecked(&eta.w)?;
    connection_apply_floating(&data, &eta.rotate(q), &eta.rotate(r))
}

fn check_size<A: Algebra>(n: usize, q: &[A], r: &[A]) -> Result<()> {
    if q.len() != n || r.len() != n {
        return Err(Error::Mismatch(format!("connection of size {n} applied to {} / {}", q.len(), r.len())));
    }
    Ok(())
}

/// The conditions characterizing the zeros of each connection.
#[derive(Clone, Debug)]
pub enum PredicateKind<S: Coeff> {
    Gs,
    FGs,
    Sy,
    FSy,
    W(Vec<S>),
    FW(Vec<S>),
    Eta(Vec<Vec<S>>),
    FEta(Vec<Vec<S>>),
}

/// Evaluates the condition for `kind`; returns `(holds, residual)`.
pub fn zero_set_predicate<A: Algebra>(kind: &PredicateKind<A::Scalar>, q: &[A], a: &[A], tol: f64) -> Result<(bool, f64)> {
    let n = q.len();
    let ones: Vec<A::Scalar> = vec![A::Scalar::one(); n];
    let identity_eta = |w: &[A::Scalar]| -> Vec<Vec<A::Scalar>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { w[i].clone() } else { A::Scalar::zero() }).collect()).collect()
    };
    let residual = match kind {
        PredicateKind::Gs => {
            let syms = q.iter().map(Symmetrizer::new).collect::<Result<Vec<_>>>()?;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let mut x = a[k].clone();
                for s in &syms[..=k] {
                    x = s.apply(&x, 1);
                }
                worst = worst.max(residual_of(&x));
            }
            worst
        }
        PredicateKind::FGs => {
            // A_1Q_1^{-1} = 1 and (A_kQ_1^{-1})^1 over Q_2Q_1^{-1}, …, Q_kQ_1^{-1} vanishes.
            let q1_inv = q[0].inverse()?;
            let mut worst = residual_of(&a[0].mul(&q1_inv).sub(&q[0].one_like()));
            let syms = q[1..].iter().map(|qs| Symmetrizer::new(&qs.mul(&q1_inv))).collect::<Result<Vec<_>>>()?;
            for k in 1..n {
                let mut x = a[k].mul(&q1_inv);
                for s in &syms[..k] {
                    x = s.apply(&x, 1);
                }
                worst = worst.max(residual_of(&x));
            }
            worst
        }
        PredicateKind::Sy => commutator_residual(&identity_eta(&ones), q, a),
        PredicateKind::W(w) => commutator_residual(&identity_eta(w), q, a),
        PredicateKind::Eta(eta) => commutator_residual(eta, q, a),
        PredicateKind::FSy => trace_residual(&identity_eta(&ones), q, a)?,
        PredicateKind::FW(w) => trace_residual(&identity_eta(w), q, a)?,
        PredicateKind::FEta(eta) => trace_residual(eta, q, a)?,
    };
    Ok((passes::<A>(residual, tol), residual))
}

/// `|Σ η^{ij}[A_j, Q_i]|`.
fn commutator_residual<A: Algebra>(eta: &[Vec<A::Scalar>], q: &[A], a: &[A]) -> f64 {
    let mut acc = q[0].zero_like();
    for (i, row) in eta.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                acc = acc.add(&a[j].commutator(&q[i]).scale(e));
            }
        }
    }
    residual_of(&acc)
}

/// `max(|Σ η^{ij}A_jQ_i^{-1} − tr η|, |Σ η^{ij}Q_i^{-1}A_j − tr η|)`.
fn trace_residual<A: Algebra>(eta: &[Vec<A::Scalar>], q: &[A], a: &[A]) -> Result<f64> {
    let inv = q.iter().map(Algebra::inverse).collect::<Result<Vec<_>>>()?;
    let mut right = q[0].zero_like();
    let mut left = q[0].zero_like();
    let mut trace = A::Scalar::zero();
    for (i, row) in eta.iter().enumerate() {
        trace = trace.add(&row[i]);
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                right = right.add(&a[j].mul(&inv[i]).scale(e));
                left = left.add(&inv[i].mul(&a[j]).scale(e));
            }
        }
    }
    let t = q[0].from_scalar(&trace);
    Ok(residual_of(&right.sub(&t)).max(residual_of(&left.sub(&t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::actions::{ad, ad_f, project_tangent};
    use crate::formal::FormalElement;

    type F = FormalElement<Rational>;

    #[test]
    fn named_data() {
        let gs = ConnectionData::<Rational>::gs(2);
        assert_eq!(gs.get(1, 0b01), Rational::one());
        assert_eq!(gs.get(1, 0b11), Rational::one());
        assert_eq!(gs.get(2, 0b10), Rational::one());
        assert_eq!(gs.get(2, 0b11), Rational::zero());
        let sy = ConnectionData::<Rational>::sy(2);
        assert_eq!(sy.get(1, 0b11), Rational::new(1, 2));
        assert_eq!(sy.get(2, 0b11), Rational::new(1, 2));
        let w = ConnectionData::weighted(&[Rational::one(), Rational::one()]).unwrap();
        assert_eq!(w, sy);
        for d in [gs, sy, ConnectionData::weighted(&[Rational::one(), Rational::from(3)]).unwrap()] {
            d.validate().unwrap();
        }
        assert_eq!(ConnectionData::weighted(&[Rational::one(), Rational::zero()]).unwrap_err(), Error::NonPositiveWeight);
    }

    #[test]
    fn gs_t_series_limits() {
        let d = ConnectionData::gs_t(3, 4);
        let at0 = d.convert(|c| c.coeff(0));
        let gs = ConnectionData::<Rational>::gs(3);
        assert_eq!(at0, gs);
        // ω_2^{(011)} = t/(1+t) = t − t² + …
        let c = d.get(2, 0b110);
        assert_eq!(c.coeff(0), Rational::one());
        let c = d.get(2, 0b011);
        assert_eq!((c.coeff(1), c.coeff(2)), (Rational::one(), Rational::from(-1)));
    }

    #[test]
    fn cn1_and_conn() {
        let q = F::base_system(2, 3);
        let x = project_tangent(&q, &F::r_var(2, 3, 1).add(&F::r_letter(2, 3, 2, 0b10)).add(&F::q_gen(2, 3, 1)))
            .unwrap();
        for omega in [ConnectionData::gs(2), ConnectionData::sy(2), ConnectionData::weighted(&[Rational::one(), Rational::from(3)]).unwrap()] {
            assert!(connection_apply(&omega, &q, &q).unwrap().is_zero());
            assert_eq!(connection_apply(&omega, &q, &ad(&x, &q)).unwrap(), x);
        }
        // (ad Q_1)Q ↦ Q_1.
        let q1 = F::q_gen(2, 3, 1);
        assert_eq!(connection_apply(&ConnectionData::gs(2), &q, &ad(&q1, &q)).unwrap(), q1);
    }

    #[test]
    fn floating_connection_at_q_and_compatibility() {
        let q = F::base_system(2, 3);
        let p = connection_apply_floating(&ConnectionData::sy(2), &q, &q).unwrap();
        let half = F::one(2, 3).half();
        assert_eq!((p.x.clone(), p.y.clone()), (half.clone(), half));
        let a = F::generic_input(2, 3);
        for omega in [ConnectionData::gs(2), ConnectionData::sy(2)] {
            let f = connection_apply_floating(&omega, &q, &a).unwrap();
            let o = connection_apply(&omega, &q, &a).unwrap();
            assert_eq!(crate::clifford::actions::nabla(&f), o);
        }
    }

    #[test]
    fn floating_conn_prime_on_tangent_pairs() {
        let q = F::base_system(2, 3);
        let x = F::r_var(2, 3, 1).add(&F::r_letter(2, 3, 2, 0b10));
        let y = F::r_letter(2, 3, 1, 0b11).add(&F::r_letter(2, 3, 2, 0b00));
        let r = ad_f(&FPair::new(x.clone(), y.clone()), &q);
        let p = connection_apply_floating(&ConnectionData::sy(2), &q, &r).unwrap();
        // The image is the representative of (X, Y) in the tangent space:
        // applying ad^f again reproduces the input.
        assert_eq!(ad_f(&p, &q), r);
    }

    #[test]
    fn eta_reduction_matches_weighted() {
        let q = F::base_system(2, 2);
        let a = F::generic_input(2, 2);
        let eta = EtaForm { u: vec![vec![Rational::one(), Rational::zero()], vec![Rational::zero(), Rational::one()]], w: vec![Rational::one(), Rational::from(2)] };
        let w = ConnectionData::weighted(&[Rational::one(), Rational::from(2)]).unwrap();
        assert_eq!(connection_eta(&eta, &q, &a).unwrap(), connection_apply(&w, &q, &a).unwrap());
    }

    #[test]
    fn predicates_at_base() {
        let q = F::base_system(2, 2);
        for kind in [PredicateKind::Gs, PredicateKind::FGs, PredicateKind::Sy, PredicateKind::FSy] {
            assert!(zero_set_predicate(&kind, &q, &q, 0.0).unwrap().0);
        }
        let a = F::generic_input(2, 2);
        assert!(!zero_set_predicate(&PredicateKind::Sy, &q, &a, 0.0).unwrap().0);
    }

    fn kinds() -> Vec<(ConnectionData<Rational>, PredicateKind<Rational>, PredicateKind<Rational>)> {
        let w = vec![Rational::one(), Rational::from(3)];
        vec![
            (ConnectionData::gs(2), PredicateKind::Gs, PredicateKind::FGs),
            (ConnectionData::sy(2), PredicateKind::Sy, PredicateKind::FSy),
            (ConnectionData::weighted(&w).unwrap(), PredicateKind::W(w.clone()), PredicateKind::FW(w.clone())),
            (
                ConnectionData::weighted(&w).unwrap(),
                PredicateKind::Eta(vec![vec![w[0].clone(), Rational::zero()], vec![Rational::zero(), w[1].clone()]]),
                PredicateKind::FEta(vec![vec![w[0].clone(), Rational::zero()], vec![Rational::zero(), w[1].clone()]]),
            ),
        ]
    }

    #[test]
    fn predicates_match_connection_vanishing() {
        let q = F::base_system(2, 2);
        let a = F::generic_input(2, 2);
        for (omega, kind, fkind) in kinds() {
            let p = connection_apply(&omega, &q, &a).unwrap();
            assert!(!p.is_zero());
            assert!(!zero_set_predicate(&kind, &q, &a, 0.0).unwrap().0);
            // Removing the connection image lands in the zero set.
            let a0: Vec<F> = a.iter().zip(ad(&p, &q)).map(|(x, y)| x.sub(&y)).collect();
            assert!(connection_apply(&omega, &q, &a0).unwrap().is_zero());
            assert!(zero_set_predicate(&kind, &q, &a0, 0.0).unwrap().0);

            let half = F::one(2, 2).half();
            let pf = connection_apply_floating(&omega, &q, &a).unwrap();
            assert!(!zero_set_predicate(&fkind, &q, &a, 0.0).unwrap().0);
            let shift = ad_f(&pf, &q);
            let a1: Vec<F> = a.iter().zip(&shift).zip(&q).map(|((x, y), z)| x.sub(y).add(z)).collect();
            let pf1 = connection_apply_floating(&omega, &q, &a1).unwrap();
            assert_eq!((pf1.x, pf1.y), (half.clone(), half.clone()));
            assert!(zero_set_predicate(&fkind, &q, &a1, 0.0).unwrap().0);
        }
    }
}
