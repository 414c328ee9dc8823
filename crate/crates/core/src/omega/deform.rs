//! The deformation `Ω(A, t) = O^{GS(t)}(A)` as a power series in `t`, built
//! order by order from `O^GS`, and its Taylor coefficients `Ω_r`.

use crate::algebra::{tuple_sub, Algebra};
use crate::clifford::actions::ad_big;
use crate::clifford::connection::{connection_apply, ConnectionData};
use crate::error::{Error, Result};
use crate::formal::FormalElement;
use crate::gram_schmidt::ogs_raw;
use crate::omega::tables::CoeffTable;
use crate::rational::Rational;
use crate::ring::Coeff;
use crate::tpoly::TPoly;

type FT = FormalElement<TPoly>;

/// `Ω(A, t)` modulo `t^{t_order+1}` with the `t`-valuations seen on the way.
#[derive(Clone, Debug)]
pub struct DeformResult {
    pub omega: Vec<FT>,
    /// Valuation of `Π^{GS(t)}_{Q^{[k]}}(A − Q^{[k]})` for `k = 0..=t_order`
    /// (`None` when it vanishes to the tracked order).
    pub residual_valuations: Vec<Option<usize>>,
    /// Valuation of the correction `X^{[k]}` for `k = 0..t_order`.
    pub correction_valuations: Vec<Option<usize>>,
}

fn t_homogeneous(x: &FT, k: usize, prec: usize) -> FT {
    x.convert(|c| {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c.coeff(k);
        TPoly::new(v, Some(prec))
    })
}

/// Builds `Q^{[k+1]} = (Ad exp X^{[k]})Q^{[k]}` from `Q^{[0]} = O^GS(A)`, where `X^{[k]}`
/// solves `X + Π^GS_Q([X, R]) = Y` for the `t^{k+1}` part `Y` of the residual
/// (the linearization of `O^GS` at `Q`, inverted by a terminating Neumann series).
pub fn omega_deform(a: &[FormalElement<Rational>], t_order: usize) -> Result<DeformResult> {
    let n = a.len();
    if n == 0 {
        return Err(Error::Mismatch("empty input tuple".into()));
    }
    let cap = a[0].cap();
    let at: Vec<FT> = a.iter().map(|x| x.to_tpoly(Some(t_order))).collect();
    let q = ogs_raw(&at)?;
    let r = tuple_sub(&at, &q);
    let gs_t = ConnectionData::gs_t(n, t_order);
    let gs = ConnectionData::<TPoly>::gs(n);

    let mut qk = q.clone();
    let mut residual_valuations = vec![];
    let mut correction_valuations = vec![];
    for k in 0..t_order {
        let res = connection_apply(&gs_t, &qk, &tuple_sub(&at, &qk))?;
        residual_valuations.push(res.t_valuation());
        if res.t_valuation().is_some_and(|v| v <= k) {
            return Err(Error::Mismatch(format!("residual of t-order {k} left at step {k}")));
        }
        let y = t_homogeneous(&res, k + 1, t_order);
        let mut x = y.clone();
        for _ in 0..=cap {
            let comm: Vec<FT> = r.iter().map(|ri| x.commutator(ri)).collect();
            let next = y.sub(&connection_apply(&gs, &q, &comm)?);
            if next == x {
                break;
            }
            x = next;
        }
        correction_valuations.push(x.t_valuation());
        if !x.is_zero() {
            qk = ad_big(&x.exp()?, &qk)?;
        }
    }
    let last = connection_apply(&gs_t, &qk, &tuple_sub(&at, &qk))?;
    residual_valuations.push(last.t_valuation());
    Ok(DeformResult { omega: qk, residual_valuations, correction_valuations })
}

/// `Ω_r(A) = ∂_t^r Ω(A, t)|_{t=0} = r!·[t^r]Ω(A, t)`.
pub fn omega_r(a: &[FormalElement<Rational>], r: usize) -> Result<Vec<FormalElement<Rational>>> {
    let d = omega_deform(a, r.max(1))?;
    Ok(taylor_coefficient(&d.omega, r))
}

/// `r!·[t^r]` of every coefficient.
pub fn taylor_coefficient(omega: &[FT], r: usize) -> Vec<FormalElement<Rational>> {
    let fact = (1..=r as i64).fold(Rational::one(), |acc, m| &acc * &Rational::from_integer(m));
    omega.iter().map(|x| x.convert(|c| &c.coeff(r) * &fact)).collect()
}

/// `f(t)` at rational `t ≥ 0`, through `u = t/(1+t)`: the series `f(u/(1−u))` must be a
/// polynomial of degree `≤ max_u_degree` in `u` to the tracked order.
pub fn resum(f: &TPoly, t: &Rational, max_u_degree: usize) -> Result<Rational> {
    let prec = f.prec().unwrap_or(f.coeffs().len());
    let s = TPoly::new(vec![Rational::one(); prec + 1], Some(prec)).mul(&TPoly::t(prec));
    let mut g = TPoly::new(vec![], Some(prec));
    for c in f.coeffs().iter().rev() {
        g = g.mul(&s).add(&TPoly::new(vec![c.clone()], Some(prec)));
    }
    if let Some(m) = (max_u_degree + 1..=prec).find(|&m| !g.coeff(m).is_zero()) {
        return Err(Error::Mismatch(format!("u^{m} coefficient does not vanish")));
    }
    let one_t = &Rational::one() + t;
    let u = t / &one_t;
    Ok(g.eval(&u))
}

/// `GS(t)` tables as power series in `t`.
pub fn deform_tables(n: usize, max_r: usize, t_order: usize) -> Result<CoeffTable<TPoly>> {
    let a = FormalElement::<Rational>::generic_input(n, max_r);
    CoeffTable::table_of(&omega_deform(&a, t_order)?.omega, max_r)
}

/// Evaluates a series table at rational `t` by resummation.
pub fn resum_table(table: &CoeffTable<TPoly>, t: &Rational, max_u_degree: usize) -> Result<CoeffTable<Rational>> {
    let mut entries = std::collections::BTreeMap::new();
    for (k, v) in &table.entries {
        let x = resum(v, t, max_u_degree)?;
        if !x.is_zero() {
            entries.insert(k.clone(), x);
        }
    }
    Ok(CoeffTable { n: table.n, max_r: table.max_r, entries })
}
