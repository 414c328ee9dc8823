//! Gram–Schmidt orthogonalization `O^GS`, conform-orthogonalization `O^fGS`,
//! their characterization, directional derivative and parallel transport.

use crate::algebra::{tuple_affine, Algebra};
use crate::clifford::actions::{ad_big, ad_f_big, FPair};
use crate::clifford::connection::{connection_apply, connection_apply_floating, ConnectionData};
use crate::clifford::decomp::{is_tangent, Symmetrizer};
use crate::clifford::system::{clifford_residual, floating_residual, passes, residual_of, SYSTEM_TOL};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::matrix::DenseMatrix;

/// Default node count for the derivative quadrature.
pub const DPOL_NODES: usize = 256;

/// Residuals of the three characterizing conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterizationReport {
    /// Clifford (or floating Clifford) relations of the output.
    pub cp: f64,
    /// Linear Gram–Schmidt condition.
    pub lgs: f64,
    /// Smallest real part over `Sp A_kQ_k^{-1}`; `None` when undeterminable.
    pub nsp_margin: Option<f64>,
}

impl CharacterizationReport {
    pub fn cp_ok<A: Algebra>(&self, tol: f64) -> bool {
        passes::<A>(self.cp, tol)
    }
    pub fn lgs_ok<A: Algebra>(&self, tol: f64) -> bool {
        passes::<A>(self.lgs, tol)
    }
    pub fn nsp_ok(&self) -> bool {
        self.nsp_margin.is_some_and(|m| m > 0.0)
    }
    pub fn all_ok<A: Algebra>(&self, tol: f64) -> bool {
        self.cp_ok::<A>(tol) && self.lgs_ok::<A>(tol) && self.nsp_ok()
    }
}

/// An orthogonalized system with its diagnostics.
#[derive(Clone, Debug)]
pub struct GSResult<A: Algebra> {
    pub system: Vec<A>,
    pub floating: bool,
    pub residuals: CharacterizationReport,
}

fn pol_stage<A: Algebra>(x: &A, k: usize) -> Result<A> {
    x.pol().map_err(|e| match e {
        Error::SpectralConditionViolated(_) | Error::NoConvergence(_) | Error::BadLeadingTerm | Error::Singular => {
            Error::PolarizationDomain(k)
        }
        e => e,
    })
}

/// The bare recursion `Q_k = pol (A_k)^1_{Q_1…Q_{k−1}}`.
pub fn ogs_raw<A: Algebra>(a: &[A]) -> Result<Vec<A>> {
    let mut q: Vec<A> = Vec::with_capacity(a.len());
    let mut syms: Vec<Symmetrizer<A>> = Vec::with_capacity(a.len());
    for (k, ak) in a.iter().enumerate() {
        let mut x = ak.clone();
        for s in &syms {
            x = s.apply(&x, 1);
        }
        let qk = pol_stage(&x, k + 1)?;
        syms.push(Symmetrizer::new(&qk).map_err(|_| Error::PolarizationDomain(k + 1))?);
        q.push(qk);
    }
    Ok(q)
}

/// `O^GS(A)` with the characterizing residuals.
pub fn ogs<A: Algebra>(a: &[A]) -> Result<GSResult<A>> {
    let system = ogs_raw(a)?;
    let residuals = characterize(a, &system, false)?;
    Ok(GSResult { system, floating: false, residuals })
}

/// The bare `O^fGS`: `(A_1, Q̃_2A_1, …, Q̃_nA_1)` with `Q̃ = O^GS(A_2A_1^{-1}, …)`.
pub fn ofgs_raw<A: Algebra>(a: &[A]) -> Result<Vec<A>> {
    let a1_inv = a[0].inverse()?;
    let ratios: Vec<A> = a[1..].iter().map(|x| x.mul(&a1_inv)).collect();
    let qt = ogs_raw(&ratios).map_err(|e| match e {
        Error::PolarizationDomain(k) => Error::PolarizationDomain(k + 1),
        e => e,
    })?;
    let mut out = vec![a[0].clone()];
    out.extend(qt.iter().map(|x| x.mul(&a[0])));
    Ok(out)
}

pub fn ofgs<A: Algebra>(a: &[A]) -> Result<GSResult<A>> {
    let system = ofgs_raw(a)?;
    let residuals = characterize(a, &system, true)?;
    Ok(GSResult { system, floating: true, residuals })
}

fn input_scale<A: Algebra>(a: &[A]) -> f64 {
    if A::EXACT {
        1.0
    } else {
        a.iter().map(Algebra::norm).fold(1.0, f64::max)
    }
}

/// Residuals of the Clifford relations (`cp`), the triangular gauge (`lgs`) and the
/// spectral margin (`nsp_margin`), or their floating variants, for a candidate `q`.
///
/// The gauge condition is `(A_k)^1_{Q_1…Q_{k−1}Q_k} = 0`; in the floating case
/// `A_1Q_1^{-1} = 1` and `(A_kQ_1^{-1})^1_{Q_2Q_1^{-1}…Q_kQ_1^{-1}} = 0`.
pub fn characterize<A: Algebra>(a: &[A], q: &[A], floating: bool) -> Result<CharacterizationReport> {
    let n = q.len();
    if a.len() != n {
        return Err(Error::Mismatch(format!("{} inputs, {} outputs", a.len(), n)));
    }
    let scale = input_scale(a);
    let (cp, lgs) = if floating {
        let cp = floating_residual(q, 0)?;
        let q1_inv = q[0].inverse()?;
        let mut lgs = residual_of(&a[0].mul(&q1_inv).sub(&q[0].one_like()));
        let syms = q[1..].iter().map(|x| Symmetrizer::new(&x.mul(&q1_inv))).collect::<Result<Vec<_>>>()?;
        for k in 1..n {
            let mut x = a[k].mul(&q1_inv);
            for s in &syms[..k] {
                x = s.apply(&x, 1);
            }
            lgs = lgs.max(residual_of(&x) / scale);
        }
        (cp, lgs)
    } else {
        let cp = clifford_residual(q);
        let syms = q.iter().map(Symmetrizer::new).collect::<Result<Vec<_>>>()?;
        let mut lgs: f64 = 0.0;
        for k in 0..n {
            let mut x = a[k].clone();
            for s in &syms[..=k] {
                x = s.apply(&x, 1);
            }
            lgs = lgs.max(residual_of(&x) / scale);
        }
        (cp, lgs)
    };
    let mut nsp_margin = Some(f64::INFINITY);
    for (ak, qk) in a.iter().zip(q) {
        let m = qk.inverse().ok().and_then(|qi| ak.mul(&qi).spectral_margin());
        nsp_margin = match (nsp_margin, m) {
            (Some(x), Some(y)) => Some(x.min(y)),
            _ => None,
        };
    }
    Ok(CharacterizationReport { cp, lgs, nsp_margin })
}

/// Derivative of `X ↦ X^1_Q` composed through `Q`: returns `d(X^1_Q)` given
/// `(X, dX)` and `(Q, dQ)`.
fn d_antisym(x: &DenseMatrix, dx: &DenseMatrix, q: &DenseMatrix, dq: &DenseMatrix) -> Result<DenseMatrix> {
    let qi = q.inverse()?;
    let dqi = qi.mul(dq).mul(&qi).neg();
    let dconj = dqi.mul(x).mul(q).add(&qi.mul(dx).mul(q)).add(&qi.mul(x).mul(dq));
    Ok(dx.sub(&dconj).scale(0.5))
}

/// `∂O^GS(A; ε)` by differentiating the recursion; `pol` is differentiated
/// through its integral representation with `nodes` trapezoid nodes.
pub fn dogs(a: &[DenseMatrix], eps: &[DenseMatrix], nodes: usize) -> Result<Vec<DenseMatrix>> {
    let mut q: Vec<DenseMatrix> = Vec::new();
    let mut dq: Vec<DenseMatrix> = Vec::new();
    for (k, (ak, ek)) in a.iter().zip(eps).enumerate() {
        let mut x = ak.clone();
        let mut dx = ek.clone();
        for (qs, dqs) in q.iter().zip(&dq) {
            let nx = Symmetrizer::new(qs)?.apply(&x, 1);
            dx = d_antisym(&x, &dx, qs, dqs)?;
            x = nx;
        }
        let qk = pol_stage(&x, k + 1)?;
        dq.push(x.dpol(&dx, nodes)?);
        q.push(qk);
    }
    Ok(dq)
}

/// `∂O^GS(A; ε)` as the first-order coefficient of `O^GS` over first-order jets.
pub fn dogs_jet<A: Algebra>(a: &[A], eps: &[A]) -> Result<Vec<A>> {
    let jets: Vec<Jet<A>> = a.iter().zip(eps).map(|(x, e)| Jet::line(x.clone(), e.clone(), 1)).collect();
    Ok(ogs_raw(&jets)?.into_iter().map(|j| j.coeff(1).clone()).collect())
}

/// `(ad′Q)^{-1} r` for a tangent tuple `r`.
pub fn minimal_lift<A: Algebra>(q: &[A], r: &[A], tol: f64) -> Result<A> {
    let (ok, residual) = is_tangent(q, r, tol);
    if !ok {
        return Err(Error::NotTangent(residual));
    }
    connection_apply(&ConnectionData::gs(q.len()), q, r)
}

/// Tangency at a floating system (anchor 1): the defining relation of `𝐓_Q Gr^f`.
pub fn is_tangent_floating<A: Algebra>(q: &[A], r: &[A], tol: f64) -> Result<(bool, f64)> {
    let k = 0;
    let qk_inv = q[k].inverse()?;
    let rk_term = |i: usize, j: usize| {
        r[i].mul(&qk_inv).mul(&q[j])
            .sub(&q[i].mul(&qk_inv).mul(&r[k]).mul(&qk_inv).mul(&q[j]))
            .add(&q[i].mul(&qk_inv).mul(&r[j]))
    };
    let mut worst: f64 = 0.0;
    for i in 1..q.len() {
        for j in i..q.len() {
            let mut x = rk_term(i, j).add(&rk_term(j, i));
            if i == j {
                x = x.add(&r[k].add(&r[k]));
            }
            worst = worst.max(residual_of(&x));
        }
    }
    Ok((passes::<A>(worst, tol), worst))
}

/// `(ad^f Q)^{-1} r` for a floating tangent tuple `r`.
pub fn minimal_lift_floating<A: Algebra>(q: &[A], r: &[A], tol: f64) -> Result<FPair<A>> {
    let (ok, residual) = is_tangent_floating(q, r, tol)?;
    if !ok {
        return Err(Error::NotTangent(residual));
    }
    connection_apply_floating(&ConnectionData::gs(q.len()), q, r)
}

/// A matrix path sampled by the transport integrator.
pub type MatrixPath<'a> = dyn Fn(f64) -> Result<Vec<DenseMatrix>> + 'a;

/// Five-point derivative step.
const DIFF_STEP: f64 = 1e-3;

fn sample(path: &MatrixPath, t: f64, floating: bool) -> Result<Vec<DenseMatrix>> {
    let f = path(t)?;
    let residual = if floating { floating_residual(&f, 0)? } else { clifford_residual(&f) };
    if residual > SYSTEM_TOL.sqrt() {
        return Err(Error::SystemViolation { t, residual });
    }
    Ok(f)
}

fn derivative(path: &MatrixPath, t: f64) -> Result<Vec<DenseMatrix>> {
    let h = DIFF_STEP;
    let (fm2, fm1, fp1, fp2) = (path(t - 2.0 * h)?, path(t - h)?, path(t + h)?, path(t + 2.0 * h)?);
    Ok((0..fm2.len())
        .map(|i| {
            fm2[i].sub(&fp2[i]).add(&fp1[i].sub(&fm1[i]).scale(8.0)).scale(1.0 / (12.0 * h))
        })
        .collect())
}

/// Velocity `X(t) = (ad F(t))^{-1} Ḟ(t)`.
fn velocity(path: &MatrixPath, t: f64) -> Result<DenseMatrix> {
    let f = sample(path, t, false)?;
    let df = derivative(path, t)?;
    minimal_lift(&f, &df, 1e-5 * (1.0 + df.iter().map(DenseMatrix::norm).fold(0.0, f64::max)))
}

fn velocity_floating(path: &MatrixPath, t: f64) -> Result<FPair<DenseMatrix>> {
    let f = sample(path, t, true)?;
    let df = derivative(path, t)?;
    minimal_lift_floating(&f, &df, 1e-5 * (1.0 + df.iter().map(DenseMatrix::norm).fold(0.0, f64::max)))
}

/// `Pt(F)`: solves `Ḣ = X(t)H`, `H(a) = 1` with the classical fourth-order
/// Runge–Kutta scheme on `[a, b]`; the path must be defined slightly beyond
/// the interval for the derivative stencil.
pub fn parallel_transport(path: &MatrixPath, a: f64, b: f64, steps: usize) -> Result<DenseMatrix> {
    let d = path(a)?[0].d();
    let mut h = DenseMatrix::identity(d);
    let dt = (b - a) / steps as f64;
    for s in 0..steps {
        let t = a + dt * s as f64;
        let x0 = velocity(path, t)?;
        let xm = velocity(path, t + dt / 2.0)?;
        let x1 = velocity(path, t + dt)?;
        let k1 = x0.mul(&h);
        let k2 = xm.mul(&h.add(&k1.scale(dt / 2.0)));
        let k3 = xm.mul(&h.add(&k2.scale(dt / 2.0)));
        let k4 = x1.mul(&h.add(&k3.scale(dt)));
        h = h.add(&k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(dt / 6.0));
    }
    Ok(h)
}

/// `Pt^f(G)`: the same scheme on `K̇ = L(t)K` in `𝔄 × 𝔄^opp`.
pub fn parallel_transport_floating(path: &MatrixPath, a: f64, b: f64, steps: usize) -> Result<FPair<DenseMatrix>> {
    let d = path(a)?[0].d();
    let mut k = FPair::one_like(&DenseMatrix::identity(d));
    let dt = (b - a) / steps as f64;
    for s in 0..steps {
        let t = a + dt * s as f64;
        let l0 = velocity_floating(path, t)?;
        let lm = velocity_floating(path, t + dt / 2.0)?;
        let l1 = velocity_floating(path, t + dt)?;
        let k1 = l0.mul(&k);
        let k2 = lm.mul(&k.add(&k1.scale(&(dt / 2.0))));
        let k3 = lm.mul(&k.add(&k2.scale(&(dt / 2.0))));
        let k4 = l1.mul(&k.add(&k3.scale(&dt)));
        let incr = k1.add(&k2.scale(&2.0)).add(&k3.scale(&2.0)).add(&k4).scale(&(dt / 6.0));
        k = k.add(&incr);
    }
    Ok(k)
}

/// Segment `t ↦ (1−t)Q + tR` pushed through `orth`, extended past `[0, 1]`
/// linearly for the derivative stencil.
fn segment<'a>(
    r: &'a [DenseMatrix],
    q: &'a [DenseMatrix],
    orth: fn(&[DenseMatrix]) -> Result<Vec<DenseMatrix>>,
) -> impl Fn(f64) -> Result<Vec<DenseMatrix>> + 'a {
    move |t: f64| orth(&tuple_affine(r, q, &t))
}

/// `Pt^GS(R, Q)`: transport along `O^GS((1−t)Q + tR)`, so that `(Ad H)Q = R`.
pub fn pt_gs(r: &[DenseMatrix], q: &[DenseMatrix], steps: usize) -> Result<DenseMatrix> {
    let path = segment(r, q, ogs_raw::<DenseMatrix>);
    parallel_transport(&path, 0.0, 1.0, steps)
}

/// `Pt^fGS(R, Q)`, so that `(Ad^f K)Q = R`.
pub fn pt_fgs(r: &[DenseMatrix], q: &[DenseMatrix], steps: usize) -> Result<FPair<DenseMatrix>> {
    let path = segment(r, q, ofgs_raw::<DenseMatrix>);
    parallel_transport_floating(&path, 0.0, 1.0, steps)
}

/// `‖(Ad H)Q − R‖` for a conjugator candidate.
pub fn conjugation_residual(h: &DenseMatrix, q: &[DenseMatrix], r: &[DenseMatrix]) -> Result<f64> {
    let moved = ad_big(h, q)?;
    Ok(moved.iter().zip(r).map(|(x, y)| x.sub(y).norm()).fold(0.0, f64::max))
}

/// `‖(Ad^f K)Q − R‖` for a floating translation candidate.
pub fn floating_translation_residual(k: &FPair<DenseMatrix>, q: &[DenseMatrix], r: &[DenseMatrix]) -> f64 {
    ad_f_big(k, q).iter().zip(r).map(|(x, y)| x.sub(y).norm()).fold(0.0, f64::max)
}
