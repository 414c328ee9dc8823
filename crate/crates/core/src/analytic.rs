//! Matrix-scale symmetric (conform-)orthogonalization: fixed-point iteration,
//! GS-anchored Taylor summation, orthogonal averaging and the closed `n = 2` formula.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{tuple_sub, Algebra};
use crate::clifford::actions::{ad_big, ad_f_big, FPair};
use crate::clifford::connection::{
    connection_apply, connection_apply_floating, connection_eta, connection_eta_floating, ConnectionData, EtaForm,
};
use crate::error::{Error, Result};
use crate::gram_schmidt::{ofgs_raw, ogs_raw};
use crate::jet::Jet;
use crate::matrix::{tuple_distance, DenseMatrix, MatrixTuple};
use crate::omega::step::o_omega;

/// Stopping rule for the fixed-point iterations.
#[derive(Clone, Copy, Debug)]
pub struct IterOptions {
    /// Bound on the connection residual `‖Π_Q(A − Q)‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions { tol: 1e-12, max_iter: 200 }
    }
}

/// Iterations without residual decrease after which the iteration is abandoned.
pub const STALL_LIMIT: usize = 5;

/// Connections usable at matrix scale.
#[derive(Clone, Debug)]
pub enum MatrixConnection {
    Data(ConnectionData<f64>),
    Eta(EtaForm<f64>),
}

impl MatrixConnection {
    pub fn sy(n: usize) -> Self {
        MatrixConnection::Data(ConnectionData::sy(n))
    }

    pub fn n(&self) -> usize {
        match self {
            MatrixConnection::Data(d) => d.n,
            MatrixConnection::Eta(e) => e.w.len(),
        }
    }

    /// `Π_Q(R)` as a pair; the second half is zero in the ordinary case.
    pub fn apply(&self, q: &[DenseMatrix], r: &[DenseMatrix], floating: bool) -> Result<FPair<DenseMatrix>> {
        let zero = || q[0].zero_like();
        Ok(match (self, floating) {
            (MatrixConnection::Data(d), false) => FPair::new(connection_apply(d, q, r)?, zero()),
            (MatrixConnection::Data(d), true) => connection_apply_floating(d, q, r)?,
            (MatrixConnection::Eta(e), false) => FPair::new(connection_eta(e, q, r)?, zero()),
            (MatrixConnection::Eta(e), true) => connection_eta_floating(e, q, r)?,
        })
    }
}

/// Output of a matrix fixed-point iteration.
#[derive(Clone, Debug)]
pub struct IterResult {
    pub system: MatrixTuple,
    pub floating: bool,
    pub iterations: usize,
    /// Final connection residual.
    pub residual: f64,
    /// Residual before each step.
    pub history: Vec<f64>,
}

/// `n / Σ_k tr(A_kQ_k^{-1})/d`: brings the scalar part of `A_kQ_k^{-1}` to about 1.
/// Ordinary ω-orthogonalizations are 0-homogeneous, so this does not change the fixed point.
fn normalizing_factor(a: &[DenseMatrix], q: &[DenseMatrix]) -> Result<f64> {
    let mut tau = 0.0;
    for (x, y) in a.iter().zip(q) {
        tau += x.mul(&y.inverse()?).trace() / x.d() as f64;
    }
    if !(tau > 0.0) {
        return Err(Error::SpectralConditionViolated(tau));
    }
    Ok(a.len() as f64 / tau)
}

/// `Step` iterated from `O^GS(A)` (or `O^fGS(A)`) until `‖Π_Q(A − Q)‖ ≤ tol`.
pub fn o_matrix(conn: &MatrixConnection, a: &[DenseMatrix], floating: bool, opts: IterOptions) -> Result<IterResult> {
    if a.len() != conn.n() {
        return Err(Error::Mismatch(format!("connection of size {} for {} inputs", conn.n(), a.len())));
    }
    let mut q = if floating { ofgs_raw(a)? } else { ogs_raw(a)? };
    let work: Vec<DenseMatrix> = if floating {
        a.to_vec()
    } else {
        let c = normalizing_factor(a, &q)?;
        a.iter().map(|x| x.scale(c)).collect()
    };
    let mut history = vec![];
    let mut stalled = 0;
    for it in 0..=opts.max_iter {
        let p = conn.apply(&q, &tuple_sub(&work, &q), floating)?;
        let res = p.norm();
        if let Some(&prev) = history.last() {
            stalled = if res >= prev { stalled + 1 } else { 0 };
        }
        history.push(res);
        if res <= opts.tol {
            return Ok(IterResult { system: q, floating, iterations: it, residual: res, history });
        }
        if stalled >= STALL_LIMIT {
            return Err(Error::NoContraction(it));
        }
        if it == opts.max_iter {
            break;
        }
        q = if floating { ad_f_big(&p.exp()?, &q) } else { ad_big(&p.x.exp(), &q)? };
    }
    Err(Error::NoConvergence(format!("fixed point not reached in {} steps", opts.max_iter)))
}

/// Matrix `O^Sy`.
pub fn o_sy_matrix(a: &[DenseMatrix], opts: IterOptions) -> Result<IterResult> {
    o_matrix(&MatrixConnection::sy(a.len()), a, false, opts)
}

/// Matrix `O^fSy`.
pub fn o_fsy_matrix(a: &[DenseMatrix], opts: IterOptions) -> Result<IterResult> {
    o_matrix(&MatrixConnection::sy(a.len()), a, true, opts)
}

/// `‖Σ_i [A_i, Q_i]‖`, relative to the input size.
pub fn mtc_residual(a: &[DenseMatrix], q: &[DenseMatrix]) -> f64 {
    let s = a.iter().zip(q).fold(a[0].zero_like(), |acc, (x, y)| acc.add(&x.commutator(y)));
    s.norm() / a.iter().map(DenseMatrix::norm).fold(1.0, f64::max)
}

/// `max(‖Σ A_iQ_i^{-1} − n‖, ‖Σ Q_i^{-1}A_i − n‖)`.
pub fn mti_residual(a: &[DenseMatrix], q: &[DenseMatrix]) -> Result<f64> {
    let d = a[0].d();
    let n = DenseMatrix::identity(d).scale(a.len() as f64);
    let mut right = DenseMatrix::zeros(d);
    let mut left = DenseMatrix::zeros(d);
    for (x, y) in a.iter().zip(q) {
        let yi = y.inverse()?;
        right = right.add(&x.mul(&yi));
        left = left.add(&yi.mul(x));
    }
    Ok(right.sub(&n).norm().max(left.sub(&n).norm()))
}

// ---- anchoring at O^GS ------------------------------------------------------

/// Taylor summation of `s ↦ O^ω(Q + sR)` at `s = 1`, with `Q = O^GS(A)`.
#[derive(Clone, Debug)]
pub struct AnchorResult {
    pub system: MatrixTuple,
    /// `max_k ‖∂_rΨ(Q; R)_k‖ / r!` for `r = 0..=r_max`.
    pub term_norms: Vec<f64>,
    /// Geometric estimate of the omitted tail.
    pub tail_estimate: f64,
    /// The Taylor terms themselves, `terms[r][k]`.
    pub terms: Vec<MatrixTuple>,
}

/// Consecutive non-decreasing term norms that count as divergence.
pub const DIVERGENCE_WINDOW: usize = 3;

pub fn anchoring(omega: &ConnectionData<f64>, a: &[DenseMatrix], r_max: usize) -> Result<AnchorResult> {
    let q0 = ogs_raw(a)?;
    let c = normalizing_factor(a, &q0)?;
    let a: Vec<DenseMatrix> = a.iter().map(|x| x.scale(c)).collect();
    let q = ogs_raw(&a)?;
    let r = tuple_sub(&a, &q);
    let jets: Vec<Jet<DenseMatrix>> = q.iter().zip(&r).map(|(x, y)| Jet::line(x.clone(), y.clone(), r_max)).collect();
    let psi = o_omega(omega, &jets, false)?;
    let terms: Vec<MatrixTuple> = (0..=r_max).map(|k| psi.iter().map(|p| p.coeff(k).clone()).collect()).collect();
    let term_norms: Vec<f64> = terms.iter().map(|t| t.iter().map(DenseMatrix::norm).fold(0.0, f64::max)).collect();
    let mut rising = 0;
    for k in 2..term_norms.len() {
        rising = if term_norms[k] > 0.0 && term_norms[k] >= term_norms[k - 1] { rising + 1 } else { 0 };
        if rising >= DIVERGENCE_WINDOW {
            return Err(Error::DivergenceDetected(k));
        }
    }
    let system = terms
        .iter()
        .skip(1)
        .fold(terms[0].clone(), |acc, t| acc.iter().zip(t).map(|(x, y)| x.add(y)).collect());
    let last = term_norms[r_max];
    let tail_estimate = match r_max {
        0 => f64::INFINITY,
        _ => {
            let rho = last / term_norms[r_max - 1];
            if rho.is_finite() && rho < 1.0 {
                last * rho / (1.0 - rho)
            } else if last == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
    };
    Ok(AnchorResult { system, term_norms, tail_estimate, terms })
}

/// `Ψ_{O^GS}` for `Ψ = O^Sy`: the symmetric procedure summed from its Taylor series at `O^GS(A)`.
pub fn gs_anchoring(a: &[DenseMatrix], r_max: usize) -> Result<AnchorResult> {
    anchoring(&ConnectionData::sy(a.len()), a, r_max)
}

// ---- orthogonal averaging ---------------------------------------------------

/// Deviations of `U^{-1}Ψ(UA)` from `Ψ(A)` over the sampled `U`.
#[derive(Clone, Debug)]
pub struct AverageReport {
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

impl AverageReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// `(UA)_i = Σ_j U_{ij} A_j`.
pub fn act(u: &[Vec<f64>], a: &[DenseMatrix]) -> MatrixTuple {
    u.iter()
        .map(|row| row.iter().zip(a).fold(a[0].zero_like(), |acc, (c, x)| acc.add(&x.scale(*c))))
        .collect()
}

fn transpose(u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = u.len();
    (0..n).map(|i| (0..n).map(|j| u[j][i]).collect()).collect()
}

/// All signed permutation matrices of size `n`.
pub fn signed_permutations(n: usize) -> Vec<Vec<Vec<f64>>> {
    let perms = crate::omega::properties::permutations(n);
    let mut out = vec![];
    for p in &perms {
        for signs in 0..(1usize << n) {
            let mut u = vec![vec![0.0; n]; n];
            for (i, &j) in p.iter().enumerate() {
                u[i][j] = if (signs >> i) & 1 == 1 { -1.0 } else { 1.0 };
            }
            out.push(u);
        }
    }
    out
}

/// A Haar-random orthogonal matrix (Gram–Schmidt on Gaussian columns).
pub fn random_orthogonal<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let m = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    (0..n).map(|i| (0..n).map(|j| q[(i, j)] * r[(j, j)].signum()).collect()).collect()
}

/// Samples the identity, every signed permutation and `rotations` random orthogonal matrices.
pub fn orthogonal_average_check<F>(method: F, a: &[DenseMatrix], rotations: usize, seed: u64) -> Result<AverageReport>
where
    F: Fn(&[DenseMatrix]) -> Result<MatrixTuple>,
{
    let n = a.len();
    let base = method(a)?;
    let mut samples = signed_permutations(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    samples.extend((0..rotations).map(|_| random_orthogonal(n, &mut rng)));
    let mut deviations = Vec::with_capacity(samples.len());
    for (idx, u) in samples.iter().enumerate() {
        let out = method(&act(u, a)).map_err(|e| Error::MethodUndefined(idx, e.to_string()))?;
        deviations.push(tuple_distance(&act(&transpose(u), &out), &base));
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(AverageReport { deviations, max_deviation })
}

// ---- closed formula for two floating generators ----------------------------

/// Relative threshold on `min |Im λ|` over `Sp A_1A_2^{-1}`.
pub const CLOSED_FORM_SPECTRAL_TOL: f64 = 1e-10;

fn check_pair_domain(a1: &DenseMatrix, a2: &DenseMatrix) -> Result<()> {
    let sp = a1.mul(&a2.inverse()?).spectrum()?;
    let scale = sp.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if sp.min_real_axis_distance <= CLOSED_FORM_SPECTRAL_TOL * scale {
        return Err(Error::SpectralConditionViolated(sp.min_real_axis_distance));
    }
    Ok(())
}

/// `O^fSy(A_1, A_2) = ((A_1 + (pol A_1A_2^{-1})A_2)/2, (A_2 + (pol A_2A_1^{-1})A_1)/2)`.
/// Defined when `λ_1A_1 + λ_2A_2` is invertible for all real `(λ_1, λ_2) ≠ 0`,
/// i.e. when `A_1A_2^{-1}` has no real eigenvalue.
pub fn closed_fsy_n2(a1: &DenseMatrix, a2: &DenseMatrix) -> Result<MatrixTuple> {
    check_pair_domain(a1, a2)?;
    let p12 = a1.mul(&a2.inverse()?).pol()?;
    let p21 = a2.mul(&a1.inverse()?).pol()?;
    Ok(vec![a1.add(&p12.mul(a2)).scale(0.5), a2.add(&p21.mul(a1)).scale(0.5)])
}

/// The same map as `½((A_1, A_2) + (−A_2, A_1)·pol A_1^{-1}A_2)`.
pub fn closed_fsy_n2_alt(a1: &DenseMatrix, a2: &DenseMatrix) -> Result<MatrixTuple> {
    check_pair_domain(a1, a2)?;
    let p = a1.inverse()?.mul(a2).pol()?;
    Ok(vec![a1.sub(&a2.mul(&p)).scale(0.5), a2.add(&a1.mul(&p)).scale(0.5)])
}

/// `∫_0^{2π} (λ_1 cos t + λ_2 sin t)(A_1 cos t + A_2 sin t)^{-1} dt/π` by the trapezoid rule.
pub fn inverse_system_quadrature(a1: &DenseMatrix, a2: &DenseMatrix, l1: f64, l2: f64, nodes: usize) -> Result<DenseMatrix> {
    let mut acc = DenseMatrix::zeros(a1.d());
    for k in 0..nodes {
        let t = 2.0 * PI * k as f64 / nodes as f64;
        let (s, c) = t.sin_cos();
        let m = a1.scale(c).add(&a2.scale(s)).inverse()?;
        acc = acc.add(&m.scale(l1 * c + l2 * s));
    }
    Ok(acc.scale(2.0 / nodes as f64))
}

/// `‖λ_1B_1^{-1} + λ_2B_2^{-1} − quadrature‖` for the output `B` of the closed formula.
pub fn inverse_system_residual(a1: &DenseMatrix, a2: &DenseMatrix, b: &[DenseMatrix], l1: f64, l2: f64, nodes: usize) -> Result<f64> {
    let lhs = b[0].inverse()?.scale(l1).add(&b[1].inverse()?.scale(l2));
    Ok(lhs.sub(&inverse_system_quadrature(a1, a2, l1, l2, nodes)?).norm())
}

// ---- ordinary as a limit of floating ----------------------------------------

/// Distances between `O^{(w)}(A)` and the last `n` entries of `O^{f(u,w)}(1, A)` for each `u`.
pub fn weighted_limit_probe(a: &[DenseMatrix], w: &[f64], us: &[f64], opts: IterOptions) -> Result<Vec<f64>> {
    let ordinary = o_matrix(&MatrixConnection::Data(ConnectionData::weighted_f64(w)?), a, false, opts)?;
    let mut extended = vec![a[0].one_like()];
    extended.extend(a.iter().cloned());
    let mut out = vec![];
    for &u in us {
        let mut wu = vec![u];
        wu.extend_from_slice(w);
        let fl = o_matrix(&MatrixConnection::Data(ConnectionData::weighted_f64(&wu)?), &extended, true, opts)?;
        out.push(tuple_distance(&ordinary.system, &fl.system[1..]));
    }
    Ok(out)
}
