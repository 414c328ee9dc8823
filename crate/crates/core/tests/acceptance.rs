//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Lines are written straight to stderr so they show up in `cargo test`
//! output even when the test passes.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use fqorth_core::analytic::{closed_fsy_n2, inverse_system_residual, o_fsy_matrix, o_sy_matrix, act, IterOptions};
use fqorth_core::clifford::actions::{ad_big, project_tangent};
use fqorth_core::clifford::connection::ConnectionData;
use fqorth_core::clifford::repr::{cl_system, clifford_generators};
use fqorth_core::clifford::system::floating_residual;
use fqorth_core::formal::eval::{eval_tuple, Assignment};
use fqorth_core::formal::FormalElement;
use fqorth_core::gram_schmidt::{characterize, conjugation_residual, ogs_raw, parallel_transport, pt_gs};
use fqorth_core::matrix::{tuple_distance, DenseMatrix};
use fqorth_core::omega::counts::{coeff_count, coeff_count_enumerated, CountKind};
use fqorth_core::omega::properties::property_checks;
use fqorth_core::omega::step::{step, step_residual, GsOp, OmegaOp};
use fqorth_core::serialize::parse_json;
use fqorth_core::Rational;

type Check = std::result::Result<String, String>;
type Table = (Vec<Vec<Rational>>, Vec<Vec<Vec<Rational>>>);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

fn ints(row: &[i64], den: i64) -> Vec<Rational> {
    row.iter().map(|&x| r(x, den)).collect()
}

fn random_matrix(d: usize, g: &mut ChaCha8Rng, norm: f64) -> DenseMatrix {
    let m = DenseMatrix::random(d, g);
    m.scale(norm / m.norm())
}

fn perturbed(n: usize, eps: f64, g: &mut ChaCha8Rng) -> (Vec<DenseMatrix>, Vec<DenseMatrix>) {
    let q = clifford_generators(n);
    let r = q.iter().map(|x| random_matrix(x.d(), g, eps)).collect();
    (q, r)
}

fn add(a: &[DenseMatrix], b: &[DenseMatrix]) -> Vec<DenseMatrix> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

// ---- tables -------------------------------------------------------------------

fn expand(args: &str) -> std::result::Result<(Table, String), String> {
    let out = fqorth_core::cli::run(std::iter::once("fqorth").chain(args.split_whitespace()));
    ensure(out.code == 0, format!("exit code {}: {}", out.code, out.stderr))?;
    let v = parse_json(&out.stdout).map_err(|e| e.to_string())?;
    let parse = |x: &serde_json::Value| -> Rational { x.as_str().unwrap().parse().unwrap() };
    let mut p1 = vec![];
    let mut p2 = vec![];
    for k in ["1", "2"] {
        let t = &v["p_tables"][k];
        ensure(parse(&t["p0"]) == Rational::one(), format!("P_0^[{k}] ≠ [1]"))?;
        p1.push(t["p1"].as_array().unwrap().iter().map(parse).collect());
        p2.push(t["p2"].as_array().unwrap().iter().map(|row| row.as_array().unwrap().iter().map(parse).collect()).collect());
    }
    Ok(((p1, p2), out.stderr))
}

fn gs_literal() -> Table {
    let p1 = vec![ints(&[0, 0, 1, 1, 0, 0, 0, 0], 1), ints(&[0, 0, 0, 1, 0, 1, 0, 0], 1)];
    let a = [
        [0, 0, -1, -1, 0, 0, 0, 0],
        [0, 0, -1, -1, 0, 0, 0, 0],
        [-1, -1, 1, 1, 0, 0, 0, 0],
        [-1, -1, 1, 1, 0, 0, 0, 0],
        [0; 8],
        [0; 8],
        [0; 8],
        [0; 8],
    ];
    let b = [
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0, 0, 0],
        [0, -1, 0, 1, 0, 1, 0, -1],
        [-1, 0, -1, 1, 0, 1, -1, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, -1, 1, -1, 1, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
    ];
    (p1, vec![a.iter().map(|x| ints(x, 2)).collect(), b.iter().map(|x| ints(x, 2)).collect()])
}

fn sy_literal() -> Table {
    let h = |x: i64| r(x, 2);
    let p1 = vec![
        vec![r(0, 1), r(0, 1), r(1, 1), h(1), r(0, 1), r(0, 1), r(0, 1), h(1)],
        vec![r(0, 1), r(0, 1), r(0, 1), h(1), r(0, 1), r(1, 1), r(0, 1), h(1)],
    ];
    let a = [
        [0, 0, -4, -1, 0, 0, 0, -1],
        [0, 0, -2, -2, 0, 0, 0, -2],
        [-4, -2, 4, 2, 0, -2, 0, 2],
        [-1, -2, 2, 1, -1, 2, 0, 1],
        [0, 0, 0, -1, 0, 0, 0, -1],
        [0, 0, 2, -2, 0, 0, -2, 2],
        [0, 0, 0, 0, 0, -2, 0, 0],
        [-1, -2, 2, 1, -1, -2, 0, 1],
    ];
    let b = [
        [0, 0, 0, -1, 0, 0, 0, -1],
        [0, 0, -2, 0, 0, 0, 0, 0],
        [0, -2, 0, 2, 0, 2, 0, -2],
        [-1, 0, -2, 1, -1, 2, -2, 1],
        [0, 0, 0, -1, 0, -4, 0, -1],
        [0, 0, -2, 2, -4, 4, -2, 2],
        [0, 0, 0, -2, 0, -2, 0, -2],
        [-1, 0, 2, 1, -1, 2, -2, 1],
    ];
    (p1, vec![a.iter().map(|x| ints(x, 8)).collect(), b.iter().map(|x| ints(x, 8)).collect()])
}

/// `GS(t)` tables as closed formulas in `t`. Entries (3,8) and (4,8) of the
/// first `P_2` use `t/(1+t)` and `t/(1+t)²`, the values forced by the
/// `t = 0` and `t = 1` limits.
fn gs_t_literal(t: &Rational) -> Table {
    let one = Rational::one();
    let s = &one + t;
    let f = s.recip().unwrap();
    let g = t * &f;
    let ff = &f * &f;
    let gg = t * &ff;
    let hh = &(t * t) * &ff;
    let z = Rational::zero();
    let m = |x: &Rational| -x;
    let p1 = vec![
        vec![z.clone(), z.clone(), one.clone(), f.clone(), z.clone(), z.clone(), z.clone(), g.clone()],
        vec![z.clone(), z.clone(), z.clone(), f.clone(), z.clone(), one.clone(), z.clone(), g.clone()],
    ];
    let a = vec![
        vec![z.clone(), z.clone(), m(&one), m(&ff), z.clone(), z.clone(), z.clone(), m(&gg)],
        vec![z.clone(), z.clone(), m(&f), m(&f), z.clone(), z.clone(), z.clone(), m(&g)],
        vec![m(&one), m(&f), one.clone(), f.clone(), z.clone(), m(&g), z.clone(), g.clone()],
        vec![m(&ff), m(&f), f.clone(), ff.clone(), m(&gg), g.clone(), z.clone(), gg.clone()],
        vec![z.clone(), z.clone(), z.clone(), m(&gg), z.clone(), z.clone(), z.clone(), m(&hh)],
        vec![z.clone(), z.clone(), g.clone(), m(&g), z.clone(), z.clone(), m(&g), g.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), m(&g), z.clone(), z.clone()],
        vec![m(&gg), m(&g), g.clone(), gg.clone(), m(&hh), m(&g), z.clone(), hh.clone()],
    ];
    let b = vec![
        vec![z.clone(), z.clone(), z.clone(), m(&ff), z.clone(), z.clone(), z.clone(), m(&gg)],
        vec![z.clone(), z.clone(), m(&f), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), m(&f), z.clone(), f.clone(), z.clone(), f.clone(), z.clone(), m(&f)],
        vec![m(&ff), z.clone(), m(&f), ff.clone(), m(&gg), f.clone(), m(&f), gg.clone()],
        vec![z.clone(), z.clone(), z.clone(), m(&gg), z.clone(), m(&one), z.clone(), m(&hh)],
        vec![z.clone(), z.clone(), m(&f), f.clone(), m(&one), one.clone(), m(&g), g.clone()],
        vec![z.clone(), z.clone(), z.clone(), m(&f), z.clone(), m(&g), z.clone(), m(&g)],
        vec![m(&gg), z.clone(), f.clone(), gg.clone(), m(&hh), g.clone(), m(&g), hh.clone()],
    ];
    let half = r(1, 2);
    let scale = |mat: Vec<Vec<Rational>>| mat.into_iter().map(|row| row.iter().map(|x| x * &half).collect()).collect();
    (p1, vec![scale(a), scale(b)])
}

fn table_eq(got: &Table, want: &Table, what: &str) -> std::result::Result<(), String> {
    for k in 0..2 {
        for i in 0..8 {
            ensure(got.0[k][i] == want.0[k][i], format!("{what}: P_1^[{}] entry {} is {}, want {}", k + 1, i + 1, got.0[k][i], want.0[k][i]))?;
            for j in 0..8 {
                ensure(
                    got.1[k][i][j] == want.1[k][i][j],
                    format!("{what}: P_2^[{}] entry ({},{}) is {}, want {}", k + 1, i + 1, j + 1, got.1[k][i][j], want.1[k][i][j]),
                )?;
            }
        }
    }
    Ok(())
}

fn c1() -> Check {
    let start = Instant::now();
    let (got, _) = expand("expand --omega gs --n 2 --degree 2")?;
    let secs = start.elapsed().as_secs_f64();
    table_eq(&got, &gs_literal(), "GS")?;
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("all 144 entries exact in {secs:.2} s"))
}

fn c2() -> Check {
    let start = Instant::now();
    let (sy, _) = expand("expand --omega sy --n 2 --degree 2")?;
    table_eq(&sy, &sy_literal(), "Sy")?;
    let (t0, _) = expand("expand --omega gst --t 0 --n 2 --degree 2")?;
    table_eq(&t0, &gs_literal(), "GS(0) vs GS")?;
    let (t1, _) = expand("expand --omega gst --t 1 --n 2 --degree 2")?;
    table_eq(&t1, &sy_literal(), "GS(1) vs Sy")?;
    for t in [r(0, 1), r(1, 1), r(1, 2)] {
        let (got, _) = expand(&format!("expand --omega gst --t {t} --n 2 --degree 2"))?;
        table_eq(&got, &gs_t_literal(&t), &format!("GS({t}) vs formula"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("Sy exact; GS(t) exact at t = 0, 1, 1/2 in {secs:.2} s"))
}

fn c3() -> Check {
    // ϖ = (15)(27)(36)(48), 1-based
    let w = [5, 7, 6, 8, 1, 3, 2, 4];
    for t in [r(1, 1), r(1, 2), r(2, 1)] {
        let (a, _) = expand(&format!("expand --omega gst --t {t} --n 2 --degree 2"))?;
        let inv = t.recip().unwrap();
        let (b, _) = expand(&format!("expand --omega gst --t {inv} --n 2 --degree 2"))?;
        for i in 0..8 {
            ensure(a.0[0][i] == b.0[1][w[i] - 1], format!("t = {t}: p1 entry {}", i + 1))?;
            for j in 0..8 {
                ensure(a.1[0][i][j] == b.1[1][w[i] - 1][w[j] - 1], format!("t = {t}: p2 entry ({},{})", i + 1, j + 1))?;
            }
        }
        let out = fqorth_core::cli::run(["fqorth", "expand", "--omega", "gst", "--t", &t.to_string(), "--varpi-check"]);
        ensure(out.code == 0 && out.stderr.contains("pass"), format!("--varpi-check at t = {t}"))?;
    }
    Ok("p^[1](t) = p^[2]_ϖ(1/t) at t = 1, 1/2, 2".into())
}

fn c4() -> Check {
    let mut checked = 0;
    for kind in CountKind::ALL {
        for n in 1..=3 {
            for rr in 1..=2 {
                let c = coeff_count(n, rr, kind).map_err(|e| e.to_string())?;
                let e = coeff_count_enumerated(n, rr, kind).map_err(|e| e.to_string())?;
                ensure(c == e, format!("{kind} n={n} r={rr}: formula {c}, enumeration {e}"))?;
                checked += 1;
            }
        }
    }
    let ten = coeff_count(2, 1, CountKind::FqOpVl).map_err(|e| e.to_string())?;
    ensure(ten == 10.into(), format!("fq-op-vl n=2 r=1 is {ten}, want 10"))?;
    Ok(format!("{checked} (kind, n, r) cells agree"))
}

// ---- classical oracles ------------------------------------------------------

fn na(v: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(v.len(), v[0].len(), |i, j| v[i][j])
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Orthonormalization of the rows in order, from a QR factorization.
fn gs_oracle(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let qr = na(v).transpose().qr();
    let (q, rr) = (qr.q(), qr.r());
    let mut out = q.transpose();
    for k in 0..out.nrows() {
        if rr[(k, k)] < 0.0 {
            out.row_mut(k).neg_mut();
        }
    }
    rows_of(&out)
}

/// `S^{-1/2}V` with `S = VVᵀ`, i.e. the orthogonal polar factor `UWᵀ` of `V = UΣWᵀ`.
fn lowdin_oracle(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let svd = na(v).svd(true, true);
    rows_of(&(svd.u.unwrap() * svd.v_t.unwrap()))
}

fn random_vectors(n: usize, m: usize, g: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    loop {
        let v: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| g.sample(StandardNormal)).collect()).collect();
        let s = na(&v).singular_values();
        if s.min() > 0.3 * s.max() {
            return v;
        }
    }
}

fn c5() -> Check {
    let start = Instant::now();
    let mut g = rng(5);
    let (mut worst_gs, mut worst_sy) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let (n, m) = [(2, 2), (2, 3), (3, 3)][i % 3];
        let v = random_vectors(n, m, &mut g);
        let a = cl_system(&v);
        let gs = ogs_raw(&a).map_err(|e| e.to_string())?;
        worst_gs = worst_gs.max(tuple_distance(&gs, &cl_system(&gs_oracle(&v))));
        let sy = o_sy_matrix(&a, IterOptions::default()).map_err(|e| format!("system {i}: {e}"))?;
        worst_sy = worst_sy.max(tuple_distance(&sy.system, &cl_system(&lowdin_oracle(&v))));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_gs <= 1e-8 && worst_sy <= 1e-8, format!("GS {worst_gs:.1e}, Löwdin {worst_sy:.1e}"))?;
    ensure(secs < 30.0, format!("took {secs:.2} s"))?;
    Ok(format!("GS {worst_gs:.1e}, Löwdin {worst_sy:.1e} over 20 systems in {secs:.2} s"))
}

// ---- polarization -----------------------------------------------------------

fn c6() -> Check {
    let mut g = rng(6);
    let e = clifford_generators(3);
    let (mut wa, mut wb, mut wc, mut wq) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let mconj = DenseMatrix::identity(8).add(&random_matrix(8, &mut g, 0.3));
        let mi = mconj.inverse().map_err(|e| e.to_string())?;
        let conj = |x: &DenseMatrix| mconj.mul(x).mul(&mi);
        let h = conj(&e[0].add(&random_matrix(8, &mut g, 0.4)));
        let p = h.pol().map_err(|e| e.to_string())?;
        let id = DenseMatrix::identity(8);

        // (a) Möbius transforms
        let (a, b, c, d): (f64, f64, f64, f64) = (g.random_range(-2.0..2.0), g.random_range(-2.0..2.0), g.random_range(-2.0..2.0), g.random_range(-2.0..2.0));
        let det = a * d - b * c;
        if det.abs() > 0.1 {
            let num = h.scale(a).add(&id.scale(b));
            let den = h.scale(c).add(&id.scale(d)).inverse().map_err(|e| e.to_string())?;
            let lhs = num.mul(&den).pol().map_err(|e| e.to_string())?;
            wa = wa.max(lhs.sub(&p.scale(det.signum())).norm());
        }

        // (b) (anti)commutation, with X = e_3 and X = e_2e_3 against e_1 + projected noise
        let noise = random_matrix(8, &mut g, 0.4);
        let x_anti = conj(&e[2]);
        let xi = x_anti.inverse().map_err(|e| e.to_string())?;
        let h_anti = conj(&e[0]).add(&noise.sub(&x_anti.mul(&noise).mul(&xi)).scale(0.5));
        let pa = h_anti.pol().map_err(|e| e.to_string())?;
        let x_comm = conj(&e[1].mul(&e[2]));
        let xci = x_comm.inverse().map_err(|e| e.to_string())?;
        let h_comm = conj(&e[0]).add(&noise.add(&x_comm.mul(&noise).mul(&xci)).scale(0.5));
        let pc = h_comm.pol().map_err(|e| e.to_string())?;
        ensure(x_anti.anticommutator(&h_anti).norm() < 1e-10 && x_comm.commutator(&h_comm).norm() < 1e-10, "bad test input")?;
        wb = wb.max(x_anti.anticommutator(&pa).norm()).max(x_comm.commutator(&pc).norm());

        // (c) segment towards pol H
        let t: f64 = g.random_range(0.0..=1.0);
        let seg = h.scale(t).add(&p.scale(1.0 - t)).pol().map_err(|e| e.to_string())?;
        wc = wc.max(seg.sub(&p).norm());

        // iteration vs quadrature at 256 nodes
        let pq = h.pol_quadrature(256).map_err(|e| e.to_string())?;
        let s = id.add(&random_matrix(8, &mut g, 0.4));
        let sq = s.inv_sqrt().map_err(|e| e.to_string())?.sub(&s.inv_sqrt_quadrature(256).map_err(|e| e.to_string())?);
        wq = wq.max(pq.sub(&p).norm()).max(sq.norm());
    }
    let worst = wa.max(wb).max(wc).max(wq);
    ensure(worst <= 1e-8, format!("(a) {wa:.1e} (b) {wb:.1e} (c) {wc:.1e} quadrature {wq:.1e}"))?;
    Ok(format!("(a) {wa:.1e} (b) {wb:.1e} (c) {wc:.1e}, iteration vs quadrature {wq:.1e}"))
}

// ---- characterization of the Gram–Schmidt output ---------------------------

fn c7() -> Check {
    let mut g = rng(7);
    let (mut cp, mut lgs) = (0.0f64, 0.0f64);
    let mut detected = [0usize; 3];
    for i in 0..20 {
        let n = 2 + i % 2;
        let (q0, r0) = perturbed(n, 0.3, &mut g);
        let a = add(&q0, &r0);
        let q = ogs_raw(&a).map_err(|e| e.to_string())?;
        let rep = characterize(&a, &q, false).map_err(|e| e.to_string())?;
        ensure(rep.nsp_margin.is_some_and(|m| m > 0.0), format!("input {i}: NSp margin {:?}", rep.nsp_margin))?;
        cp = cp.max(rep.cp);
        lgs = lgs.max(rep.lgs);

        // sign flip: still a Clifford system, but A_1Q_1^{-1} gets negative spectrum
        let mut flipped = q.clone();
        flipped[0] = flipped[0].neg();
        let rf = characterize(&a, &flipped, false).map_err(|e| e.to_string())?;
        if rf.nsp_margin.is_some_and(|m| m < 0.0) {
            detected[0] += 1;
        }
        // wrong base: the unperturbed generators
        let rw = characterize(&a, &q0, false).map_err(|e| e.to_string())?;
        if rw.lgs > 1e-3 {
            detected[1] += 1;
        }
        // broken relations
        let mut broken = q.clone();
        broken[n - 1] = broken[n - 1].add(&q[0].scale(0.2));
        let rb = characterize(&a, &broken, false).map_err(|e| e.to_string())?;
        if rb.cp > 1e-3 {
            detected[2] += 1;
        }
    }
    ensure(cp <= 1e-8 && lgs <= 1e-8, format!("CP {cp:.1e}, LGS {lgs:.1e}"))?;
    ensure(detected == [20, 20, 20], format!("violations detected: sign flip {}, wrong base {}, relations {}", detected[0], detected[1], detected[2]))?;
    Ok(format!("CP {cp:.1e}, LGS {lgs:.1e}; sign flip, wrong base and broken relations detected 20/20 each"))
}

// ---- formal iteration ---------------------------------------------------------

fn c8() -> Check {
    let d = 5;
    let a = FormalElement::<Rational>::generic_input(2, d);
    let sy = ConnectionData::<Rational>::sy(2);
    let mut q = ogs_raw(&a).map_err(|e| e.to_string())?;
    let mut degrees = vec![];
    for k in 0..=3 {
        let (x, _) = step_residual(&sy, &a, &q, false).map_err(|e| e.to_string())?;
        let deg = x.min_degree().unwrap_or(usize::MAX);
        ensure(deg > k, format!("after {k} steps the residual has degree {deg}"))?;
        degrees.push(if deg == usize::MAX { "∞".to_string() } else { deg.to_string() });
        q = step(&sy, &a, &q, false).map_err(|e| e.to_string())?;
    }
    Ok(format!("residual degrees after 0..3 steps: {}", degrees.join(", ")))
}

fn c9() -> Check {
    let gs = property_checks(&GsOp, 2, 3).map_err(|e| e.to_string())?;
    let sy = property_checks(&OmegaOp::new(ConnectionData::sy(2), false), 2, 3).map_err(|e| e.to_string())?;
    let half = ConnectionData::gs_t_at(2, &r(1, 2)).map_err(|e| e.to_string())?;
    let gst = property_checks(&OmegaOp::new(half, false), 2, 3).map_err(|e| e.to_string())?;
    let pattern = |p: &fqorth_core::omega::properties::PropertyReport| (p.fil, p.sigma, p.fst);
    ensure(pattern(&gs) == (true, false, true), format!("GS: {}", gs.summary()))?;
    ensure(pattern(&sy) == (false, true, true), format!("Sy: {}", sy.summary()))?;
    ensure(pattern(&gst) == (false, false, true), format!("GS(1/2): {}", gst.summary()))?;
    Ok(format!("GS [{}], Sy [{}], GS(1/2) [{}]", gs.summary(), sy.summary(), gst.summary()))
}

// ---- closed floating formula ------------------------------------------------

fn c10() -> Check {
    let mut g = rng(10);
    let (mut rel, mut quad, mut rot, mut iter) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let (q, r0) = perturbed(2, 0.2, &mut g);
        let w = DenseMatrix::identity(4).add(&random_matrix(4, &mut g, 0.3));
        let a: Vec<DenseMatrix> = add(&q, &r0).iter().map(|x| x.mul(&w)).collect();
        let b = closed_fsy_n2(&a[0], &a[1]).map_err(|e| e.to_string())?;
        rel = rel.max(floating_residual(&b, 0).map_err(|e| e.to_string())?);
        for _ in 0..3 {
            let th: f64 = g.random_range(0.0..std::f64::consts::TAU);
            quad = quad.max(inverse_system_residual(&a[0], &a[1], &b, th.cos(), th.sin(), 256).map_err(|e| e.to_string())?);
        }
        let th: f64 = g.random_range(0.0..std::f64::consts::TAU);
        let u = vec![vec![th.cos(), th.sin()], vec![-th.sin(), th.cos()]];
        let ua = act(&u, &a);
        let ub = closed_fsy_n2(&ua[0], &ua[1]).map_err(|e| e.to_string())?;
        rot = rot.max(tuple_distance(&ub, &act(&u, &b)));
        let it = o_fsy_matrix(&a, IterOptions::default()).map_err(|e| e.to_string())?;
        iter = iter.max(tuple_distance(&it.system, &b));
    }
    ensure(rel <= 1e-9 && quad <= 1e-8 && rot <= 1e-8 && iter <= 1e-7, format!("relations {rel:.1e}, quadrature {quad:.1e}, rotation {rot:.1e}, iteration {iter:.1e}"))?;
    Ok(format!("relations {rel:.1e}, quadrature {quad:.1e}, rotation {rot:.1e}, vs iteration {iter:.1e}"))
}

// ---- transport --------------------------------------------------------------

fn c11() -> Check {
    let mut g = rng(11);
    let (mut orbit, mut nearby) = (0.0f64, 0.0f64);
    for i in 0..10 {
        let q = clifford_generators(2 + i % 2);
        let d = q[0].d();
        let x = project_tangent(&q, &random_matrix(d, &mut g, 0.8)).map_err(|e| e.to_string())?;
        let path = |t: f64| ad_big(&x.scale(t).exp(), &q);
        let h = parallel_transport(&path, 0.0, 1.0, 100).map_err(|e| e.to_string())?;
        orbit = orbit.max(h.sub(&x.exp()).norm());

        let y = project_tangent(&q, &random_matrix(d, &mut g, 1.0)).map_err(|e| e.to_string())?;
        let target = ad_big(&y.exp(), &q).map_err(|e| e.to_string())?;
        let size = target.iter().zip(&q).map(|(a, b)| a.sub(b).norm()).fold(0.0, f64::max);
        let target = if size > 0.1 {
            let y = y.scale(0.1 / size * 0.95);
            ad_big(&y.exp(), &q).map_err(|e| e.to_string())?
        } else {
            target
        };
        let hq = pt_gs(&target, &q, 100).map_err(|e| e.to_string())?;
        nearby = nearby.max(conjugation_residual(&hq, &q, &target).map_err(|e| e.to_string())?);
    }
    ensure(orbit <= 1e-7 && nearby <= 1e-7, format!("orbit {orbit:.1e}, pt_gs {nearby:.1e}"))?;
    Ok(format!("exp X recovered to {orbit:.1e}; pt_gs residual {nearby:.1e}"))
}

// ---- cross-backend ------------------------------------------------------------

fn c12() -> Check {
    let mut g = rng(12);
    let formal = fqorth_core::omega::step::o_omega(
        &ConnectionData::<Rational>::sy(2),
        &FormalElement::generic_input(2, 3),
        false,
    )
    .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (q, r0) = perturbed(2, 0.05, &mut g);
        let asg = Assignment::from_perturbation(&q, &r0, 1e-9).map_err(|e| e.to_string())?;
        let ev = eval_tuple(&formal, &asg).map_err(|e| e.to_string())?;
        let it = o_sy_matrix(&add(&q, &r0), IterOptions::default()).map_err(|e| e.to_string())?;
        worst = worst.max(tuple_distance(&ev, &it.system));
    }
    ensure(worst <= 1e-5, format!("max deviation {worst:.1e}"))?;
    Ok(format!("degree-3 expansion vs iteration: {worst:.1e} over 10 inputs"))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("GS coefficient tables", c1),
        ("Sy and GS(t) coefficient tables", c2),
        ("generator-reversal symmetry", c3),
        ("coefficient counts", c4),
        ("classical limit", c5),
        ("polarization properties", c6),
        ("Gram-Schmidt characterization", c7),
        ("degree gain per step", c8),
        ("property separation", c9),
        ("closed floating formula, n = 2", c10),
        ("parallel transport", c11),
        ("formal vs matrix backend", c12),
    ];
    let mut failed = vec![];
    let mut err = std::io::stderr();
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        let _ = writeln!(err, "criterion {:>2} {tag}: {name}: {detail} [{secs:.2} s]", i + 1);
        if res.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
