//! Python bindings. Matrices cross the boundary as lists of rows; tables and
//! formal results as canonical JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fqorth_core::analytic::{self, IterOptions};
use fqorth_core::clifford::repr;
use fqorth_core::gram_schmidt;
use fqorth_core::matrix::DenseMatrix;
use fqorth_core::omega::counts::{coeff_count, CountKind};
use fqorth_core::Error;

type Rows = Vec<Vec<f64>>;

fn to_py_err(e: Error) -> PyErr {
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: &Rows) -> PyResult<DenseMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("matrices must be square and nonempty"));
    }
    Ok(DenseMatrix::from_row_slice(d, &rows.concat()))
}

fn to_tuple(ms: &[Rows]) -> PyResult<Vec<DenseMatrix>> {
    let out = ms.iter().map(to_matrix).collect::<PyResult<Vec<_>>>()?;
    if out.is_empty() || out.iter().any(|m| m.d() != out[0].d()) {
        return Err(PyValueError::new_err("need one or more matrices of equal size"));
    }
    Ok(out)
}

fn from_tuple(ms: &[DenseMatrix]) -> Vec<Rows> {
    ms.iter().map(DenseMatrix::rows).collect()
}

/// Real matrix generators of a Clifford system of size `n`.
#[pyfunction]
fn clifford_generators(n: usize) -> PyResult<Vec<Rows>> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be positive"));
    }
    Ok(from_tuple(&repr::clifford_generators(n)))
}

/// Embeds vectors `v_i` as `Σ_h v_{ih} e_h`.
#[pyfunction]
fn embed(vectors: Rows) -> Vec<Rows> {
    from_tuple(&repr::cl_system(&vectors))
}

#[pyfunction]
fn ogs(matrices: Vec<Rows>) -> PyResult<Vec<Rows>> {
    let a = to_tuple(&matrices)?;
    gram_schmidt::ogs_raw(&a).map(|q| from_tuple(&q)).map_err(to_py_err)
}

#[pyfunction]
fn ofgs(matrices: Vec<Rows>) -> PyResult<Vec<Rows>> {
    let a = to_tuple(&matrices)?;
    gram_schmidt::ofgs_raw(&a).map(|q| from_tuple(&q)).map_err(to_py_err)
}

/// Symmetric orthogonalization; returns `(system, iterations)`.
#[pyfunction]
#[pyo3(signature = (matrices, tol = 1e-12, max_iter = 200))]
fn o_sy(matrices: Vec<Rows>, tol: f64, max_iter: usize) -> PyResult<(Vec<Rows>, usize)> {
    let a = to_tuple(&matrices)?;
    let r = analytic::o_sy_matrix(&a, IterOptions { tol, max_iter }).map_err(to_py_err)?;
    Ok((from_tuple(&r.system), r.iterations))
}

/// Floating symmetric orthogonalization; returns `(system, iterations)`.
#[pyfunction]
#[pyo3(signature = (matrices, tol = 1e-12, max_iter = 200))]
fn o_fsy(matrices: Vec<Rows>, tol: f64, max_iter: usize) -> PyResult<(Vec<Rows>, usize)> {
    let a = to_tuple(&matrices)?;
    let r = analytic::o_fsy_matrix(&a, IterOptions { tol, max_iter }).map_err(to_py_err)?;
    Ok((from_tuple(&r.system), r.iterations))
}

#[pyfunction]
fn closed_fsy_n2(a1: Rows, a2: Rows) -> PyResult<Vec<Rows>> {
    let b = analytic::closed_fsy_n2(&to_matrix(&a1)?, &to_matrix(&a2)?).map_err(to_py_err)?;
    Ok(from_tuple(&b))
}

/// Classical Löwdin orthonormalization of a vector system.
#[pyfunction]
fn lowdin(vectors: Rows) -> PyResult<Rows> {
    repr::classical_lowdin(&vectors).map_err(to_py_err)
}

#[pyfunction]
fn count(kind: &str, n: usize, r: usize) -> PyResult<u128> {
    let kind: CountKind = kind.parse().map_err(to_py_err)?;
    let c = coeff_count(n, r, kind).map_err(to_py_err)?;
    c.to_string().parse().map_err(|_| PyValueError::new_err("count does not fit in 128 bits"))
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    let out = fqorth_core::cli::run(std::iter::once("fqorth".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

/// Adds every binding to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(clifford_generators, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(ogs, m)?)?;
    m.add_function(wrap_pyfunction!(ofgs, m)?)?;
    m.add_function(wrap_pyfunction!(o_sy, m)?)?;
    m.add_function(wrap_pyfunction!(o_fsy, m)?)?;
    m.add_function(wrap_pyfunction!(closed_fsy_n2, m)?)?;
    m.add_function(wrap_pyfunction!(lowdin, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}

#[pymodule]
fn fqorth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
