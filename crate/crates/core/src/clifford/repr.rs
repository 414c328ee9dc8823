//! Real matrix representations of Clifford algebras and the vector embedding `cl`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

fn j2() -> DenseMatrix {
    DenseMatrix::from_row_slice(2, &[0.0, -1.0, 1.0, 0.0])
}

fn sigma_z() -> DenseMatrix {
    DenseMatrix::from_row_slice(2, &[1.0, 0.0, 0.0, -1.0])
}

/// `n` anticommuting real `2^n × 2^n` matrices squaring to `-1`:
/// `e_1 = J ⊗ I`, `e_{i+1} = Z ⊗ f_i` where `f` are the `n−1` generators.
pub fn clifford_generators(n: usize) -> Vec<DenseMatrix> {
    assert!(n >= 1);
    if n == 1 {
        return vec![j2()];
    }
    let inner = clifford_generators(n - 1);
    let id = DenseMatrix::identity(1 << (n - 1));
    let mut out = vec![j2().kron(&id)];
    out.extend(inner.iter().map(|f| sigma_z().kron(f)));
    out
}

/// `cl(v) = Σ_h v_h e_h`, so that `cl(u)cl(v) + cl(v)cl(u) = −2⟨u, v⟩`.
pub fn cl(v: &[f64], generators: &[DenseMatrix]) -> DenseMatrix {
    let d = generators[0].d();
    v.iter()
        .zip(generators)
        .fold(DenseMatrix::zeros(d), |acc, (x, e)| acc.add(&e.scale(*x)))
}

/// Embeds each vector of a system as a matrix.
pub fn cl_system(vectors: &[Vec<f64>]) -> Vec<DenseMatrix> {
    let dim = vectors.first().map_or(1, Vec::len).max(1);
    let gens = clifford_generators(dim);
    vectors.iter().map(|v| cl(v, &gens)).collect()
}

/// Classical Gram–Schmidt orthonormalization (modified form).
pub fn classical_gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let p: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
            for (x, y) in w.iter_mut().zip(e) {
                *x -= p * y;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(w.iter().map(|x| x / norm).collect());
    }
    out
}

/// Classical symmetric (Löwdin) orthonormalization `[a_1 … a_n]·S^{-1/2}`, `S` the Gram
/// matrix; `S^{-1/2}` through a symmetric eigendecomposition.
pub fn classical_lowdin(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, Vec::len);
    let a = DMatrix::from_fn(dim, n, |c, j| vectors[j][c]);
    let eig = (a.transpose() * &a).symmetric_eigen();
    if eig.eigenvalues.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Singular);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt().recip()));
    let s = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    let out = a * s;
    Ok((0..n).map(|j| out.column(j).iter().copied().collect()).collect())
}
