//! Dense real matrices: inverses, spectra, inverse square roots and polarization.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Complex, DMatrix, Schur};
use rand::Rng;

use crate::error::{Error, Result};

/// Distance from the forbidden spectral set required by `inv_sqrt` and `pol`.
pub const SPECTRAL_TOL: f64 = 1e-6;

/// Reciprocal condition estimate below which a matrix counts as singular.
pub const CONDITION_CAP: f64 = 1e14;

const MAX_NEWTON_ITER: usize = 100;

/// A square real matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

/// An n-tuple of equally sized matrices.
pub type MatrixTuple = Vec<DenseMatrix>;

/// Eigenvalues together with the distances used by the spectral guards.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex<f64>>,
    /// `min |Im λ|`: distance of the spectrum from the real axis.
    pub min_real_axis_distance: f64,
    /// Distance of the spectrum from the ray `(-∞, 0]`.
    pub min_left_halfplane_margin: f64,
}

impl DenseMatrix {
    pub fn from_na(m: DMatrix<f64>) -> DenseMatrix {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        assert!(m.nrows() >= 1, "matrix must be nonempty");
        DenseMatrix(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DenseMatrix> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Parse(format!("expected a square matrix, got {d} rows")));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(DenseMatrix(DMatrix::from_fn(d, d, |i, j| rows[i][j])))
    }

    /// Row-major constructor.
    pub fn from_row_slice(d: usize, data: &[f64]) -> DenseMatrix {
        DenseMatrix::from_na(DMatrix::from_row_slice(d, d, data))
    }

    pub fn identity(d: usize) -> DenseMatrix {
        DenseMatrix(DMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> DenseMatrix {
        DenseMatrix(DMatrix::zeros(d, d))
    }

    pub fn diag(values: &[f64]) -> DenseMatrix {
        let d = values.len();
        DenseMatrix(DMatrix::from_fn(d, d, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    /// Entries drawn uniformly from `[-1, 1]`.
    pub fn random<R: Rng>(d: usize, rng: &mut R) -> DenseMatrix {
        DenseMatrix(DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)))
    }

    pub fn d(&self) -> usize {
        self.0.nrows()
    }

    pub fn na(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.d()).map(|i| (0..self.d()).map(|j| self.0[(i, j)]).collect()).collect()
    }

    pub fn add(&self, o: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 * &o.0)
    }

    pub fn neg(&self) -> DenseMatrix {
        DenseMatrix(-&self.0)
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix(&self.0 * s)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix(self.0.transpose())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn commutator(&self, o: &DenseMatrix) -> DenseMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn anticommutator(&self, o: &DenseMatrix) -> DenseMatrix {
        self.mul(o).add(&o.mul(self))
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Kronecker product.
    pub fn kron(&self, o: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(self.0.kronecker(&o.0))
    }

    fn norm1(m: &DMatrix<f64>) -> f64 {
        m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// LU inverse with a 1-norm condition cap.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        let inv = self.0.clone().lu().try_inverse().ok_or(Error::Singular)?;
        let cond = Self::norm1(&self.0) * Self::norm1(&inv);
        if !cond.is_finite() || cond > CONDITION_CAP {
            return Err(Error::Singular);
        }
        Ok(DenseMatrix(inv))
    }

    /// Eigenvalues via real Schur form, with the two guard distances.
    pub fn spectrum(&self) -> Result<SpectrumReport> {
        let schur = Schur::try_new(self.0.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::NoConvergence("Schur decomposition".into()))?;
        let eigenvalues: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().cloned().collect();
        let min_real_axis_distance = eigenvalues.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min);
        let min_left_halfplane_margin = eigenvalues
            .iter()
            .map(|z| if z.re <= 0.0 { z.im.abs() } else { z.norm() })
            .fold(f64::INFINITY, f64::min);
        Ok(SpectrumReport { eigenvalues, min_real_axis_distance, min_left_halfplane_margin })
    }

    /// `S^{-1/2}` by the scaled Denman–Beavers iteration.
    pub fn inv_sqrt(&self) -> Result<DenseMatrix> {
        let margin = self.spectrum()?.min_left_halfplane_margin;
        if margin <= SPECTRAL_TOL {
            return Err(Error::SpectralConditionViolated(margin));
        }
        let d = self.d();
        let mut y = self.clone();
        let mut z = DenseMatrix::identity(d);
        let mut scaling = true;
        for _ in 0..MAX_NEWTON_ITER {
            let yi = y.inverse()?;
            let zi = z.inverse()?;
            let mu = if scaling {
                (y.determinant() * z.determinant()).abs().powf(-1.0 / (2.0 * d as f64))
            } else {
                1.0
            };
            let y_next = y.scale(mu).add(&zi.scale(1.0 / mu)).scale(0.5);
            let z_next = z.scale(mu).add(&yi.scale(1.0 / mu)).scale(0.5);
            let change = y_next.sub(&y).norm() / y_next.norm();
            y = y_next;
            z = z_next;
            if change < 1e-2 {
                scaling = false;
            }
            if change < 1e-15 * (d as f64).sqrt() {
                return Ok(z);
            }
        }
        Err(Error::NoConvergence("inverse square root".into()))
    }

    /// Periodic trapezoid rule for `∫ (cos²t + S sin²t)^{-1} dt/2π`.
    pub fn inv_sqrt_quadrature(&self, nodes: usize) -> Result<DenseMatrix> {
        let d = self.d();
        let id = DenseMatrix::identity(d);
        let mut acc = DenseMatrix::zeros(d);
        for k in 0..nodes {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            let (s, c) = t.sin_cos();
            let m = id.scale(c * c).add(&self.scale(s * s));
            acc = acc.add(&m.inverse().map_err(|_| Error::NodeSingular(t))?);
        }
        Ok(acc.scale(1.0 / nodes as f64))
    }

    /// `pol H = H(-H²)^{-1/2}` by the scaled Newton iteration `X ← ½(μX − (μX)^{-1})`.
    pub fn pol(&self) -> Result<DenseMatrix> {
        let dist = self.spectrum()?.min_real_axis_distance;
        if dist <= SPECTRAL_TOL {
            return Err(Error::SpectralConditionViolated(dist));
        }
        let d = self.d();
        let mut x = self.clone();
        let mut scaling = true;
        for _ in 0..MAX_NEWTON_ITER {
            let mu = if scaling { x.determinant().abs().powf(-1.0 / d as f64) } else { 1.0 };
            let mx = x.scale(mu);
            let next = mx.sub(&mx.inverse()?).scale(0.5);
            let change = next.sub(&x).norm() / next.norm();
            x = next;
            if change < 1e-2 {
                scaling = false;
            }
            if change < 1e-15 * (d as f64).sqrt() {
                return Ok(x);
            }
        }
        Err(Error::NoConvergence("polarization".into()))
    }

    /// Periodic trapezoid rule for `∫ (−sin t + H cos t)(cos t + H sin t)^{-1} dt/2π`.
    pub fn pol_quadrature(&self, nodes: usize) -> Result<DenseMatrix> {
        let d = self.d();
        let id = DenseMatrix::identity(d);
        let mut acc = DenseMatrix::zeros(d);
        for k in 0..nodes {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            let (s, c) = t.sin_cos();
            let num = self.scale(c).sub(&id.scale(s));
            let den = id.scale(c).add(&self.scale(s));
            acc = acc.add(&num.mul(&den.inverse().map_err(|_| Error::NodeSingular(t))?));
        }
        Ok(acc.scale(1.0 / nodes as f64))
    }

    /// Directional derivative of `pol` at `self` in direction `eps`:
    /// `∫ M^{-1}(ε cos²t + HεH sin²t)M^{-1} dt/2π` with `M = cos²t − H² sin²t`.
    pub fn dpol(&self, eps: &DenseMatrix, nodes: usize) -> Result<DenseMatrix> {
        let d = self.d();
        let id = DenseMatrix::identity(d);
        let h2 = self.mul(self);
        let heh = self.mul(eps).mul(self);
        let mut acc = DenseMatrix::zeros(d);
        for k in 0..nodes {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            let (s, c) = t.sin_cos();
            let m = id.scale(c * c).sub(&h2.scale(s * s));
            let mi = m.inverse().map_err(|_| Error::NodeSingular(t))?;
            let mid = eps.scale(c * c).add(&heh.scale(s * s));
            acc = acc.add(&mi.mul(&mid).mul(&mi));
        }
        Ok(acc.scale(1.0 / nodes as f64))
    }

    pub fn exp(&self) -> DenseMatrix {
        DenseMatrix(self.0.clone().exp())
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix{:?}", self.rows())
    }
}

/// Largest Frobenius distance between corresponding tuple entries.
pub fn tuple_distance(a: &[DenseMatrix], b: &[DenseMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.sub(y).norm()).fold(0.0, f64::max)
}
