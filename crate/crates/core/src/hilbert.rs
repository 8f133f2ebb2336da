//! Complex vectors and operators on the finite-dimensional space `H = C^d`.
//!
//! Everything else in the crate is written against the types here. Dense
//! linear algebra (SVD, Hermitian eigenvalues, LU inversion) is delegated to
//! `nalgebra`; this module fixes the conventions on top of it:
//!
//! * the inner product is linear in the first argument and conjugate-linear
//!   in the second, `<u, v> = sum_i u_i conj(v_i)`;
//! * rank and singularity decisions are made on singular values;
//! * frame bounds are the extreme eigenvalues of a Hermitian operator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, FrameError, Result};

pub type CScalar = Complex64;

/// Dense complex matrix of arbitrary shape.
pub type CMatrix = DMatrix<CScalar>;

/// Default tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default tolerance for spectral quantities.
pub const SPECTRAL_TOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> CScalar {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> CScalar {
    Complex64::new(re, 0.0)
}

/// An element of `H = C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(DVector<CScalar>);

impl CVector {
    pub fn new(entries: Vec<CScalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(FrameError::Empty("vector"));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| r(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// The `index`-th standard basis vector (zero based).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(FrameError::InvalidSize(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = r(1.0);
        Ok(Self(v))
    }

    pub fn from_dvector(v: DVector<CScalar>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[CScalar] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<CScalar> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<CScalar> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: CScalar) -> Self {
        Self(&self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &CVector) -> Result<f64> {
        check_dim("distance", self.dim(), other.dim())?;
        Ok((&self.0 - &other.0).norm())
    }
}

impl fmt::Display for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if z.im == 0.0 {
                write!(f, "{}", z.re)?;
            } else {
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, ")")
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        CVector(&self.0 + &rhs.0)
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
        CVector(&self.0 - &rhs.0)
    }
}

impl Neg for &CVector {
    type Output = CVector;
    fn neg(self) -> CVector {
        CVector(-&self.0)
    }
}

impl Mul<&CVector> for CScalar {
    type Output = CVector;
    fn mul(self, rhs: &CVector) -> CVector {
        rhs.scale(self)
    }
}

/// `<u, v>`, linear in `u` and conjugate-linear in `v`.
pub fn inner(u: &CVector, v: &CVector) -> Result<CScalar> {
    check_dim("inner product", u.dim(), v.dim())?;
    Ok(u.0.iter().zip(v.0.iter()).map(|(a, b)| a * b.conj()).sum())
}

/// A bounded operator on `H`, stored as a square `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct COperator(CMatrix);

impl COperator {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(FrameError::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(FrameError::Empty("operator"));
        }
        Ok(Self(m))
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<CScalar>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(FrameError::Empty("operator"));
        }
        for row in rows {
            if row.len() != n {
                return Err(FrameError::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Ok(Self(CMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<CScalar>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| r(x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    /// `s * id`.
    pub fn scalar(dim: usize, s: CScalar) -> Self {
        Self(CMatrix::identity(dim, dim) * s)
    }

    pub fn diagonal(diag: &[CScalar]) -> Self {
        Self(CMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<CScalar> = diag.iter().map(|&x| r(x)).collect();
        Self::diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> CScalar {
        self.0[(row, col)]
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        check_dim("operator application", self.dim(), v.dim())?;
        Ok(CVector(&self.0 * &v.0))
    }

    /// `self * other`.
    pub fn compose(&self, other: &COperator) -> Result<COperator> {
        check_dim("operator composition", self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn adjoint(&self) -> COperator {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: CScalar) -> COperator {
        Self(&self.0 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &COperator) -> Result<f64> {
        check_dim("operator distance", self.dim(), other.dim())?;
        Ok((&self.0 - &other.0).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Relative size of the skew-Hermitian part, `||A - A*||_F / ||A||_F`
    /// (zero for the zero operator).
    pub fn relative_skew(&self) -> f64 {
        let total = self.0.norm();
        if total == 0.0 {
            return 0.0;
        }
        (&self.0 - self.0.adjoint()).norm() / total
    }
}

impl Add for &COperator {
    type Output = COperator;
    fn add(self, rhs: &COperator) -> COperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        COperator(&self.0 + &rhs.0)
    }
}

impl Sub for &COperator {
    type Output = COperator;
    fn sub(self, rhs: &COperator) -> COperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        COperator(&self.0 - &rhs.0)
    }
}

impl Mul for &COperator {
    type Output = COperator;
    fn mul(self, rhs: &COperator) -> COperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        COperator(&self.0 * &rhs.0)
    }
}

impl Mul<&CVector> for &COperator {
    type Output = CVector;
    fn mul(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "operator/vector dimensions differ");
        CVector(&self.0 * &rhs.0)
    }
}

pub fn adjoint(a: &COperator) -> COperator {
    a.adjoint()
}

/// Lower and upper spectral bounds of a Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralBounds {
    /// `hi / lo`, infinite when `lo <= 0`.
    pub fn ratio(&self) -> f64 {
        if self.lo > 0.0 {
            self.hi / self.lo
        } else {
            f64::INFINITY
        }
    }
}

/// Ascending eigenvalues of the Hermitian part `(A + A*) / 2`.
pub fn hermitian_part_eigenvalues(a: &COperator) -> Vec<f64> {
    let h = (&a.0 + a.0.adjoint()) * r(0.5);
    let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

/// Extreme eigenvalues of the Hermitian part of `a`, with no symmetry check.
pub fn hermitian_part_bounds(a: &COperator) -> SpectralBounds {
    let eig = hermitian_part_eigenvalues(a);
    SpectralBounds {
        lo: eig[0],
        hi: eig[eig.len() - 1],
    }
}

/// Extreme eigenvalues of a Hermitian operator. Fails when the relative
/// skew part `||A - A*||_F / ||A||_F` exceeds `tol`.
pub fn hermitian_bounds(a: &COperator, tol: f64) -> Result<SpectralBounds> {
    if !a.is_finite() {
        return Err(FrameError::NonFinite("hermitian_bounds input"));
    }
    let skew = a.relative_skew();
    if skew > tol {
        return Err(FrameError::NotHermitian { skew, tol });
    }
    Ok(hermitian_part_bounds(a))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn invert_operator(a: &COperator, tol: f64) -> Result<COperator> {
    let sigma_min = singular_values(&a.0).last().copied().unwrap_or(0.0);
    if sigma_min.is_nan() || sigma_min <= tol {
        return Err(FrameError::Singular { sigma_min, tol });
    }
    let inv =
        a.0.clone()
            .try_inverse()
            .ok_or(FrameError::Singular { sigma_min, tol })?;
    Ok(COperator(inv))
}

/// Moore-Penrose pseudoinverse. Singular values at or below
/// `tol * sigma_max` are treated as zero.
pub fn pseudoinverse(m: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s));
    if sigma_max == 0.0 {
        return CMatrix::zeros(cols, rows);
    }
    let cutoff = tol * sigma_max;
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut out = CMatrix::zeros(cols, rows);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            // V S^+ U* accumulated one rank-one term at a time.
            let v_col = v_t.row(i).adjoint();
            let u_row = u.column(i).adjoint();
            out += (v_col * u_row) * r(1.0 / s);
        }
    }
    out
}

/// Hermitian to `tol` and smallest eigenvalue above `tol`.
pub fn is_positive_definite(a: &COperator, tol: f64) -> bool {
    match hermitian_bounds(a, tol) {
        Ok(bounds) => bounds.lo > tol,
        Err(_) => false,
    }
}
