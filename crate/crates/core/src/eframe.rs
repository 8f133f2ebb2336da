//! E-frames: synthesis, analysis and frame operators of the images `E psi`,
//! frame bounds, the canonical dual, reconstruction and E-Riesz families.

use nalgebra::DVector;

use crate::error::{check_dim, FrameError, Result};
use crate::hilbert::{
    hermitian_part_bounds, invert_operator, pseudoinverse, r, CMatrix, COperator, CScalar, CVector,
    SpectralBounds, DEFAULT_TOL,
};
use crate::mapping::{MatrixMapping, VectorSequence};

/// A coefficient sequence in `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector(DVector<CScalar>);

impl CoeffVector {
    pub fn new(entries: Vec<CScalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(FrameError::Empty("coefficient vector"));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn zeros(count: usize) -> Self {
        Self(DVector::zeros(count))
    }

    /// The unit sequence with `1` in slot `n` (zero based).
    pub fn delta(count: usize, n: usize) -> Result<Self> {
        if n >= count {
            return Err(FrameError::InvalidSize(format!(
                "delta index {n} out of range for length {count}"
            )));
        }
        let mut v = DVector::zeros(count);
        v[n] = r(1.0);
        Ok(Self(v))
    }

    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[CScalar] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// A linear map `C^N -> H`, stored as a `d x N` matrix; column `n` is the
/// image of `delta_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisMap(CMatrix);

/// A linear map `H -> C^N`, stored as an `N x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisMap(CMatrix);

impl SynthesisMap {
    pub fn from_sequence(columns: &VectorSequence) -> Self {
        Self(columns.columns().clone())
    }

    /// `dim x count` matrix.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.is_empty() {
            return Err(FrameError::Empty("synthesis map"));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn count(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn column(&self, n: usize) -> CVector {
        CVector::from_dvector(self.0.column(n).into_owned())
    }

    /// The columns `{T delta_n}` as a sequence.
    pub fn columns(&self) -> VectorSequence {
        VectorSequence::from_columns(self.0.clone()).expect("non-empty map")
    }

    pub fn apply(&self, coeffs: &CoeffVector) -> Result<CVector> {
        check_dim("synthesis map", self.count(), coeffs.count())?;
        Ok(CVector::from_dvector(&self.0 * &coeffs.0))
    }

    pub fn adjoint(&self) -> AnalysisMap {
        AnalysisMap(self.0.adjoint())
    }

    /// `self * other*` as an operator on `H`.
    pub fn compose_adjoint(&self, other: &SynthesisMap) -> Result<COperator> {
        check_dim("synthesis pair dimension", self.dim(), other.dim())?;
        check_dim("synthesis pair length", self.count(), other.count())?;
        COperator::from_matrix(&self.0 * other.0.adjoint())
    }

    /// `self * v` for `v: H -> C^N`.
    pub fn compose_analysis(&self, v: &AnalysisMap) -> Result<COperator> {
        check_dim("synthesis/analysis length", self.count(), v.count())?;
        check_dim("synthesis/analysis dimension", self.dim(), v.dim())?;
        COperator::from_matrix(&self.0 * &v.0)
    }

    pub fn pseudoinverse(&self, tol: f64) -> AnalysisMap {
        AnalysisMap(pseudoinverse(&self.0, tol))
    }
}

impl AnalysisMap {
    /// `count x dim` matrix.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.is_empty() {
            return Err(FrameError::Empty("analysis map"));
        }
        Ok(Self(m))
    }

    pub fn zeros(count: usize, dim: usize) -> Self {
        Self(CMatrix::zeros(count, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn count(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn apply(&self, f: &CVector) -> Result<CoeffVector> {
        check_dim("analysis map", self.dim(), f.dim())?;
        Ok(CoeffVector(&self.0 * f.as_dvector()))
    }

    pub fn adjoint(&self) -> SynthesisMap {
        SynthesisMap(self.0.adjoint())
    }

    pub fn pseudoinverse(&self, tol: f64) -> SynthesisMap {
        SynthesisMap(pseudoinverse(&self.0, tol))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &AnalysisMap) -> Result<f64> {
        check_dim("analysis map length", self.count(), other.count())?;
        check_dim("analysis map dimension", self.dim(), other.dim())?;
        Ok((&self.0 - &other.0).norm())
    }
}

/// Outcome of the frame inequality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameVerdict {
    Frame,
    BesselOnly,
    NotBessel,
}

impl FrameVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            FrameVerdict::Frame => "frame",
            FrameVerdict::BesselOnly => "bessel-only",
            FrameVerdict::NotBessel => "not-bessel",
        }
    }
}

/// A family `psi` paired with a mapping `E`; the images `E psi` are cached.
#[derive(Clone, Debug)]
pub struct EFrame {
    mapping: MatrixMapping,
    psi: VectorSequence,
    images: VectorSequence,
}

impl EFrame {
    pub fn new(mapping: MatrixMapping, psi: VectorSequence) -> Result<Self> {
        let images = mapping.apply(&psi)?;
        Ok(Self {
            mapping,
            psi,
            images,
        })
    }

    pub fn mapping(&self) -> &MatrixMapping {
        &self.mapping
    }

    pub fn psi(&self) -> &VectorSequence {
        &self.psi
    }

    /// `E psi`.
    pub fn images(&self) -> &VectorSequence {
        &self.images
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn count(&self) -> usize {
        self.psi.count()
    }

    /// Pre-frame operator `T_E c = sum_n c_n (E psi)_n`.
    pub fn synthesis(&self) -> SynthesisMap {
        SynthesisMap::from_sequence(&self.images)
    }

    /// `T_E* f = { <f, (E psi)_n> }_n`.
    pub fn analysis(&self, f: &CVector) -> Result<CoeffVector> {
        self.synthesis().adjoint().apply(f)
    }

    /// `S_E = T_E T_E*`.
    pub fn frame_operator(&self) -> COperator {
        let t = self.synthesis();
        t.compose_adjoint(&t).expect("shapes agree")
    }

    /// Frame operator, its spectral bounds and the frame verdict.
    ///
    /// `tol` is relative: the family is a frame when the lower bound exceeds
    /// `tol * upper`. With fewer members than the dimension the verdict is
    /// at best `BesselOnly`.
    pub fn analyze(&self, tol: f64) -> EFrameRecord {
        let frame_op = self.frame_operator();
        if !frame_op.is_finite() {
            return EFrameRecord {
                frame: self.clone(),
                frame_op,
                bounds: SpectralBounds {
                    lo: f64::NAN,
                    hi: f64::INFINITY,
                },
                verdict: FrameVerdict::NotBessel,
            };
        }
        let bounds = hermitian_part_bounds(&frame_op);
        let verdict = if self.count() >= self.dim() && bounds.lo > tol * bounds.hi.max(0.0) {
            FrameVerdict::Frame
        } else {
            FrameVerdict::BesselOnly
        };
        EFrameRecord {
            frame: self.clone(),
            frame_op,
            bounds,
            verdict,
        }
    }

    /// `{S_E^-1 psi_k}`. Because `E` has scalar entries its images are
    /// `S_E^-1 (E psi)_n`.
    pub fn canonical_dual(&self, tol: f64) -> Result<VectorSequence> {
        let record = self.analyze(tol);
        if record.verdict != FrameVerdict::Frame {
            return Err(FrameError::NotAFrame {
                lower: record.bounds.lo,
            });
        }
        let inv = invert_operator(&record.frame_op, tol * record.bounds.hi)?;
        self.psi.map_operator(&inv)
    }

    /// `sum_n <f, (E phi)_n> (E psi)_n`, the plain dual pairing.
    pub fn reconstruct(&self, phi: &VectorSequence, f: &CVector) -> Result<CVector> {
        let dual = EFrame::new(self.mapping.clone(), phi.clone())?;
        check_dim("dual family dimension", self.dim(), dual.dim())?;
        let coeffs = dual.analysis(f)?;
        self.synthesis().apply(&coeffs)
    }
}

/// Result of [`EFrame::analyze`].
#[derive(Clone, Debug)]
pub struct EFrameRecord {
    pub frame: EFrame,
    pub frame_op: COperator,
    pub bounds: SpectralBounds,
    pub verdict: FrameVerdict,
}

impl EFrameRecord {
    pub fn is_frame(&self) -> bool {
        self.verdict == FrameVerdict::Frame
    }

    pub fn is_tight(&self, tol: f64) -> bool {
        self.is_frame() && (self.bounds.hi - self.bounds.lo) <= tol * self.bounds.hi
    }
}

/// Frobenius distance of the Gram matrix of `basis` from the identity.
pub fn orthonormality_defect(basis: &VectorSequence) -> f64 {
    let b = basis.columns();
    let gram = b.adjoint() * b;
    (gram - CMatrix::identity(basis.count(), basis.count())).norm()
}

/// The E-Riesz family `{V (E^-1 {e_j})_k}_k` for an orthonormal basis.
pub fn riesz_family(
    v: &COperator,
    mapping: &MatrixMapping,
    basis: &VectorSequence,
    tol: f64,
) -> Result<VectorSequence> {
    check_dim("riesz operator dimension", basis.dim(), v.dim())?;
    check_dim("riesz basis length", basis.dim(), basis.count())?;
    invert_operator(v, tol)?;
    let deviation = orthonormality_defect(basis);
    if deviation > tol.max(DEFAULT_TOL) {
        return Err(FrameError::NotOrthonormal { deviation });
    }
    mapping.apply_inverse(basis)?.map_operator(v)
}
