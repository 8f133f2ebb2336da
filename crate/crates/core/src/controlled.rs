//! U-controlled E-frames.
//!
//! For a family `psi`, mapping `E` and control operator `U`, write
//! `x_n = (E psi)_n`. The controlled frame operator is
//!
//! ```text
//! S_UE f = sum_n <f, x_n> U x_n = T_UE T_E* f,     T_UE c = sum_n c_n U x_n,
//! ```
//!
//! linear in `f`. The family is a controlled E-frame when `S_UE` is
//! Hermitian with a strictly positive spectrum; its extreme eigenvalues are
//! the controlled bounds `(m_U, M_U)`.
//!
//! A family `phi` is a controlled dual of `psi` when
//! `f = sum_n <f, (E phi)_n> U x_n` for every `f`, i.e. `T_UE D_E* = id` with
//! `D_E` the synthesis map of `E phi`. Every such dual arises both as
//! `E^-1` applied to the columns of a right inverse `V` (`T_UE V* = id`) and
//! as the canonical dual `S_UE^-1 psi` shifted by `E^-1` of the columns of
//! `V*` for some `V` with `T_UE V = 0`.

use crate::eframe::{AnalysisMap, EFrame, FrameVerdict, SynthesisMap};
use crate::error::{check_dim, FrameError, Result};
use crate::hilbert::{
    hermitian_part_bounds, hermitian_part_eigenvalues, inner, invert_operator,
    is_positive_definite, operator_norm, pseudoinverse, singular_values, CMatrix, COperator,
    CVector, SpectralBounds,
};
use crate::mapping::{MatrixMapping, VectorSequence};
use crate::random::{gaussian_matrix, random_unit_vector, rng_for};

/// Why a family fails to be a controlled E-frame.
#[derive(Clone, Debug, PartialEq)]
pub enum ControlledVerdict {
    ControlledFrame,
    /// `S_UE` has a relative skew part above tolerance.
    NotHermitian {
        skew: f64,
    },
    /// `S_UE` is Hermitian but its lower bound is not positive.
    NotPositive {
        lower: f64,
    },
    NonFinite,
}

impl ControlledVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ControlledVerdict::ControlledFrame)
    }

    pub fn describe(&self) -> String {
        match self {
            ControlledVerdict::ControlledFrame => "controlled-frame".to_string(),
            ControlledVerdict::NotHermitian { skew } => {
                format!("invalid: S_UE not Hermitian (relative skew {skew:.3e})")
            }
            ControlledVerdict::NotPositive { lower } => {
                format!("invalid: S_UE not positive (lower bound {lower:.3e})")
            }
            ControlledVerdict::NonFinite => "invalid: non-finite frame operator".to_string(),
        }
    }
}

/// Orientation in which a candidate dual reconstructs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualOrientation {
    /// `f = sum_n <f, (E phi)_n> U (E psi)_n`.
    Definitional,
    /// `f = sum_n <f, (E psi)_n> U (E phi)_n`.
    Switched,
}

impl DualOrientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            DualOrientation::Definitional => "definitional",
            DualOrientation::Switched => "switched",
        }
    }
}

/// Randomized verification of the controlled dual identity.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    /// Number of test vectors (random unit vectors plus the standard basis).
    pub trials: usize,
    /// Largest `||f - sum_n <f, (E phi)_n> U (E psi)_n||` over unit test vectors.
    pub max_residual: f64,
    /// Same for the switched orientation.
    pub switched_residual: f64,
    pub tol: f64,
    pub orientations: Vec<DualOrientation>,
    /// Definitional orientation passes.
    pub verdict: bool,
}

/// Deviations in the operator identities satisfied by a controlled E-frame.
/// All entries are relative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityReport {
    /// `||S_UE - U S_E||_F / ||U S_E||_F`.
    pub err_sue_use: f64,
    /// `||U S_E - S_E U*||_F / ||U S_E||_F`.
    pub err_commute: f64,
    /// `max_f ||sum <f,x_n> U x_n - sum <f,U x_n> x_n|| / (||S_UE|| ||f||)`.
    pub err_switched_sum: f64,
}

/// A family with its mapping and control operator, analyzed once at
/// construction.
#[derive(Clone, Debug)]
pub struct ControlledEFrame {
    frame: EFrame,
    u: COperator,
    s_e: COperator,
    s_ue: COperator,
    s_ue_inv: Option<COperator>,
    bounds: SpectralBounds,
    verdict: ControlledVerdict,
    tol: f64,
}

impl ControlledEFrame {
    /// Builds the controlled frame operator and decides validity.
    ///
    /// `tol` bounds the relative skew part of `S_UE`; positivity requires
    /// `m_U > tol * M_U`.
    pub fn new(frame: EFrame, u: COperator, tol: f64) -> Result<Self> {
        check_dim("control operator", frame.dim(), u.dim())?;
        let t_e = frame.synthesis();
        let t_ue = controlled_synthesis(&frame, &u);
        let s_e = t_e.compose_adjoint(&t_e)?;
        let s_ue = t_ue.compose_adjoint(&t_e)?;

        if !s_ue.is_finite() {
            return Ok(Self {
                frame,
                u,
                s_e,
                s_ue,
                s_ue_inv: None,
                bounds: SpectralBounds {
                    lo: f64::NAN,
                    hi: f64::NAN,
                },
                verdict: ControlledVerdict::NonFinite,
                tol,
            });
        }

        let bounds = hermitian_part_bounds(&s_ue);
        let skew = s_ue.relative_skew();
        let verdict = if skew > tol {
            ControlledVerdict::NotHermitian { skew }
        } else if bounds.lo.is_nan()
            || bounds.lo <= tol * bounds.hi.max(0.0)
            || frame.count() < frame.dim()
        {
            ControlledVerdict::NotPositive { lower: bounds.lo }
        } else {
            ControlledVerdict::ControlledFrame
        };
        let s_ue_inv = if verdict.is_valid() {
            Some(invert_operator(&s_ue, tol * bounds.hi)?)
        } else {
            None
        };
        Ok(Self {
            frame,
            u,
            s_e,
            s_ue,
            s_ue_inv,
            bounds,
            verdict,
            tol,
        })
    }

    pub fn from_parts(
        mapping: MatrixMapping,
        psi: VectorSequence,
        u: COperator,
        tol: f64,
    ) -> Result<Self> {
        Self::new(EFrame::new(mapping, psi)?, u, tol)
    }

    pub fn frame(&self) -> &EFrame {
        &self.frame
    }

    pub fn mapping(&self) -> &MatrixMapping {
        self.frame.mapping()
    }

    pub fn psi(&self) -> &VectorSequence {
        self.frame.psi()
    }

    pub fn control(&self) -> &COperator {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn count(&self) -> usize {
        self.frame.count()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The ordinary E-frame operator `S_E`.
    pub fn e_frame_operator(&self) -> &COperator {
        &self.s_e
    }

    /// `S_UE`.
    pub fn frame_operator(&self) -> &COperator {
        &self.s_ue
    }

    /// `(m_U, M_U)`, the extreme eigenvalues of the Hermitian part of `S_UE`.
    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn verdict(&self) -> &ControlledVerdict {
        &self.verdict
    }

    pub fn is_valid(&self) -> bool {
        self.verdict.is_valid()
    }

    /// `T_UE`, whose column `n` is `U (E psi)_n`.
    pub fn synthesis(&self) -> SynthesisMap {
        controlled_synthesis(&self.frame, &self.u)
    }

    fn require_valid(&self) -> Result<&COperator> {
        self.s_ue_inv
            .as_ref()
            .ok_or_else(|| FrameError::InvalidControlledFrame(self.verdict.describe()))
    }

    /// Relative deviations in `S_UE = U S_E`, `U S_E = S_E U*` and the
    /// switched-sum identity, the latter checked on `trials` seeded unit
    /// vectors and the standard basis.
    pub fn operator_identities(&self, trials: usize, seed: u64) -> Result<IdentityReport> {
        self.require_valid()?;
        let u_s_e = &self.u * &self.s_e;
        let scale = u_s_e.frobenius_norm().max(f64::MIN_POSITIVE);
        let err_sue_use = self.s_ue.distance(&u_s_e)? / scale;
        let err_commute = u_s_e.distance(&(&self.s_e * &self.u.adjoint()))? / scale;

        let images = self.frame.images().items();
        let u_images: Vec<CVector> = images.iter().map(|x| &self.u * x).collect();
        let s_norm = operator_norm(self.s_ue.matrix()).max(f64::MIN_POSITIVE);
        let d = self.dim();
        let mut err_switched_sum: f64 = 0.0;
        for f in test_vectors(d, trials, seed) {
            let mut lhs = CVector::zeros(d);
            let mut rhs = CVector::zeros(d);
            for (x, ux) in images.iter().zip(&u_images) {
                lhs = &lhs + &ux.scale(inner(&f, x)?);
                rhs = &rhs + &x.scale(inner(&f, ux)?);
            }
            let diff = lhs.distance(&rhs)? / (s_norm * f.norm());
            err_switched_sum = err_switched_sum.max(diff);
        }
        Ok(IdentityReport {
            err_sue_use,
            err_commute,
            err_switched_sum,
        })
    }

    /// For Hermitian `U`: the family is an E-frame, `U` commutes with `S_E`
    /// to `tol` (relative), and `U` is positive definite.
    pub fn commutes_with_frame_operator(&self, tol: f64) -> Result<bool> {
        let skew = self.u.relative_skew();
        if skew > tol {
            return Err(FrameError::NotHermitian { skew, tol });
        }
        if self.frame.analyze(tol).verdict != FrameVerdict::Frame {
            return Ok(false);
        }
        let u_s_e = &self.u * &self.s_e;
        let commutator = u_s_e.distance(&(&self.s_e * &self.u))?;
        if commutator > tol * u_s_e.frobenius_norm() {
            return Ok(false);
        }
        Ok(is_positive_definite(&self.u, tol))
    }

    /// `||S_UE - id||_F <= tol * sqrt(d)`.
    pub fn is_parseval(&self, tol: f64) -> bool {
        let d = self.dim();
        match self.s_ue.distance(&COperator::identity(d)) {
            Ok(dev) => dev <= tol * (d as f64).sqrt(),
            Err(_) => false,
        }
    }

    /// `sum_n <S_UE^-1 f, (E psi)_n> U (E psi)_n`, which equals `f`.
    pub fn canonical_reconstruct(&self, f: &CVector) -> Result<CVector> {
        let inv = self.require_valid()?;
        let g = inv.apply(f)?;
        let coeffs = self.frame.analysis(&g)?;
        self.synthesis().apply(&coeffs)
    }

    /// `{S_UE^-1 psi_k}`.
    pub fn canonical_dual(&self) -> Result<VectorSequence> {
        let inv = self.require_valid()?;
        self.psi().map_operator(inv)
    }

    fn images_of(&self, phi: &VectorSequence) -> Result<VectorSequence> {
        check_dim("dual family dimension", self.dim(), phi.dim())?;
        self.mapping().apply(phi)
    }

    /// `T_UE D_E*` for the candidate dual `phi`; the identity exactly when
    /// `phi` is a controlled dual.
    pub fn reconstruction_operator(&self, phi: &VectorSequence) -> Result<COperator> {
        let d_e = SynthesisMap::from_sequence(&self.images_of(phi)?);
        self.synthesis().compose_adjoint(&d_e)
    }

    /// Checks the dual identity on `trials` seeded unit vectors plus the
    /// standard basis, in both orientations.
    pub fn verify_dual(
        &self,
        phi: &VectorSequence,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<DualCertificate> {
        let phi_images = self.images_of(phi)?;
        let t_e = self.frame.synthesis();
        let t_ue = self.synthesis();
        let d_e = SynthesisMap::from_sequence(&phi_images);
        let d_ue = SynthesisMap::from_sequence(&phi_images.map_operator(&self.u)?);
        let d_analysis = d_e.adjoint();
        let t_analysis = t_e.adjoint();

        let mut max_residual: f64 = 0.0;
        let mut switched_residual: f64 = 0.0;
        let vectors = test_vectors(self.dim(), trials, seed);
        for f in &vectors {
            let norm = f.norm();
            let definitional = t_ue.apply(&d_analysis.apply(f)?)?;
            let switched = d_ue.apply(&t_analysis.apply(f)?)?;
            max_residual = max_residual.max(definitional.distance(f)? / norm);
            switched_residual = switched_residual.max(switched.distance(f)? / norm);
        }
        let mut orientations = Vec::new();
        if max_residual <= tol {
            orientations.push(DualOrientation::Definitional);
        }
        if switched_residual <= tol {
            orientations.push(DualOrientation::Switched);
        }
        Ok(DualCertificate {
            trials: vectors.len(),
            max_residual,
            switched_residual,
            tol,
            verdict: max_residual <= tol,
            orientations,
        })
    }

    /// `phi_k = (E^-1 {V delta_n})_k` for a right inverse, `T_UE V* = id`.
    pub fn dual_from_right_inverse(&self, v: &SynthesisMap, tol: f64) -> Result<VectorSequence> {
        check_dim("right inverse dimension", self.dim(), v.dim())?;
        check_dim("right inverse length", self.count(), v.count())?;
        let product = self.synthesis().compose_adjoint(v)?;
        let deviation =
            operator_norm(&(product.matrix() - CMatrix::identity(self.dim(), self.dim())));
        if deviation > tol {
            return Err(FrameError::RightInverseViolated { deviation });
        }
        self.mapping().apply_inverse(&v.columns())
    }

    /// A seeded member of the right-inverse family,
    /// `V* = pinv(T_UE) + (id - pinv(T_UE) T_UE) G`.
    pub fn random_right_inverse(&self, seed: u64) -> Result<SynthesisMap> {
        self.require_valid()?;
        let t = self.synthesis();
        let pinv = pseudoinverse(t.matrix(), self.tol);
        let g = gaussian_matrix(&mut rng_for(seed, 0), self.count(), self.dim());
        let v_adj = &pinv + self.null_projector(&pinv) * g;
        SynthesisMap::from_matrix(v_adj.adjoint())
    }

    /// The canonical right inverse `V* = pinv(T_UE)`.
    pub fn canonical_right_inverse(&self) -> Result<SynthesisMap> {
        self.require_valid()?;
        Ok(self.synthesis().pseudoinverse(self.tol).adjoint())
    }

    /// `phi_k = S_UE^-1 psi_k + (E^-1 {V* delta_n})_k` for `T_UE V = 0`.
    pub fn dual_offset_family(&self, v: &AnalysisMap, tol: f64) -> Result<VectorSequence> {
        let inv = self.require_valid()?;
        check_dim("null map dimension", self.dim(), v.dim())?;
        check_dim("null map length", self.count(), v.count())?;
        let t = self.synthesis();
        let deviation = operator_norm(t.compose_analysis(v)?.matrix());
        let allowed = tol * operator_norm(t.matrix()) * operator_norm(v.matrix());
        if deviation > allowed {
            return Err(FrameError::NullConditionViolated { deviation });
        }
        let canonical = self.psi().map_operator(inv)?;
        let offset = self.mapping().apply_inverse(&v.adjoint().columns())?;
        canonical.add(&offset)
    }

    /// A seeded `V = (id - pinv(T_UE) T_UE) G`, so that `T_UE V = 0`.
    pub fn random_null_map(&self, seed: u64) -> Result<AnalysisMap> {
        self.require_valid()?;
        let pinv = pseudoinverse(self.synthesis().matrix(), self.tol);
        let g = gaussian_matrix(&mut rng_for(seed, 0), self.count(), self.dim());
        AnalysisMap::from_matrix(self.null_projector(&pinv) * g)
    }

    /// Orthogonal projector onto the kernel of `T_UE`; exactly zero when the
    /// kernel is trivial.
    fn null_projector(&self, pinv: &CMatrix) -> CMatrix {
        let t = self.synthesis();
        let n = self.count();
        let s = singular_values(t.matrix());
        let cutoff = self.tol * s.first().copied().unwrap_or(0.0);
        let rank = s.iter().filter(|&&x| x > cutoff).count();
        if rank == n {
            return CMatrix::zeros(n, n);
        }
        CMatrix::identity(n, n) - pinv * t.matrix()
    }

    /// Recovers `V = T_Phi* - T_Psi* S_UE^-1` for a controlled dual `phi`, so
    /// that [`Self::dual_offset_family`] maps it back to `phi`.
    pub fn extract_null_map(&self, phi: &VectorSequence, tol: f64) -> Result<AnalysisMap> {
        let inv = self.require_valid()?;
        let d = self.dim();
        let product = self.reconstruction_operator(phi)?;
        let deviation = operator_norm(&(product.matrix() - CMatrix::identity(d, d)));
        if deviation > tol {
            return Err(FrameError::NotADual { deviation });
        }
        let phi_images = self.images_of(phi)?;
        let canonical_images = self.frame.images().map_operator(inv)?;
        AnalysisMap::from_matrix(
            phi_images.columns().adjoint() - canonical_images.columns().adjoint(),
        )
    }
}

fn controlled_synthesis(frame: &EFrame, u: &COperator) -> SynthesisMap {
    SynthesisMap::from_matrix(u.matrix() * frame.images().columns()).expect("non-empty family")
}

/// `trials` seeded unit vectors followed by the standard basis.
pub fn test_vectors(dim: usize, trials: usize, seed: u64) -> Vec<CVector> {
    let mut out: Vec<CVector> = (0..trials as u64)
        .map(|i| random_unit_vector(dim, seed, i))
        .collect();
    out.extend((0..dim).map(|i| CVector::basis(dim, i).expect("index in range")));
    out
}

/// Both routes to the controlled bounds of an E-Riesz family.
#[derive(Clone, Debug)]
pub struct RieszEquivalence {
    /// Bounds of `{V (E^-1 {e_j})_k}` as a controlled E-frame.
    pub riesz_bounds: SpectralBounds,
    /// Bounds of `{V e_j}` as a controlled frame (identity mapping).
    pub direct_bounds: SpectralBounds,
    pub riesz_verdict: ControlledVerdict,
    pub direct_verdict: ControlledVerdict,
    /// Largest eigenvalue difference relative to the spectral radius.
    pub spectrum_deviation: f64,
    /// `||S_1 - S_2||_F / ||S_1||_F`.
    pub operator_deviation: f64,
    pub agree: bool,
}

pub fn riesz_equivalence(
    v: &COperator,
    basis: &VectorSequence,
    mapping: &MatrixMapping,
    u: &COperator,
    tol: f64,
) -> Result<RieszEquivalence> {
    let family = crate::eframe::riesz_family(v, mapping, basis, tol)?;
    let riesz = ControlledEFrame::from_parts(mapping.clone(), family, u.clone(), tol)?;
    let direct = ControlledEFrame::from_parts(
        MatrixMapping::identity(basis.count())?,
        basis.map_operator(v)?,
        u.clone(),
        tol,
    )?;
    let eig_a = hermitian_part_eigenvalues(riesz.frame_operator());
    let eig_b = hermitian_part_eigenvalues(direct.frame_operator());
    let radius = eig_a
        .iter()
        .chain(&eig_b)
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let spectrum_deviation = eig_a
        .iter()
        .zip(&eig_b)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / radius;
    let operator_deviation = riesz.frame_operator().distance(direct.frame_operator())?
        / riesz
            .frame_operator()
            .frobenius_norm()
            .max(f64::MIN_POSITIVE);
    Ok(RieszEquivalence {
        riesz_bounds: riesz.bounds(),
        direct_bounds: direct.bounds(),
        riesz_verdict: riesz.verdict().clone(),
        direct_verdict: direct.verdict().clone(),
        spectrum_deviation,
        operator_deviation,
        agree: spectrum_deviation <= tol && operator_deviation <= tol,
    })
}
