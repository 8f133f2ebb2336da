//! Neumann-series correction of approximate controlled duals.
//!
//! Given a candidate dual `phi` with synthesis map `D_E` (of `E phi`), the
//! reconstruction operator `A = T_UE D_E*` is close to the identity. When
//! `||id - A|| < 1` the corrected family `(D_E T_UE*)^-1 phi` is an exact
//! controlled dual, and
//!
//! ```text
//! (D_E T_UE*)^-1 = sum_{n >= 0} (id - D_E T_UE*)^n.
//! ```
//!
//! Powers are never formed; each term is the previous one multiplied by
//! `id - D_E T_UE*`.

use crate::controlled::ControlledEFrame;
use crate::eframe::SynthesisMap;
use crate::error::{check_dim, FrameError, Result};
use crate::hilbert::{operator_norm, CMatrix, COperator, CVector};
use crate::mapping::VectorSequence;

/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NeumannReport {
    /// `||id - T_UE D_E*||` (spectral norm).
    pub ratio: f64,
    /// Number of series terms summed.
    pub terms_used: usize,
    /// Relative size of each successive correction (dual) or residual
    /// (reconstruction).
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

fn reconstruction_operator(cf: &ControlledEFrame, phi: &VectorSequence) -> Result<COperator> {
    check_dim("candidate dual length", cf.count(), phi.count())?;
    check_dim("candidate dual dimension", cf.dim(), phi.dim())?;
    cf.reconstruction_operator(phi)
}

fn require_contraction(ratio: f64) -> Result<()> {
    if ratio < 1.0 {
        Ok(())
    } else {
        Err(FrameError::NotContractive { ratio })
    }
}

/// `||id - T_UE D_E*||`, where `D_E` synthesizes `E phi`.
pub fn contraction_ratio(cf: &ControlledEFrame, phi: &VectorSequence) -> Result<f64> {
    let a = reconstruction_operator(cf, phi)?;
    let d = cf.dim();
    Ok(operator_norm(&(CMatrix::identity(d, d) - a.matrix())))
}

/// `phi_hat_k = sum_{n=0}^{M} (id - D_E T_UE*)^n phi_k`, stopping at the first
/// correction whose norm is at most `eps` times the accumulated sum.
pub fn neumann_corrected_dual(
    cf: &ControlledEFrame,
    phi: &VectorSequence,
    eps: f64,
    max_terms: usize,
) -> Result<(VectorSequence, NeumannReport)> {
    let ratio = contraction_ratio(cf, phi)?;
    require_contraction(ratio)?;

    let d = cf.dim();
    let d_e = SynthesisMap::from_sequence(&cf.mapping().apply(phi)?);
    let step = CMatrix::identity(d, d) - d_e.matrix() * cf.synthesis().matrix().adjoint();

    let base = phi.norm();
    let mut term = phi.columns().clone();
    let mut acc = term.clone();
    let mut history = Vec::new();
    for n in 1..=max_terms.max(1) {
        term = &step * &term;
        let size = term.norm();
        history.push(if base > 0.0 { size / base } else { 0.0 });
        if size <= eps * acc.norm() {
            let corrected = VectorSequence::from_columns(acc)?;
            return Ok((
                corrected,
                NeumannReport {
                    ratio,
                    terms_used: n,
                    residual_history: history,
                    converged: true,
                },
            ));
        }
        acc += &term;
    }
    Err(FrameError::NotConverged {
        terms: max_terms,
        last: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Partial sums `g_M = sum_{n=0}^{M} (id - A)^n A f` with `A = T_UE D_E*`,
/// stopping once `||f - g_M|| <= eps ||f||`.
///
/// The residual `f - g_M = (id - A)^{M+1} f` is carried as its own vector so
/// that the history is not polluted by cancellation in `f - g_M`.
pub fn iterative_reconstruct(
    cf: &ControlledEFrame,
    phi: &VectorSequence,
    f: &CVector,
    eps: f64,
    max_terms: usize,
) -> Result<(CVector, NeumannReport)> {
    check_dim("reconstruction vector", cf.dim(), f.dim())?;
    let a = reconstruction_operator(cf, phi)?;
    let d = cf.dim();
    let step = COperator::from_matrix(CMatrix::identity(d, d) - a.matrix())?;
    let ratio = operator_norm(step.matrix());
    require_contraction(ratio)?;

    let f_norm = f.norm();
    if f_norm == 0.0 {
        return Ok((
            CVector::zeros(d),
            NeumannReport {
                ratio,
                terms_used: 0,
                residual_history: Vec::new(),
                converged: true,
            },
        ));
    }

    let mut residual = f.clone();
    let mut approx = CVector::zeros(d);
    let mut history = Vec::new();
    for n in 0..max_terms.max(1) {
        let next = step.apply(&residual)?;
        approx = &approx + &(&residual - &next);
        residual = next;
        let rel = residual.norm() / f_norm;
        history.push(rel);
        if rel <= eps {
            return Ok((
                approx,
                NeumannReport {
                    ratio,
                    terms_used: n + 1,
                    residual_history: history,
                    converged: true,
                },
            ));
        }
    }
    Err(FrameError::NotConverged {
        terms: max_terms,
        last: history.last().copied().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{r, DEFAULT_TOL};
    use crate::mapping::MatrixMapping;
    use approx::assert_relative_eq;

    fn half() -> ControlledEFrame {
        let psi = VectorSequence::from_real(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![2.0, 1.0, 1.0],
        ])
        .unwrap();
        ControlledEFrame::from_parts(
            MatrixMapping::backward_difference(4).unwrap(),
            psi,
            COperator::scalar(3, r(0.5)),
            DEFAULT_TOL,
        )
        .unwrap()
    }

    #[test]
    fn ratio_of_scaled_duals() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        assert_relative_eq!(
            contraction_ratio(&cf, &dual.scale(r(0.9))).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            contraction_ratio(&cf, &dual.scale(r(0.5))).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert!(contraction_ratio(&cf, &dual).unwrap() < 1e-14);
    }

    #[test]
    fn corrected_dual_from_ninety_percent() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        let (fixed, report) = neumann_corrected_dual(&cf, &dual.scale(r(0.9)), 1e-12, 100).unwrap();
        assert!(fixed.max_deviation(&dual).unwrap() <= 1e-12 * dual.norm());
        assert!(report.terms_used <= 13);
        assert!(report.converged);
    }

    #[test]
    fn exact_dual_needs_one_term() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        let (fixed, report) = neumann_corrected_dual(&cf, &dual, 1e-12, 100).unwrap();
        assert_eq!(report.terms_used, 1);
        assert_eq!(fixed, dual);

        let f = CVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let (g, report) = iterative_reconstruct(&cf, &dual, &f, 1e-12, 100).unwrap();
        assert_eq!(report.terms_used, 1);
        assert!(g.distance(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn half_scaled_dual_decays_geometrically() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        let (_, report) = neumann_corrected_dual(&cf, &dual.scale(r(0.5)), 1e-10, 100).unwrap();
        assert!(report.terms_used <= 35);
        for w in report.residual_history.windows(2) {
            assert!((w[1] / w[0] - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn iterative_reconstruction_shrinks_by_ratio() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        let f = CVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let (g, report) = iterative_reconstruct(&cf, &dual.scale(r(0.9)), &f, 1e-10, 100).unwrap();
        assert!(g.distance(&f).unwrap() <= 1e-10 * f.norm());
        assert_relative_eq!(report.residual_history[0], 0.1, max_relative = 1e-12);
        for w in report.residual_history.windows(2) {
            assert!((w[1] / w[0] - 0.1).abs() < 1e-6);
        }

        // Ratio 0.01 reaches 1e-12 in six terms, up to one term of round-off
        // in 1 - 0.99.
        let (_, report) = iterative_reconstruct(&cf, &dual.scale(r(0.99)), &f, 1e-12, 100).unwrap();
        assert!(
            (6..=7).contains(&report.terms_used),
            "{}",
            report.terms_used
        );
    }

    #[test]
    fn non_contractive_is_rejected() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap();
        let doubled = dual.scale(r(2.0));
        assert!(matches!(
            neumann_corrected_dual(&cf, &doubled, 1e-12, 100),
            Err(FrameError::NotContractive { .. })
        ));
        let f = CVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            iterative_reconstruct(&cf, &doubled, &f, 1e-12, 100),
            Err(FrameError::NotContractive { .. })
        ));
    }

    #[test]
    fn exhausting_terms_is_an_error() {
        let cf = half();
        let dual = cf.canonical_dual().unwrap().scale(r(0.1));
        assert!(matches!(
            neumann_corrected_dual(&cf, &dual, 1e-14, 5),
            Err(FrameError::NotConverged { terms: 5, .. })
        ));
    }
}
