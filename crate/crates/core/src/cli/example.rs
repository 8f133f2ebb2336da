//! The bidiagonal worked example truncated to `C^d` with `N = d + 1`.
//!
//! With `E` the lower-bidiagonal `(1, -1)` mapping:
//!
//! ```text
//! psi       = [e1, 2e1, 2e1 + e2, ..., 2e1 + e2 + ... + ed]      E psi       = [e1, e1, e2, ..., ed]
//! psi_tilde = [e1, 2e1, 2e1 + 2e2, ..., 2e1 + 2e2 + ... + 2ed]  E psi_tilde = [e1, e1, 2e2, ..., 2ed]
//! phi       = [e1/3, e1, e1 + e2, ..., e1 + ... + ed]            E phi       = [e1/3, 2e1/3, e2, ..., ed]
//! ```
//!
//! and `U = id / 2`.

use crate::controlled::{test_vectors, ControlledEFrame};
use crate::eframe::{EFrame, SynthesisMap};
use crate::error::{FrameError, Result};
use crate::hilbert::{r, COperator, CVector};
use crate::mapping::{MatrixMapping, VectorSequence};

#[derive(Clone, Debug)]
pub struct ExampleFamilies {
    pub dim: usize,
    pub mapping: MatrixMapping,
    pub psi: VectorSequence,
    pub psi_tilde: VectorSequence,
    pub phi: VectorSequence,
    pub u: COperator,
}

/// `head * e1 + tail * (e2 + ... + e_k)` in `C^d`.
fn staircase(d: usize, k: usize, head: f64, tail: f64) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[0] = head;
    for x in v.iter_mut().take(k).skip(1) {
        *x = tail;
    }
    v
}

fn family(d: usize, first: f64, head: f64, tail: f64) -> Result<VectorSequence> {
    let mut rows = vec![staircase(d, 1, first, 0.0)];
    rows.extend((1..=d).map(|k| staircase(d, k, head, tail)));
    VectorSequence::from_real(&rows)
}

/// One sum of the example: which pairing, what it should equal, and the worst
/// relative residual observed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleCheck {
    pub name: &'static str,
    pub expected: &'static str,
    pub factor: f64,
    pub max_residual: f64,
}

impl ExampleFamilies {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(FrameError::InvalidSize(format!(
                "example needs dimension >= 2, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            mapping: MatrixMapping::backward_difference(dim + 1)?,
            psi: family(dim, 1.0, 2.0, 1.0)?,
            psi_tilde: family(dim, 1.0, 2.0, 2.0)?,
            phi: family(dim, 1.0 / 3.0, 1.0, 1.0)?,
            u: COperator::scalar(dim, r(0.5)),
        })
    }

    pub fn frame(&self) -> Result<EFrame> {
        EFrame::new(self.mapping.clone(), self.psi.clone())
    }

    pub fn controlled(&self, tol: f64) -> Result<ControlledEFrame> {
        ControlledEFrame::new(self.frame()?, self.u.clone(), tol)
    }

    /// Evaluates the four sums over `trials` seeded unit vectors and the
    /// standard basis:
    ///
    /// ```text
    /// sum <f, (E psi_tilde)_n> (E psi)_n      = 2f
    /// sum <f, (E psi_tilde)_n> U (E psi)_n    = f
    /// sum <f, (E phi)_n> (E psi)_n            = f
    /// sum <f, (E phi)_n> U (E psi)_n          = f/2
    /// ```
    pub fn checks(&self, trials: usize, seed: u64) -> Result<Vec<ExampleCheck>> {
        let psi_images = self.mapping.apply(&self.psi)?;
        let t = SynthesisMap::from_sequence(&psi_images);
        let t_u = SynthesisMap::from_sequence(&psi_images.map_operator(&self.u)?);
        let tilde = SynthesisMap::from_sequence(&self.mapping.apply(&self.psi_tilde)?).adjoint();
        let phi = SynthesisMap::from_sequence(&self.mapping.apply(&self.phi)?).adjoint();

        let cases = [
            ("plain (psi, psi_tilde)", "2f", 2.0, &t, &tilde),
            ("controlled (psi, psi_tilde)", "f", 1.0, &t_u, &tilde),
            ("plain (phi, psi)", "f", 1.0, &t, &phi),
            ("controlled (phi, psi)", "f/2", 0.5, &t_u, &phi),
        ];
        let vectors = test_vectors(self.dim, trials, seed);
        let mut out = Vec::with_capacity(cases.len());
        for (name, expected, factor, synth, analysis) in cases {
            let mut worst: f64 = 0.0;
            for f in &vectors {
                let sum = synth.apply(&analysis.apply(f)?)?;
                let target: CVector = f.scale(r(factor));
                worst = worst.max(sum.distance(&target)? / target.norm());
            }
            out.push(ExampleCheck {
                name,
                expected,
                factor,
                max_residual: worst,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_families() {
        let ex = ExampleFamilies::new(3).unwrap();
        let expect = |rows: &[Vec<f64>]| VectorSequence::from_real(rows).unwrap();
        assert_eq!(
            ex.psi,
            expect(&[
                vec![1.0, 0.0, 0.0],
                vec![2.0, 0.0, 0.0],
                vec![2.0, 1.0, 0.0],
                vec![2.0, 1.0, 1.0],
            ])
        );
        assert_eq!(
            ex.psi_tilde,
            expect(&[
                vec![1.0, 0.0, 0.0],
                vec![2.0, 0.0, 0.0],
                vec![2.0, 2.0, 0.0],
                vec![2.0, 2.0, 2.0],
            ])
        );
        assert_eq!(
            ex.phi,
            expect(&[
                vec![1.0 / 3.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![1.0, 1.0, 0.0],
                vec![1.0, 1.0, 1.0],
            ])
        );
    }

    #[test]
    fn images_are_basis_vectors() {
        let ex = ExampleFamilies::new(5).unwrap();
        let images = ex.mapping.apply(&ex.psi).unwrap();
        assert_eq!(images.item(0), CVector::basis(5, 0).unwrap());
        assert_eq!(images.item(1), CVector::basis(5, 0).unwrap());
        for j in 1..5 {
            assert_eq!(images.item(j + 1), CVector::basis(5, j).unwrap());
        }
    }

    #[test]
    fn four_sums_hold() {
        for d in [2, 3, 8] {
            let checks = ExampleFamilies::new(d).unwrap().checks(20, 1).unwrap();
            assert_eq!(checks.len(), 4);
            for ch in checks {
                assert!(ch.max_residual <= 1e-14, "{} {}", ch.name, ch.max_residual);
            }
        }
    }

    #[test]
    fn dimension_one_is_rejected() {
        assert!(matches!(
            ExampleFamilies::new(1),
            Err(FrameError::InvalidSize(_))
        ));
    }
}
