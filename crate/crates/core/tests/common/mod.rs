//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use eframes::controlled::ControlledEFrame;
use eframes::eframe::EFrame;
use eframes::hilbert::{c, operator_norm, singular_values, CMatrix, COperator, DEFAULT_TOL};
use eframes::mapping::{MatrixMapping, VectorSequence};
use eframes::random::{gaussian_matrix, rng_for};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MAX_COND: f64 = 1e3;

pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    s[0] / s[s.len() - 1]
}

/// `id + s G / sqrt n` with `s` log-uniform in `[0.1, 10]`, redrawn until
/// `cond <= MAX_COND`.
pub fn random_mapping(rng: &mut ChaCha8Rng, n: usize) -> MatrixMapping {
    loop {
        let s = 10f64.powf(rng.random_range(-1.0..1.0));
        let g = gaussian_matrix(rng, n, n) * c(s / (n as f64).sqrt(), 0.0);
        let m = CMatrix::identity(n, n) + g;
        if condition_number(&m) <= MAX_COND {
            return MatrixMapping::from_matrix(m, DEFAULT_TOL).expect("well conditioned");
        }
    }
}

pub fn random_sequence(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> VectorSequence {
    VectorSequence::from_columns(gaussian_matrix(rng, dim, count)).expect("non-empty")
}

/// `a id + b S + c S^2` with positive coefficients, scaled so the terms are
/// comparable: Hermitian, positive definite and commuting with `S`.
pub fn commuting_control(rng: &mut ChaCha8Rng, s: &COperator) -> COperator {
    let d = s.dim();
    let scale = operator_norm(s.matrix());
    let a = rng.random_range(0.2..1.0);
    let b = rng.random_range(0.0..1.0) / scale;
    let q = rng.random_range(0.0..1.0) / (scale * scale);
    let m = CMatrix::identity(d, d) * c(a, 0.0)
        + s.matrix() * c(b, 0.0)
        + s.matrix() * s.matrix() * c(q, 0.0);
    let herm = (&m + m.adjoint()) * c(0.5, 0.0);
    COperator::from_matrix(herm).expect("square")
}

pub struct Instance {
    pub dim: usize,
    pub count: usize,
    pub frame: EFrame,
    pub cf: ControlledEFrame,
}

/// `2 <= d <= 6`, `d <= N <= 10`, `cond(E) <= 1e3`, `U` commuting with `S_E`.
pub fn random_instance(seed: u64, index: u64) -> Instance {
    let mut rng = rng_for(seed, index);
    let dim = rng.random_range(2..=6);
    let count = rng.random_range(dim..=10);
    let mapping = random_mapping(&mut rng, count);
    let psi = random_sequence(&mut rng, dim, count);
    let frame = EFrame::new(mapping, psi).expect("shapes agree");
    let u = commuting_control(&mut rng, &frame.frame_operator());
    let cf = ControlledEFrame::new(frame.clone(), u, DEFAULT_TOL).expect("dims agree");
    Instance {
        dim,
        count,
        frame,
        cf,
    }
}

/// Same as [`random_instance`] but with `U = id`.
pub fn random_plain_instance(seed: u64, index: u64) -> Instance {
    let mut rng = rng_for(seed, index);
    let dim = rng.random_range(2..=6);
    let count = rng.random_range(dim..=10);
    let mapping = random_mapping(&mut rng, count);
    let psi = random_sequence(&mut rng, dim, count);
    let frame = EFrame::new(mapping, psi).expect("shapes agree");
    let cf = ControlledEFrame::new(frame.clone(), COperator::identity(dim), DEFAULT_TOL)
        .expect("dims agree");
    Instance {
        dim,
        count,
        frame,
        cf,
    }
}
