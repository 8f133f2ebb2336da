use thiserror::Error;

use super::config::{sequence_to_pairs, ConfigError, ProblemConfig};
use super::example::ExampleFamilies;
use super::report::{NeumannSection, Report};
use crate::controlled::{test_vectors, ControlledEFrame, DualCertificate};
use crate::eframe::EFrame;
use crate::error::FrameError;
use crate::hilbert::{r, COperator, CVector};
use crate::mapping::VectorSequence;
use crate::neumann::{contraction_ratio, iterative_reconstruct, neumann_corrected_dual};

/// Relative tolerance for recovering a generating null map from its dual.
pub const ROUND_TRIP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Input(String),
}

/// Resolved numerical settings: flag, then config, then default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub strict: bool,
}

impl Settings {
    pub fn resolve(
        cfg: Option<&ProblemConfig>,
        tol: Option<f64>,
        trials: Option<usize>,
        seed: Option<u64>,
        strict: bool,
    ) -> Result<Self, CliError> {
        let s = Self {
            tol: tol
                .or(cfg.map(|c| c.tol))
                .unwrap_or(crate::hilbert::DEFAULT_TOL),
            trials: trials
                .or(cfg.map(|c| c.trials))
                .unwrap_or(super::config::DEFAULT_TRIALS),
            seed: seed
                .or(cfg.map(|c| c.seed))
                .unwrap_or(super::config::DEFAULT_SEED),
            strict,
        };
        if !(s.tol > 0.0 && s.tol.is_finite()) {
            return Err(CliError::Input(format!(
                "--tol must be positive, got {}",
                s.tol
            )));
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualMode {
    Canonical,
    RightInverse,
    Offset,
}

impl DualMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DualMode::Canonical => "canonical",
            DualMode::RightInverse => "right-inverse",
            DualMode::Offset => "offset",
        }
    }
}

fn controlled(cfg: &ProblemConfig, s: &Settings) -> Result<ControlledEFrame, CliError> {
    let frame = EFrame::new(cfg.mapping.clone(), cfg.psi.clone())?;
    Ok(ControlledEFrame::new(frame, cfg.u.clone(), s.tol)?)
}

fn record_certificate(rep: &mut Report, cert: &DualCertificate) {
    rep.residual("dual_definitional", cert.max_residual);
    rep.residual("dual_switched", cert.switched_residual);
    rep.value("test_vectors", cert.trials as f64);
    let names: Vec<&str> = cert.orientations.iter().map(|o| o.as_str()).collect();
    rep.verdict(
        "dual_orientations",
        if names.is_empty() {
            "none".to_string()
        } else {
            names.join(", ")
        },
    );
    rep.flag("dual_certificate", cert.verdict);
}

/// Fails the report early when the family is not a controlled E-frame.
fn require_controlled(rep: &mut Report, cf: &ControlledEFrame) -> bool {
    rep.verdict("controlled", cf.verdict().describe());
    if !cf.is_valid() {
        rep.note("requires a controlled E-frame");
        rep.conclude(false, false);
    }
    cf.is_valid()
}

pub fn cmd_analyze(cfg: &ProblemConfig, s: &Settings) -> Result<Report, CliError> {
    let mut rep = Report::new("analyze");
    let frame = EFrame::new(cfg.mapping.clone(), cfg.psi.clone())?;
    let record = frame.analyze(s.tol);
    rep.bounds("e_frame", record.bounds.lo, record.bounds.hi);
    rep.verdict("e_frame", record.verdict.as_str());
    rep.flag("tight", record.is_tight(s.tol));

    let cf = ControlledEFrame::new(frame, cfg.u.clone(), s.tol)?;
    let b = cf.bounds();
    rep.bounds("controlled", b.lo, b.hi);
    rep.verdict("controlled", cf.verdict().describe());
    rep.flag("parseval", cf.is_parseval(s.tol));
    if cfg.u.relative_skew() <= s.tol {
        rep.flag(
            "u_commutes_with_s_e",
            cf.commutes_with_frame_operator(s.tol).unwrap_or(false),
        );
    }
    if cf.is_valid() {
        let ids = cf.operator_identities(s.trials, s.seed)?;
        rep.residual("s_ue_vs_u_s_e", ids.err_sue_use);
        rep.residual("u_s_e_vs_s_e_u_adjoint", ids.err_commute);
        rep.residual("switched_sum", ids.err_switched_sum);
    }
    rep.conclude(record.is_frame() && cf.is_valid(), !s.strict);
    Ok(rep)
}

fn verdict_error(err: FrameError) -> Result<String, CliError> {
    match err {
        FrameError::RightInverseViolated { .. }
        | FrameError::NullConditionViolated { .. }
        | FrameError::NotADual { .. } => Ok(err.to_string()),
        other => Err(other.into()),
    }
}

pub fn cmd_dual(cfg: &ProblemConfig, mode: DualMode, s: &Settings) -> Result<Report, CliError> {
    let mut rep = Report::new("dual");
    rep.verdict("mode", mode.as_str());
    let cf = controlled(cfg, s)?;
    if !require_controlled(&mut rep, &cf) {
        return Ok(rep);
    }

    let mut round_trip_ok = true;
    let phi = match mode {
        DualMode::Canonical => cf.canonical_dual()?,
        DualMode::RightInverse => {
            let v = cf.random_right_inverse(s.seed)?;
            match cf.dual_from_right_inverse(&v, s.tol) {
                Ok(phi) => phi,
                Err(e) => {
                    rep.note(verdict_error(e)?);
                    rep.conclude(false, false);
                    return Ok(rep);
                }
            }
        }
        DualMode::Offset => {
            let v = cf.random_null_map(s.seed)?;
            let phi = match cf.dual_offset_family(&v, s.tol) {
                Ok(phi) => phi,
                Err(e) => {
                    rep.note(verdict_error(e)?);
                    rep.conclude(false, false);
                    return Ok(rep);
                }
            };
            match cf.extract_null_map(&phi, s.tol) {
                Ok(back) => {
                    let err = v.distance(&back)? / v.norm().max(1.0);
                    rep.residual("offset_round_trip", err);
                    round_trip_ok = err <= ROUND_TRIP_TOL;
                }
                Err(e) => {
                    rep.note(verdict_error(e)?);
                    round_trip_ok = false;
                }
            }
            phi
        }
    };

    let cert = cf.verify_dual(&phi, s.trials, s.seed, s.tol)?;
    record_certificate(&mut rep, &cert);
    rep.dual = Some(sequence_to_pairs(&phi));
    rep.conclude(cert.verdict && round_trip_ok, false);
    Ok(rep)
}

/// `c` when `a = c id` to relative `tol`.
fn scalar_multiple(a: &COperator, tol: f64) -> Option<f64> {
    let d = a.dim();
    let trace = (0..d)
        .map(|i| a.entry(i, i))
        .sum::<crate::hilbert::CScalar>()
        / d as f64;
    let dev = a.distance(&COperator::scalar(d, trace)).ok()?;
    (dev <= tol * a.frobenius_norm().max(f64::MIN_POSITIVE) && trace.im.abs() <= tol * trace.norm())
        .then_some(trace.re)
}

fn plain_residual(
    cf: &ControlledEFrame,
    phi: &VectorSequence,
    s: &Settings,
) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for f in test_vectors(cf.dim(), s.trials, s.seed) {
        let g = cf.frame().reconstruct(phi, &f)?;
        worst = worst.max(g.distance(&f)? / f.norm());
    }
    Ok(worst)
}

pub fn cmd_verify(cfg: &ProblemConfig, s: &Settings) -> Result<Report, CliError> {
    let phi = cfg
        .phi
        .as_ref()
        .ok_or_else(|| CliError::Input("verify requires a phi family in the config".into()))?;
    let mut rep = Report::new("verify");
    let cf = controlled(cfg, s)?;
    rep.verdict("controlled", cf.verdict().describe());
    let cert = cf.verify_dual(phi, s.trials, s.seed, s.tol)?;
    record_certificate(&mut rep, &cert);
    rep.residual("plain_e_dual", plain_residual(&cf, phi, s)?);
    let a = cf.reconstruction_operator(phi)?;
    if let Some(c) = scalar_multiple(&a, s.tol) {
        rep.value("reconstruction_scalar", c);
        if !cert.verdict {
            rep.note(format!("controlled sum = {c} f"));
        }
    }
    rep.conclude(cert.verdict, false);
    Ok(rep)
}

pub fn cmd_neumann(
    cfg: &ProblemConfig,
    rho: Option<f64>,
    eps: f64,
    max_terms: usize,
    s: &Settings,
) -> Result<Report, CliError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Input(format!(
            "--eps must be positive, got {eps}"
        )));
    }
    let mut rep = Report::new("neumann");
    let cf = controlled(cfg, s)?;
    if !require_controlled(&mut rep, &cf) {
        return Ok(rep);
    }
    let phi = match (rho, &cfg.phi) {
        (Some(rho), _) => {
            if !rho.is_finite() {
                return Err(CliError::Input(format!("--rho must be finite, got {rho}")));
            }
            rep.value("rho", rho);
            cf.canonical_dual()?.scale(r(rho))
        }
        (None, Some(phi)) => phi.clone(),
        (None, None) => {
            return Err(CliError::Input(
                "neumann needs --rho or a phi family in the config".into(),
            ))
        }
    };

    let ratio = contraction_ratio(&cf, &phi)?;
    rep.value("contraction_ratio", ratio);
    if ratio >= 1.0 {
        rep.neumann = Some(NeumannSection {
            ratio,
            terms_used: None,
            residual_history: Vec::new(),
            converged: false,
        });
        rep.note(format!(
            "contraction ratio {ratio} >= 1; the series does not converge"
        ));
        rep.conclude(false, false);
        return Ok(rep);
    }

    let (fixed, report) = match neumann_corrected_dual(&cf, &phi, eps, max_terms) {
        Ok(out) => out,
        Err(FrameError::NotConverged { terms, last }) => {
            rep.neumann = Some(NeumannSection {
                ratio,
                terms_used: Some(terms),
                residual_history: Vec::new(),
                converged: false,
            });
            rep.note(format!(
                "no convergence after {terms} terms (last {last:.3e})"
            ));
            rep.conclude(false, false);
            return Ok(rep);
        }
        Err(e) => return Err(e.into()),
    };
    rep.neumann = Some(NeumannSection {
        ratio,
        terms_used: Some(report.terms_used),
        residual_history: report.residual_history,
        converged: report.converged,
    });

    let probe: CVector = test_vectors(cf.dim(), 1, s.seed).swap_remove(0);
    let (g, iter) = iterative_reconstruct(&cf, &phi, &probe, eps, max_terms)?;
    rep.residual("iterative_reconstruction", g.distance(&probe)?);
    rep.value("iterative_terms", iter.terms_used as f64);

    let cert = cf.verify_dual(&fixed, s.trials, s.seed, s.tol)?;
    record_certificate(&mut rep, &cert);
    rep.dual = Some(sequence_to_pairs(&fixed));
    rep.conclude(cert.verdict, false);
    Ok(rep)
}

pub fn cmd_paper_example(dim: usize, s: &Settings) -> Result<Report, CliError> {
    let ex = ExampleFamilies::new(dim).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rep = Report::new("paper-example");
    rep.value("dimension", dim as f64);
    rep.value("count", (dim + 1) as f64);

    let checks = ex.checks(s.trials, s.seed)?;
    let mut passed = true;
    for ch in &checks {
        let key = ch.name.replace(['(', ')', ','], "").replace(' ', "_");
        rep.residual(&key, ch.max_residual);
        rep.verdict(&key, format!("= {}", ch.expected));
        passed &= ch.max_residual <= s.tol;
    }

    let frame = ex.frame()?;
    let record = frame.analyze(s.tol);
    rep.bounds("e_frame", record.bounds.lo, record.bounds.hi);
    let cf = ex.controlled(s.tol)?;
    let b = cf.bounds();
    rep.bounds("controlled", b.lo, b.hi);
    rep.verdict("controlled", cf.verdict().describe());
    rep.flag("parseval", cf.is_parseval(s.tol));
    let dual = cf.canonical_dual()?;
    rep.residual(
        "canonical_dual_vs_psi_tilde",
        dual.max_deviation(&ex.psi_tilde)?,
    );
    rep.conclude(passed, false);
    Ok(rep)
}
