//! Problem configuration files.
//!
//! JSON with complex numbers written as `[re, im]` pairs:
//!
//! ```json
//! {
//!   "dimension": 3,
//!   "count": 4,
//!   "psi": [[[1,0],[0,0],[0,0]], [[2,0],[0,0],[0,0]], ...],
//!   "mapping": {"kind": "paper_bidiagonal"},
//!   "u": {"kind": "scalar", "value": 0.5},
//!   "phi": [...],
//!   "tol": 1e-10, "trials": 100, "seed": 42
//! }
//! ```
//!
//! `mapping` is one of `{"kind": "dense", "entries": [[[re,im],...],...]}`,
//! `{"kind": "paper_bidiagonal"}` or
//! `{"kind": "banded", "diagonals": [{"offset": -1, "values": [[re,im],...]}]}`.
//! `u` is `{"kind": "identity"}` (the default when omitted),
//! `{"kind": "scalar", "value": s}` with `s` real or `[re, im]`, or
//! `{"kind": "dense", "entries": ...}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::FrameError;
use crate::hilbert::{c, COperator, CScalar, CVector, DEFAULT_TOL};
use crate::mapping::{MatrixMapping, VectorSequence};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

pub type Complex = [f64; 2];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid config: {0}")]
    Frame(#[from] FrameError),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dimension: usize,
    pub count: usize,
    pub psi: Vec<Vec<Complex>>,
    pub mapping: MappingSpec,
    #[serde(default)]
    pub u: ControlSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MappingSpec {
    Dense { entries: Vec<Vec<Complex>> },
    PaperBidiagonal,
    Banded { diagonals: Vec<BandSpec> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub offset: i64,
    pub values: Vec<Complex>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlSpec {
    #[default]
    Identity,
    Scalar {
        value: ScalarValue,
    },
    Dense {
        entries: Vec<Vec<Complex>>,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ScalarValue {
    Real(f64),
    Complex(Complex),
}

impl ScalarValue {
    fn to_scalar(self) -> CScalar {
        match self {
            ScalarValue::Real(x) => c(x, 0.0),
            ScalarValue::Complex([re, im]) => c(re, im),
        }
    }
}

/// A validated problem: the family, its mapping and control operator.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub dimension: usize,
    pub count: usize,
    pub psi: VectorSequence,
    pub mapping: MatrixMapping,
    pub u: COperator,
    pub phi: Option<VectorSequence>,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
}

fn to_scalars(row: &[Complex]) -> Vec<CScalar> {
    row.iter().map(|&[re, im]| c(re, im)).collect()
}

fn finite(values: &[Complex], what: &str) -> Result<(), ConfigError> {
    if values.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("non-finite entry in {what}")))
    }
}

fn sequence(
    raw: &[Vec<Complex>],
    dimension: usize,
    count: usize,
    what: &str,
) -> Result<VectorSequence, ConfigError> {
    if raw.len() != count {
        return Err(ConfigError::Invalid(format!(
            "{what} has {} members, expected count = {count}",
            raw.len()
        )));
    }
    let mut items = Vec::with_capacity(count);
    for (k, v) in raw.iter().enumerate() {
        if v.len() != dimension {
            return Err(ConfigError::Invalid(format!(
                "{what}[{k}] has {} entries, expected dimension = {dimension}",
                v.len()
            )));
        }
        finite(v, what)?;
        items.push(CVector::new(to_scalars(v))?);
    }
    Ok(VectorSequence::new(&items)?)
}

fn square_grid(
    entries: &[Vec<Complex>],
    n: usize,
    what: &str,
) -> Result<Vec<Vec<CScalar>>, ConfigError> {
    if entries.len() != n || entries.iter().any(|row| row.len() != n) {
        let cols = entries.first().map_or(0, |r| r.len());
        return Err(ConfigError::Invalid(format!(
            "{what} must be {n}x{n} (got {}x{cols}, non-square or wrong size)",
            entries.len()
        )));
    }
    for row in entries {
        finite(row, what)?;
    }
    Ok(entries.iter().map(|row| to_scalars(row)).collect())
}

impl RawConfig {
    pub fn validate(&self) -> Result<ProblemConfig, ConfigError> {
        let d = self.dimension;
        let n = self.count;
        if d == 0 || n == 0 {
            return Err(ConfigError::Invalid(
                "dimension and count must be positive".into(),
            ));
        }
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "tol must be positive, got {tol}"
            )));
        }
        let psi = sequence(&self.psi, d, n, "psi")?;
        let phi = self
            .phi
            .as_ref()
            .map(|raw| sequence(raw, d, n, "phi"))
            .transpose()?;

        let mapping = match &self.mapping {
            MappingSpec::PaperBidiagonal => MatrixMapping::backward_difference(n)?,
            MappingSpec::Dense { entries } => {
                MatrixMapping::from_rows(&square_grid(entries, n, "mapping.entries")?, tol)?
            }
            MappingSpec::Banded { diagonals } => {
                let bands = diagonals
                    .iter()
                    .map(|b| {
                        finite(&b.values, "mapping.diagonals")?;
                        Ok((b.offset, to_scalars(&b.values)))
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                MatrixMapping::banded(n, &bands, tol)?
            }
        };

        let u = match &self.u {
            ControlSpec::Identity => COperator::identity(d),
            ControlSpec::Scalar { value } => {
                let s = value.to_scalar();
                if !(s.re.is_finite() && s.im.is_finite()) {
                    return Err(ConfigError::Invalid("non-finite u.value".into()));
                }
                COperator::scalar(d, s)
            }
            ControlSpec::Dense { entries } => {
                COperator::from_rows(&square_grid(entries, d, "u.entries")?)?
            }
        };

        Ok(ProblemConfig {
            dimension: d,
            count: n,
            psi,
            mapping,
            u,
            phi,
            tol,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

pub fn parse_config_str(text: &str) -> Result<ProblemConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text)?;
    raw.validate()
}

pub fn parse_config(path: &Path) -> Result<ProblemConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

/// `[re, im]` pairs for each member.
pub fn sequence_to_pairs(seq: &VectorSequence) -> Vec<Vec<Complex>> {
    seq.items()
        .iter()
        .map(|v| v.entries().iter().map(|z| [z.re, z.im]).collect())
        .collect()
}
