//! Command reports, rendered as aligned text or as JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use super::config::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeumannSection {
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<usize>,
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub exit_code: i32,
    pub verdicts: BTreeMap<String, String>,
    pub flags: BTreeMap<String, bool>,
    pub bounds: BTreeMap<String, Bounds>,
    pub residuals: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neumann: Option<NeumannSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<Vec<Complex>>>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn verdict(&mut self, key: &str, value: impl Into<String>) {
        self.verdicts.insert(key.to_string(), value.into());
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.flags.insert(key.to_string(), value);
    }

    pub fn bounds(&mut self, key: &str, lower: f64, upper: f64) {
        self.bounds.insert(key.to_string(), Bounds { lower, upper });
    }

    pub fn residual(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.to_string(), value);
    }

    pub fn value(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Sets `passed` and the exit code (2 on failure unless `lenient`).
    pub fn conclude(&mut self, passed: bool, lenient: bool) {
        self.passed = passed;
        self.exit_code = if passed || lenient { 0 } else { 2 };
    }

    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {status}", self.command);
        let width = self
            .verdicts
            .keys()
            .chain(self.flags.keys())
            .chain(self.residuals.keys())
            .chain(self.values.keys())
            .map(|k| k.len())
            .chain(self.bounds.keys().map(|k| k.len() + " bounds".len()))
            .max()
            .unwrap_or(0);
        for (k, v) in &self.verdicts {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        for (k, v) in &self.flags {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        for (k, b) in &self.bounds {
            let _ = writeln!(
                out,
                "  {:<width$}  [{:.12}, {:.12}]",
                format!("{k} bounds"),
                b.lower,
                b.upper
            );
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "  {k:<width$}  {v:.12}");
        }
        for (k, v) in &self.residuals {
            let _ = writeln!(out, "  {k:<width$}  {v:.3e}");
        }
        if let Some(n) = &self.neumann {
            let _ = writeln!(
                out,
                "  neumann ratio {:.12}, converged {}",
                n.ratio, n.converged
            );
            if let Some(t) = n.terms_used {
                let _ = writeln!(out, "  terms used {t}");
            }
            if !n.residual_history.is_empty() {
                let _ = writeln!(out, "  {:>5}  residual", "term");
                for (i, h) in n.residual_history.iter().enumerate() {
                    let _ = writeln!(out, "  {:>5}  {h:.3e}", i + 1);
                }
            }
        }
        if let Some(dual) = &self.dual {
            let _ = writeln!(out, "  dual family:");
            for (k, v) in dual.iter().enumerate() {
                let entries: Vec<String> =
                    v.iter().map(|[re, im]| format_complex(*re, *im)).collect();
                let _ = writeln!(out, "    phi[{k}] = ({})", entries.join(", "));
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(t) = self.elapsed {
            let _ = writeln!(out, "  elapsed {:.3} ms", t.as_secs_f64() * 1e3);
        }
        out
    }
}

fn format_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}
