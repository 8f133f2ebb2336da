//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 verdict failure.

pub mod commands;
pub mod config;
pub mod example;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::neumann::DEFAULT_MAX_TERMS;
use commands::{CliError, DualMode, Settings};
use config::parse_config;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "eframes", version, about = "Controlled E-frames on C^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Numerical tolerance [default: 1e-10]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random test vectors per check [default: 100]
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Seed for test vectors and random constructions [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Exit 2 when `analyze` finds an invalid family
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Canonical,
    RightInverse,
    Offset,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds, controlled bounds, verdicts and identity residuals
    Analyze { config: PathBuf },
    /// Build and certify a controlled dual
    Dual {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Canonical)]
        mode: ModeArg,
    },
    /// Check the `phi` family of a config as a controlled dual
    Verify { config: PathBuf },
    /// Correct an approximate dual by a Neumann series
    Neumann {
        config: PathBuf,
        /// Use rho times the canonical dual instead of the config's phi
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// The bidiagonal worked example with N = dim + 1
    PaperExample {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let load = |path: &PathBuf| -> Result<_, CliError> {
        let cfg = parse_config(path)?;
        let s = Settings::resolve(Some(&cfg), cli.tol, cli.trials, cli.seed, cli.strict)?;
        Ok((cfg, s))
    };
    match &cli.command {
        Command::Analyze { config } => {
            let (cfg, s) = load(config)?;
            commands::cmd_analyze(&cfg, &s)
        }
        Command::Dual { config, mode } => {
            let (cfg, s) = load(config)?;
            let mode = match mode {
                ModeArg::Canonical => DualMode::Canonical,
                ModeArg::RightInverse => DualMode::RightInverse,
                ModeArg::Offset => DualMode::Offset,
            };
            commands::cmd_dual(&cfg, mode, &s)
        }
        Command::Verify { config } => {
            let (cfg, s) = load(config)?;
            commands::cmd_verify(&cfg, &s)
        }
        Command::Neumann {
            config,
            rho,
            eps,
            max_terms,
        } => {
            let (cfg, s) = load(config)?;
            commands::cmd_neumann(&cfg, *rho, *eps, *max_terms, &s)
        }
        Command::PaperExample { dim } => {
            let s = Settings::resolve(None, cli.tol, cli.trials, cli.seed, cli.strict)?;
            commands::cmd_paper_example(*dim, &s)
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut rep) => {
            let text = match cli.format {
                Format::Machine => rep.to_machine(),
                Format::Text => {
                    rep.elapsed = Some(start.elapsed());
                    rep.to_text()
                }
            };
            let _ = out.write_all(text.as_bytes());
            rep.exit_code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
