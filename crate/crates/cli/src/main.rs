//! `skt`: parse, verify, shear, generate and scan two-step solvable SKT Lie algebras.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skt_core::{SktError, Tol};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "skt",
    version,
    about = "Two-step solvable SKT Lie algebras via the shear construction"
)]
pub struct Cli {
    /// Absolute tolerance for "= 0" verdicts.
    #[arg(long, global = true, env = "SKT_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Tolerance for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_rank: f64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Jacobi residual, derived and lower central series, and the SKT verdict when g, J are given.
    Check {
        /// Algebra JSON file, `-` for stdin, or inline JSON.
        input: String,
    },
    /// Validate shear data, report its three conditions and emit the sheared algebra.
    Shear {
        /// Shear JSON file, `-` for stdin, or inline JSON.
        input: String,
    },
    /// Generate one family member from parameters, or a random one with --seed.
    Family {
        /// Family name, or a tagged parameter JSON file / inline object.
        name: String,
        #[arg(long, num_args = 1.., value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Seeded scan over the six-dimensional families.
    #[command(name = "scan6d")]
    Scan6d {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether the almost Abelian algebra with ad(e_{2n}) = f admits an SKT structure.
    Admissible {
        /// Matrix JSON (rows) file, `-` for stdin, or inline JSON.
        input: String,
    },
    /// Parse a Salamon tuple or target expression and dump its structure constants.
    Parse {
        expr: String,
        #[arg(long, num_args = 1.., value_name = "K=V")]
        params: Vec<String>,
    },
    /// Isomorphism invariants of an algebra file or expression.
    Fingerprint {
        input: String,
        #[arg(long, num_args = 1.., value_name = "K=V")]
        params: Vec<String>,
        /// Compare against a target expression; mismatch exits 1.
        #[arg(long)]
        target: Option<String>,
    },
}

impl Cli {
    pub fn tolerance(&self) -> anyhow::Result<Tol> {
        for (name, v) in [("--tol", self.tol), ("--tol-rank", self.tol_rank)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(input::UsageError(format!("{name} must be positive, got {v}")).into());
            }
        }
        Ok(Tol {
            eps: self.tol,
            eps_rank: self.tol_rank,
        })
    }

    fn command_name(&self) -> &'static str {
        match self.cmd {
            Cmd::Check { .. } => "check",
            Cmd::Shear { .. } => "shear",
            Cmd::Family { .. } => "family",
            Cmd::Scan6d { .. } => "scan6d",
            Cmd::Admissible { .. } => "admissible",
            Cmd::Parse { .. } => "parse",
            Cmd::Fingerprint { .. } => "fingerprint",
        }
    }
}

/// Mathematical failures exit 1; everything else the core rejects is bad input.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<SktError>() {
        Some(
            SktError::Hypothesis { .. }
            | SktError::JacobiViolation(_)
            | SktError::NotCommuting(_)
            | SktError::Defective(_)
            | SktError::SearchFailed(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let v = serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": cli.command_name(),
                    "error": format!("{e:#}"),
                    "exit_code": code,
                });
                println!("{v}");
            }
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
