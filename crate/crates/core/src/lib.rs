//! Shear construction and verification toolkit for two-step solvable SKT Lie algebras.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod families;
pub mod hermitian;
pub mod lie;
pub mod linalg;
pub mod normal_forms;
pub mod shear;
pub mod tensor;

pub use error::{Result, SktError};
pub use lie::{Fingerprint, LieAlgebra};

/// Tolerances for "= 0" verdicts and rank decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    pub eps: f64,
    pub eps_rank: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol {
            eps: 1e-9,
            eps_rank: 1e-7,
        }
    }
}

impl Tol {
    pub fn with_eps(eps: f64) -> Self {
        Tol { eps, ..Tol::default() }
    }

    /// Default tolerance, overridden by the `SKT_TOL` environment variable.
    pub fn from_env() -> Self {
        match std::env::var("SKT_TOL").ok().and_then(|s| s.parse::<f64>().ok()) {
            Some(e) if e > 0.0 && e.is_finite() => Tol::with_eps(e),
            _ => Tol::default(),
        }
    }

    pub fn sqrt_eps(&self) -> f64 {
        self.eps.sqrt()
    }
}
