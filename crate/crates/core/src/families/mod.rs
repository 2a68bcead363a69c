//! Generators for the classified SKT families, the almost Abelian decision
//! procedure and the six-dimensional scanner.

mod almost_abelian;
mod complex;
pub(crate) mod gfha;
pub mod random;
mod scan;
mod totally_real;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SktError};
use crate::hermitian::{self, HermitianStructure, Verdict};
use crate::Tol;

pub use almost_abelian::{
    almost_abelian_shear_data, decide_almost_abelian, gen_almost_abelian, AdmissibleCase, AlmostAbelian, Decision,
};
pub use complex::{
    check_4d_complex_pair, gen_2d_complex, gen_6d_3comm, search_2d_complex, search_4d_pairs, witness_2d_complex,
    FourDimPair, FourDimReport, SixDim3Comm, TwoDimComplex, WITNESS_TARGETS,
};
pub use gfha::{gen_codim2, Codim2, Codim2Case, Codim2Entry, Gfha};
pub use scan::{sample_rng, scan_6d, Bucket, ScanRecord, ScanReport, SIX_DIM_TARGETS};
pub use totally_real::{gen_totally_real, NuTilde, TotallyReal};

/// Complex parameter as `[re, im]`.
pub type Cx = [f64; 2];

pub(crate) fn cx(z: Cx) -> Complex64 {
    Complex64::new(z[0], z[1])
}

/// Parameters of one family member; the JSON form is tagged by `"family"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    AlmostAbelian(AlmostAbelian),
    Codim2(Codim2),
    TotallyReal(TotallyReal),
    TwoDimComplex(TwoDimComplex),
    SixDim3Comm(SixDim3Comm),
    FourDimComplexPair(FourDimPair),
}

impl FamilyParams {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::AlmostAbelian(_) => "almost_abelian",
            FamilyParams::Codim2(_) => "codim2",
            FamilyParams::TotallyReal(_) => "totally_real",
            FamilyParams::TwoDimComplex(_) => "two_dim_complex",
            FamilyParams::SixDim3Comm(_) => "six_dim3_comm",
            FamilyParams::FourDimComplexPair(_) => "four_dim_complex_pair",
        }
    }

    pub fn generate(&self, tol: Tol) -> Result<HermitianStructure> {
        match self {
            FamilyParams::AlmostAbelian(p) => gen_almost_abelian(p, tol),
            FamilyParams::Codim2(p) => gen_codim2(p, tol),
            FamilyParams::TotallyReal(p) => gen_totally_real(p, tol),
            FamilyParams::TwoDimComplex(p) => gen_2d_complex(p, tol),
            FamilyParams::SixDim3Comm(p) => gen_6d_3comm(p, tol),
            FamilyParams::FourDimComplexPair(p) => {
                let r = check_4d_complex_pair(p, tol);
                match r.structure {
                    Some(h) if r.pass => Ok(h),
                    _ => Err(SktError::Hypothesis {
                        what: "4-dim complex pair equations".into(),
                        residual: r.max_residual(),
                    }),
                }
            }
        }
    }
}

/// Residuals of a generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub jacobi: f64,
    pub nijenhuis: f64,
    /// ‖dc‖ / scale³ with scale = max(1, largest structure constant).
    pub dc_relative: f64,
    pub verdict: Verdict,
}

impl InstanceReport {
    pub fn sound(&self, eps: f64) -> bool {
        self.jacobi < eps && self.nijenhuis < eps && self.verdict.is_skt()
    }
}

pub fn instance_report(h: &HermitianStructure, tol: Tol) -> InstanceReport {
    let r = hermitian::skt_report(h, tol);
    let dc = if r.dc.is_nan() { f64::INFINITY } else { r.dc };
    InstanceReport {
        jacobi: h.algebra.jacobi_residual(),
        nijenhuis: r.nijenhuis,
        dc_relative: dc / r.scale.powi(3),
        verdict: r.verdict,
    }
}

pub(crate) fn range(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(SktError::ParameterRange(msg.into()))
    }
}

/// Square matrix from nested rows.
pub(crate) fn matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SktError::Invalid(format!("{what} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub(crate) fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests;
