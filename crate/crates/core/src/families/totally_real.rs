//! SKT algebras with totally real commutator 𝔤' = span{X₁, …, X_m}.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{matrix, range};
use crate::error::{Result, SktError};
use crate::hermitian::HermitianStructure;
use crate::lie::LieAlgebra;
use crate::linalg;
use crate::normal_forms::decomposable_matrix;
use crate::tensor::{self, standard_j};
use crate::Tol;

/// The forms ν̃_j on U_J, either as skew matrices or as covectors α_j with ν̃_j = α_j∧J*α_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuTilde {
    Forms(Vec<Vec<Vec<f64>>>),
    Covectors(Vec<Vec<f64>>),
}

impl Default for NuTilde {
    fn default() -> Self {
        NuTilde::Covectors(Vec::new())
    }
}

/// Basis: X₁, JX₁, …, X_m, JX_m, then U_J. The first r directions carry [JX_i, X_i] = λ_i X_i
/// and μ_i ∈ U_J*; the remaining ℓ = m − r directions are central, hit by ν̃.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotallyReal {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub mu: Vec<Vec<f64>>,
    #[serde(default)]
    pub nu: NuTilde,
}

impl TotallyReal {
    /// r·aff ⊕ abelian, with all λ_i = 1 and μ = 0.
    pub fn affine(n: usize, r: usize) -> Self {
        TotallyReal {
            n,
            m: r,
            r,
            lambda: vec![1.0; r],
            mu: vec![vec![0.0; 2 * (n - r)]; r],
            nu: NuTilde::default(),
        }
    }

    fn u_dim(&self) -> usize {
        2 * (self.n - self.m)
    }

    fn nu_matrices(&self) -> Result<Vec<DMatrix<f64>>> {
        let u = self.u_dim();
        let j = standard_j(u / 2);
        match &self.nu {
            NuTilde::Forms(fs) => fs.iter().map(|f| matrix(f, u, "nu")).collect(),
            NuTilde::Covectors(cs) => cs
                .iter()
                .map(|c| {
                    range(c.len() == u, format!("nu covectors must have {u} entries"))?;
                    Ok(decomposable_matrix(&DVector::from_column_slice(c), &j))
                })
                .collect(),
        }
    }
}

pub fn gen_totally_real(p: &TotallyReal, tol: Tol) -> Result<HermitianStructure> {
    let eps = tol.eps;
    range(p.m <= p.n && p.r <= p.m, "need r <= m <= n")?;
    let u = p.u_dim();
    range(p.lambda.len() == p.r, format!("lambda must have {} entries", p.r))?;
    range(p.lambda.iter().all(|l| l.abs() > eps), "lambda_i != 0")?;
    range(
        p.mu.len() == p.r && p.mu.iter().all(|c| c.len() == u),
        format!("mu must be {}x{u}", p.r),
    )?;
    let nus = p.nu_matrices()?;
    let ell = p.m - p.r;
    range(nus.len() == ell, format!("expected {ell} forms nu"))?;
    let j = standard_j(u / 2);
    let scale = nus.iter().map(linalg::max_abs).fold(1.0, f64::max);
    for (k, m) in nus.iter().enumerate() {
        range(
            linalg::max_abs(&(m + m.transpose())) <= eps * scale,
            format!("nu_{} must be skew", k + 1),
        )?;
        range(
            linalg::max_abs(&(j.transpose() * m * &j - m)) <= eps * scale,
            format!("nu_{} must be of type (1,1)", k + 1),
        )?;
    }
    if ell > 0 {
        let forms: Vec<_> = nus.iter().map(tensor::two_form_from_matrix).collect();
        let mut sum = tensor::wedge(&forms[0], &forms[0])?;
        for f in &forms[1..] {
            sum = &sum + &tensor::wedge(f, f)?;
        }
        let res = sum.norm();
        if res > eps * scale * scale {
            return Err(SktError::Hypothesis {
                what: "sum of nu_j ^ nu_j = 0".into(),
                residual: res,
            });
        }
        let stack = DMatrix::from_fn(ell, u * u, |k, c| nus[k][(c / u, c % u)]);
        range(
            linalg::rank(&stack, tol.eps_rank * scale) == ell,
            "the forms nu_j must be linearly independent",
        )?;
    }

    let dim = 2 * p.n;
    let ub = 2 * p.m;
    let mut l = LieAlgebra::abelian(dim);
    let mus: Vec<DVector<f64>> = p.mu.iter().map(|c| DVector::from_column_slice(c)).collect();
    let jmus: Vec<DVector<f64>> = mus.iter().map(|m| j.transpose() * m).collect();
    for i in 0..p.r {
        let mut v = vec![0.0; dim];
        v[2 * i] = p.lambda[i];
        l.set_bracket(2 * i + 1, 2 * i, &v);
        for y in 0..u {
            let mut v = vec![0.0; dim];
            v[2 * i] = mus[i][y];
            l.set_bracket(ub + y, 2 * i, &v);
            let mut v = vec![0.0; dim];
            v[2 * i] = -jmus[i][y];
            l.set_bracket(ub + y, 2 * i + 1, &v);
        }
    }
    for y in 0..u {
        for z in y + 1..u {
            let mut v = vec![0.0; dim];
            for i in 0..p.r {
                v[2 * i] = (mus[i][y] * jmus[i][z] - mus[i][z] * jmus[i][y]) / p.lambda[i];
            }
            for (k, m) in nus.iter().enumerate() {
                v[2 * (p.r + k)] = m[(y, z)];
            }
            l.set_bracket(ub + y, ub + z, &v);
        }
    }
    HermitianStructure::standard(l)
}
