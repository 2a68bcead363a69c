//! Shear-data JSON: 1-based pairs i < j, omitted pairs mean ω(e_i, e_j) = 0.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::PreShearData;
use crate::error::{Result, SktError};
use crate::tensor;
use crate::Tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub i: usize,
    pub j: usize,
    pub value: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearJson {
    pub n: usize,
    pub a_basis: Vec<Vec<f64>>,
    pub omega: Vec<OmegaEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
}

fn square(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SktError::Invalid(format!("{what} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

impl ShearJson {
    pub fn data(&self, tol: Tol) -> Result<PreShearData> {
        let dim = 2 * self.n;
        if self.a_basis.iter().any(|v| v.len() != dim) {
            return Err(SktError::Invalid(format!("a_basis vectors must have length {dim}")));
        }
        let a = DMatrix::from_fn(dim, self.a_basis.len(), |r, c| self.a_basis[c][r]);
        let mut table = vec![vec![0.0; dim]; dim * dim];
        for e in &self.omega {
            if e.i == 0 || e.j > dim || e.i >= e.j {
                return Err(SktError::Invalid(format!(
                    "omega entry requires 1 <= i < j <= {dim}, got ({},{})",
                    e.i, e.j
                )));
            }
            if e.value.len() != dim {
                return Err(SktError::Invalid(format!("omega value must have length {dim}")));
            }
            table[(e.i - 1) * dim + e.j - 1] = e.value.clone();
        }
        let s = tensor::standard_structure(self.n);
        let g = match &self.metric {
            Some(m) => square(m, dim, "metric")?,
            None => s.g,
        };
        let j = match &self.j {
            Some(m) => square(m, dim, "J")?,
            None => s.j,
        };
        PreShearData::new(&a, |i, k| table[i * dim + k].clone(), g, j, tol)
    }

    pub fn from_data(d: &PreShearData) -> Self {
        let dim = d.dim();
        let b = d.a.basis();
        let mut omega = Vec::new();
        for i in 0..dim {
            for k in i + 1..dim {
                let v = d.omega_basis(i, k);
                if v.iter().any(|&x| x != 0.0) {
                    omega.push(OmegaEntry {
                        i: i + 1,
                        j: k + 1,
                        value: v.to_vec(),
                    });
                }
            }
        }
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|r| m.row(r).iter().cloned().collect()).collect();
        ShearJson {
            n: d.n,
            a_basis: (0..b.ncols()).map(|c| b.column(c).iter().cloned().collect()).collect(),
            omega,
            metric: Some(rows(&d.g)),
            j: Some(rows(&d.j)),
        }
    }
}
