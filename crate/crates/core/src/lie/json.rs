//! JSON exchange format for algebras with an optional metric and complex structure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{require_lie, LieAlgebra};
use crate::error::{Result, SktError};

/// One structure constant c^k_ij with 1-based indices and i < j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub structure: Vec<StructureEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
}

fn to_matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SktError::Invalid(format!("{what} must be {n}x{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().cloned().collect()).collect()
}

impl AlgebraJson {
    pub fn from_algebra(l: &LieAlgebra) -> Self {
        AlgebraJson {
            dim: l.dim(),
            structure: l
                .entries()
                .into_iter()
                .map(|(i, j, k, c)| StructureEntry {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    c,
                })
                .collect(),
            metric: None,
            j: None,
        }
    }

    pub fn with_structure(mut self, g: &DMatrix<f64>, j: &DMatrix<f64>) -> Self {
        self.metric = Some(from_matrix(g));
        self.j = Some(from_matrix(j));
        self
    }

    /// Validated algebra; repeated entries accumulate.
    pub fn algebra(&self) -> Result<LieAlgebra> {
        require_lie(self.bracket_table()?, 1e-9)
    }

    /// The bracket table without the Jacobi check.
    pub fn bracket_table(&self) -> Result<LieAlgebra> {
        let n = self.dim;
        let mut l = LieAlgebra::abelian(n);
        for e in &self.structure {
            if e.i == 0 || e.j == 0 || e.k == 0 || e.i > n || e.j > n || e.k > n {
                return Err(SktError::Invalid(format!(
                    "index out of range 1..={n} in ({},{},{})",
                    e.i, e.j, e.k
                )));
            }
            if e.i >= e.j {
                return Err(SktError::Invalid(format!(
                    "structure entry requires i < j, got i={} j={}",
                    e.i, e.j
                )));
            }
            let mut v = vec![0.0; n];
            v[e.k - 1] = e.c;
            l.add_bracket(e.i - 1, e.j - 1, &v);
        }
        Ok(l)
    }

    pub fn metric(&self) -> Result<Option<DMatrix<f64>>> {
        self.metric
            .as_deref()
            .map(|m| to_matrix(m, self.dim, "metric"))
            .transpose()
    }

    pub fn complex_structure(&self) -> Result<Option<DMatrix<f64>>> {
        self.j.as_deref().map(|m| to_matrix(m, self.dim, "J")).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_enforces_ordering() {
        let text = r#"{"dim":3,"structure":[{"i":1,"j":2,"k":3,"c":1.0}]}"#;
        let a: AlgebraJson = serde_json::from_str(text).unwrap();
        let l = a.algebra().unwrap();
        assert_eq!(l.structure(0, 1, 2), 1.0);
        assert_eq!(AlgebraJson::from_algebra(&l).structure, a.structure);
        let bad: AlgebraJson = serde_json::from_str(r#"{"dim":3,"structure":[{"i":2,"j":1,"k":3,"c":1.0}]}"#).unwrap();
        assert!(bad.algebra().is_err());
        let with_j: AlgebraJson = serde_json::from_str(r#"{"dim":2,"structure":[],"J":[[0,-1],[1,0]]}"#).unwrap();
        assert_eq!(with_j.complex_structure().unwrap().unwrap()[(1, 0)], 1.0);
        assert!(with_j.metric().unwrap().is_none());
    }
}
