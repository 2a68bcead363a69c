//! Lie algebras by structure constants: Jacobi, series, fingerprints, notation.

mod catalog;
mod json;
mod salamon;

pub use catalog::{catalog, fingerprint_match, params, target_algebra, Params, NAMES};
pub use json::{AlgebraJson, StructureEntry};
pub use salamon::{parse_salamon, print_salamon};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SktError};
use crate::linalg;
use crate::Tol;

/// Structure constants [e_i, e_j] = Σ_k c^k_ij e_k, kept fully antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<f64>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            c: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds from a bracket function evaluated for i < j.
    pub fn from_brackets(dim: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>) -> Self {
        let mut l = Self::abelian(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = f(i, j);
                l.set_bracket(i, j, &v);
            }
        }
        l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, i: usize, j: usize) -> usize {
        (i * self.dim + j) * self.dim
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[self.at(i, j) + k]
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[f64] {
        let a = self.at(i, j);
        &self.c[a..a + self.dim]
    }

    pub fn set_bracket(&mut self, i: usize, j: usize, v: &[f64]) {
        let n = self.dim;
        let (a, b) = (self.at(i, j), self.at(j, i));
        for k in 0..n {
            let x = if i == j { 0.0 } else { v[k] };
            self.c[a + k] = x;
            self.c[b + k] = -x;
        }
    }

    pub fn add_bracket(&mut self, i: usize, j: usize, v: &[f64]) {
        let cur: Vec<f64> = self.bracket_basis(i, j).to_vec();
        let sum: Vec<f64> = cur.iter().zip(v).map(|(a, b)| a + b).collect();
        self.set_bracket(i, j, &sum);
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let s = x[i] * y[j];
                if s == 0.0 || i == j {
                    continue;
                }
                let b = self.bracket_basis(i, j);
                for k in 0..n {
                    out[k] += s * b[k];
                }
            }
        }
        out
    }

    /// ad_x as a matrix: column j is [x, e_j].
    pub fn ad(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let b = self.bracket_basis(i, j);
                for k in 0..n {
                    m[(k, j)] += x[i] * b[k];
                }
            }
        }
        m
    }

    pub fn max_constant(&self) -> f64 {
        self.c.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    /// Max-norm of the cyclic Jacobi sum over basis triples i<j<k.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.bracket(self.bracket_basis(i, j), &e(k));
                    let b = self.bracket(self.bracket_basis(j, k), &e(i));
                    let c = self.bracket(self.bracket_basis(k, i), &e(j));
                    for t in 0..n {
                        worst = worst.max((a[t] + b[t] + c[t]).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (n1, n2) = (self.dim, other.dim);
        let mut out = LieAlgebra::abelian(n1 + n2);
        for i in 0..n1 {
            for j in i + 1..n1 {
                let mut v = vec![0.0; n1 + n2];
                v[..n1].copy_from_slice(self.bracket_basis(i, j));
                out.set_bracket(i, j, &v);
            }
        }
        for i in 0..n2 {
            for j in i + 1..n2 {
                let mut v = vec![0.0; n1 + n2];
                v[n1..].copy_from_slice(other.bracket_basis(i, j));
                out.set_bracket(n1 + i, n1 + j, &v);
            }
        }
        out
    }

    /// Structure constants in the basis given by the columns of `p`:
    /// [x, y]' = p⁻¹ [p x, p y].
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim;
        let inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| SktError::Invalid("singular change of basis".into()))?;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| p.column(j).iter().cloned().collect()).collect();
        Ok(LieAlgebra::from_brackets(n, |i, j| {
            let b = nalgebra::DVector::from_vec(self.bracket(&cols[i], &cols[j]));
            (&inv * b).iter().cloned().collect()
        }))
    }

    /// Nonzero constants as (i, j, k, c) with i < j, 0-based.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.structure(i, j, k);
                    if c != 0.0 {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }

    /// Orthonormal basis of span{[a, b] : a ∈ A, b ∈ B}.
    fn bracket_span(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, tol_rank: f64) -> DMatrix<f64> {
        let n = self.dim;
        let mut cols = Vec::new();
        for p in 0..a.ncols() {
            let x: Vec<f64> = a.column(p).iter().cloned().collect();
            let adx = self.ad(&x);
            let img = adx * b;
            for q in 0..img.ncols() {
                cols.push(img.column(q).into_owned());
            }
        }
        if cols.is_empty() {
            return DMatrix::zeros(n, 0);
        }
        let m = DMatrix::from_columns(&cols);
        linalg::column_span(&m, tol_rank)
    }

    /// Dimensions 𝔤 ⊇ 𝔤' ⊇ 𝔤'' ⊇ …, ending at 0 or at the first repeat.
    pub fn derived_series(&self, tol_rank: f64) -> Vec<usize> {
        let n = self.dim;
        let mut cur = DMatrix::identity(n, n);
        let mut dims = vec![n];
        while cur.ncols() > 0 {
            let next = self.bracket_span(&cur, &cur, tol_rank);
            let d = next.ncols();
            let done = d == cur.ncols();
            if !done {
                dims.push(d);
            }
            cur = next;
            if done {
                if d > 0 {
                    dims.push(d);
                }
                break;
            }
        }
        dims
    }

    /// Dimensions 𝔤 ⊇ [𝔤,𝔤] ⊇ [𝔤,[𝔤,𝔤]] ⊇ …, ending at 0 or at the first repeat.
    pub fn lower_central_series(&self, tol_rank: f64) -> Vec<usize> {
        let n = self.dim;
        let all = DMatrix::identity(n, n);
        let mut cur = all.clone();
        let mut dims = vec![n];
        while cur.ncols() > 0 {
            let next = self.bracket_span(&all, &cur, tol_rank);
            let d = next.ncols();
            let done = d == cur.ncols();
            dims.push(d);
            cur = next;
            if done {
                break;
            }
        }
        dims
    }

    /// Orthonormal basis of the center.
    pub fn center(&self, tol_rank: f64) -> DMatrix<f64> {
        let n = self.dim;
        // Row (j, k) of the map x ↦ ([x, e_j])_k.
        let m = DMatrix::from_fn(n * n, n, |r, i| self.structure(i, r / n, r % n));
        linalg::null_space(&m, tol_rank)
    }

    pub fn is_abelian(&self, tol: f64) -> bool {
        self.max_constant() < tol
    }

    /// 𝔤'' = 0 (abelian algebras included; see `is_abelian`).
    pub fn is_two_step_solvable(&self, tol_rank: f64) -> bool {
        let d = self.derived_series(tol_rank);
        d.len() < 3 && d.last() == Some(&0) || d.get(2) == Some(&0)
    }

    /// Orthonormal (Frobenius) basis of Der(𝔤), each derivation as an N×N matrix.
    pub fn derivations(&self, tol_rank: f64) -> Vec<DMatrix<f64>> {
        let n = self.dim;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let mut r = vec![0.0; n * n];
                    for m in 0..n {
                        r[k * n + m] += self.structure(i, j, m);
                        r[m * n + i] -= self.structure(m, j, k);
                        r[m * n + j] -= self.structure(i, m, k);
                    }
                    if r.iter().any(|&x| x != 0.0) {
                        rows.push(r);
                    }
                }
            }
        }
        let ns = if rows.is_empty() {
            DMatrix::identity(n * n, n * n)
        } else {
            let m = DMatrix::from_fn(rows.len(), n * n, |r, c| rows[r][c]);
            linalg::null_space(&m, tol_rank)
        };
        (0..ns.ncols())
            .map(|c| DMatrix::from_fn(n, n, |p, q| ns[(p * n + q, c)]))
            .collect()
    }

    pub fn fingerprint(&self, tol: Tol) -> Fingerprint {
        let derived = self.derived_series(tol.eps_rank);
        let lower_central = self.lower_central_series(tol.eps_rank);
        let center = self.center(tol.eps_rank).ncols();
        let der = self.derivations(tol.eps_rank);
        let der_killing = killing_signature(&der, tol.eps_rank);
        Fingerprint {
            dim: self.dim,
            derived_commutator: derived.get(2).copied().unwrap_or(0),
            abelianization: self.dim - derived.get(1).copied().unwrap_or(0),
            derived,
            lower_central,
            center,
            der_dim: der.len(),
            der_killing,
        }
    }
}

/// Signature (positive, negative) of the Killing form of the matrix Lie
/// algebra spanned by an orthonormal family `basis`.
fn killing_signature(basis: &[DMatrix<f64>], tol_rank: f64) -> (usize, usize) {
    let d = basis.len();
    if d == 0 {
        return (0, 0);
    }
    // ad_a[c][b] = <[D_a, D_b], D_c>
    let mut ad = vec![vec![0.0; d * d]; d];
    for a in 0..d {
        for b in 0..d {
            let cm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
            for c in 0..d {
                ad[a][c * d + b] = cm.dot(&basis[c]);
            }
        }
    }
    let k = DMatrix::from_fn(d, d, |a, b| {
        let mut t = 0.0;
        for c in 0..d {
            for e in 0..d {
                t += ad[a][c * d + e] * ad[b][e * d + c];
            }
        }
        t
    });
    let sym = (&k + k.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let pos = eig.iter().filter(|&&x| x > tol_rank * scale).count();
    let neg = eig.iter().filter(|&&x| x < -tol_rank * scale).count();
    (pos, neg)
}

/// Basis-independent dimension invariants used for classification cross-checks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub derived: Vec<usize>,
    pub lower_central: Vec<usize>,
    pub center: usize,
    pub derived_commutator: usize,
    pub abelianization: usize,
    pub der_dim: usize,
    pub der_killing: (usize, usize),
}

impl Fingerprint {
    pub fn compact(&self) -> String {
        let j = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "dim={} D=({}) C=({}) z={} der={} kill=({},{})",
            self.dim,
            j(&self.derived),
            j(&self.lower_central),
            self.center,
            self.der_dim,
            self.der_killing.0,
            self.der_killing.1
        )
    }
}

/// Checks the Jacobi identity, returning the algebra back on success.
pub fn require_lie(l: LieAlgebra, tol: f64) -> Result<LieAlgebra> {
    let r = l.jacobi_residual();
    if r > tol * l.max_constant().max(1.0).powi(2) {
        Err(SktError::JacobiViolation(r))
    } else {
        Ok(l)
    }
}
