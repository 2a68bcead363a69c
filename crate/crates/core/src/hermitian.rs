//! Left-invariant Hermitian geometry: Chevalley–Eilenberg differential,
//! Nijenhuis tensor, Bismut torsion and the SKT verdict.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SktError};
use crate::lie::LieAlgebra;
use crate::linalg;
use crate::tensor::{self, AltForm};
use crate::Tol;

/// dα(X₀..X_k) = Σ_{i<j} (−1)^{i+j} α([X_i,X_j], X₀,..,X̂_i,..,X̂_j,..).
pub fn ce_differential(l: &LieAlgebra, alpha: &AltForm) -> Result<AltForm> {
    let n = l.dim();
    if alpha.dim != n {
        return Err(SktError::DimensionMismatch {
            expected: n,
            got: alpha.dim,
        });
    }
    let k = alpha.degree;
    if k > 3 {
        return Err(SktError::UnsupportedArity(k + 1));
    }
    if k + 1 > n {
        return Ok(AltForm::zeros(n, k + 1, alpha.value_dim));
    }
    let w = alpha.width();
    let mut idx = vec![0; k];
    Ok(AltForm::from_fn(n, k + 1, alpha.value_dim, |t| {
        let mut out = vec![0.0; w];
        for i in 0..=k {
            for j in i + 1..=k {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let b = l.bracket_basis(t[i], t[j]);
                let mut r = 1;
                for (p, &x) in t.iter().enumerate() {
                    if p != i && p != j {
                        idx[r] = x;
                        r += 1;
                    }
                }
                for (m, &cm) in b.iter().enumerate() {
                    if cm != 0.0 {
                        idx[0] = m;
                        alpha.accumulate_basis(&idx, sign * cm, &mut out);
                    }
                }
            }
        }
        out
    }))
}

/// N(X,Y) = [JX,JY] − [X,Y] − J[JX,Y] − J[X,JY] on basis pairs, as a vector-valued 2-form.
pub fn nijenhuis_tensor(l: &LieAlgebra, j: &DMatrix<f64>) -> AltForm {
    let n = l.dim();
    let cols: Vec<Vec<f64>> = (0..n).map(|c| j.column(c).iter().cloned().collect()).collect();
    let e = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    AltForm::from_fn(n, 2, n, |t| {
        let (x, y) = (e(t[0]), e(t[1]));
        let (jx, jy) = (&cols[t[0]], &cols[t[1]]);
        let a = l.bracket(jx, jy);
        let b = l.bracket_basis(t[0], t[1]);
        let c = l.bracket(jx, &y);
        let d = l.bracket(&x, jy);
        let cd: Vec<f64> = c.iter().zip(&d).map(|(p, q)| p + q).collect();
        let jcd = j * nalgebra::DVector::from_vec(cd);
        (0..n).map(|m| a[m] - b[m] - jcd[m]).collect()
    })
}

pub fn nijenhuis_norm(l: &LieAlgebra, j: &DMatrix<f64>) -> f64 {
    nijenhuis_tensor(l, j).norm()
}

/// A Lie algebra with metric g and almost complex structure J.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianStructure {
    pub algebra: LieAlgebra,
    pub g: DMatrix<f64>,
    pub j: DMatrix<f64>,
}

impl HermitianStructure {
    /// Only shapes are checked here; compatibility is part of the verdict.
    pub fn new(algebra: LieAlgebra, g: DMatrix<f64>, j: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        for m in [&g, &j] {
            if m.nrows() != n || m.ncols() != n {
                return Err(SktError::DimensionMismatch {
                    expected: n,
                    got: m.nrows(),
                });
            }
        }
        Ok(HermitianStructure { algebra, g, j })
    }

    /// Identity metric and the standard J; requires even dimension.
    pub fn standard(algebra: LieAlgebra) -> Result<Self> {
        let n = algebra.dim();
        if !n.is_multiple_of(2) {
            return Err(SktError::Invalid(format!("odd dimension {n}")));
        }
        let s = tensor::standard_structure(n / 2);
        Self::new(algebra, s.g, s.j)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// max(‖J² + 1‖, ‖JᵀgJ − g‖, ‖g − gᵀ‖), or ∞ if g is not positive definite.
    pub fn compatibility_residual(&self) -> f64 {
        let n = self.dim();
        if tensor::check_metric(&self.g, 1e-9).is_err() {
            return f64::INFINITY;
        }
        let j2 = linalg::max_abs(&(&self.j * &self.j + DMatrix::identity(n, n)));
        let herm = linalg::max_abs(&(self.j.transpose() * &self.g * &self.j - &self.g));
        let sym = linalg::max_abs(&(&self.g - self.g.transpose()));
        j2.max(herm).max(sym)
    }

    pub fn fundamental_form(&self) -> AltForm {
        tensor::fundamental_form(&self.g, &self.j)
    }

    /// Bismut torsion c = −J*dσ.
    pub fn torsion(&self) -> Result<AltForm> {
        let ds = ce_differential(&self.algebra, &self.fundamental_form())?;
        Ok(-&tensor::pullback_j(&ds, &self.j)?)
    }
}

pub fn torsion_three_form(h: &HermitianStructure) -> Result<AltForm> {
    h.torsion()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Kahler,
    SktStrict,
    HermitianNotSkt,
    NotIntegrable,
    NotHermitian,
}

impl Verdict {
    pub fn is_skt(self) -> bool {
        matches!(self, Verdict::Kahler | Verdict::SktStrict)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Kahler => "kahler",
            Verdict::SktStrict => "skt_strict",
            Verdict::HermitianNotSkt => "hermitian_not_skt",
            Verdict::NotIntegrable => "not_integrable",
            Verdict::NotHermitian => "not_hermitian",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict plus every residual that went into it. `scale` is
/// max(1, largest structure constant); ‖dc‖ is compared against tol·scale³.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SktReport {
    pub verdict: Verdict,
    pub compatibility: f64,
    pub nijenhuis: f64,
    pub d_sigma: f64,
    pub torsion: f64,
    pub dc: f64,
    pub scale: f64,
}

pub fn skt_report(h: &HermitianStructure, tol: Tol) -> SktReport {
    let scale = h.algebra.max_constant().max(1.0);
    let compatibility = h.compatibility_residual();
    let nijenhuis = nijenhuis_norm(&h.algebra, &h.j);
    let mut r = SktReport {
        verdict: Verdict::NotHermitian,
        compatibility,
        nijenhuis,
        d_sigma: f64::NAN,
        torsion: f64::NAN,
        dc: f64::NAN,
        scale,
    };
    // NaN must fail too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(compatibility < tol.eps) {
        return r;
    }
    let sigma = h.fundamental_form();
    let ds = ce_differential(&h.algebra, &sigma).expect("degree 2");
    r.d_sigma = ds.norm();
    let c = -&tensor::pullback_j(&ds, &h.j).expect("square J");
    r.torsion = c.norm();
    r.dc = ce_differential(&h.algebra, &c).expect("degree 3").norm();
    r.verdict = if nijenhuis >= tol.eps * scale {
        Verdict::NotIntegrable
    } else if r.d_sigma < tol.eps * scale {
        Verdict::Kahler
    } else if r.dc < tol.eps * scale.powi(3) {
        Verdict::SktStrict
    } else {
        Verdict::HermitianNotSkt
    };
    r
}

pub fn skt_verdict(h: &HermitianStructure, tol: Tol) -> Verdict {
    skt_report(h, tol).verdict
}
