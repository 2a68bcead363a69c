//! Two-step shear data (𝔞, ω) on flat ℝ²ⁿ: validation, decomposition along
//! 𝔞_J ⊕ 𝔞_r ⊕ U_J ⊕ U_r, the integrability and SKT conditions, and the
//! sheared algebra with bracket [X,Y] := ω(X,Y).

mod json;
pub mod random;

pub use json::{OmegaEntry, ShearJson};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SktError};
use crate::hermitian::{skt_report, HermitianStructure, SktReport};
use crate::lie::LieAlgebra;
use crate::linalg::{self, CMatrix};
use crate::normal_forms;
use crate::tensor::{self, antisymmetrize, split_complex_real, AltForm, Subspace};
use crate::Tol;

/// Shearing algebra 𝔞 and 𝔞-valued 2-form ω with ω|Λ²𝔞 = 0, over a Kähler pair (g, J).
#[derive(Clone, Debug, PartialEq)]
pub struct PreShearData {
    pub n: usize,
    pub a: Subspace,
    omega: LieAlgebra,
    pub g: DMatrix<f64>,
    pub j: DMatrix<f64>,
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn col(m: &DMatrix<f64>, c: usize) -> Vec<f64> {
    m.column(c).iter().cloned().collect()
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().cloned().collect()
}

fn vmax(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl PreShearData {
    /// `a_basis` columns span 𝔞; `omega` gives ω(e_i, e_j) for i < j in ambient coordinates.
    /// Values are projected onto 𝔞, with an error if the defect exceeds √ε.
    pub fn new(
        a_basis: &DMatrix<f64>,
        omega: impl Fn(usize, usize) -> Vec<f64>,
        g: DMatrix<f64>,
        j: DMatrix<f64>,
        tol: Tol,
    ) -> Result<Self> {
        let dim = g.nrows();
        if !dim.is_multiple_of(2) || j.nrows() != dim || a_basis.nrows() != dim {
            return Err(SktError::DimensionMismatch {
                expected: dim,
                got: a_basis.nrows(),
            });
        }
        tensor::check_metric(&g, tol.eps)?;
        tensor::check_complex_structure(&j, tol.eps)?;
        let herm = linalg::max_abs(&(j.transpose() * &g * &j - &g));
        if herm > tol.eps {
            return Err(SktError::Invalid(format!(
                "J is not g-orthogonal (residual {herm:.3e})"
            )));
        }
        let a = Subspace::new(a_basis, &g, tol.eps_rank)?;
        let p = a.projector();
        let mut worst: f64 = 0.0;
        let w = LieAlgebra::from_brackets(dim, |i, k| {
            let v = omega(i, k);
            let pv = mat_vec(&p, &v);
            worst = worst.max(vmax(&sub(&v, &pv)));
            pv
        });
        if worst > tol.sqrt_eps() * w.max_constant().max(1.0) {
            return Err(SktError::Invalid(format!(
                "omega has values outside a (defect {worst:.3e})"
            )));
        }
        let data = PreShearData {
            n: dim / 2,
            a,
            omega: w,
            g,
            j,
        };
        let r = data.restriction_to_a();
        if r > tol.sqrt_eps() * data.scale() {
            return Err(SktError::Invalid(format!(
                "omega does not vanish on a∧a (residual {r:.3e})"
            )));
        }
        Ok(data)
    }

    /// Standard (g, J) on ℝ²ⁿ.
    pub fn standard(a_basis: &DMatrix<f64>, omega: impl Fn(usize, usize) -> Vec<f64>, tol: Tol) -> Result<Self> {
        let s = tensor::standard_structure(a_basis.nrows() / 2);
        Self::new(a_basis, omega, s.g, s.j, tol)
    }

    /// Shear data whose bracket is `l` (𝔞 must contain 𝔤').
    pub fn from_bracket(
        l: &LieAlgebra,
        a_basis: &DMatrix<f64>,
        g: DMatrix<f64>,
        j: DMatrix<f64>,
        tol: Tol,
    ) -> Result<Self> {
        Self::new(a_basis, |i, k| l.bracket_basis(i, k).to_vec(), g, j, tol)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// ω(x, y).
    pub fn omega(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.omega.bracket(x, y)
    }

    pub fn omega_basis(&self, i: usize, k: usize) -> &[f64] {
        self.omega.bracket_basis(i, k)
    }

    /// ω as a vector-valued 2-form.
    pub fn omega_form(&self) -> AltForm {
        let n = self.dim();
        AltForm::from_fn(n, 2, n, |t| self.omega_basis(t[0], t[1]).to_vec())
    }

    /// max(1, largest coefficient of ω).
    pub fn scale(&self) -> f64 {
        self.omega.max_constant().max(1.0)
    }

    fn restriction_to_a(&self) -> f64 {
        let b = self.a.basis();
        let mut worst: f64 = 0.0;
        for p in 0..b.ncols() {
            for q in p + 1..b.ncols() {
                worst = worst.max(vmax(&self.omega(&col(b, p), &col(b, q))));
            }
        }
        worst
    }

    /// The same data with ω replaced by ω + δ (δ projected onto 𝔞 and zeroed on 𝔞∧𝔞 by the caller).
    pub fn with_omega(&self, omega: LieAlgebra) -> Self {
        PreShearData { omega, ..self.clone() }
    }

    pub fn bracket(&self) -> &LieAlgebra {
        &self.omega
    }
}

/// Which half of a J-splitting a slot lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    J,
    R,
}

/// 𝔤 = 𝔞_J ⊕ 𝔞_r ⊕ U_J ⊕ U_r with U_r = J𝔞_r and U_J = (𝔞 ⊕ J𝔞_r)^⊥ (direct, not always orthogonal).
#[derive(Clone, Debug)]
pub struct ShearDecomposition {
    pub a_j: Subspace,
    pub a_r: Subspace,
    pub u_j: Subspace,
    pub u_r: Subspace,
    p_aj: DMatrix<f64>,
    p_ar: DMatrix<f64>,
    p_uj: DMatrix<f64>,
    p_ur: DMatrix<f64>,
    omega: LieAlgebra,
    /// ‖ω − Σ components‖.
    pub reassembly: f64,
}

impl ShearDecomposition {
    /// Projector onto 𝔞_p along the other three summands.
    pub fn pa(&self, p: Part) -> &DMatrix<f64> {
        match p {
            Part::J => &self.p_aj,
            Part::R => &self.p_ar,
        }
    }

    /// Projector onto U_p along the other three summands.
    pub fn pu(&self, p: Part) -> &DMatrix<f64> {
        match p {
            Part::J => &self.p_uj,
            Part::R => &self.p_ur,
        }
    }

    /// c-valued part of ω on slots (S, T), symmetrized into an alternating form.
    fn block(&self, s: &DMatrix<f64>, t: &DMatrix<f64>, c: &DMatrix<f64>, same: bool) -> AltForm {
        let n = self.omega.dim();
        AltForm::from_fn(n, 2, n, |tu| {
            let (x, y) = (unit(n, tu[0]), unit(n, tu[1]));
            let (sx, ty) = (mat_vec(s, &x), mat_vec(t, &y));
            let mut v = self.omega.bracket(&sx, &ty);
            if !same {
                let (tx, sy) = (mat_vec(t, &x), mat_vec(s, &y));
                v = add(&v, &self.omega.bracket(&tx, &sy));
            }
            mat_vec(c, &v)
        })
    }

    /// (ω₀)^c_{ua}: the U_u* ⊗ 𝔞_a* ⊗ 𝔞_c component.
    pub fn omega0(&self, u: Part, a: Part, c: Part) -> AltForm {
        self.block(self.pu(u), self.pa(a), self.pa(c), false)
    }

    /// (ω₁)^c_{uv}: the U_u* ∧ U_v* ⊗ 𝔞_c component ((J,R) and (R,J) coincide).
    pub fn omega1(&self, u: Part, v: Part, c: Part) -> AltForm {
        self.block(self.pu(u), self.pu(v), self.pa(c), u == v)
    }
}

pub fn decompose(data: &PreShearData, tol: Tol) -> Result<ShearDecomposition> {
    let (a_j, a_r) = split_complex_real(&data.a, &data.j, tol.eps, tol.eps_rank)?;
    let a_j = a_j.j_adapted(&data.j, tol.eps_rank);
    let u_r = Subspace::new(&(&data.j * a_r.basis()), &data.g, tol.eps_rank)?;
    let u_j = data
        .a
        .sum(&u_r, tol.eps_rank)
        .complement(tol.eps_rank)
        .j_adapted(&data.j, tol.eps_rank);
    let dim = data.dim();
    if a_j.dim() + a_r.dim() + u_j.dim() + u_r.dim() != dim {
        return Err(SktError::Invalid(
            "decomposition does not span the ambient space".into(),
        ));
    }
    // The splitting is direct but not orthogonal in general (J𝔞_r need not be ⟂ 𝔞_r),
    // so components are taken along the dual decomposition.
    let blocks = [a_j.basis(), a_r.basis(), u_j.basis(), u_r.basis()];
    let mut b = DMatrix::zeros(dim, dim);
    let mut offs = [0usize; 5];
    for (k, m) in blocks.iter().enumerate() {
        b.view_mut((0, offs[k]), (dim, m.ncols())).copy_from(*m);
        offs[k + 1] = offs[k] + m.ncols();
    }
    let binv = b
        .clone()
        .try_inverse()
        .ok_or_else(|| SktError::Invalid("decomposition is not direct".into()))?;
    let proj = |k: usize| {
        let w = offs[k + 1] - offs[k];
        b.columns(offs[k], w) * binv.rows(offs[k], w)
    };
    let mut d = ShearDecomposition {
        p_aj: proj(0),
        p_ar: proj(1),
        p_uj: proj(2),
        p_ur: proj(3),
        a_j,
        a_r,
        u_j,
        u_r,
        omega: data.omega.clone(),
        reassembly: 0.0,
    };
    let parts = [Part::J, Part::R];
    let mut sum = AltForm::zeros(dim, 2, dim);
    for &c in &parts {
        for &u in &parts {
            for &a in &parts {
                sum = &sum + &d.omega0(u, a, c);
            }
        }
        sum = &sum + &d.omega1(Part::J, Part::J, c);
        sum = &sum + &d.omega1(Part::J, Part::R, c);
        sum = &sum + &d.omega1(Part::R, Part::R, c);
    }
    d.reassembly = (&sum - &data.omega_form()).norm();
    Ok(d)
}

/// A residual with its pass/fail decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    fn new(residual: f64, threshold: f64) -> Self {
        Check {
            residual,
            pass: residual < threshold,
        }
    }
}

/// 𝒜(ω(ω(·,·),·)) over all basis triples; compared against ε·scale².
pub fn check_shear_data(data: &PreShearData, tol: Tol) -> Check {
    let n = data.dim();
    let t = antisymmetrize(n, 3, n, |i| data.omega(data.omega_basis(i[0], i[1]), &unit(n, i[2]))).expect("arity 3");
    Check::new(t.norm(), tol.eps * data.scale().powi(2))
}

/// E(X,Y) = ω(JX,JY) − ω(X,Y) − Jω(JX,Y) − Jω(X,JY), i.e. J*ω − ω + J(J.ω).
pub fn integrability_defect(data: &PreShearData, x: &[f64], y: &[f64]) -> Vec<f64> {
    let (jx, jy) = (mat_vec(&data.j, x), mat_vec(&data.j, y));
    let a = data.omega(&jx, &jy);
    let b = data.omega(x, y);
    let c = add(&data.omega(&jx, y), &data.omega(x, &jy));
    sub(&sub(&a, &b), &mat_vec(&data.j, &c))
}

pub fn check_integrability(data: &PreShearData, tol: Tol) -> Check {
    let n = data.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            worst = worst.max(vmax(&integrability_defect(data, &unit(n, i), &unit(n, k))));
        }
    }
    Check::new(worst, tol.eps * data.scale())
}

pub const FLAG_NAMES: [&str; 9] = [
    "G_X = 0",
    "[J, K_X] = 0",
    "f symmetric",
    "(w1)^r_rr = 0",
    "(w1)^J_rr relation to h",
    "(w0)^r_Jr = J*(w1)^r_Jr",
    "mixed a_J-valued relation",
    "(w0)_JJ conditions",
    "(w1)_JJ conditions",
];

/// The nine conditions equivalent to integrability, each as a residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityBreakdown {
    pub flags: [Check; 9],
}

impl IntegrabilityBreakdown {
    pub fn all_pass(&self) -> bool {
        self.flags.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<usize> {
        (0..9).filter(|&i| !self.flags[i].pass).collect()
    }
}

pub fn integrability_breakdown(data: &PreShearData, dec: &ShearDecomposition, tol: Tol) -> IntegrabilityBreakdown {
    let th = tol.eps * data.scale();
    let j = &data.j;
    let (pr, pj) = (&dec.p_ar, &dec.p_aj);
    let vecs = |s: &Subspace| (0..s.dim()).map(|i| s.vector(i)).collect::<Vec<_>>();
    let (ar, aj, uj) = (vecs(&dec.a_r), vecs(&dec.a_j), vecs(&dec.u_j));
    let om = |x: &[f64], y: &[f64]| data.omega(x, y);
    let jv = |x: &[f64]| mat_vec(j, x);
    let mut r = [0.0f64; 9];

    for x in &ar {
        let jx = jv(x);
        for y in &aj {
            let (a, b) = (om(&jx, &jv(y)), om(&jx, y));
            // (i) G_X: 𝔞_r-components of A_X on 𝔞_J.
            r[0] = r[0].max(vmax(&mat_vec(pr, &a))).max(vmax(&mat_vec(pr, &b)));
            // (ii) K_X J = J K_X.
            r[1] = r[1].max(vmax(&sub(&mat_vec(pj, &a), &jv(&mat_vec(pj, &b)))));
        }
        for w in &ar {
            let jw = jv(w);
            // f(X,W) = −P_r ω(JX,W), h(X,W) = −P_J ω(JX,W)
            let (xw, wx) = (om(&jx, w), om(&jw, x));
            r[2] = r[2].max(vmax(&sub(&mat_vec(pr, &xw), &mat_vec(pr, &wx))));
            let o1 = om(&jx, &jw);
            r[3] = r[3].max(vmax(&mat_vec(pr, &o1)));
            let hskew = sub(&mat_vec(pj, &wx), &mat_vec(pj, &xw));
            r[4] = r[4].max(vmax(&add(&mat_vec(pj, &o1), &jv(&hskew))));
        }
        for y in &uj {
            let e = integrability_defect(data, x, y);
            r[5] = r[5].max(vmax(&mat_vec(pr, &e)));
            r[6] = r[6].max(vmax(&mat_vec(pj, &e)));
        }
    }
    for x in &aj {
        for y in &uj {
            r[7] = r[7].max(vmax(&integrability_defect(data, x, y)));
        }
    }
    for (p, x) in uj.iter().enumerate() {
        for y in &uj[p + 1..] {
            r[8] = r[8].max(vmax(&integrability_defect(data, x, y)));
        }
    }
    IntegrabilityBreakdown {
        flags: r.map(|x| Check::new(x, th)),
    }
}

/// ν₁ = 𝒜(g(ω(J·,J·), ω(·,·))), ν₂ = 𝒜(g(ω(Jω(·,·), J·), ·)), ν = ν₁ + 2ν₂.
#[derive(Clone, Debug, PartialEq)]
pub struct Nu {
    pub nu1: AltForm,
    pub nu2: AltForm,
    pub nu: AltForm,
}

pub fn compute_nu(data: &PreShearData) -> Nu {
    let n = data.dim();
    let g = &data.g;
    let jcols: Vec<Vec<f64>> = (0..n).map(|i| col(&data.j, i)).collect();
    // ω(Je_i, Je_k) and g(·, ·) lowered values
    let mut jj = vec![vec![0.0; n]; n * n];
    for i in 0..n {
        for k in 0..n {
            if i != k {
                jj[i * n + k] = data.omega(&jcols[i], &jcols[k]);
            }
        }
    }
    let gdot = |a: &[f64], b: &[f64]| {
        let gb = mat_vec(g, b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum::<f64>()
    };
    let nu1 = antisymmetrize(n, 4, 0, |t| {
        vec![gdot(&jj[t[0] * n + t[1]], data.omega_basis(t[2], t[3]))]
    })
    .expect("arity 4");
    let nu2 = antisymmetrize(n, 4, 0, |t| {
        let w = data.omega_basis(t[0], t[1]);
        let mut v = vec![0.0; n];
        for (m, &c) in w.iter().enumerate() {
            if c != 0.0 {
                // ω(Jω, Je_k) = Σ_m ω_m ω(Je_m, Je_k)
                for (o, x) in v.iter_mut().zip(&jj[m * n + t[2]]) {
                    *o += c * x;
                }
            }
        }
        vec![gdot(&v, &unit(n, t[3]))]
    })
    .expect("arity 4");
    let nu = &nu1 + &nu2.scale(2.0);
    Nu { nu1, nu2, nu }
}

/// Max of |β| on tuples with `k` vectors from `first` followed by the rest from `second`
/// (k = degree when `second` is empty).
pub fn restricted_norm(beta: &AltForm, first: &Subspace, k: usize, second: Option<&Subspace>) -> f64 {
    let bf: Vec<Vec<f64>> = (0..first.dim()).map(|i| first.vector(i)).collect();
    let bs: Vec<Vec<f64>> = second
        .map(|s| (0..s.dim()).map(|i| s.vector(i)).collect())
        .unwrap_or_default();
    let rest = beta.degree - k;
    let mut worst: f64 = 0.0;
    for t in tensor::combinations(bf.len(), k) {
        let tails = if rest == 0 {
            vec![vec![]]
        } else {
            tensor::combinations(bs.len(), rest)
        };
        for u in tails {
            let vs: Vec<&[f64]> = t
                .iter()
                .map(|&i| bf[i].as_slice())
                .chain(u.iter().map(|&i| bs[i].as_slice()))
                .collect();
            worst = worst.max(vmax(&beta.eval(&vs)));
        }
    }
    worst
}

/// Simultaneous eigen-data of the K_X on (𝔞_J, J) ≅ ℂ^m.
#[derive(Clone, Debug, PartialEq)]
pub struct KEigen {
    /// Unitary eigenbasis Y_i as columns, in complex 𝔞_J coordinates.
    pub y: CMatrix,
    /// alpha[(k, i)] = α_i(X_k).
    pub alpha: CMatrix,
}

/// Blocks of A_X = −ω₀(JX,·) ∈ End(𝔞) for the orthonormal basis X_k of 𝔞_r,
/// written in the bases of 𝔞_J (J-adapted) and 𝔞_r.
#[derive(Clone, Debug, PartialEq)]
pub struct AOperators {
    pub a: Vec<DMatrix<f64>>,
    pub f: Vec<DMatrix<f64>>,
    pub g: Vec<DMatrix<f64>>,
    pub h: Vec<DMatrix<f64>>,
    pub k: Vec<DMatrix<f64>>,
    pub eigen: Option<KEigen>,
}

impl AOperators {
    /// f(X_p, X_q) in 𝔞_r coordinates.
    pub fn f_map(&self, p: usize, q: usize) -> DVector<f64> {
        self.f[p].column(q).into_owned()
    }

    /// h(X_p, X_q) in 𝔞_J coordinates.
    pub fn h_map(&self, p: usize, q: usize) -> DVector<f64> {
        self.h[p].column(q).into_owned()
    }

    /// K as a complex m×m matrix on (𝔞_J, J).
    pub fn k_complex(&self, p: usize) -> CMatrix {
        realified_to_complex(&self.k[p])
    }

    /// K_v for v = Σ v_k X_k.
    pub fn k_at(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let d = self.k.first().map(|m| m.nrows()).unwrap_or(0);
        let mut out = DMatrix::zeros(d, d);
        for (c, m) in v.iter().zip(&self.k) {
            out += m * *c;
        }
        out
    }
}

/// Complex matrix of a real 2m×2m matrix commuting with the standard J
/// ((a+ib)v = av + bJv on pairs (v, Jv)).
pub fn realified_to_complex(m: &DMatrix<f64>) -> CMatrix {
    let d = m.nrows() / 2;
    CMatrix::from_fn(d, d, |p, q| Complex64::new(m[(2 * p, 2 * q)], m[(2 * p + 1, 2 * q)]))
}

pub fn complex_to_realified(c: &CMatrix) -> DMatrix<f64> {
    let d = c.nrows();
    DMatrix::from_fn(2 * d, 2 * d, |r, s| {
        let z = c[(r / 2, s / 2)];
        match (r % 2, s % 2) {
            (0, 0) | (1, 1) => z.re,
            (1, 0) => z.im,
            _ => -z.im,
        }
    })
}

pub fn extract_a(data: &PreShearData, dec: &ShearDecomposition, tol: Tol) -> AOperators {
    let bj = dec.a_j.basis();
    let br = dec.a_r.basis();
    let (mj, r) = (bj.ncols(), br.ncols());
    let coords = |b: &DMatrix<f64>, v: &[f64]| b.transpose() * &data.g * DVector::from_column_slice(v);
    let ab: Vec<Vec<f64>> = (0..mj).map(|i| col(bj, i)).chain((0..r).map(|i| col(br, i))).collect();
    let mut out = AOperators {
        a: vec![],
        f: vec![],
        g: vec![],
        h: vec![],
        k: vec![],
        eigen: None,
    };
    for p in 0..r {
        let jx = mat_vec(&data.j, &col(br, p));
        let mut a = DMatrix::zeros(mj + r, mj + r);
        for (c, y) in ab.iter().enumerate() {
            let v: Vec<f64> = data.omega(&jx, y).iter().map(|x| -x).collect();
            let (cj, cr) = (coords(bj, &v), coords(br, &v));
            for i in 0..mj {
                a[(i, c)] = cj[i];
            }
            for i in 0..r {
                a[(mj + i, c)] = cr[i];
            }
        }
        out.k.push(a.view((0, 0), (mj, mj)).into_owned());
        out.g.push(a.view((mj, 0), (r, mj)).into_owned());
        out.h.push(a.view((0, mj), (mj, r)).into_owned());
        out.f.push(a.view((mj, mj), (r, r)).into_owned());
        out.a.push(a);
    }
    if mj > 0 && r > 0 {
        let ks: Vec<CMatrix> = (0..r).map(|p| out.k_complex(p)).collect();
        if let Ok(sd) = normal_forms::simultaneous_diagonalize(&ks, tol) {
            out.eigen = Some(KEigen {
                y: sd.basis,
                alpha: sd.eigenvalues,
            });
        }
    }
    out
}

/// Residuals of [K_X,K_W] = 0, [F_X,F_W] = 0, K_X H_W + H_X F_W symmetric in (X,W),
/// and g-antisymmetry of K_Xᵀ K_W + K_X K_W + K_{f(X,W)}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkReport {
    pub k_commute: Check,
    pub f_commute: Check,
    pub kh_symmetric: Check,
    pub antisymmetry: Check,
}

impl FkReport {
    pub fn all_pass(&self) -> bool {
        self.k_commute.pass && self.f_commute.pass && self.kh_symmetric.pass && self.antisymmetry.pass
    }
}

pub fn check_fk(ops: &AOperators, tol: Tol) -> FkReport {
    let r = ops.f.len();
    let scale = ops.a.iter().map(linalg::max_abs).fold(1.0, f64::max);
    let th = tol.eps * scale * scale;
    let (mut kc, mut fc, mut kh, mut anti) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for x in 0..r {
        for w in 0..r {
            kc = kc.max(linalg::max_abs(&linalg::commutator(&ops.k[x], &ops.k[w])));
            fc = fc.max(linalg::max_abs(&linalg::commutator(&ops.f[x], &ops.f[w])));
            let s1 = &ops.k[x] * &ops.h[w] + &ops.h[x] * &ops.f[w];
            let s2 = &ops.k[w] * &ops.h[x] + &ops.h[w] * &ops.f[x];
            kh = kh.max(linalg::max_abs(&(s1 - s2)));
            let s = ops.k[x].transpose() * &ops.k[w] + &ops.k[x] * &ops.k[w] + ops.k_at(&ops.f_map(x, w));
            anti = anti.max(linalg::max_abs(&(&s + s.transpose())));
        }
    }
    FkReport {
        k_commute: Check::new(kc, th),
        f_commute: Check::new(fc, th),
        kh_symmetric: Check::new(kh, th),
        antisymmetry: Check::new(anti, th),
    }
}

/// Sheared algebra ([X,Y] = ω(X,Y)) with the unchanged (g, J).
pub fn construct_shear(data: &PreShearData, tol: Tol) -> Result<HermitianStructure> {
    let c = check_shear_data(data, tol);
    if !c.pass {
        return Err(SktError::Hypothesis {
            what: "shear data equation".into(),
            residual: c.residual,
        });
    }
    HermitianStructure::new(data.omega.clone(), data.g.clone(), data.j.clone())
}

/// Everything the shear pipeline computes for one data set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShearReport {
    pub shear_data: Check,
    pub integrability: Check,
    pub flags: IntegrabilityBreakdown,
    pub nu: Check,
    pub fk: Option<FkReport>,
    pub dims: [usize; 4],
    pub skt: Option<SktReport>,
}

impl ShearReport {
    pub fn is_skt_data(&self) -> bool {
        self.shear_data.pass && self.integrability.pass && self.nu.pass
    }
}

pub fn analyze(data: &PreShearData, tol: Tol) -> Result<ShearReport> {
    let dec = decompose(data, tol)?;
    let ops = extract_a(data, &dec, tol);
    let shear_data = check_shear_data(data, tol);
    let nu = compute_nu(data);
    let skt = construct_shear(data, tol).ok().map(|h| skt_report(&h, tol));
    Ok(ShearReport {
        shear_data,
        integrability: check_integrability(data, tol),
        flags: integrability_breakdown(data, &dec, tol),
        nu: Check::new(nu.nu.norm(), tol.eps * data.scale().powi(2)),
        fk: (dec.a_r.dim() > 0).then(|| check_fk(&ops, tol)),
        dims: [dec.a_j.dim(), dec.a_r.dim(), dec.u_j.dim(), dec.u_r.dim()],
        skt,
    })
}

#[cfg(test)]
mod tests;
