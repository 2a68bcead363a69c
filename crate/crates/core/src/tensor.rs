//! Alternating forms on R^N (scalar- or vector-valued), wedge, pullback,
//! antisymmetrization and metric subspaces with their complex/real splitting.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Result, SktError};
use crate::linalg;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Position of a strictly increasing tuple in colexicographic order.
pub fn tuple_index(t: &[usize]) -> usize {
    t.iter().enumerate().map(|(p, &i)| binomial(i, p + 1)).sum()
}

/// All strictly increasing k-tuples of `0..n`, ordered by `tuple_index`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out.sort_by_key(|t| tuple_index(t));
    out
}

/// Permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn rec(i: usize, p: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if i + 1 >= p.len() {
            out.push((p.clone(), sign));
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, if i == j { sign } else { -sign }, out);
            p.swap(i, j);
        }
    }
    if k == 0 {
        return vec![(vec![], 1.0)];
    }
    rec(0, &mut p, 1.0, &mut out);
    out
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on repeats.
fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Dense alternating k-form on R^N. `value_dim == 0` means scalar-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct AltForm {
    pub dim: usize,
    pub degree: usize,
    pub value_dim: usize,
    pub coeffs: Vec<f64>,
}

impl AltForm {
    pub fn zeros(dim: usize, degree: usize, value_dim: usize) -> Self {
        AltForm {
            dim,
            degree,
            value_dim,
            coeffs: vec![0.0; binomial(dim, degree) * value_dim.max(1)],
        }
    }

    /// Builds the form from its values on increasing basis tuples.
    pub fn from_fn(dim: usize, degree: usize, value_dim: usize, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Self {
        let mut out = Self::zeros(dim, degree, value_dim);
        let w = out.width();
        for (ti, t) in combinations(dim, degree).iter().enumerate() {
            let v = f(t);
            out.coeffs[ti * w..(ti + 1) * w].copy_from_slice(&v[..w]);
        }
        out
    }

    pub fn covector(v: &[f64]) -> Self {
        AltForm {
            dim: v.len(),
            degree: 1,
            value_dim: 0,
            coeffs: v.to_vec(),
        }
    }

    /// The basis form e^{i_1}∧…∧e^{i_k} (indices need not be sorted).
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut out = Self::zeros(dim, idx.len(), 0);
        let mut t = idx.to_vec();
        if let Some(s) = sort_sign(&mut t) {
            out.coeffs[tuple_index(&t)] = s;
        }
        out
    }

    pub fn width(&self) -> usize {
        self.value_dim.max(1)
    }

    pub fn is_scalar(&self) -> bool {
        self.value_dim == 0
    }

    /// Value on an increasing tuple.
    pub fn get(&self, t: &[usize]) -> &[f64] {
        let w = self.width();
        let i = tuple_index(t);
        &self.coeffs[i * w..(i + 1) * w]
    }

    pub fn set(&mut self, t: &[usize], vals: &[f64]) {
        let w = self.width();
        let i = tuple_index(t);
        self.coeffs[i * w..(i + 1) * w].copy_from_slice(&vals[..w]);
    }

    /// Adds `factor · α(e_{idx_1},…,e_{idx_k})` into `out`; indices arbitrary.
    pub fn accumulate_basis(&self, idx: &[usize], factor: f64, out: &mut [f64]) {
        let mut t = idx.to_vec();
        if let Some(s) = sort_sign(&mut t) {
            let v = self.get(&t);
            for (o, x) in out.iter_mut().zip(v) {
                *o += s * factor * x;
            }
        }
    }

    pub fn eval_basis(&self, idx: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        self.accumulate_basis(idx, 1.0, &mut out);
        out
    }

    /// Evaluates on arbitrary vectors: Σ_I α_I · det(v_b[I_a]).
    pub fn eval(&self, vs: &[&[f64]]) -> Vec<f64> {
        assert_eq!(vs.len(), self.degree);
        let w = self.width();
        let mut out = vec![0.0; w];
        let perms = permutations(self.degree);
        for (ti, t) in combinations(self.dim, self.degree).iter().enumerate() {
            let c = &self.coeffs[ti * w..(ti + 1) * w];
            if c.iter().all(|&x| x == 0.0) {
                continue;
            }
            let mut det = 0.0;
            for (p, s) in &perms {
                let mut prod = *s;
                for (a, &pa) in p.iter().enumerate() {
                    prod *= vs[pa][t[a]];
                    if prod == 0.0 {
                        break;
                    }
                }
                det += prod;
            }
            if det != 0.0 {
                for (o, x) in out.iter_mut().zip(c) {
                    *o += det * x;
                }
            }
        }
        out
    }

    /// Max-abs of the coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Applies the linear map `m` to the values (m: new_dim × width).
    pub fn map_values(&self, m: &DMatrix<f64>) -> AltForm {
        assert_eq!(m.ncols(), self.width());
        let nv = m.nrows();
        let w = self.width();
        let nt = binomial(self.dim, self.degree);
        let mut coeffs = vec![0.0; nt * nv];
        for ti in 0..nt {
            let c = &self.coeffs[ti * w..(ti + 1) * w];
            for r in 0..nv {
                coeffs[ti * nv + r] = (0..w).map(|k| m[(r, k)] * c[k]).sum();
            }
        }
        AltForm {
            dim: self.dim,
            degree: self.degree,
            value_dim: nv,
            coeffs,
        }
    }

    /// Scalar form obtained by pairing the values with a covector.
    pub fn contract_values(&self, cov: &[f64]) -> AltForm {
        let m = DMatrix::from_row_slice(1, cov.len(), cov);
        let mut out = self.map_values(&m);
        out.value_dim = 0;
        out
    }

    /// i-th value component as a scalar form.
    pub fn value_component(&self, i: usize) -> AltForm {
        let mut cov = vec![0.0; self.width()];
        cov[i] = 1.0;
        self.contract_values(&cov)
    }

    fn zip_with(&self, o: &AltForm, f: impl Fn(f64, f64) -> f64) -> AltForm {
        assert_eq!((self.dim, self.degree, self.value_dim), (o.dim, o.degree, o.value_dim));
        AltForm {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(*a, *b)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: f64) -> AltForm {
        AltForm {
            coeffs: self.coeffs.iter().map(|x| x * s).collect(),
            ..self.clone()
        }
    }
}

impl Add for &AltForm {
    type Output = AltForm;
    fn add(self, o: &AltForm) -> AltForm {
        self.zip_with(o, |a, b| a + b)
    }
}

impl Sub for &AltForm {
    type Output = AltForm;
    fn sub(self, o: &AltForm) -> AltForm {
        self.zip_with(o, |a, b| a - b)
    }
}

impl Neg for &AltForm {
    type Output = AltForm;
    fn neg(self) -> AltForm {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &AltForm {
    type Output = AltForm;
    fn mul(self, s: f64) -> AltForm {
        self.scale(s)
    }
}

/// 𝒜(T)(X_1..X_k) = (1/k!) Σ_σ sgn σ · T(X_σ(1)..X_σ(k)) for T given on basis tuples.
pub fn antisymmetrize(dim: usize, arity: usize, value_dim: usize, t: impl Fn(&[usize]) -> Vec<f64>) -> Result<AltForm> {
    if arity > 4 {
        return Err(SktError::UnsupportedArity(arity));
    }
    let perms = permutations(arity);
    let norm = 1.0 / perms.len() as f64;
    let w = value_dim.max(1);
    let mut idx = vec![0; arity];
    Ok(AltForm::from_fn(dim, arity, value_dim, |tup| {
        let mut acc = vec![0.0; w];
        for (p, s) in &perms {
            for (a, &pa) in p.iter().enumerate() {
                idx[a] = tup[pa];
            }
            let v = t(&idx);
            for (o, x) in acc.iter_mut().zip(&v) {
                *o += s * norm * x;
            }
        }
        acc
    }))
}

/// Exterior product (determinant convention: e¹∧e²(e₁,e₂) = 1).
pub fn wedge(a: &AltForm, b: &AltForm) -> Result<AltForm> {
    if a.dim != b.dim {
        return Err(SktError::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    if !a.is_scalar() && !b.is_scalar() {
        return Err(SktError::Invalid("wedge of two vector-valued forms".into()));
    }
    let (p, q) = (a.degree, b.degree);
    let vd = a.value_dim.max(b.value_dim);
    let w = vd.max(1);
    let shuffles: Vec<(Vec<usize>, Vec<usize>, f64)> = combinations(p + q, p)
        .into_iter()
        .map(|s| {
            let rest: Vec<usize> = (0..p + q).filter(|i| !s.contains(i)).collect();
            let inv: usize = s.iter().enumerate().map(|(i, &x)| x - i).sum();
            (s, rest, if inv.is_multiple_of(2) { 1.0 } else { -1.0 })
        })
        .collect();
    Ok(AltForm::from_fn(a.dim, p + q, vd, |t| {
        let mut acc = vec![0.0; w];
        for (s, r, sign) in &shuffles {
            let ts: Vec<usize> = s.iter().map(|&i| t[i]).collect();
            let tr: Vec<usize> = r.iter().map(|&i| t[i]).collect();
            let va = a.get(&ts);
            let vb = b.get(&tr);
            if a.is_scalar() {
                for k in 0..w {
                    acc[k] += sign * va[0] * vb[k.min(vb.len() - 1)];
                }
            } else {
                for k in 0..w {
                    acc[k] += sign * va[k] * vb[0];
                }
            }
        }
        acc
    }))
}

/// (A*α)(X_1..X_k) = α(AX_1,..,AX_k) for A: N×M; result lives on R^M.
pub fn pullback(alpha: &AltForm, a: &DMatrix<f64>) -> Result<AltForm> {
    if a.nrows() != alpha.dim {
        return Err(SktError::DimensionMismatch {
            expected: alpha.dim,
            got: a.nrows(),
        });
    }
    let cols: Vec<Vec<f64>> = (0..a.ncols()).map(|j| a.column(j).iter().cloned().collect()).collect();
    Ok(AltForm::from_fn(a.ncols(), alpha.degree, alpha.value_dim, |t| {
        let vs: Vec<&[f64]> = t.iter().map(|&i| cols[i].as_slice()).collect();
        alpha.eval(&vs)
    }))
}

pub fn pullback_j(alpha: &AltForm, j: &DMatrix<f64>) -> Result<AltForm> {
    if !j.is_square() {
        return Err(SktError::Invalid("J must be square".into()));
    }
    pullback(alpha, j)
}

/// σ = g(J·,·).
pub fn fundamental_form(g: &DMatrix<f64>, j: &DMatrix<f64>) -> AltForm {
    let gj = j.transpose() * g;
    AltForm::from_fn(g.nrows(), 2, 0, |t| vec![gj[(t[0], t[1])]])
}

/// Skew matrix M_ij = β(e_i, e_j) of a scalar 2-form.
pub fn two_form_matrix(beta: &AltForm) -> DMatrix<f64> {
    let n = beta.dim;
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { beta.eval_basis(&[i, j])[0] })
}

pub fn two_form_from_matrix(m: &DMatrix<f64>) -> AltForm {
    AltForm::from_fn(m.nrows(), 2, 0, |t| vec![0.5 * (m[(t[0], t[1])] - m[(t[1], t[0])])])
}

pub struct StandardStructure {
    pub g: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub sigma: AltForm,
}

/// g = id, J e_{2k-1} = e_{2k}, J e_{2k} = -e_{2k-1}.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

pub fn standard_structure(n: usize) -> StandardStructure {
    let g = DMatrix::identity(2 * n, 2 * n);
    let j = standard_j(n);
    let sigma = fundamental_form(&g, &j);
    StandardStructure { g, j, sigma }
}

pub fn check_complex_structure(j: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !j.is_square() || !j.nrows().is_multiple_of(2) {
        return Err(SktError::NotComplexStructure(f64::INFINITY));
    }
    let n = j.nrows();
    let d = linalg::max_abs(&(j * j + DMatrix::identity(n, n)));
    if d > tol * linalg::max_abs(j).max(1.0).powi(2) {
        return Err(SktError::NotComplexStructure(d));
    }
    Ok(())
}

pub fn check_metric(g: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !g.is_square() || linalg::max_abs(&(g - g.transpose())) > tol * linalg::max_abs(g).max(1.0) {
        return Err(SktError::DegenerateMetric);
    }
    match g.clone().cholesky() {
        Some(_) => Ok(()),
        None => Err(SktError::DegenerateMetric),
    }
}

/// Subspace of R^N with a basis orthonormal for the stored metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
    metric: DMatrix<f64>,
}

impl Subspace {
    /// Span of the columns of `vectors`, orthonormalized for `g`.
    pub fn new(vectors: &DMatrix<f64>, g: &DMatrix<f64>, tol_rank: f64) -> Result<Self> {
        if vectors.nrows() != g.nrows() {
            return Err(SktError::DimensionMismatch {
                expected: g.nrows(),
                got: vectors.nrows(),
            });
        }
        Ok(Subspace {
            basis: linalg::g_orthonormalize(vectors, g, tol_rank),
            metric: g.clone(),
        })
    }

    pub fn zero(g: &DMatrix<f64>) -> Self {
        Subspace {
            basis: DMatrix::zeros(g.nrows(), 0),
            metric: g.clone(),
        }
    }

    pub fn full(g: &DMatrix<f64>, tol_rank: f64) -> Self {
        let n = g.nrows();
        Self::new(&DMatrix::identity(n, n), g, tol_rank).expect("square metric")
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.basis.column(i).iter().cloned().collect()
    }

    /// g-orthogonal projector B Bᵀ G.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose() * &self.metric
    }

    /// Distance of `v` from the subspace (g-norm of the rejection).
    pub fn defect(&self, v: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(v);
        let r = &v - self.projector() * &v;
        r.dot(&(&self.metric * &r)).max(0.0).sqrt()
    }

    /// g-orthogonal complement in the ambient space.
    pub fn complement(&self, tol_rank: f64) -> Subspace {
        let n = self.ambient();
        let c = if self.dim() == 0 {
            DMatrix::identity(n, n)
        } else {
            linalg::null_space(&(self.basis.transpose() * &self.metric), tol_rank)
        };
        Subspace::new(&c, &self.metric, tol_rank).expect("same ambient")
    }

    /// g-orthogonal complement of `inner` inside `self`.
    pub fn complement_within(&self, inner: &Subspace, tol_rank: f64) -> Subspace {
        let p = inner.projector();
        let n = self.ambient();
        let rej = (DMatrix::identity(n, n) - p) * &self.basis;
        let span = linalg::column_span(&rej, tol_rank);
        Subspace::new(&span, &self.metric, tol_rank).expect("same ambient")
    }

    pub fn sum(&self, other: &Subspace, tol_rank: f64) -> Subspace {
        let n = self.ambient();
        let mut m = DMatrix::zeros(n, self.dim() + other.dim());
        m.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        m.view_mut((0, self.dim()), (n, other.dim())).copy_from(&other.basis);
        let span = linalg::column_span(&m, tol_rank);
        Subspace::new(&span, &self.metric, tol_rank).expect("same ambient")
    }

    /// Image under a linear map.
    pub fn image(&self, m: &DMatrix<f64>, tol_rank: f64) -> Subspace {
        let span = linalg::column_span(&(m * &self.basis), tol_rank);
        Subspace::new(&span, &self.metric, tol_rank).expect("same ambient")
    }

    /// Rebuilds the basis as (v₁, Jv₁, v₂, Jv₂, …); requires a J-invariant subspace.
    pub fn j_adapted(&self, j: &DMatrix<f64>, tol_rank: f64) -> Subspace {
        let n = self.ambient();
        let g = &self.metric;
        let mut out: Vec<nalgebra::DVector<f64>> = Vec::new();
        for c in 0..self.dim() {
            let mut v = self.basis.column(c).into_owned();
            for _ in 0..2 {
                for u in &out {
                    let k = u.dot(&(g * &v));
                    v -= u * k;
                }
            }
            let nrm = v.dot(&(g * &v)).max(0.0).sqrt();
            if nrm > tol_rank {
                let v = v / nrm;
                let jv = j * &v;
                out.push(v);
                out.push(jv);
            }
            if out.len() >= self.dim() {
                break;
            }
        }
        Subspace {
            basis: DMatrix::from_fn(n, out.len(), |r, c| out[c][r]),
            metric: g.clone(),
        }
    }
}

/// V_J = V ∩ JV and its orthogonal complement V_r inside V.
pub fn split_complex_real(v: &Subspace, j: &DMatrix<f64>, tol: f64, tol_rank: f64) -> Result<(Subspace, Subspace)> {
    check_complex_structure(j, tol)?;
    check_metric(v.metric(), tol)?;
    if j.nrows() != v.ambient() {
        return Err(SktError::DimensionMismatch {
            expected: v.ambient(),
            got: j.nrows(),
        });
    }
    let n = v.ambient();
    if v.dim() == 0 {
        return Ok((v.clone(), v.clone()));
    }
    let defect = (DMatrix::identity(n, n) - v.projector()) * j * v.basis();
    let ker = linalg::null_space(&defect, tol_rank);
    let vj = Subspace::new(&(v.basis() * ker), v.metric(), tol_rank)?;
    let vr = v.complement_within(&vj, tol_rank);
    Ok((vj, vr))
}
