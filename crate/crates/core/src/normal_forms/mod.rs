//! Constructive linear-algebra lemmas used by the shear analysis and the families.

pub mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SktError};
use crate::linalg::{self, CMatrix};
use crate::tensor::{self, AltForm};
use crate::Tol;

/// Relative gap below which eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

fn vmax(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Single-linkage clusters of `vals` with threshold `thr`.
fn clusters<T: Copy>(vals: &[T], dist: impl Fn(T, T) -> f64, thr: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if dist(vals[i], vals[j]) <= thr && label[i] != label[j] {
                let (old, new) = (label[j], label[i]);
                label.iter_mut().filter(|l| **l == old).for_each(|l| *l = new);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        match seen.iter().position(|&l| l == label[i]) {
            Some(p) => out[p].push(i),
            None => {
                seen.push(label[i]);
                out.push(vec![i]);
            }
        }
    }
    out
}

fn cselect(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

fn hcat(blocks: &[CMatrix], rows: usize) -> CMatrix {
    let total = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, total);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}

fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    m.clone().schur().unpack()
}

fn strict_upper_max(t: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..t.nrows() {
        for j in i + 1..t.ncols() {
            worst = worst.max(t[(i, j)].norm());
        }
    }
    worst
}

/// Unitary diagonalization of P with G(P) = P² + P*P + aP skew-Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct GSkew {
    pub unitary: CMatrix,
    pub eigenvalues: Vec<Complex64>,
    /// Largest off-diagonal entry of U*PU.
    pub off_diagonal: f64,
    /// max |μ(2μ + a)| over the real parts μ.
    pub real_part_defect: f64,
    pub holds: bool,
}

pub fn g_skew_diagonalize(p: &CMatrix, a: f64, tol: Tol) -> Result<GSkew> {
    if !p.is_square() {
        return Err(SktError::Invalid("P must be square".into()));
    }
    let scale = linalg::cmax_abs(p).max(a.abs()).max(1.0);
    let g = p * p + p.adjoint() * p + p * Complex64::new(a, 0.0);
    let herm = linalg::cmax_abs(&((&g + g.adjoint()) * Complex64::new(0.5, 0.0)));
    if herm > tol.eps * scale * scale {
        return Err(SktError::Hypothesis {
            what: "G(P) is not skew-Hermitian".into(),
            residual: herm,
        });
    }
    let (u, t) = schur(p);
    let eigenvalues: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let off_diagonal = strict_upper_max(&t);
    let real_part_defect = eigenvalues
        .iter()
        .fold(0.0f64, |w, z| w.max((z.re * (2.0 * z.re + a)).abs()));
    let holds = off_diagonal < tol.eps * scale && real_part_defect < tol.eps * scale * scale;
    Ok(GSkew {
        unitary: u,
        eigenvalues,
        off_diagonal,
        real_part_defect,
        holds,
    })
}

/// Common unitary eigenbasis of commuting normal matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SimDiag {
    /// Unitary U, eigenvectors as columns.
    pub basis: CMatrix,
    /// eigenvalues[(k, i)] = (U* K_k U)_ii.
    pub eigenvalues: CMatrix,
    pub residual: f64,
}

pub fn simultaneous_diagonalize(ks: &[CMatrix], tol: Tol) -> Result<SimDiag> {
    let m = ks.first().map(|k| k.nrows()).unwrap_or(0);
    if ks.iter().any(|k| k.nrows() != m || k.ncols() != m) {
        return Err(SktError::Invalid("matrices must be square of equal size".into()));
    }
    let scale = ks.iter().map(linalg::cmax_abs).fold(1.0, f64::max);
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            let c = linalg::cmax_abs(&(&ks[i] * &ks[j] - &ks[j] * &ks[i]));
            if c > tol.eps * scale * scale {
                return Err(SktError::NotCommuting(c));
            }
        }
    }
    let mut groups = vec![CMatrix::identity(m, m)];
    for k in ks {
        let mut next = Vec::new();
        for b in &groups {
            let r = b.adjoint() * k * b;
            let (q, t) = schur(&r);
            let off = strict_upper_max(&t);
            if off > tol.sqrt_eps() * scale {
                return Err(SktError::Defective(off));
            }
            let diag: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
            for c in clusters(&diag, |x, y| (x - y).norm(), CLUSTER_GAP * scale) {
                next.push(b * cselect(&q, &c));
            }
        }
        groups = next;
    }
    let basis = hcat(&groups, m);
    let mut eigenvalues = CMatrix::zeros(ks.len(), m);
    let mut residual: f64 = 0.0;
    for (p, k) in ks.iter().enumerate() {
        let ku = k * &basis;
        for i in 0..m {
            let lam = (basis.column(i).adjoint() * ku.column(i))[(0, 0)];
            eigenvalues[(p, i)] = lam;
            let d = ku.column(i) - basis.column(i) * lam;
            residual = residual.max(d.iter().fold(0.0, |a, z| a.max(z.norm())));
        }
    }
    if residual > tol.sqrt_eps() * scale {
        return Err(SktError::Defective(residual));
    }
    Ok(SimDiag {
        basis,
        eigenvalues,
        residual,
    })
}

/// Orthonormal common eigenbasis of commuting real symmetric matrices.
fn joint_symmetric(ms: &[DMatrix<f64>], m: usize) -> DMatrix<f64> {
    let scale = ms.iter().map(linalg::max_abs).fold(1.0, f64::max);
    let mut groups = vec![DMatrix::<f64>::identity(m, m)];
    for k in ms {
        let mut next = Vec::new();
        for b in &groups {
            let r = b.transpose() * k * b;
            let r = (&r + r.transpose()) * 0.5;
            let eig = r.symmetric_eigen();
            let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
            for c in clusters(&vals, |x, y| (x - y).abs(), CLUSTER_GAP * scale) {
                next.push(b * eig.eigenvectors.select_columns(&c));
            }
        }
        groups = next;
    }
    let mut out = DMatrix::zeros(m, m);
    let mut c = 0;
    for b in groups {
        out.view_mut((0, c), (m, b.ncols())).copy_from(&b);
        c += b.ncols();
    }
    out
}

/// Symmetric bilinear map f: V × V → V stored on basis pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymBilinear {
    n: usize,
    vals: Vec<Vec<f64>>,
}

impl SymBilinear {
    pub fn zero(n: usize) -> Self {
        SymBilinear {
            n,
            vals: vec![vec![0.0; n]; n * n],
        }
    }

    /// Symmetrized f from basis values; errors if the input is not symmetric within ε.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>, tol: Tol) -> Result<Self> {
        let raw: Vec<Vec<f64>> = (0..n * n).map(|p| f(p / n, p % n)).collect();
        if raw.iter().any(|v| v.len() != n) {
            return Err(SktError::Invalid(format!("values must have length {n}")));
        }
        let scale = raw.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&raw[i * n + j], &raw[j * n + i]);
                let d = a.iter().zip(b).fold(0.0f64, |w, (x, y)| w.max((x - y).abs()));
                if d > tol.eps * scale {
                    return Err(SktError::Invalid(format!("f is not symmetric (residual {d:.3e})")));
                }
                out.vals[i * n + j] = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.vals[i * self.n + j])
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let c = x[i] * y[j];
                if c != 0.0 {
                    for (o, v) in out.iter_mut().zip(&self.vals[i * n + j]) {
                        *o += c * v;
                    }
                }
            }
        }
        out
    }

    /// Matrix of f(u, ·).
    pub fn op(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            out.set_column(j, &self.eval(u, &e));
        }
        out
    }

    pub fn scale(&self) -> f64 {
        self.vals.iter().flatten().fold(1.0, |a, x| a.max(x.abs()))
    }

    /// Values f(e_i, e_j) as the columns of an n × n² matrix.
    pub fn value_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n * n, |r, c| self.vals[c][r])
    }

    /// f in the basis given by the columns of `b` (invertible).
    pub fn in_basis(&self, b: &DMatrix<f64>, binv: &DMatrix<f64>) -> Self {
        let n = self.n;
        let cols: Vec<DVector<f64>> = (0..n).map(|i| b.column(i).into_owned()).collect();
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in i..n {
                let v: Vec<f64> = (binv * self.eval(&cols[i], &cols[j])).iter().cloned().collect();
                out.vals[j * n + i] = v.clone();
                out.vals[i * n + j] = v;
            }
        }
        out
    }

    /// max |f(f(e_i,e_j),e_k) − f(f(e_i,e_k),e_j)|.
    pub fn closure_residual(&self) -> f64 {
        let n = self.n;
        let ops: Vec<DMatrix<f64>> = (0..n * n)
            .map(|p| self.op(&DVector::from_column_slice(&self.vals[p])))
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = ops[i * n + j].column(k) - ops[i * n + k].column(j);
                    worst = worst.max(vmax(&d.into_owned()));
                }
            }
        }
        worst
    }

    /// max |g(f(x,y),f(z,w)) − g(f(x,z),f(y,w))| on basis vectors.
    pub fn metric_residual(&self, g: &DMatrix<f64>) -> f64 {
        let n = self.n;
        let v: Vec<DVector<f64>> = (0..n * n).map(|p| DVector::from_column_slice(&self.vals[p])).collect();
        let gv: Vec<DVector<f64>> = v.iter().map(|x| g * x).collect();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let a = gv[x * n + y].dot(&v[z * n + w]);
                        let b = gv[x * n + z].dot(&v[y * n + w]);
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        worst
    }
}

/// g-orthonormal frame B and its inverse Bᵀg.
fn orthonormal_frame(g: &DMatrix<f64>, tol: Tol) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    tensor::check_metric(g, tol.eps)?;
    let n = g.nrows();
    let b = linalg::g_orthonormalize(&DMatrix::identity(n, n), g, tol.eps_rank);
    let binv = b.transpose() * g;
    Ok((b, binv))
}

/// Orthonormal basis with f(v_i, v_i) ∈ span{v_1, …, v_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct FAdapted {
    pub basis: DMatrix<f64>,
    pub residual: f64,
}

/// Unit x with q(x) = λx via Newton on (q(x) − λx, (|x|² − 1)/2).
fn quadratic_eigenvector(ts: &[DMatrix<f64>], rng: &mut ChaCha8Rng, starts: usize) -> Option<DVector<f64>> {
    let k = ts.len();
    let q = |x: &DVector<f64>| DVector::from_fn(k, |r, _| x.dot(&(&ts[r] * x)));
    let scale = ts.iter().map(linalg::max_abs).fold(1.0, f64::max);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for s in 0..starts {
        let mut x = if s < k {
            DVector::from_fn(k, |i, _| if i == s { 1.0 } else { 0.0 })
        } else {
            DVector::from_fn(k, |_, _| rng.gen_range(-1.0..1.0))
        };
        if x.norm() < 1e-3 {
            continue;
        }
        x /= x.norm();
        let mut lam = x.dot(&q(&x));
        for _ in 0..60 {
            let qx = q(&x);
            let mut f = DVector::zeros(k + 1);
            f.rows_mut(0, k).copy_from(&(&qx - &x * lam));
            f[k] = 0.5 * (x.dot(&x) - 1.0);
            if vmax(&f) < 1e-15 * scale {
                break;
            }
            let mut jac = DMatrix::zeros(k + 1, k + 1);
            for r in 0..k {
                let row = (&ts[r] * &x) * 2.0;
                for c in 0..k {
                    jac[(r, c)] = row[c] - if r == c { lam } else { 0.0 };
                }
                jac[(r, k)] = -x[r];
                jac[(k, r)] = x[r];
            }
            let step = linalg::lstsq(&jac, &f, 1e-14);
            if !step.iter().all(|x| x.is_finite()) {
                break;
            }
            x -= step.rows(0, k);
            lam -= step[k];
        }
        let nx = x.norm();
        if !nx.is_finite() || nx < 1e-12 {
            continue;
        }
        x /= nx;
        let qx = q(&x);
        let res = vmax(&(&qx - &x * x.dot(&qx)));
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, x));
        }
        if best.as_ref().is_some_and(|(r, _)| *r < 1e-14 * scale) {
            break;
        }
    }
    best.map(|(_, x)| x)
}

/// Numeric search for an f-adapted orthonormal basis of (V, g); best effort, verified.
pub fn find_f_adapted_basis(f: &SymBilinear, g: &DMatrix<f64>, seed: u64, tol: Tol) -> Result<FAdapted> {
    let n = f.dim();
    let (b, binv) = orthonormal_frame(g, tol)?;
    let ft = f.in_basis(&b, &binv);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rest = DMatrix::<f64>::identity(n, n);
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    while rest.ncols() > 0 {
        let k = rest.ncols();
        // q(x) = P_rest f(Qx, Qx) in the coordinates of `rest`.
        let ts: Vec<DMatrix<f64>> = (0..k)
            .map(|r| {
                let mut t = DMatrix::zeros(k, k);
                for a in 0..k {
                    for c in 0..k {
                        let v = ft.eval(&rest.column(a).into_owned(), &rest.column(c).into_owned());
                        t[(a, c)] = rest.column(r).dot(&v);
                    }
                }
                t
            })
            .collect();
        let x = quadratic_eigenvector(&ts, &mut rng, (32 * k).max(32))
            .ok_or_else(|| SktError::SearchFailed("no quadratic eigenvector found".into()))?;
        chosen.push(&rest * &x);
        let perp = linalg::null_space(&DMatrix::from_row_slice(1, k, x.as_slice()), tol.eps_rank);
        rest = &rest * perp;
    }
    let vt = DMatrix::from_fn(n, n, |r, c| chosen[c][r]);
    let basis = &b * &vt;
    let scale = f.scale();
    let gb = g * &basis;
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let v = basis.column(i).into_owned();
        let mut w = f.eval(&v, &v);
        for p in 0..=i {
            let c = gb.column(p).dot(&w);
            w -= basis.column(p) * c;
        }
        residual = residual.max(vmax(&w));
    }
    let orth = linalg::max_abs(&(basis.transpose() * &gb - DMatrix::identity(n, n)));
    residual = residual.max(orth);
    if residual > tol.eps * scale {
        return Err(SktError::SearchFailed(format!(
            "best f-adapted candidate has residual {residual:.3e}"
        )));
    }
    Ok(FAdapted { basis, residual })
}

/// Identity element v with f(v, ·) = id.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityElement {
    pub v: DVector<f64>,
    /// The element u whose operator a = f(u, ·) was inverted.
    pub u: DVector<f64>,
    pub residual: f64,
}

/// Coefficients c_0..c_{n-1} of det(λ − a) = λⁿ + c_{n−1}λⁿ⁻¹ + … + c_0 (Faddeev–LeVerrier).
pub fn characteristic_coefficients(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = DMatrix::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * c[n - k + 1];
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    c.truncate(n);
    c
}

fn well_conditioned(a: &DMatrix<f64>) -> bool {
    let sv = linalg::singular_values(a);
    let smax = sv.max();
    smax > 0.0 && sv.min() > 1e-6 * smax.max(1.0)
}

pub fn find_identity_element(f: &SymBilinear, seed: u64, tol: Tol) -> Result<IdentityElement> {
    let n = f.dim();
    let scale = f.scale();
    let closure = f.closure_residual();
    if closure > tol.eps * scale * scale {
        return Err(SktError::Hypothesis {
            what: "f(f(.,.),.) is not totally symmetric".into(),
            residual: closure,
        });
    }
    let rank = linalg::rank(&f.value_matrix(), tol.eps_rank);
    if rank < n {
        return Err(SktError::Hypothesis {
            what: format!("f is not surjective (rank {rank} < {n})"),
            residual: (n - rank) as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = (0..64)
        .map(|_| DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)))
        .collect::<Vec<_>>();
    let sweep = (1..3usize.pow(n as u32)).map(|mut code| {
        DVector::from_fn(n, |_, _| {
            let d = code % 3;
            code /= 3;
            d as f64 - 1.0
        })
    });
    let u = random
        .into_iter()
        .chain(sweep)
        .find(|u| well_conditioned(&f.op(u)))
        .ok_or_else(|| SktError::SearchFailed("no invertible combination f(u, .)".into()))?;
    let a = f.op(&u);
    let c = characteristic_coefficients(&a);
    // I = −(aⁿ + c_{n−1}aⁿ⁻¹ + … + c_1 a)/c_0 and aᵏ = f(uᵏ, ·) with uᵏ⁺¹ = f(u, uᵏ).
    let mut power = u.clone();
    let mut v = DVector::zeros(n);
    for k in 1..=n {
        let coeff = if k == n { 1.0 } else { c[k] };
        v += &power * coeff;
        power = f.eval(&u, &power);
    }
    v /= -c[0];
    let residual = linalg::max_abs(&(f.op(&v) - DMatrix::identity(n, n)));
    if residual > tol.sqrt_eps() {
        return Err(SktError::SearchFailed(format!("identity residual {residual:.3e}")));
    }
    Ok(IdentityElement { v, u, residual })
}

/// V = V₁ ⊕ V₂ ⊕ V₃ with f(X_a, X_b) = δ_ab λ_a X_a, f(V₂ ⊕ V₃, V₁ ⊕ V₂) = 0 and f(V₃, V₃) = V₂.
#[derive(Clone, Debug, PartialEq)]
pub struct FNormalForm {
    /// Orthonormal X_a as columns.
    pub v1: DMatrix<f64>,
    pub lambda: Vec<f64>,
    pub v2: DMatrix<f64>,
    pub v3: DMatrix<f64>,
    pub eigen_residual: f64,
    pub zero_residual: f64,
    /// Component of f(V₃, V₃) outside V₂.
    pub v3_residual: f64,
    pub orthogonality: f64,
    pub v3_spans_v2: bool,
}

impl FNormalForm {
    pub fn residual(&self) -> f64 {
        self.eigen_residual
            .max(self.zero_residual)
            .max(self.v3_residual)
            .max(self.orthogonality)
    }
}

pub fn f_normal_form(f: &SymBilinear, g: &DMatrix<f64>, tol: Tol) -> Result<FNormalForm> {
    let n = f.dim();
    let scale = f.scale();
    for (what, r) in [
        ("f(f(.,.),.) is not totally symmetric", f.closure_residual()),
        ("g(f(.,.),f(.,.)) is not totally symmetric", f.metric_residual(g)),
    ] {
        if r > tol.eps * scale * scale {
            return Err(SktError::Hypothesis {
                what: what.into(),
                residual: r,
            });
        }
    }
    let (b, binv) = orthonormal_frame(g, tol)?;
    let ft = f.in_basis(&b, &binv);
    let w = linalg::column_span(&ft.value_matrix(), tol.eps_rank);
    let m = w.ncols();
    let cols = |x: &DMatrix<f64>| {
        (0..x.ncols())
            .map(|i| x.column(i).into_owned())
            .collect::<Vec<DVector<f64>>>()
    };
    let ops: Vec<DMatrix<f64>> = cols(&w).iter().map(|wk| w.transpose() * ft.op(wk) * &w).collect();
    let eig = &w * joint_symmetric(&ops, m);
    let (mut x1, mut lambda, mut x2) = (Vec::new(), Vec::new(), Vec::new());
    for x in cols(&eig) {
        let lam = x.dot(&ft.eval(&x, &x));
        if lam.abs() > tol.eps_rank * scale {
            x1.push(x);
            lambda.push(lam);
        } else {
            x2.push(x);
        }
    }
    let perp = linalg::null_space(&w.transpose(), tol.eps_rank);
    let h: Vec<DVector<f64>> = cols(&perp)
        .into_iter()
        .map(|y| {
            let mut hy = y.clone();
            for (xa, la) in x1.iter().zip(&lambda) {
                hy -= ft.eval(&y, xa) / *la;
            }
            hy
        })
        .collect();
    let stack = |vs: &[DVector<f64>]| DMatrix::from_fn(n, vs.len(), |r, c| vs[c][r]);
    let v3t = linalg::g_orthonormalize(&stack(&h), &DMatrix::identity(n, n), tol.eps_rank);
    let (v1, v2, v3) = (&b * stack(&x1), &b * stack(&x2), &b * v3t);
    let (c1, c2, c3) = (cols(&v1), cols(&v2), cols(&v3));

    let mut eigen_residual: f64 = 0.0;
    for (a, xa) in c1.iter().enumerate() {
        for (bb, xb) in c1.iter().enumerate() {
            let mut d = f.eval(xa, xb);
            if a == bb {
                d -= xa * lambda[a];
            }
            eigen_residual = eigen_residual.max(vmax(&d));
        }
    }
    let mut zero_residual: f64 = 0.0;
    for u in c2.iter().chain(&c3) {
        for v in c1.iter().chain(&c2) {
            zero_residual = zero_residual.max(vmax(&f.eval(u, v)));
        }
    }
    let gv2 = g * &v2;
    let mut v3_residual: f64 = 0.0;
    let mut images = Vec::new();
    for y in &c3 {
        for z in &c3 {
            let fz = f.eval(y, z);
            let inside = &v2 * (gv2.transpose() * &fz);
            v3_residual = v3_residual.max(vmax(&(&fz - &inside)));
            images.push(fz);
        }
    }
    let v3_spans_v2 = linalg::rank(&stack(&images), tol.eps_rank) == v2.ncols();
    let orthogonality = linalg::max_abs(&(v1.transpose() * &gv2)).max(linalg::max_abs(&(v3.transpose() * &gv2)));
    Ok(FNormalForm {
        v1,
        lambda,
        v2,
        v3,
        eigen_residual,
        zero_residual,
        v3_residual,
        orthogonality,
        v3_spans_v2,
    })
}

/// Matrix of α∧J*α for the covector α, with J*α = α∘J.
pub fn decomposable_matrix(alpha: &DVector<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let ja = j.transpose() * alpha;
    alpha * ja.transpose() - &ja * alpha.transpose()
}

/// α with M ≈ α∧J*α, and the fit residual; entries up to `zero` count as the zero form.
pub fn extract_decomposable(m: &DMatrix<f64>, j: &DMatrix<f64>, zero: f64) -> (DVector<f64>, f64) {
    let n = m.nrows();
    if linalg::max_abs(m) <= zero {
        return (DVector::zeros(n), 0.0);
    }
    let svd = linalg::svd(m);
    let i = svd.s.imax();
    let u = svd.u.column(i).into_owned();
    let nmat = decomposable_matrix(&u, j);
    let lam2 = m.dot(&nmat) / nmat.dot(&nmat);
    let alpha = u * lam2.max(0.0).sqrt();
    let residual = linalg::max_abs(&(m - decomposable_matrix(&alpha, j)));
    (alpha, residual)
}

fn wedge2(a: &AltForm, b: &AltForm) -> AltForm {
    tensor::wedge(a, b).expect("2-forms wedge into 4-forms")
}

fn dot(a: &AltForm, b: &AltForm) -> f64 {
    a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum()
}

fn type_11_defect(m: &DMatrix<f64>, j: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&(j.transpose() * m * j - m))
}

/// Rotation (ν₁', ν₂') = (cν₁ + sν₂, −sν₁ + cν₂) with ν₁' = α∧J*α and ν₂' = β∧J*β.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPair {
    pub angle: f64,
    pub rotation: [[f64; 2]; 2],
    pub alpha: DVector<f64>,
    pub beta: DVector<f64>,
    pub residual: f64,
}

pub fn split_rank_two_pair(nu1: &AltForm, nu2: &AltForm, j: &DMatrix<f64>, tol: Tol) -> Result<SplitPair> {
    let (m1, m2) = (tensor::two_form_matrix(nu1), tensor::two_form_matrix(nu2));
    let scale = linalg::max_abs(&m1).max(linalg::max_abs(&m2)).max(1.0);
    let t = type_11_defect(&m1, j).max(type_11_defect(&m2, j));
    if t > tol.eps * scale {
        return Err(SktError::Hypothesis {
            what: "forms are not of type (1,1)".into(),
            residual: t,
        });
    }
    let a = wedge2(nu1, nu1);
    let bb = wedge2(nu1, nu2);
    let sum = (&a + &wedge2(nu2, nu2)).norm();
    if sum > tol.eps * scale * scale {
        return Err(SktError::Hypothesis {
            what: "nu1^2 + nu2^2 does not vanish".into(),
            residual: sum,
        });
    }
    // The rotated square is cos2φ·ν₁² + sin2φ·ν₁∧ν₂; pick 2φ killing it.
    let phi0 = if a.norm().max(bb.norm()) > tol.eps * scale * scale {
        let gram = nalgebra::Matrix2::new(dot(&a, &a), dot(&a, &bb), dot(&a, &bb), dot(&bb, &bb));
        let e = gram.symmetric_eigen();
        let k = if e.eigenvalues[0] <= e.eigenvalues[1] { 0 } else { 1 };
        let v = e.eigenvectors.column(k);
        0.5 * v[1].atan2(v[0])
    } else if linalg::max_abs(&m1) > tol.eps * scale {
        m1.dot(&m2).atan2(m1.dot(&m1))
    } else {
        std::f64::consts::FRAC_PI_2
    };
    // Among the four quarter turns keep those with both forms of the sign of α∧J*α,
    // preferring the smaller second form.
    let cands: Vec<(f64, f64, f64)> = (0..4)
        .map(|k| {
            let phi = phi0 + k as f64 * std::f64::consts::FRAC_PI_2;
            let (s, c) = phi.sin_cos();
            let pair = [&m1 * c + &m2 * s, &m2 * c - &m1 * s];
            let violation = pair
                .iter()
                .map(|m| {
                    let q = m * j;
                    (&q + q.transpose()).symmetric_eigenvalues().max().max(0.0)
                })
                .fold(0.0, f64::max);
            (violation, linalg::max_abs(&pair[1]), phi)
        })
        .collect();
    let least = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let best = cands
        .iter()
        .filter(|c| c.0 <= least + tol.eps * scale)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|c| c.2);
    let phi = best.unwrap_or(phi0);
    let (s, c) = phi.sin_cos();
    let (r1, r2) = (&m1 * c + &m2 * s, &m2 * c - &m1 * s);
    let (alpha, e1) = extract_decomposable(&r1, j, tol.eps * scale);
    let (beta, e2) = extract_decomposable(&r2, j, tol.eps * scale);
    let residual = e1.max(e2);
    if residual > tol.sqrt_eps() * scale {
        return Err(SktError::Hypothesis {
            what: "rotated forms are not decomposable".into(),
            residual,
        });
    }
    Ok(SplitPair {
        angle: phi,
        rotation: [[c, s], [-s, c]],
        alpha,
        beta,
        residual,
    })
}

/// Conclusions for σ₁² + σ₂² = θ∧θ̄.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub identity_residual: f64,
    /// Rank of θ as a complex skew matrix.
    pub theta_rank: usize,
    pub kernel_dim: usize,
    pub codim: usize,
    pub holds: bool,
}

pub fn verify_rank_conditions(
    sigma1: &AltForm,
    sigma2: &AltForm,
    theta_re: &AltForm,
    theta_im: &AltForm,
    tol: Tol,
) -> Result<RankReport> {
    let n = sigma1.dim;
    let ms: Vec<DMatrix<f64>> = [sigma1, sigma2, theta_re, theta_im]
        .iter()
        .map(|f| tensor::two_form_matrix(f))
        .collect();
    let scale = ms.iter().map(linalg::max_abs).fold(1.0, f64::max);
    // θ∧θ̄ = Re θ² + Im θ² for 2-forms.
    let lhs = &wedge2(sigma1, sigma1) + &wedge2(sigma2, sigma2);
    let rhs = &wedge2(theta_re, theta_re) + &wedge2(theta_im, theta_im);
    let identity_residual = (&lhs - &rhs).norm();
    if identity_residual > tol.eps * scale * scale {
        return Err(SktError::Hypothesis {
            what: "sigma1^2 + sigma2^2 != theta^theta-bar".into(),
            residual: identity_residual,
        });
    }
    let theta = CMatrix::from_fn(n, n, |r, c| Complex64::new(ms[2][(r, c)], ms[3][(r, c)]));
    let theta_rank = linalg::crank(&theta, tol.eps_rank);
    let mut stacked = DMatrix::zeros(4 * n, n);
    for (k, m) in ms.iter().enumerate() {
        stacked.view_mut((k * n, 0), (n, n)).copy_from(m);
    }
    let kernel_dim = linalg::null_space(&stacked, tol.eps_rank).ncols();
    let codim = n - kernel_dim;
    Ok(RankReport {
        identity_residual,
        theta_rank,
        kernel_dim,
        codim,
        holds: theta_rank <= 2 && codim <= 6,
    })
}

/// Residuals of the hypotheses [A₁,A₂] = 0, [A₂,J] = J[A₁,J] and of the conclusion [A_i,J] = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JRelation {
    pub commute: f64,
    pub relation: f64,
    pub commutator1: f64,
    pub commutator2: f64,
    pub holds: bool,
}

pub fn j_relation_residuals(a1: &DMatrix<f64>, a2: &DMatrix<f64>, j: &DMatrix<f64>) -> (f64, f64) {
    let c1 = linalg::commutator(a1, j);
    let c2 = linalg::commutator(a2, j);
    (
        linalg::max_abs(&linalg::commutator(a1, a2)),
        linalg::max_abs(&(c2 - j * c1)),
    )
}

pub fn check_2x2_j_relation(a1: &DMatrix<f64>, a2: &DMatrix<f64>, j: &DMatrix<f64>, tol: Tol) -> Result<JRelation> {
    if [a1, a2, j].iter().any(|m| m.shape() != (2, 2)) {
        return Err(SktError::Invalid("A1, A2 and J must be 2x2".into()));
    }
    let scale = linalg::max_abs(a1).max(linalg::max_abs(a2)).max(1.0);
    let (commute, relation) = j_relation_residuals(a1, a2, j);
    if commute > tol.eps * scale * scale || relation > tol.eps * scale {
        return Err(SktError::Hypothesis {
            what: "[A1,A2] = 0 and [A2,J] = J[A1,J]".into(),
            residual: commute.max(relation),
        });
    }
    let commutator1 = linalg::max_abs(&linalg::commutator(a1, j));
    let commutator2 = linalg::max_abs(&linalg::commutator(a2, j));
    Ok(JRelation {
        commute,
        relation,
        commutator1,
        commutator2,
        holds: commutator1.max(commutator2) < tol.sqrt_eps() * scale,
    })
}

#[cfg(test)]
mod tests;
