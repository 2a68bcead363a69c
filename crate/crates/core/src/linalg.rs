//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Thin SVD m = U diag(s) Vᴴ.
#[derive(Clone, Debug)]
pub struct Svd<T: ComplexField> {
    pub u: DMatrix<T>,
    pub s: DVector<f64>,
    pub v_t: DMatrix<T>,
}

fn reconstruction<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    u: &DMatrix<T>,
    s: &DVector<f64>,
    v_t: &DMatrix<T>,
) -> f64 {
    let d = DMatrix::from_diagonal(&s.map(|x| T::from_real(x)));
    (u * d * v_t - m).iter().fold(0.0, |a, z| a.max(z.clone().modulus()))
}

/// SVD verified by reconstruction. nalgebra's bidiagonal SVD occasionally returns wrong
/// factors (or NaN) for rank-deficient rectangular matrices, so rectangular input goes
/// through QR first, and the adjoint and then the eigen-decomposition of MᴴM serve as
/// fallbacks.
pub fn svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Svd<T> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        let k = r.min(c);
        return Svd {
            u: DMatrix::zeros(r, k),
            s: DVector::zeros(k),
            v_t: DMatrix::zeros(k, c),
        };
    }
    // Rectangular input is reduced to a square triangular factor first: m = QR (or the same on
    // mᴴ), which also keeps nalgebra's bidiagonalization away from very tall matrices.
    if r != c {
        let (tall, w) = if r > c { (true, m.clone()) } else { (false, m.adjoint()) };
        let (q, rr) = w.qr().unpack();
        let d = svd(&rr);
        let (u0, v0) = (q * d.u, d.v_t);
        let (u, v_t) = if tall { (u0, v0) } else { (v0.adjoint(), u0.adjoint()) };
        return Svd { u, s: d.s, v_t };
    }
    let scale = m.iter().fold(1.0f64, |a, z| a.max(z.clone().modulus()));
    let ok = 1e-11 * scale;
    for eps in [5.0 * f64::EPSILON, 1e-14, 1e-13] {
        if let Some(d) = m.clone().try_svd(true, true, eps, 0) {
            let (u, v_t) = (d.u.unwrap(), d.v_t.unwrap());
            if reconstruction(m, &u, &d.singular_values, &v_t) <= ok {
                return Svd {
                    u,
                    s: d.singular_values,
                    v_t,
                };
            }
        }
        if let Some(d) = m.adjoint().try_svd(true, true, eps, 0) {
            let (u, v_t) = (d.v_t.unwrap().adjoint(), d.u.unwrap().adjoint());
            if reconstruction(m, &u, &d.singular_values, &v_t) <= ok {
                return Svd {
                    u,
                    s: d.singular_values,
                    v_t,
                };
            }
        }
    }
    let e = (m.adjoint() * m).symmetric_eigen();
    let s = e.eigenvalues.map(|l| l.max(0.0).sqrt());
    let smax = s.max();
    let mut u = DMatrix::zeros(r, c);
    for i in 0..c {
        if s[i] > 1e-14 * smax.max(1e-300) {
            let col = m * e.eigenvectors.column(i) / T::from_real(s[i]);
            u.set_column(i, &col);
        }
    }
    Svd {
        u,
        s,
        v_t: e.eigenvectors.adjoint(),
    }
}

pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    svd(m).s
}

/// Minimum-norm least-squares solution, dropping singular values below `rcond · s_max`.
pub fn lstsq(m: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let d = svd(m);
    let t = rcond * d.s.max();
    let utb = d.u.transpose() * b;
    let y = DVector::from_fn(d.s.len(), |i, _| if d.s[i] > t { utb[i] / d.s[i] } else { 0.0 });
    d.v_t.transpose() * y
}

fn threshold(sv: &DVector<f64>, tol: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    tol * smax.max(1.0)
}

fn rank_of<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> usize {
    let sv = svd(m).s;
    let t = threshold(&sv, tol);
    sv.iter().filter(|&&s| s > t).count()
}

/// Numerical rank with relative threshold `tol * max(1, s_max)`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    rank_of(m, tol)
}

pub fn crank(m: &CMatrix, tol: f64) -> usize {
    rank_of(m, tol)
}

/// Orthonormal basis (columns) of the column span of `m`.
pub fn column_span(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = svd(m);
    let t = threshold(&d.s, tol);
    let keep: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] > t).collect();
    d.u.select_columns(&keep)
}

fn null_of<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let (r, c) = m.shape();
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    // Pad to at least c rows so that V is square.
    let sq = if r >= c {
        m.clone()
    } else {
        let mut out = DMatrix::<T>::zeros(c, c);
        out.view_mut((0, 0), (r, c)).copy_from(m);
        out
    };
    let d = svd(&sq);
    let t = threshold(&d.s, tol);
    let idx: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] <= t).collect();
    DMatrix::from_fn(c, idx.len(), |row, k| d.v_t[(idx[k], row)].clone().conjugate())
}

/// Orthonormal basis (columns) of the kernel of `m`.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    null_of(m, tol)
}

pub fn cnull_space(m: &CMatrix, tol: f64) -> CMatrix {
    null_of(m, tol)
}

/// Gram–Schmidt of the columns of `b` with respect to the metric `g`, dropping
/// dependent columns (norm below `tol` after projection).
pub fn g_orthonormalize(b: &DMatrix<f64>, g: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = b.nrows();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for j in 0..b.ncols() {
        let mut v = b.column(j).into_owned();
        let scale = (v.dot(&(g * &v))).sqrt().max(1.0);
        for _ in 0..2 {
            for u in &out {
                let c = u.dot(&(g * &v));
                v -= u * c;
            }
        }
        let nrm = v.dot(&(g * &v)).max(0.0).sqrt();
        if nrm > tol * scale {
            out.push(v / nrm);
        }
    }
    DMatrix::from_fn(n, out.len(), |r, c| out[c][r])
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

pub fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
