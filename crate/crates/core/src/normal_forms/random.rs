//! Random instances satisfying the lemma hypotheses.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{j_relation_residuals, SymBilinear};
use crate::linalg::CMatrix;
use crate::tensor::{self, AltForm};
use crate::Tol;

fn cgauss(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_complex_unitary(m: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| cgauss(rng)).qr().q()
}

/// P = U diag(μ_k + i c_k) U* with μ_k ∈ {0, −a/2}, sometimes with repeated eigenvalues.
pub fn g_skew_instance(m: usize, a: f64, rng: &mut impl Rng) -> CMatrix {
    let u = random_complex_unitary(m, rng);
    let mut d: Vec<Complex64> = (0..m)
        .map(|_| {
            let mu = if rng.gen_bool(0.5) { 0.0 } else { -a / 2.0 };
            Complex64::new(mu, rng.gen_range(-2.0..2.0))
        })
        .collect();
    if m > 1 && rng.gen_bool(0.3) {
        d[1] = d[0];
    }
    &u * CMatrix::from_diagonal(&DVector::from_vec(d)) * u.adjoint()
}

/// Commuting normal matrices V diag(d_k) V* with a shared unitary V.
pub fn commuting_normal(m: usize, count: usize, rng: &mut impl Rng) -> (Vec<CMatrix>, CMatrix) {
    let v = random_complex_unitary(m, rng);
    let ks = (0..count)
        .map(|_| {
            let d = DVector::from_fn(m, |_, _| cgauss(rng));
            &v * CMatrix::from_diagonal(&d) * v.adjoint()
        })
        .collect();
    (ks, v)
}

/// Gauss–Newton projection of a random pair onto [A₁,A₂] = 0, [A₂,J] = J[A₁,J].
pub fn j_relation_instance(j: &DMatrix<f64>, rng: &mut impl Rng) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let unpack = |x: &DVector<f64>| {
        (
            DMatrix::from_column_slice(2, 2, &x.as_slice()[..4]),
            DMatrix::from_column_slice(2, 2, &x.as_slice()[4..]),
        )
    };
    let h = |x: &DVector<f64>| {
        let (a1, a2) = unpack(x);
        let c = &a1 * &a2 - &a2 * &a1;
        let r = (&a2 * j - j * &a2) - j * (&a1 * j - j * &a1);
        DVector::from_iterator(8, c.iter().chain(r.iter()).cloned())
    };
    let mut x = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
    for _ in 0..100 {
        let hx = h(&x);
        if hx.amax() < 1e-14 {
            break;
        }
        // h is quadratic, so central differences are exact up to rounding.
        let d = 1e-4;
        let mut jac = DMatrix::zeros(8, 8);
        for c in 0..8 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += d;
            xm[c] -= d;
            jac.set_column(c, &((h(&xp) - h(&xm)) / (2.0 * d)));
        }
        x -= crate::linalg::lstsq(&jac, &hx, 1e-12);
    }
    let (a1, a2) = unpack(&x);
    let (c, r) = j_relation_residuals(&a1, &a2, j);
    (c.max(r) < 1e-12).then_some((a1, a2))
}

/// Unital commutative associative algebra on ℝⁿ built from blocks ℝ, ℂ, ℝ[t]/t², ℝ[t]/t³,
/// conjugated by a random well-conditioned Q. Returns f and its identity element.
pub fn unital_model(n: usize, rng: &mut impl Rng) -> (SymBilinear, DVector<f64>) {
    let mut table = vec![vec![0.0; n]; n * n];
    let mut unit = DVector::zeros(n);
    let mut start = 0;
    while start < n {
        let left = n - start;
        let kind = rng.gen_range(0..4usize);
        let size = [1, 2, 2, 3][kind];
        if size > left {
            continue;
        }
        let s = start;
        let mut put = |i: usize, j: usize, k: usize, c: f64| {
            table[(s + i) * n + s + j][s + k] += c;
            if i != j {
                table[(s + j) * n + s + i][s + k] += c;
            }
        };
        match kind {
            0 => {
                let d = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                put(0, 0, 0, d);
                unit[s] = 1.0 / d;
            }
            1 => {
                put(0, 0, 0, 1.0);
                put(0, 1, 1, 1.0);
                put(1, 1, 0, -1.0);
                unit[s] = 1.0;
            }
            2 => {
                put(0, 0, 0, 1.0);
                put(0, 1, 1, 1.0);
                unit[s] = 1.0;
            }
            _ => {
                put(0, 0, 0, 1.0);
                put(0, 1, 1, 1.0);
                put(0, 2, 2, 1.0);
                put(1, 1, 2, 1.0);
                unit[s] = 1.0;
            }
        }
        start += size;
    }
    let q = loop {
        let q = DMatrix::<f64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.6..0.6));
        let sv = crate::linalg::singular_values(&q);
        if sv.min() > 0.2 && sv.max() / sv.min() < 20.0 {
            break q;
        }
    };
    let qinv = q.clone().try_inverse().expect("well conditioned");
    let model = SymBilinear::from_fn(n, |i, j| table[i * n + j].clone(), Tol::default()).expect("symmetric table");
    // f'(x, y) = Q f(Q⁻¹x, Q⁻¹y).
    let f = model.in_basis(&qinv, &q);
    (f, q * unit)
}

/// Scalar 2-form with matrix `m`.
pub fn form(m: &DMatrix<f64>) -> AltForm {
    tensor::two_form_from_matrix(m)
}

/// (cν₁ + sν₂, −sν₁ + cν₂).
pub fn rotate_pair(nu1: &AltForm, nu2: &AltForm, phi: f64) -> (AltForm, AltForm) {
    let (s, c) = phi.sin_cos();
    (&nu1.scale(c) + &nu2.scale(s), &nu2.scale(c) - &nu1.scale(s))
}

pub fn random_covector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}
