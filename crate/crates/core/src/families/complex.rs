//! Commutators that are not totally real: two-dimensional complex 𝔤', the six-dimensional
//! three-dimensional non totally real case, and the four-dimensional complex pair equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{cx, matrix, range, rows, Cx};
use crate::error::{Result, SktError};
use crate::hermitian::{skt_verdict, HermitianStructure, Verdict};
use crate::lie::{fingerprint_match, LieAlgebra, Params};
use crate::linalg;
use crate::normal_forms::verify_rank_conditions;
use crate::tensor::{self, standard_j};
use crate::Tol;

/// 𝔤' = span{X, JX}. Basis: X, JX, then 𝔤'^⊥ with the standard J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum TwoDimComplex {
    /// [Y, X] = α(Y) JX.
    #[serde(rename = "i")]
    Rotation { n: usize, alpha: Vec<f64> },
    /// [Y, Z] = (τ₁ + Re θ)(Y, Z) X + (τ₂ − Im θ)(Y, Z) JX with τ₁² + τ₂² = θ∧θ̄.
    /// `theta` is the matrix of Re θ, which must be J-anti-invariant; Im θ = Re θ(J·,·), the sign
    /// for which J is integrable.
    #[serde(rename = "ii")]
    Nilpotent {
        n: usize,
        tau1: Vec<Vec<f64>>,
        tau2: Vec<Vec<f64>>,
        theta: Vec<Vec<f64>>,
    },
}

fn skew(m: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&(m + m.transpose()))
}

pub fn gen_2d_complex(p: &TwoDimComplex, tol: Tol) -> Result<HermitianStructure> {
    let (n, u) = match p {
        TwoDimComplex::Rotation { n, .. } | TwoDimComplex::Nilpotent { n, .. } => (*n, 2 * n.saturating_sub(1)),
    };
    range(n >= 2, "n >= 2")?;
    let dim = 2 * n;
    let mut l = LieAlgebra::abelian(dim);
    match p {
        TwoDimComplex::Rotation { alpha, .. } => {
            range(alpha.len() == u, format!("alpha must have {u} entries"))?;
            range(alpha.iter().any(|x| x.abs() > tol.eps), "alpha != 0")?;
            for (s, &c) in alpha.iter().enumerate() {
                let mut v = vec![0.0; dim];
                v[1] = c;
                l.set_bracket(2 + s, 0, &v);
                let mut v = vec![0.0; dim];
                v[0] = -c;
                l.set_bracket(2 + s, 1, &v);
            }
        }
        TwoDimComplex::Nilpotent { tau1, tau2, theta, .. } => {
            let t1 = matrix(tau1, u, "tau1")?;
            let t2 = matrix(tau2, u, "tau2")?;
            let re = matrix(theta, u, "theta")?;
            let j = standard_j(u / 2);
            for (m, what) in [(&t1, "tau1"), (&t2, "tau2"), (&re, "theta")] {
                range(skew(m) <= tol.eps, format!("{what} must be skew"))?;
            }
            for (m, what) in [(&t1, "tau1"), (&t2, "tau2")] {
                let d = linalg::max_abs(&(j.transpose() * m * &j - m));
                range(d <= tol.eps, format!("{what} must be of type (1,1)"))?;
            }
            range(
                linalg::max_abs(&(j.transpose() * &re * &j + &re)) <= tol.eps,
                "theta must be of type (2,0)",
            )?;
            let im = j.transpose() * &re;
            let scale = [&t1, &t2, &re].iter().map(|m| linalg::max_abs(m)).fold(0.0, f64::max);
            range(scale > tol.eps, "tau1, tau2 and theta must not all vanish")?;
            let f = tensor::two_form_from_matrix;
            let rep = verify_rank_conditions(&f(&t1), &f(&t2), &f(&re), &f(&im), tol)?;
            if rep.identity_residual > tol.eps * scale.max(1.0).powi(2) {
                return Err(SktError::Hypothesis {
                    what: "tau1^2 + tau2^2 = theta^theta-bar".into(),
                    residual: rep.identity_residual,
                });
            }
            let (bx, bjx) = (&t1 + &re, &t2 - &im);
            for y in 0..u {
                for z in y + 1..u {
                    let mut v = vec![0.0; dim];
                    v[0] = bx[(y, z)];
                    v[1] = bjx[(y, z)];
                    l.set_bracket(2 + y, 2 + z, &v);
                }
            }
        }
    }
    HermitianStructure::standard(l)
}

fn elementary(u: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(u, u);
    m[(a, b)] = 1.0;
    m[(b, a)] = -1.0;
    m
}

/// Integral bases of Λ^{1,1} and of the real parts of Λ^{2,0} on ℝ⁴.
fn form_bases() -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
    let j = standard_j(2);
    let e = |a, b| elementary(4, a, b);
    let p11 = |m: DMatrix<f64>| &m + j.transpose() * &m * &j;
    let p20 = |m: DMatrix<f64>| &m - j.transpose() * &m * &j;
    let b11 = vec![p11(e(0, 1)) * 0.5, p11(e(2, 3)) * 0.5, p11(e(0, 2)), p11(e(0, 3))];
    let b20 = vec![p20(e(0, 2)), p20(e(0, 3))];
    (b11, b20)
}

/// Targets of the frozen six-dimensional case-(ii) witnesses.
pub const WITNESS_TARGETS: &[&str] = &["(0,0,0,0,12,14+23)", "(0,0,0,0,13+42,14+23)", "2h3"];

/// Search over integral combinations of the bases of Λ^{1,1} (for τ₁, τ₂) and of the real parts of
/// Λ^{2,0} (for θ) on ℝ⁴ (n = 3), by increasing L1 norm up to `max_norm`, for a case-(ii) instance
/// whose fingerprint matches `target`. The quadratic identity is prefiltered exactly on the
/// wedge-pairing Gram matrix.
pub fn search_2d_complex(target: &str, max_norm: usize, tol: Tol) -> Option<TwoDimComplex> {
    let (b11, b20) = form_bases();
    let j = standard_j(2);
    let forms: Vec<DMatrix<f64>> = b11
        .iter()
        .chain(&b20)
        .cloned()
        .chain(b20.iter().map(|r| j.transpose() * r))
        .collect();
    let vol = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        let w = tensor::wedge(&tensor::two_form_from_matrix(a), &tensor::two_form_from_matrix(b)).expect("2-forms");
        w.coeffs[0]
    };
    let gram = DMatrix::from_fn(8, 8, |i, k| vol(&forms[i], &forms[k]));
    let q = |c: &[i32], off: usize| -> f64 {
        (0..c.len())
            .flat_map(|i| (0..c.len()).map(move |k| (i, k)))
            .map(|(i, k)| c[i] as f64 * c[k] as f64 * gram[(off + i, off + k)])
            .sum()
    };
    let comb = |c: &[i32], basis: &[DMatrix<f64>]| {
        basis
            .iter()
            .zip(c)
            .fold(DMatrix::zeros(4, 4), |m, (b, &x)| m + b * x as f64)
    };
    let empty = Params::new();
    let mut c = vec![0i32; 10];
    for norm in 1..=max_norm {
        let mut found = None;
        each_with_norm(&mut c, 0, norm as i32, &mut |c| {
            let (t1, t2, th) = (&c[0..4], &c[4..8], &c[8..10]);
            let lhs = q(t1, 0) + q(t2, 0);
            let rhs = q(th, 4) + q(th, 6);
            if (lhs - rhs).abs() > 1e-9 {
                return false;
            }
            let p = TwoDimComplex::Nilpotent {
                n: 3,
                tau1: rows(&comb(t1, &b11)),
                tau2: rows(&comb(t2, &b11)),
                theta: rows(&comb(th, &b20)),
            };
            match gen_2d_complex(&p, tol) {
                Ok(h) if fingerprint_match(&h.algebra, target, &empty, tol) && skt_verdict(&h, tol).is_skt() => {
                    found = Some(p);
                    true
                }
                _ => false,
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Calls `visit` on every integer vector with `c[..start]` fixed and L1 norm of the rest equal to
/// `left`, stopping early when `visit` returns true.
fn each_with_norm(c: &mut [i32], start: usize, left: i32, visit: &mut dyn FnMut(&[i32]) -> bool) -> bool {
    if start == c.len() {
        return left == 0 && visit(c);
    }
    for mag in 0..=left {
        for sign in if mag == 0 { &[1][..] } else { &[1, -1][..] } {
            c[start] = sign * mag;
            if each_with_norm(c, start + 1, left - mag, visit) {
                return true;
            }
        }
    }
    c[start] = 0;
    false
}

/// Frozen output of [`search_2d_complex`] for each entry of [`WITNESS_TARGETS`].
pub fn witness_2d_complex(target: &str) -> Option<TwoDimComplex> {
    let (b11, b20) = form_bases();
    let z = DMatrix::<f64>::zeros(4, 4);
    let (t1, t2, th) = match target {
        "(0,0,0,0,12,14+23)" => (b11[3].clone(), &b11[0] + &b11[1] * 3.0, b20[1].clone()),
        "(0,0,0,0,13+42,14+23)" => (z, &b11[0] + &b11[1] * 2.0, b20[1].clone()),
        "2h3" => (b11[1].clone(), b11[0].clone(), z),
        _ => return None,
    };
    Some(TwoDimComplex::Nilpotent {
        n: 3,
        tau1: rows(&t1),
        tau2: rows(&t2),
        theta: rows(&th),
    })
}

/// The three six-dimensional variants with 𝔤' three-dimensional and not totally real.
/// Basis: Y, iY, X, JX, Z, JZ (unitary).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum SixDim3Comm {
    /// [JZ, Y] = ibY, [Z, JZ] = qY + hX.
    #[serde(rename = "i")]
    I { b: f64, h: f64, q: Cx },
    /// `h` defaults to (b₁² + b₂²)/a and must be given when a = 0.
    #[serde(rename = "ii")]
    Ii {
        a: f64,
        b1: f64,
        b2: f64,
        c: f64,
        c1: f64,
        c2: f64,
        u: f64,
        #[serde(default)]
        h: Option<f64>,
    },
    #[serde(rename = "iii")]
    Iii {
        a: f64,
        b2: f64,
        c: f64,
        c1: f64,
        c2: f64,
        u: f64,
    },
}

const Y: usize = 0;
const X: usize = 2;
const JX: usize = 3;
const Z: usize = 4;
const JZ: usize = 5;

struct Builder(LieAlgebra);

impl Builder {
    /// [P, Y] = cY extended complex linearly.
    fn on_y(&mut self, p: usize, c: Complex64) {
        self.0.set_bracket(p, Y, &[c.re, c.im, 0.0, 0.0, 0.0, 0.0]);
        let ic = c * Complex64::new(0.0, 1.0);
        self.0.set_bracket(p, Y + 1, &[ic.re, ic.im, 0.0, 0.0, 0.0, 0.0]);
    }

    /// [P, Q] = vY + xX.
    fn set(&mut self, p: usize, q: usize, v: Complex64, x: f64) {
        self.0.set_bracket(p, q, &[v.re, v.im, x, 0.0, 0.0, 0.0]);
    }
}

pub fn gen_6d_3comm(p: &SixDim3Comm, tol: Tol) -> Result<HermitianStructure> {
    let eps = tol.eps;
    let i = Complex64::new(0.0, 1.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut b = Builder(LieAlgebra::abelian(6));
    match *p {
        SixDim3Comm::I { b: bb, h, q } => {
            range(bb.abs() > eps && h.abs() > eps, "variant (i) needs b, h != 0")?;
            b.on_y(JZ, i * bb);
            b.set(Z, JZ, cx(q), h);
        }
        SixDim3Comm::Ii {
            a,
            b1,
            b2,
            c,
            c1,
            c2,
            u,
            h,
        } => {
            range(c.abs() > eps, "variant (ii) needs c != 0")?;
            range(a >= -eps && u >= -eps, "variant (ii) needs a, u >= 0")?;
            let h = match h {
                Some(h) => h,
                None if a > eps => (b1 * b1 + b2 * b2) / a,
                None => return Err(SktError::ParameterRange("variant (ii) needs h when a = 0".into())),
            };
            let scale = a.max(b1.abs()).max(b2.abs()).max(h.abs()).max(1.0);
            range(
                (h * a - b1 * b1 - b2 * b2).abs() <= eps * scale * scale,
                "variant (ii) needs h a = b1^2 + b2^2",
            )?;
            range(
                [a, b1, b2, h].iter().any(|x| x.abs() > eps),
                "variant (ii) needs one of a, b1, b2, h != 0",
            )?;
            let den = r(a) - i * c;
            let v1 = (r(b1) - i * c1) / den * u;
            let v2 = (r(b2) - i * c2) / den * u;
            let q = (i * c * h + c1 * c1 + c2 * c2) / (r(c * c) + i * (a * c)) * u;
            b.on_y(JX, i * c);
            b.on_y(Z, i * c1);
            b.on_y(JZ, i * c2);
            b.set(JX, X, r(u), a);
            b.set(Z, X, v1, b1);
            b.set(JZ, JX, v1, b1);
            b.set(JZ, X, v2, b2);
            b.set(Z, JX, -v2, -b2);
            b.set(Z, JZ, -q, -h);
        }
        SixDim3Comm::Iii { a, b2, c, c1, c2, u } => {
            range(a.abs() > eps, "variant (iii) needs a != 0")?;
            range(u >= -eps, "variant (iii) needs u >= 0")?;
            let h = b2 * b2 / a;
            let d1 = r(1.5 * a) - i * c;
            let half = r(a / 2.0) - i * c;
            let dd = half * half - r(a * a);
            assert!(d1.norm() > 0.0 && dd.norm() > 0.0, "denominators vanish only for a = 0");
            let q = (r((c1 - b2) * c1 + 2.25 * b2 * b2 + c2 * c2) - h * d1) / ((r(a / 2.0) + i * c) * d1) * u;
            b.on_y(JX, r(-a / 2.0) + i * c);
            b.on_y(Z, i * c1);
            b.on_y(JZ, r(-b2 / 2.0) + i * c2);
            b.set(JX, X, r(u), a);
            b.set(Z, X, -(i * c1 / d1) * u, 0.0);
            b.set(JZ, X, (r(1.5 * b2) - i * c2) / d1 * u, b2);
            b.set(Z, JZ, -q, -h);
            let t = r(b2 / 2.0) - i * c2;
            b.set(Z, JX, -((half * t - r(a * (b2 - c1))) / dd) * u, -b2);
            b.set(JZ, JX, i * ((half * (b2 - c1) - r(a) * t) / dd) * u, 0.0);
        }
    }
    HermitianStructure::standard(b.0)
}

/// A₁ = ad(Y₁)|_𝔞, A₂ = ad(JY₁)|_𝔞 on 𝔞 = ℝ⁴ with the standard J, and x = [Y₁, JY₁] ∈ 𝔞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourDimPair {
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
    #[serde(default)]
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourDimReport {
    /// ‖[A₁, A₂]‖.
    pub commutator: f64,
    /// ‖A₂^{J−} − J A₁^{J−}‖.
    pub j_relation: f64,
    /// ‖Σ JAᵀA + AᵀAJ + AJA + AᵀJAᵀ‖.
    pub quadratic: f64,
    /// max of the two equations of the ± split.
    pub split: f64,
    /// ‖quadratic sum − 2J(E₁ + E₂)‖: consistency of the two formulations.
    pub agreement: f64,
    pub pass: bool,
    pub verdict: Option<Verdict>,
    #[serde(skip)]
    pub structure: Option<HermitianStructure>,
}

impl FourDimReport {
    pub fn max_residual(&self) -> f64 {
        self.commutator.max(self.j_relation).max(self.quadratic).max(self.split)
    }
}

fn comm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn quadratic_sum(a: &[DMatrix<f64>; 2], j: &DMatrix<f64>) -> DMatrix<f64> {
    a.iter().fold(DMatrix::zeros(4, 4), |acc, m| {
        let t = m.transpose();
        acc + j * &t * m + &t * m * j + m * j * m + &t * j * &t
    })
}

/// The two split equations: E₁ (J-anti-linear part) and E₂ (J-linear part).
fn split_sums(a: &[DMatrix<f64>; 2], j: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut e1 = DMatrix::zeros(4, 4);
    let mut e2 = DMatrix::zeros(4, 4);
    for m in a {
        let jl = (m - j * m * j) * 0.5;
        let ja = (m + j * m * j) * 0.5;
        let sym = |x: &DMatrix<f64>| (x + x.transpose()) * 0.5;
        let asym = |x: &DMatrix<f64>| (x - x.transpose()) * 0.5;
        let (p, q, r, s) = (sym(&jl), asym(&jl), sym(&ja), asym(&ja));
        e1 += comm(&p, &r) - comm(&s, &q);
        e2 += comm(&p, &s) - comm(&s, &p) + &p * &p * 2.0 - &s * &s * 2.0;
    }
    (e1, e2)
}

fn assemble(a: &[DMatrix<f64>; 2], x: &[f64]) -> LieAlgebra {
    let mut l = LieAlgebra::abelian(6);
    for (k, m) in a.iter().enumerate() {
        for c in 0..4 {
            let mut v = vec![0.0; 6];
            for r in 0..4 {
                v[2 + r] = m[(r, c)];
            }
            l.set_bracket(k, 2 + c, &v);
        }
    }
    let mut v = vec![0.0; 6];
    for (r, &t) in x.iter().enumerate().take(4) {
        v[2 + r] = t;
    }
    l.set_bracket(0, 1, &v);
    l
}

pub fn check_4d_complex_pair(p: &FourDimPair, tol: Tol) -> FourDimReport {
    let j = standard_j(2);
    let bad = FourDimReport {
        commutator: f64::INFINITY,
        j_relation: f64::INFINITY,
        quadratic: f64::INFINITY,
        split: f64::INFINITY,
        agreement: f64::INFINITY,
        pass: false,
        verdict: None,
        structure: None,
    };
    let (a1, a2) = match (matrix(&p.a1, 4, "a1"), matrix(&p.a2, 4, "a2")) {
        (Ok(a1), Ok(a2)) if p.x.is_empty() || p.x.len() == 4 => (a1, a2),
        _ => return bad,
    };
    let a = [a1, a2];
    let anti = |m: &DMatrix<f64>| (m + &j * m * &j) * 0.5;
    let q = quadratic_sum(&a, &j);
    let (e1, e2) = split_sums(&a, &j);
    let scale = a.iter().map(linalg::max_abs).fold(1.0, f64::max);
    let mut r = FourDimReport {
        commutator: linalg::max_abs(&comm(&a[0], &a[1])),
        j_relation: linalg::max_abs(&(anti(&a[1]) - &j * anti(&a[0]))),
        quadratic: linalg::max_abs(&q),
        split: linalg::max_abs(&e1).max(linalg::max_abs(&e2)),
        agreement: linalg::max_abs(&(&q - &j * (&e1 + &e2) * 2.0)),
        ..bad
    };
    let eps = tol.eps * scale * scale;
    r.pass = r.commutator <= eps && r.j_relation <= tol.eps * scale && r.quadratic <= eps && r.split <= eps;
    if r.pass {
        if let Ok(h) = HermitianStructure::standard(assemble(&a, &p.x)) {
            let v = skt_verdict(&h, tol);
            r.pass = v.is_skt();
            r.verdict = Some(v);
            r.structure = Some(h);
        }
    }
    r
}

fn residual_vector(x: &DVector<f64>, j: &DMatrix<f64>) -> DVector<f64> {
    let a1 = DMatrix::from_column_slice(4, 4, &x.as_slice()[..16]);
    let a2 = DMatrix::from_column_slice(4, 4, &x.as_slice()[16..]);
    let anti = |m: &DMatrix<f64>| (m + j * m * j) * 0.5;
    let c = comm(&a1, &a2);
    let rel = anti(&a2) - j * anti(&a1);
    let q = quadratic_sum(&[a1, a2], j);
    DVector::from_iterator(48, c.iter().chain(rel.iter()).chain(q.iter()).cloned())
}

/// Random search for solutions of the pair equations: Gauss–Newton projection of random
/// starts, keeping converged pairs that assemble to an SKT algebra. Not exhaustive.
pub fn search_4d_pairs(samples: usize, seed: u64, tol: Tol) -> Vec<(FourDimPair, FourDimReport)> {
    let j = standard_j(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..samples {
        let mut x = DVector::from_fn(32, |_, _| rng.gen_range(-1.0..1.0));
        for _ in 0..200 {
            let f = residual_vector(&x, &j);
            if f.amax() < 1e-14 {
                break;
            }
            let d = 1e-5;
            let mut jac = DMatrix::zeros(48, 32);
            for c in 0..32 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[c] += d;
                xm[c] -= d;
                jac.set_column(c, &((residual_vector(&xp, &j) - residual_vector(&xm, &j)) / (2.0 * d)));
            }
            x -= linalg::lstsq(&jac, &f, 1e-12);
        }
        let m = |k: usize| rows(&DMatrix::from_column_slice(4, 4, &x.as_slice()[16 * k..16 * (k + 1)]));
        let xv: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pair = FourDimPair {
            a1: m(0),
            a2: m(1),
            x: xv,
        };
        let rep = check_4d_complex_pair(&pair, tol);
        if rep.pass {
            out.push((pair, rep));
        }
    }
    out
}
