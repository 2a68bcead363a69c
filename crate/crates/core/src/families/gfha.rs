//! The algebras 𝔤_{f,h,α} on 𝔞_J ⊕ 𝔞_r ⊕ I₀𝔞_r and the codimension-two family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cx, range, Cx};
use crate::error::{Result, SktError};
use crate::hermitian::HermitianStructure;
use crate::lie::LieAlgebra;
use crate::Tol;

/// Defining data with g₀ = δ and τ₀ = 0. Basis order: Y₁, iY₁, …, Y_m, iY_m, X₁, I₀X₁, …, X_k, I₀X_k,
/// so that I is the standard complex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Gfha {
    pub m: usize,
    pub k: usize,
    /// f[p][q] = f(X_p, X_q) ∈ ℝᵏ.
    pub f: Vec<Vec<Vec<f64>>>,
    /// h[p][q][i] = hⁱ(X_p, X_q).
    pub h: Vec<Vec<Vec<Complex64>>>,
    /// alpha[i][p] = α_i(X_p).
    pub alpha: Vec<Vec<Complex64>>,
}

impl Gfha {
    pub fn zero(m: usize, k: usize) -> Self {
        Gfha {
            m,
            k,
            f: vec![vec![vec![0.0; k]; k]; k],
            h: vec![vec![vec![Complex64::new(0.0, 0.0); m]; k]; k],
            alpha: vec![vec![Complex64::new(0.0, 0.0); k]; m],
        }
    }

    pub fn dim(&self) -> usize {
        2 * (self.m + self.k)
    }

    fn x(&self, p: usize) -> usize {
        2 * self.m + 2 * p
    }

    fn put_y(&self, v: &mut [f64], i: usize, c: Complex64) {
        v[2 * i] += c.re;
        v[2 * i + 1] += c.im;
    }

    pub fn algebra(&self) -> LieAlgebra {
        let n = self.dim();
        let mut l = LieAlgebra::abelian(n);
        let i_unit = Complex64::new(0.0, 1.0);
        for p in 0..self.k {
            let jx = self.x(p) + 1;
            for i in 0..self.m {
                let a = self.alpha[i][p];
                let mut v = vec![0.0; n];
                self.put_y(&mut v, i, a);
                l.set_bracket(jx, 2 * i, &v);
                let mut v = vec![0.0; n];
                self.put_y(&mut v, i, i_unit * a);
                l.set_bracket(jx, 2 * i + 1, &v);
            }
            for q in 0..self.k {
                let mut v = vec![0.0; n];
                for (s, &c) in self.f[p][q].iter().enumerate() {
                    v[self.x(s)] += c;
                }
                for i in 0..self.m {
                    self.put_y(&mut v, i, self.h[p][q][i]);
                }
                l.set_bracket(jx, self.x(q), &v);
                if p < q {
                    let mut v = vec![0.0; n];
                    for i in 0..self.m {
                        self.put_y(&mut v, i, i_unit * (self.h[p][q][i] - self.h[q][p][i]));
                    }
                    l.set_bracket(jx, self.x(q) + 1, &v);
                }
            }
        }
        l
    }

    pub fn structure(&self) -> Result<HermitianStructure> {
        HermitianStructure::standard(self.algebra())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Codim2Case {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
    #[serde(rename = "iii")]
    Iii,
}

/// One complex direction Y_i: α_i(X₁) = z, α_i(X₂) = w. `seed` is hⁱ(X₁,X₁) in cases (i), (iii)
/// and hⁱ(X₁,X₂) in case (ii); the remaining values of hⁱ follow from the case formulas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codim2Entry {
    pub case: Codim2Case,
    pub z: Cx,
    pub w: Cx,
    #[serde(default)]
    pub seed: Cx,
}

impl Codim2Entry {
    /// Case (iii) entry with Re w the chosen root of 2x² + b₂x − b₁a/2 = 0 (`plus` picks the larger).
    pub fn case_iii(a: f64, b1: f64, b2: f64, plus: bool, z_im: f64, w_im: f64, seed: Cx) -> Result<Self> {
        let disc = b2 * b2 + 4.0 * a * b1;
        range(disc >= 0.0, "case (iii) requires b1 >= -b2^2/(4a)")?;
        let s = if plus { 1.0 } else { -1.0 };
        Ok(Codim2Entry {
            case: Codim2Case::Iii,
            z: [-a / 2.0, z_im],
            w: [(-b2 + s * disc.sqrt()) / 4.0, w_im],
            seed,
        })
    }
}

/// Codimension-two non-complex commutator: f(X₁,X_j) = aX_j, f(X₂,X₂) = b₁X₁ + b₂X₂.
/// `b1 = None` means b₁ = a, which requires h ≡ 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codim2 {
    pub n: usize,
    pub a: f64,
    #[serde(default)]
    pub b1: Option<f64>,
    pub b2: f64,
    pub entries: Vec<Codim2Entry>,
}

/// hⁱ(X_p, X_q) for p, q ∈ {1, 2}, indexed [p][q].
pub(crate) fn h_values(e: &Codim2Entry, a: f64, b1: f64, b2: f64) -> [[Complex64; 2]; 2] {
    let (z, w, s) = (cx(e.z), cx(e.w), cx(e.seed));
    let zero = Complex64::new(0.0, 0.0);
    match e.case {
        Codim2Case::I => {
            let h12 = w / z * s;
            let h22 = (w * w - b2 * w - b1 * z) / (z * (z - a)) * s;
            [[s, h12], [h12, h22]]
        }
        Codim2Case::Ii => [[zero, s], [s, (b2 - w) / a * s]],
        Codim2Case::Iii => {
            let d = z.norm_sqr() - a * z.conj();
            let h12 = w.conj() / z.conj() * s;
            let h21 = (w * z.conj() - a * w.conj()) / d * s;
            let h22 = (w.norm_sqr() - b1 * z.conj() - b2 * w.conj()) / d * s;
            [[s, h12], [h21, h22]]
        }
    }
}

/// 2a(a − b₁) + ‖h(X₁,X₂) − h(X₂,X₁)‖² + ‖h(X₁,X₂)‖² + ‖h(X₂,X₁)‖² − 2g(h(X₁,X₁), h(X₂,X₂)),
/// the single component of dc on Λ²𝔞_r∧Λ²U_r up to a positive factor.
pub(crate) fn constraint(a: f64, b1: f64, hs: &[[[Complex64; 2]; 2]]) -> f64 {
    let mut t = 2.0 * a * (a - b1);
    for h in hs {
        t += (h[0][1] - h[1][0]).norm_sqr() + h[0][1].norm_sqr() + h[1][0].norm_sqr();
        t -= 2.0 * (h[0][0] * h[1][1].conj()).re;
    }
    t
}

impl Codim2 {
    /// Quadratic part Q of the constraint for the current seeds, so that scaling all seeds by t
    /// gives 2a(a − b₁) + t²Q.
    pub fn seed_quadratic(&self, b1: f64) -> f64 {
        let hs: Vec<_> = self.entries.iter().map(|e| h_values(e, self.a, b1, self.b2)).collect();
        constraint(self.a, self.a, &hs)
    }

    fn validate(&self, tol: Tol) -> Result<f64> {
        let (a, b2, eps) = (self.a, self.b2, tol.eps);
        range(self.n >= 2, "n >= 2")?;
        range(
            self.entries.len() == self.n - 2,
            format!("expected {} entries", self.n - 2),
        )?;
        range(a > 0.0, "a > 0")?;
        range(b2 >= -eps, "b2 >= 0")?;
        let seeded = self.entries.iter().any(|e| cx(e.seed).norm() > 0.0);
        let b1 = match self.b1 {
            Some(b) => b,
            None if !seeded => a,
            None => return Err(SktError::ParameterRange("b1 must be given when h is non-zero".into())),
        };
        let scale = a.max(b1.abs()).max(b2).max(1.0);
        for (i, e) in self.entries.iter().enumerate() {
            let (z, w) = (cx(e.z), cx(e.w));
            let at = |msg: &str| format!("entry {i}: {msg}");
            match e.case {
                Codim2Case::I => {
                    range(
                        z.re.abs() <= eps && w.re.abs() <= eps,
                        at("case (i) needs Re z = Re w = 0"),
                    )?;
                    range(z.norm() > eps, at("case (i) needs z != 0"))?;
                }
                Codim2Case::Ii => {
                    range(
                        z.norm() <= eps && w.re.abs() <= eps,
                        at("case (ii) needs z = 0 and Re w = 0"),
                    )?;
                    range(w.norm() > eps, at("case (ii) needs w != 0"))?;
                }
                Codim2Case::Iii => {
                    range(
                        b1 >= -b2 * b2 / (4.0 * a) - eps,
                        at("case (iii) requires b1 >= -b2^2/(4a)"),
                    )?;
                    range(
                        (z.re + a / 2.0).abs() <= eps * scale,
                        at("case (iii) needs Re z = -a/2"),
                    )?;
                    let q = 2.0 * w.re * w.re + b2 * w.re - b1 * a / 2.0;
                    range(
                        q.abs() <= eps * scale * scale,
                        at("case (iii) needs 2 Re(w)^2 + b2 Re(w) - b1 a/2 = 0"),
                    )?;
                }
            }
        }
        Ok(b1)
    }

    pub fn gfha(&self, tol: Tol) -> Result<Gfha> {
        let b1 = self.validate(tol)?;
        let (a, b2) = (self.a, self.b2);
        let hs: Vec<_> = self.entries.iter().map(|e| h_values(e, a, b1, b2)).collect();
        let c = constraint(a, b1, &hs);
        let hmax = hs.iter().flatten().flatten().fold(0.0f64, |m, z| m.max(z.norm()));
        let scale = a.max(b1.abs()).max(b2).max(hmax).max(1.0);
        if c.abs() > tol.eps * scale * scale {
            return Err(SktError::Hypothesis {
                what: "codim-2 scalar constraint".into(),
                residual: c.abs(),
            });
        }
        let m = self.n - 2;
        let mut d = Gfha::zero(m, 2);
        d.f[0][0] = vec![a, 0.0];
        d.f[0][1] = vec![0.0, a];
        d.f[1][0] = vec![0.0, a];
        d.f[1][1] = vec![b1, b2];
        for (i, e) in self.entries.iter().enumerate() {
            d.alpha[i] = vec![cx(e.z), cx(e.w)];
            for p in 0..2 {
                for q in 0..2 {
                    d.h[p][q][i] = hs[i][p][q];
                }
            }
        }
        Ok(d)
    }
}

pub fn gen_codim2(p: &Codim2, tol: Tol) -> Result<HermitianStructure> {
    p.gfha(tol)?.structure()
}
