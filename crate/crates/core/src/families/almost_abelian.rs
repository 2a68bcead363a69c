//! Almost Abelian SKT algebras and the admissibility test for ℝ^{2n−1} ⋊_f ℝ.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gfha::Gfha;
use super::{cx, range, Cx};
use crate::error::Result;
use crate::hermitian::HermitianStructure;
use crate::linalg::{self, CMatrix};
use crate::shear::PreShearData;
use crate::tensor;
use crate::Tol;

/// [JX, Y_i] = z_i Y_i, [JX, X] = aX + Σ w_i Y_i on ℝ²ⁿ; requires Re z_i ∈ {0, −a/2}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostAbelian {
    pub n: usize,
    pub a: f64,
    pub z: Vec<Cx>,
    #[serde(default)]
    pub w: Vec<Cx>,
}

impl AlmostAbelian {
    /// Normal form with z_j = −a/2 + i b_j for j < m and z_k = i b_k otherwise.
    pub fn from_split(a: f64, m: usize, b: &[f64], w: Vec<Cx>) -> Self {
        let z = b
            .iter()
            .enumerate()
            .map(|(j, &bj)| [if j < m { -a / 2.0 } else { 0.0 }, bj])
            .collect();
        AlmostAbelian {
            n: b.len() + 1,
            a,
            z,
            w,
        }
    }

    fn w_at(&self, i: usize) -> Complex64 {
        self.w.get(i).map(|&v| cx(v)).unwrap_or_default()
    }

    fn validate(&self, tol: Tol) -> Result<()> {
        range(self.n >= 1, "n >= 1")?;
        range(
            self.z.len() == self.n - 1,
            format!("z must have {} entries", self.n - 1),
        )?;
        range(self.w.len() < self.n, format!("w has more than {} entries", self.n - 1))?;
        let scale = self.a.abs().max(1.0);
        for (i, z) in self.z.iter().enumerate() {
            let ok = z[0].abs() <= tol.eps * scale || (z[0] + self.a / 2.0).abs() <= tol.eps * scale;
            range(ok, format!("Re(z_{}) = {} is not in {{0, -a/2}}", i + 1, z[0]))?;
        }
        Ok(())
    }

    pub fn gfha(&self, tol: Tol) -> Result<Gfha> {
        self.validate(tol)?;
        let mut d = Gfha::zero(self.n - 1, 1);
        d.f[0][0] = vec![self.a];
        for i in 0..self.n - 1 {
            d.h[0][0][i] = self.w_at(i);
            d.alpha[i][0] = cx(self.z[i]);
        }
        Ok(d)
    }
}

pub fn gen_almost_abelian(p: &AlmostAbelian, tol: Tol) -> Result<HermitianStructure> {
    p.gfha(tol)?.structure()
}

/// The shear data (𝔞 = JX^⊥, ω) whose shear is the almost Abelian member up to −id:
/// ω(JX, Y) = −α(X)Y on 𝔞_J and ω(JX, X) = −(aX + h(X,X)). Same basis as the generator.
pub fn almost_abelian_shear_data(p: &AlmostAbelian, tol: Tol) -> Result<PreShearData> {
    p.validate(tol)?;
    let dim = 2 * p.n;
    let (x, jx) = (dim - 2, dim - 1);
    let omega = |i: usize, k: usize| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        let (sign, other) = if i == jx {
            (1.0, k)
        } else if k == jx {
            (-1.0, i)
        } else {
            return v;
        };
        if other == x {
            v[x] = -sign * p.a;
            for t in 0..p.n - 1 {
                let w = p.w_at(t);
                v[2 * t] -= sign * w.re;
                v[2 * t + 1] -= sign * w.im;
            }
        } else if other < x {
            let t = other / 2;
            let z = cx(p.z[t]);
            // Y ↦ zY, iY ↦ izY.
            let c = if other % 2 == 0 {
                z
            } else {
                z * Complex64::new(0.0, 1.0)
            };
            v[2 * t] = -sign * c.re;
            v[2 * t + 1] = -sign * c.im;
        }
        v
    };
    let basis = DMatrix::from_fn(dim, dim - 1, |r, c| if r == c { 1.0 } else { 0.0 });
    let s = tensor::standard_structure(p.n);
    PreShearData::new(&basis, omega, s.g, s.j, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibleCase {
    /// Complex-diagonalizable with a real eigenvalue a and pairs Re z ∈ {0, −a/2}.
    #[serde(rename = "i")]
    Diagonalizable,
    /// One nilpotent Jordan block of size 2, all other eigenvalues imaginary and semisimple.
    #[serde(rename = "ii")]
    Jordan,
}

/// Verdict of the admissibility test with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub admissible: bool,
    pub case: Option<AdmissibleCase>,
    /// The distinguished real eigenvalue in case (i).
    pub a: Option<f64>,
    pub eigenvalues: Vec<Cx>,
    pub pairs: Vec<(Cx, Cx)>,
    pub reason: String,
}

struct Cluster {
    center: Complex64,
    alg: usize,
    geo: usize,
}

fn clusters(ev: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut left: Vec<Complex64> = ev.to_vec();
    while let Some(seed) = left.pop() {
        let mut g = vec![seed];
        let mut grew = true;
        while grew {
            grew = false;
            let mut i = 0;
            while i < left.len() {
                if g.iter().any(|c| (c - left[i]).norm() <= radius) {
                    g.push(left.swap_remove(i));
                    grew = true;
                } else {
                    i += 1;
                }
            }
        }
        groups.push(g);
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len()))
        .collect()
}

fn nullity(m: &CMatrix, t: f64) -> usize {
    linalg::svd(m).s.iter().filter(|&&s| s <= t).count()
}

/// Decides whether ℝ^{2n−1} ⋊_f ℝ admits an SKT structure (f is (2n−1)×(2n−1)).
pub fn decide_almost_abelian(f: &DMatrix<f64>, tol: Tol) -> Decision {
    let mut d = Decision {
        admissible: false,
        case: None,
        a: None,
        eigenvalues: Vec::new(),
        pairs: Vec::new(),
        reason: String::new(),
    };
    let dim = f.nrows();
    if f.ncols() != dim || dim.is_multiple_of(2) {
        d.reason = format!("inadmissible: f must be square of odd size, got {}x{}", dim, f.ncols());
        return d;
    }
    let scale = linalg::max_abs(f).max(f64::MIN_POSITIVE);
    let radius = (10.0 * tol.sqrt_eps()).max(1e-6) * scale;
    let ev: Vec<Complex64> = f.complex_eigenvalues().iter().cloned().collect();
    d.eigenvalues = ev.iter().map(|z| [z.re, z.im]).collect();
    let fc = linalg::to_complex(f);
    let id = CMatrix::identity(dim, dim);
    let cl: Vec<Cluster> = clusters(&ev, radius)
        .into_iter()
        .map(|(center, alg)| {
            let geo = nullity(&(&fc - &id * center), radius).min(alg);
            Cluster { center, alg, geo }
        })
        .collect();
    let is_real = |z: Complex64| z.im.abs() <= radius;
    let diagonalizable = cl.iter().all(|c| c.geo == c.alg);

    if diagonalizable {
        let mut best_failure = String::new();
        for cand in cl.iter().filter(|c| is_real(c.center)) {
            let a = cand.center.re;
            let ok_re = |z: Complex64| z.re.abs() <= radius || (z.re + a / 2.0).abs() <= radius;
            let mut pairs = Vec::new();
            let mut bad = None;
            for c in &cl {
                let mult = if std::ptr::eq(c, cand) { c.alg - 1 } else { c.alg };
                if mult == 0 {
                    continue;
                }
                if !ok_re(c.center) {
                    bad = Some(format!(
                        "Re = {:.6} not in {{0, {:.6}}} for a = {:.6}",
                        c.center.re,
                        -a / 2.0,
                        a
                    ));
                    break;
                }
                if is_real(c.center) {
                    if mult % 2 != 0 {
                        bad = Some(format!("real eigenvalue {:.6} cannot be paired", c.center.re));
                        break;
                    }
                    let z = [c.center.re, 0.0];
                    pairs.extend(std::iter::repeat_n((z, z), mult / 2));
                } else if c.center.im > 0.0 {
                    let z = [c.center.re, c.center.im];
                    pairs.extend(std::iter::repeat_n((z, [z[0], -z[1]]), mult));
                }
            }
            match bad {
                None => {
                    d.admissible = true;
                    d.case = Some(AdmissibleCase::Diagonalizable);
                    d.a = Some(a);
                    d.pairs = pairs;
                    d.reason = format!("admissible: case (i), a = {a:.6}");
                    return d;
                }
                Some(why) => best_failure = why,
            }
        }
        if best_failure.is_empty() {
            best_failure = "no real eigenvalue".into();
        }
        d.reason = format!("inadmissible: eigenvalue real parts ({best_failure})");
        return d;
    }

    // Case (ii): one Jordan block of size 2 at 0, everything else semisimple and imaginary.
    let zero = cl.iter().find(|c| c.center.norm() <= radius);
    let jordan_ok = match zero {
        Some(c) => {
            let f2 = &fc * &fc;
            c.alg >= 3 && c.geo == c.alg - 1 && nullity(&f2, radius * scale) >= c.alg
        }
        None => false,
    };
    let others_semisimple = cl.iter().filter(|c| c.center.norm() > radius).all(|c| c.geo == c.alg);
    if !jordan_ok || !others_semisimple {
        let detail: Vec<String> = cl
            .iter()
            .filter(|c| c.geo != c.alg)
            .map(|c| {
                format!(
                    "{:.4}{:+.4}i: algebraic {} geometric {}",
                    c.center.re, c.center.im, c.alg, c.geo
                )
            })
            .collect();
        d.reason = format!(
            "inadmissible: Jordan structure (need exactly one size-2 block at eigenvalue 0; {})",
            detail.join("; ")
        );
        return d;
    }
    if let Some(c) = cl.iter().find(|c| c.center.re.abs() > radius) {
        d.reason = format!(
            "inadmissible: eigenvalue real parts (Re = {:.6} with a nilpotent Jordan block)",
            c.center.re
        );
        return d;
    }
    d.admissible = true;
    d.case = Some(AdmissibleCase::Jordan);
    for c in cl.iter().filter(|c| c.center.im > radius) {
        let z = [0.0, c.center.im];
        d.pairs.extend(std::iter::repeat_n((z, [0.0, -z[1]]), c.alg));
    }
    d.reason = "admissible: case (ii), nilpotent Jordan block of size 2".into();
    d
}
