//! Seeded random shear data for property tests and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{complex_to_realified, decompose, integrability_defect, PreShearData, ShearDecomposition};
use crate::error::Result;
use crate::lie::LieAlgebra;
use crate::linalg::{self, CMatrix};
use crate::tensor::{self, Subspace};
use crate::Tol;

/// Random 2m×2m orthogonal matrix commuting with the standard J.
pub fn random_unitary(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let z = CMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    complex_to_realified(&z.qr().q())
}

/// Basis of 𝔞 = 𝔞_J ⊕ 𝔞_r with dim 𝔞_J = 2·mj and dim 𝔞_r = r in random unitary position.
pub fn adapted_subspace(n: usize, mj: usize, r: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    assert!(mj + r <= n, "mj + r must not exceed n");
    let q = random_unitary(n, rng);
    let cols: Vec<usize> = (0..2 * mj).chain((mj..mj + r).map(|k| 2 * k)).collect();
    DMatrix::from_fn(2 * n, cols.len(), |i, c| q[(i, cols[c])])
}

/// Ambient orthonormal basis [𝔞 | 𝔞^⊥] and the number of 𝔞 columns.
fn adapted_frame(a: &Subspace) -> (DMatrix<f64>, usize) {
    let c = a.complement(1e-9);
    let k = a.dim();
    let n = a.ambient();
    let mut b = DMatrix::zeros(n, n);
    b.view_mut((0, 0), (n, k)).copy_from(a.basis());
    b.view_mut((0, k), (n, n - k)).copy_from(c.basis());
    (b, k)
}

/// Turns values on frame pairs into ambient structure constants.
fn from_frame(b: &DMatrix<f64>, g: &DMatrix<f64>, vals: &[(usize, usize, Vec<f64>)]) -> LieAlgebra {
    let n = b.nrows();
    let coords = b.transpose() * g;
    LieAlgebra::from_brackets(n, |i, k| {
        let mut out = vec![0.0; n];
        for (p, q, v) in vals {
            let w = coords[(*p, i)] * coords[(*q, k)] - coords[(*q, i)] * coords[(*p, k)];
            if w != 0.0 {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += w * x;
                }
            }
        }
        out
    })
}

/// Which frame pairs may carry ω: `omega0` allows 𝔞×U, `omega1` allows U×U.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slots {
    pub omega0: bool,
    pub omega1: bool,
}

impl Slots {
    pub const ALL: Slots = Slots {
        omega0: true,
        omega1: true,
    };
    pub const NILPOTENT: Slots = Slots {
        omega0: false,
        omega1: true,
    };
}

fn pairs(n: usize, k: usize, slots: Slots) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let mixed = p < k && q >= k;
            let upper = p >= k;
            if (mixed && slots.omega0) || (upper && slots.omega1) {
                out.push((p, q));
            }
        }
    }
    out
}

/// ω with coefficients uniform in [−1, 1] on the allowed pairs, values in 𝔞.
pub fn random_omega(a: &Subspace, slots: Slots, rng: &mut impl Rng) -> LieAlgebra {
    let (b, k) = adapted_frame(a);
    let vals: Vec<(usize, usize, Vec<f64>)> = pairs(b.nrows(), k, slots)
        .into_iter()
        .map(|(p, q)| {
            let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = a.basis() * nalgebra::DVector::from_vec(c);
            (p, q, v.iter().cloned().collect())
        })
        .collect();
    from_frame(&b, a.metric(), &vals)
}

/// Random ω on the allowed pairs solving the (linear) integrability equation.
pub fn integrable_omega(data: &PreShearData, slots: Slots, rng: &mut impl Rng) -> LieAlgebra {
    let (b, k) = adapted_frame(&data.a);
    let n = b.nrows();
    let ps = pairs(n, k, slots);
    let mut generators = Vec::new();
    for &(p, q) in &ps {
        for s in 0..k {
            generators.push(from_frame(&b, &data.g, &[(p, q, data.a.vector(s))]));
        }
    }
    if generators.is_empty() {
        return LieAlgebra::abelian(n);
    }
    let rows = n * (n - 1) / 2 * n;
    let mut m = DMatrix::zeros(rows, generators.len());
    for (c, w) in generators.iter().enumerate() {
        let d = data.with_omega(w.clone());
        let mut r = 0;
        for i in 0..n {
            for j in i + 1..n {
                let e = integrability_defect(&d, &unit(n, i), &unit(n, j));
                for x in e {
                    m[(r, c)] = x;
                    r += 1;
                }
            }
        }
    }
    let ns = linalg::null_space(&m, 1e-10);
    let mut out = LieAlgebra::abelian(n);
    for c in 0..ns.ncols() {
        let t: f64 = rng.gen_range(-1.0..1.0);
        for (gi, w) in generators.iter().enumerate() {
            let coeff = t * ns[(gi, c)];
            if coeff != 0.0 {
                out = add_scaled(&out, w, coeff);
            }
        }
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn add_scaled(a: &LieAlgebra, b: &LieAlgebra, s: f64) -> LieAlgebra {
    let n = a.dim();
    LieAlgebra::from_brackets(n, |i, k| {
        a.bracket_basis(i, k)
            .iter()
            .zip(b.bracket_basis(i, k))
            .map(|(x, y)| x + s * y)
            .collect()
    })
}

/// Slot of a decomposition, for targeted perturbations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    AJ,
    AR,
    UJ,
    UR,
}

/// Adds size·(u*∧v*)⊗w with u ∈ S, v ∈ T, w ∈ 𝔞_c, where u* = g(u, P_S ·) only sees the S-component;
/// `None` if the slots are too small.
pub fn inject(
    data: &PreShearData,
    dec: &ShearDecomposition,
    s: Slot,
    t: Slot,
    c: super::Part,
    size: f64,
    rng: &mut impl Rng,
) -> Option<PreShearData> {
    let pick = |sl: Slot| match sl {
        Slot::AJ => (&dec.a_j, dec.pa(super::Part::J)),
        Slot::AR => (&dec.a_r, dec.pa(super::Part::R)),
        Slot::UJ => (&dec.u_j, dec.pu(super::Part::J)),
        Slot::UR => (&dec.u_r, dec.pu(super::Part::R)),
    };
    let ((ss, ps), (ts, pt)) = (pick(s), pick(t));
    let cs = match c {
        super::Part::J => &dec.a_j,
        super::Part::R => &dec.a_r,
    };
    if matches!((s, t), (Slot::AJ | Slot::AR, Slot::AJ | Slot::AR)) || cs.dim() == 0 || ss.dim() == 0 || ts.dim() == 0 {
        return None;
    }
    let (u, v) = if s == t {
        if ss.dim() < 2 {
            return None;
        }
        let i = rng.gen_range(0..ss.dim());
        let j = (i + rng.gen_range(1..ss.dim())) % ss.dim();
        (ss.vector(i), ss.vector(j))
    } else {
        (
            ss.vector(rng.gen_range(0..ss.dim())),
            ts.vector(rng.gen_range(0..ts.dim())),
        )
    };
    let w = cs.vector(rng.gen_range(0..cs.dim()));
    let n = data.dim();
    let gu = ps.transpose() * &data.g * nalgebra::DVector::from_vec(u);
    let gv = pt.transpose() * &data.g * nalgebra::DVector::from_vec(v);
    let delta = LieAlgebra::from_brackets(n, |i, k| {
        let f = size * (gu[i] * gv[k] - gu[k] * gv[i]);
        w.iter().map(|x| f * x).collect()
    });
    Some(data.with_omega(add_scaled(data.bracket(), &delta, 1.0)))
}

/// Random (𝔞_J, 𝔞_r) dimensions with 𝔞 ≠ 0 and mj + r ≤ n.
pub fn random_dims(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    loop {
        let mj = rng.gen_range(0..=n);
        let r = rng.gen_range(0..=n - mj);
        if mj + r > 0 && (mj + r < n || r == 0 || rng.gen_bool(0.3)) {
            return (mj, r);
        }
    }
}

/// Kind of draw used by the integrability-equivalence property.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrawKind {
    Generic,
    Integrable,
    Perturbed,
}

/// One random pre-shear data set on ℝ²ⁿ with standard (g, J).
pub fn draw(n: usize, kind: DrawKind, rng: &mut impl Rng, tol: Tol) -> Result<PreShearData> {
    let (mj, r) = random_dims(n, rng);
    let basis = adapted_subspace(n, mj, r, rng);
    let s = tensor::standard_structure(n);
    let zero = PreShearData::new(&basis, |_, _| vec![0.0; 2 * n], s.g, s.j, tol)?;
    let w = match kind {
        DrawKind::Generic => random_omega(&zero.a, Slots::ALL, rng),
        _ => integrable_omega(&zero, Slots::ALL, rng),
    };
    let data = zero.with_omega(w);
    if kind != DrawKind::Perturbed {
        return Ok(data);
    }
    let dec = decompose(&data, tol)?;
    let slots = [Slot::AJ, Slot::AR, Slot::UJ, Slot::UR];
    for _ in 0..16 {
        let (a, b) = (slots[rng.gen_range(0..4)], slots[rng.gen_range(0..4)]);
        let c = if rng.gen_bool(0.5) {
            super::Part::J
        } else {
            super::Part::R
        };
        if let Some(d) = inject(&data, &dec, a, b, c, rng.gen_range(0.05..0.5), rng) {
            return Ok(d);
        }
    }
    Ok(data)
}

/// Valid (Jacobi and integrable) data: codimension-one 𝔞, or ω₀ = 0.
pub fn draw_valid(n: usize, rng: &mut impl Rng, tol: Tol) -> Result<PreShearData> {
    let s = tensor::standard_structure(n);
    if rng.gen_bool(0.5) {
        let basis = adapted_subspace(n, n - 1, 1, rng);
        let zero = PreShearData::new(&basis, |_, _| vec![0.0; 2 * n], s.g, s.j, tol)?;
        let w = integrable_omega(&zero, Slots::ALL, rng);
        Ok(zero.with_omega(w))
    } else {
        let (mj, r) = random_dims(n, rng);
        let basis = adapted_subspace(n, mj, r, rng);
        let zero = PreShearData::new(&basis, |_, _| vec![0.0; 2 * n], s.g, s.j, tol)?;
        let w = integrable_omega(&zero, Slots::NILPOTENT, rng);
        Ok(zero.with_omega(w))
    }
}
