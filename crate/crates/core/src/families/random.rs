//! Seeded parameter samplers for every family, plus the ad-matrices used by the
//! admissibility test.

use nalgebra::DMatrix;
use rand::Rng;

use super::{
    witness_2d_complex, AlmostAbelian, Codim2, Codim2Case, Codim2Entry, Cx, FamilyParams, NuTilde, SixDim3Comm,
    TotallyReal, TwoDimComplex, WITNESS_TARGETS,
};
use crate::Tol;

/// Log-uniform magnitude in [0.1, 10].
pub fn magnitude(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.gen_range(-1.0..1.0))
}

pub fn signed(rng: &mut impl Rng) -> f64 {
    let m = magnitude(rng);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn phase(rng: &mut impl Rng, r: f64) -> Cx {
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    [r * t.cos(), r * t.sin()]
}

/// Random phase with log-uniform modulus.
fn polar(rng: &mut impl Rng) -> Cx {
    let r = magnitude(rng);
    phase(rng, r)
}

/// Case (i) member: a ≥ 0.5, every |Im z| ≥ 0.3 and at least one Re z = −a/2.
pub fn almost_abelian(n: usize, rng: &mut impl Rng) -> AlmostAbelian {
    let a = rng.gen_range(0.5..3.0);
    let k = n - 1;
    let m = if k == 0 { 0 } else { rng.gen_range(1..=k) };
    let b: Vec<f64> = (0..k)
        .map(|_| rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let w = (0..k)
        .map(|_| if rng.gen_bool(0.3) { [0.0, 0.0] } else { polar(rng) })
        .collect();
    AlmostAbelian::from_split(a, m, &b, w)
}

/// Case (ii) member: a = 0, all z imaginary, z₁ = 0 with |w₁| ≥ 0.3 and the other |Im z| ≥ 0.3.
pub fn almost_abelian_jordan(n: usize, rng: &mut impl Rng) -> AlmostAbelian {
    assert!(n >= 2, "the Jordan pattern needs n >= 2");
    let k = n - 1;
    let b: Vec<f64> = (0..k)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
            }
        })
        .collect();
    let mut w: Vec<Cx> = (0..k)
        .map(|_| if rng.gen_bool(0.5) { [0.0, 0.0] } else { polar(rng) })
        .collect();
    let r = rng.gen_range(0.3..3.0);
    w[0] = phase(rng, r);
    AlmostAbelian::from_split(0.0, 0, &b, w)
}

/// Almost Abelian member with free parameters, including degenerate ones (a = 0, z = 0, w = 0).
pub fn almost_abelian_any(n: usize, rng: &mut impl Rng) -> AlmostAbelian {
    let a = if rng.gen_bool(0.15) { 0.0 } else { magnitude(rng) };
    let k = n - 1;
    let m = rng.gen_range(0..=k);
    let b: Vec<f64> = (0..k)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { signed(rng) })
        .collect();
    let w = (0..k)
        .map(|_| if rng.gen_bool(0.4) { [0.0, 0.0] } else { polar(rng) })
        .collect();
    AlmostAbelian::from_split(a, m, &b, w)
}

/// f = ad(JX)|_𝔞 in the generator basis, 𝔞 being every basis vector except JX (the last).
pub fn almost_abelian_ad(p: &AlmostAbelian, tol: Tol) -> crate::Result<DMatrix<f64>> {
    let l = p.gfha(tol)?.algebra();
    let d = l.dim();
    let mut e = vec![0.0; d];
    e[d - 1] = 1.0;
    Ok(l.ad(&e).view((0, 0), (d - 1, d - 1)).into_owned())
}

/// Shifts the real part of the eigenvalue pair z_i, z̄_i of f by `delta`.
pub fn perturb_pair(f: &DMatrix<f64>, i: usize, delta: f64) -> DMatrix<f64> {
    let mut g = f.clone();
    g[(2 * i, 2 * i)] += delta;
    g[(2 * i + 1, 2 * i + 1)] += delta;
    g
}

/// Index of the pair whose real part the acceptance perturbation moves: a −a/2 pair in case (i),
/// a non-zero imaginary pair in case (ii).
pub fn perturbation_target(p: &AlmostAbelian) -> Option<usize> {
    if p.a != 0.0 {
        p.z.iter().position(|z| z[0] != 0.0)
    } else {
        p.z.iter().position(|z| z[1] != 0.0)
    }
}

/// Codimension-two member. b₁ ≥ a is drawn first; seeds are scaled so the scalar constraint
/// holds exactly, or dropped (b₁ = a) when their quadratic part is not positive.
pub fn codim2(n: usize, rng: &mut impl Rng) -> Codim2 {
    let a = rng.gen_range(0.3..3.0);
    let b2 = if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen_range(0.0..3.0)
    };
    let b1 = a + if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen_range(0.0..3.0)
    };
    let seeded = b1 > a;
    let mut entries = Vec::new();
    for _ in 0..n - 2 {
        let seed = if seeded { phase(rng, 1.0) } else { [0.0, 0.0] };
        let e = match rng.gen_range(0..3) {
            0 => Codim2Entry {
                case: Codim2Case::I,
                z: [
                    0.0,
                    rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                ],
                w: [0.0, rng.gen_range(-3.0..3.0)],
                seed,
            },
            1 => Codim2Entry {
                case: Codim2Case::Ii,
                z: [0.0, 0.0],
                w: [
                    0.0,
                    rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                ],
                seed,
            },
            _ => Codim2Entry::case_iii(
                a,
                b1,
                b2,
                rng.gen_bool(0.5),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                seed,
            )
            .expect("b1 >= a > 0 keeps the discriminant positive"),
        };
        entries.push(e);
    }
    let mut p = Codim2 {
        n,
        a,
        b1: Some(b1),
        b2,
        entries,
    };
    if seeded {
        let q = p.seed_quadratic(b1);
        if q > 1e-6 {
            let t = (2.0 * a * (b1 - a) / q).sqrt();
            for e in &mut p.entries {
                e.seed = [e.seed[0] * t, e.seed[1] * t];
            }
        } else {
            for e in &mut p.entries {
                e.seed = [0.0, 0.0];
            }
            p.b1 = Some(a);
            for e in &mut p.entries {
                if e.case == Codim2Case::Iii {
                    *e = Codim2Entry::case_iii(a, a, b2, e.w[0] + b2 / 4.0 >= 0.0, e.z[1], e.w[1], [0.0, 0.0])
                        .expect("b1 = a > 0");
                }
            }
        }
    }
    p
}

/// Totally real member with ℓ = m − r central directions (ℓ = 2 needs n ≥ m + 2).
pub fn totally_real(n: usize, ell: usize, rng: &mut impl Rng) -> TotallyReal {
    // U_J needs complex dimension ≥ ℓ for independent decomposable forms.
    assert!(2 * ell <= n, "not enough room for the requested ell");
    let r = rng.gen_range(0..=n - 2 * ell);
    let m = r + ell;
    let u = 2 * (n - m);
    let lambda = (0..r).map(|_| signed(rng)).collect();
    let mu = (0..r)
        .map(|_| {
            if rng.gen_bool(0.3) {
                vec![0.0; u]
            } else {
                (0..u).map(|_| rng.gen_range(-1.0..1.0)).collect()
            }
        })
        .collect();
    let nu = match ell {
        0 => Vec::new(),
        1 => vec![(0..u).map(|_| rng.gen_range(-1.0..1.0)).collect()],
        _ => {
            // Two covectors spanning a complex 2-plane, so α∧J*α and β∧J*β stay independent.
            let mut a = vec![0.0; u];
            let mut b = vec![0.0; u];
            a[0] = magnitude(rng);
            b[2] = magnitude(rng);
            b[0] = rng.gen_range(-1.0..1.0);
            for x in a[4..].iter_mut().chain(b[4..].iter_mut()) {
                *x = rng.gen_range(-0.5..0.5);
            }
            vec![a, b]
        }
    };
    TotallyReal {
        n,
        m,
        r,
        lambda,
        mu,
        nu: NuTilde::Covectors(nu),
    }
}

pub fn two_dim_complex_rotation(n: usize, rng: &mut impl Rng) -> TwoDimComplex {
    let u = 2 * (n - 1);
    let mut alpha: Vec<f64> = (0..u)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { signed(rng) })
        .collect();
    let k = rng.gen_range(0..u);
    alpha[k] = signed(rng);
    TwoDimComplex::Rotation { n, alpha }
}

fn maybe_zero(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.25) {
        0.0
    } else {
        signed(rng)
    }
}

pub fn six_dim_3comm(variant: usize, rng: &mut impl Rng) -> SixDim3Comm {
    match variant {
        0 => SixDim3Comm::I {
            b: signed(rng),
            h: signed(rng),
            q: if rng.gen_bool(0.3) { [0.0, 0.0] } else { polar(rng) },
        },
        1 => {
            let c = signed(rng);
            let (c1, c2) = (maybe_zero(rng), maybe_zero(rng));
            let u = if rng.gen_bool(0.3) { 0.0 } else { magnitude(rng) };
            if rng.gen_bool(0.2) {
                SixDim3Comm::Ii {
                    a: 0.0,
                    b1: 0.0,
                    b2: 0.0,
                    c,
                    c1,
                    c2,
                    u,
                    h: Some(signed(rng)),
                }
            } else {
                SixDim3Comm::Ii {
                    a: magnitude(rng),
                    b1: maybe_zero(rng),
                    b2: maybe_zero(rng),
                    c,
                    c1,
                    c2,
                    u,
                    h: None,
                }
            }
        }
        _ => SixDim3Comm::Iii {
            a: signed(rng),
            b2: maybe_zero(rng),
            c: maybe_zero(rng),
            c1: maybe_zero(rng),
            c2: maybe_zero(rng),
            u: if rng.gen_bool(0.3) { 0.0 } else { magnitude(rng) },
        },
    }
}

/// A six-dimensional member of a uniformly chosen family.
pub fn six_dim(rng: &mut impl Rng) -> FamilyParams {
    match rng.gen_range(0..7) {
        0 => FamilyParams::AlmostAbelian(if rng.gen_bool(0.1) {
            AlmostAbelian::from_split(0.0, 0, &[0.0, 0.0], Vec::new())
        } else {
            almost_abelian_any(3, rng)
        }),
        1 => FamilyParams::Codim2(codim2(3, rng)),
        2 => {
            let ell = rng.gen_range(0..=1);
            FamilyParams::TotallyReal(totally_real(3, ell, rng))
        }
        3 => FamilyParams::TwoDimComplex(two_dim_complex_rotation(3, rng)),
        4 => {
            let t = WITNESS_TARGETS[rng.gen_range(0..WITNESS_TARGETS.len())];
            let w = witness_2d_complex(t).expect("frozen witness");
            FamilyParams::TwoDimComplex(scale_witness(w, magnitude(rng)))
        }
        _ => FamilyParams::SixDim3Comm(six_dim_3comm(rng.gen_range(0..3), rng)),
    }
}

/// Scales τ₁, τ₂, θ together, which keeps the quadratic identity.
pub fn scale_witness(w: TwoDimComplex, s: f64) -> TwoDimComplex {
    let sc = |m: Vec<Vec<f64>>| m.into_iter().map(|r| r.into_iter().map(|x| x * s).collect()).collect();
    match w {
        TwoDimComplex::Nilpotent { n, tau1, tau2, theta } => TwoDimComplex::Nilpotent {
            n,
            tau1: sc(tau1),
            tau2: sc(tau2),
            theta: sc(theta),
        },
        other => other,
    }
}
