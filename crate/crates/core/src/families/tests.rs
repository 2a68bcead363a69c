use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random as rnd;
use super::*;
use crate::hermitian::skt_verdict;
use crate::lie::{fingerprint_match, params, Params};
use crate::shear::construct_shear;
use crate::tensor::standard_j;

fn tol() -> Tol {
    Tol::default()
}

fn sound(h: &HermitianStructure) {
    let r = instance_report(h, tol());
    assert!(r.sound(1e-9), "{r:?}");
    assert!(r.dc_relative < 1e-8, "{r:?}");
}

fn matches(h: &HermitianStructure, target: &str) -> bool {
    fingerprint_match(&h.algebra, target, &Params::new(), tol())
}

#[test]
fn almost_abelian_members_are_skt() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..5 {
        for _ in 0..20 {
            for p in [
                rnd::almost_abelian(n, &mut rng),
                rnd::almost_abelian_any(n, &mut rng),
                rnd::almost_abelian_jordan(n, &mut rng),
            ] {
                sound(&gen_almost_abelian(&p, tol()).unwrap());
            }
        }
    }
}

#[test]
fn almost_abelian_rejects_bad_real_parts() {
    let p = AlmostAbelian {
        n: 2,
        a: 1.0,
        z: vec![[0.3, 1.0]],
        w: vec![],
    };
    assert!(matches!(
        gen_almost_abelian(&p, tol()),
        Err(SktError::ParameterRange(_))
    ));
}

#[test]
fn almost_abelian_matches_shear_up_to_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let p = rnd::almost_abelian_any(3, &mut rng);
        let g = gen_almost_abelian(&p, tol()).unwrap();
        let s = construct_shear(&almost_abelian_shear_data(&p, tol()).unwrap(), tol()).unwrap();
        let d = g.algebra.dim();
        for i in 0..d {
            for j in 0..d {
                for (a, b) in g.algebra.bracket_basis(i, j).iter().zip(s.algebra.bracket_basis(i, j)) {
                    assert!((a + b).abs() < 1e-10, "{p:?}");
                }
            }
        }
    }
}

#[test]
fn decide_examples() {
    let mut f = DMatrix::zeros(3, 3);
    f[(0, 0)] = 2.0;
    f[(1, 1)] = -1.0;
    f[(2, 2)] = -1.0;
    f[(1, 2)] = -3.0;
    f[(2, 1)] = 3.0;
    let d = decide_almost_abelian(&f, tol());
    assert!(d.admissible, "{d:?}");
    assert_eq!(d.case, Some(AdmissibleCase::Diagonalizable));
    assert!((d.a.unwrap() - 2.0).abs() < 1e-9);

    let d = decide_almost_abelian(&DMatrix::identity(3, 3), tol());
    assert!(!d.admissible);
    assert!(
        d.reason.starts_with("inadmissible: eigenvalue real parts"),
        "{}",
        d.reason
    );

    let mut n = DMatrix::zeros(3, 3);
    n[(0, 1)] = 1.0;
    n[(1, 2)] = 1.0;
    let d = decide_almost_abelian(&n, tol());
    assert!(!d.admissible);
    assert!(d.reason.starts_with("inadmissible: Jordan structure"), "{}", d.reason);
}

#[test]
fn decide_accepts_generated_and_rejects_perturbed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..40 {
        let n = 2 + k % 3;
        let p = if k % 2 == 0 {
            rnd::almost_abelian(n, &mut rng)
        } else {
            rnd::almost_abelian_jordan(n, &mut rng)
        };
        let f = rnd::almost_abelian_ad(&p, tol()).unwrap();
        let d = decide_almost_abelian(&f, tol());
        assert!(d.admissible, "{p:?} {d:?}");
        if let Some(i) = rnd::perturbation_target(&p) {
            let d = decide_almost_abelian(&rnd::perturb_pair(&f, i, 0.1), tol());
            assert!(!d.admissible, "{p:?} {d:?}");
            assert!(
                d.reason.starts_with("inadmissible: eigenvalue real parts"),
                "{}",
                d.reason
            );
        }
    }
}

#[test]
fn codim2_h_zero_case_iii() {
    let e = Codim2Entry::case_iii(1.0, 1.0, 0.0, true, 0.7, 0.2, [0.0, 0.0]).unwrap();
    assert!((e.w[0] - 0.5).abs() < 1e-12);
    let p = Codim2 {
        n: 3,
        a: 1.0,
        b1: None,
        b2: 0.0,
        entries: vec![e],
    };
    let h = gen_codim2(&p, tol()).unwrap();
    sound(&h);
    assert_eq!(skt_verdict(&h, tol()), Verdict::SktStrict);
}

#[test]
fn codim2_case_i_imaginary() {
    let p = Codim2 {
        n: 4,
        a: 1.5,
        b1: None,
        b2: 0.5,
        entries: vec![
            Codim2Entry {
                case: Codim2Case::I,
                z: [0.0, 1.0],
                w: [0.0, -2.0],
                seed: [0.0, 0.0],
            },
            Codim2Entry {
                case: Codim2Case::I,
                z: [0.0, -0.5],
                w: [0.0, 0.0],
                seed: [0.0, 0.0],
            },
        ],
    };
    sound(&gen_codim2(&p, tol()).unwrap());
}

#[test]
fn codim2_rejects_bad_seeds_and_case_iii_bound() {
    let p = Codim2 {
        n: 3,
        a: 1.0,
        b1: Some(1.0),
        b2: 0.0,
        entries: vec![Codim2Entry {
            case: Codim2Case::Ii,
            z: [0.0, 0.0],
            w: [0.0, 1.0],
            seed: [1.0, 0.0],
        }],
    };
    match gen_codim2(&p, tol()) {
        Err(SktError::Hypothesis { residual, .. }) => assert!(residual > 0.1),
        other => panic!("{other:?}"),
    }
    assert!(Codim2Entry::case_iii(1.0, -1.0, 1.0, true, 0.0, 0.0, [0.0, 0.0]).is_err());
}

#[test]
fn codim2_random_members_are_skt() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..60 {
        let p = rnd::codim2(2 + k % 4, &mut rng);
        sound(&gen_codim2(&p, tol()).unwrap_or_else(|e| panic!("{p:?}: {e}")));
    }
}

#[test]
fn totally_real_examples() {
    for n in 1..4 {
        let h = gen_totally_real(&TotallyReal::affine(n, n), tol()).unwrap();
        sound(&h);
        assert!(matches(&h, &format!("{n}aff")));
    }
    let p = TotallyReal {
        n: 3,
        m: 1,
        r: 0,
        lambda: vec![],
        mu: vec![],
        nu: NuTilde::Covectors(vec![vec![0.0, 0.0, 0.0, 1.0]]),
    };
    let h = gen_totally_real(&p, tol()).unwrap();
    sound(&h);
    assert!(matches(&h, "h3 + R^3"));
}

#[test]
fn totally_real_three_forms_give_n37d() {
    let p = TotallyReal {
        n: 5,
        m: 3,
        r: 0,
        lambda: vec![],
        mu: vec![],
        nu: NuTilde::Covectors(vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
        ]),
    };
    let h = gen_totally_real(&p, tol()).unwrap();
    sound(&h);
    assert!(matches(&h, "n37D + R^3"), "{}", h.algebra.fingerprint(tol()).compact());
}

#[test]
fn totally_real_rejects_bad_nu() {
    let mut p = TotallyReal {
        n: 3,
        m: 1,
        r: 0,
        lambda: vec![],
        mu: vec![],
        nu: NuTilde::Forms(vec![vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0, 0.0],
        ]]),
    };
    assert!(matches!(gen_totally_real(&p, tol()), Err(SktError::Hypothesis { .. })));
    p.m = 2;
    p.r = 1;
    p.lambda = vec![0.0];
    p.mu = vec![vec![0.0; 2]];
    assert!(gen_totally_real(&p, tol()).is_err());
}

#[test]
fn totally_real_random_members_are_skt() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..60 {
        let ell = k % 3;
        let n = (2 * ell).max(1) + (k / 3) % 2;
        let p = rnd::totally_real(n, ell, &mut rng);
        let h = gen_totally_real(&p, tol()).unwrap_or_else(|e| panic!("{p:?}: {e}"));
        sound(&h);
        let target = match ell {
            0 => format!("{}aff + R^{}", p.r, 2 * (n - p.r)),
            1 => format!("{}aff + h3 + R^{}", p.r, 2 * (n - p.r) - 3),
            _ => format!("{}aff + 2h3 + R^{}", p.r, 2 * (n - p.r) - 6),
        };
        let target = target.replace("0aff + ", "").replace(" + R^0", "");
        assert!(matches(&h, &target), "{target} {p:?}");
    }
}

#[test]
fn two_dim_complex_rotation_fingerprint() {
    let p = TwoDimComplex::Rotation {
        n: 3,
        alpha: vec![0.0, 0.0, 0.0, 1.0],
    };
    let h = gen_2d_complex(&p, tol()).unwrap();
    sound(&h);
    assert!(matches(&h, "r3p(lambda=0) + R^3"));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..5 {
        let h = gen_2d_complex(&rnd::two_dim_complex_rotation(n, &mut rng), tol()).unwrap();
        sound(&h);
        assert!(matches(&h, &format!("r3p(lambda=0) + R^{}", 2 * n - 3)));
    }
}

#[test]
fn two_dim_complex_rejects_zero_and_identity_violations() {
    let z = vec![vec![0.0; 4]; 4];
    let p = TwoDimComplex::Nilpotent {
        n: 3,
        tau1: z.clone(),
        tau2: z.clone(),
        theta: z.clone(),
    };
    assert!(gen_2d_complex(&p, tol()).is_err());
    let mut t = z.clone();
    t[0][1] = 1.0;
    t[1][0] = -1.0;
    t[2][3] = 1.0;
    t[3][2] = -1.0;
    let p = TwoDimComplex::Nilpotent {
        n: 3,
        tau1: t,
        tau2: z.clone(),
        theta: z,
    };
    assert!(matches!(gen_2d_complex(&p, tol()), Err(SktError::Hypothesis { .. })));
}

#[test]
fn frozen_witnesses_hit_their_targets() {
    for t in WITNESS_TARGETS {
        let w = witness_2d_complex(t).unwrap();
        let h = gen_2d_complex(&w, tol()).unwrap_or_else(|e| panic!("{t}: {e}"));
        sound(&h);
        assert!(matches(&h, t), "{t}: {}", h.algebra.fingerprint(tol()).compact());
        let scaled = gen_2d_complex(&rnd::scale_witness(w, 3.7), tol()).unwrap();
        assert!(matches(&scaled, t));
    }
}

#[test]
fn witness_search_finds_every_target() {
    for t in WITNESS_TARGETS {
        let w = search_2d_complex(t, 8, tol()).expect(t);
        assert_eq!(Some(w), witness_2d_complex(t), "{t}");
    }
}

#[test]
fn six_dim_3comm_examples() {
    let p = SixDim3Comm::I {
        b: 1.0,
        h: 1.0,
        q: [0.0, 0.0],
    };
    let h = gen_6d_3comm(&p, tol()).unwrap();
    sound(&h);
    assert!(fingerprint_match(
        &h.algebra,
        "g5_14 + R",
        &params(&[("alpha", 0.0)]),
        tol()
    ));

    let p = SixDim3Comm::Ii {
        a: 1.0,
        b1: 1.0,
        b2: 0.0,
        c: 1.0,
        c1: 0.0,
        c2: 0.0,
        u: 0.0,
        h: Some(1.0),
    };
    assert_eq!(
        skt_verdict(&gen_6d_3comm(&p, tol()).unwrap(), tol()),
        Verdict::SktStrict
    );

    let p = SixDim3Comm::Iii {
        a: 1.0,
        b2: 0.0,
        c: 0.0,
        c1: 0.0,
        c2: 0.0,
        u: 1.0,
    };
    assert_eq!(
        skt_verdict(&gen_6d_3comm(&p, tol()).unwrap(), tol()),
        Verdict::SktStrict
    );

    assert!(gen_6d_3comm(
        &SixDim3Comm::I {
            b: 0.0,
            h: 1.0,
            q: [0.0, 0.0]
        },
        tol()
    )
    .is_err());
    let bad = SixDim3Comm::Ii {
        a: 1.0,
        b1: 1.0,
        b2: 0.0,
        c: 1.0,
        c1: 0.0,
        c2: 0.0,
        u: 0.0,
        h: Some(2.0),
    };
    assert!(gen_6d_3comm(&bad, tol()).is_err());
}

#[test]
fn six_dim_3comm_random_members_are_skt() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..90 {
        let p = rnd::six_dim_3comm(k % 3, &mut rng);
        let h = gen_6d_3comm(&p, tol()).unwrap_or_else(|e| panic!("{p:?}: {e}"));
        let d = h.algebra.derived_series(tol().eps_rank);
        assert_eq!(d[1], 3, "{p:?}");
        sound(&h);
    }
}

#[test]
fn four_dim_pair_examples() {
    let z = vec![vec![0.0; 4]; 4];
    let j = rows(&standard_j(2));
    let r = check_4d_complex_pair(
        &FourDimPair {
            a1: z.clone(),
            a2: z.clone(),
            x: vec![],
        },
        tol(),
    );
    assert!(r.pass, "{r:?}");
    let r = check_4d_complex_pair(
        &FourDimPair {
            a1: j,
            a2: z.clone(),
            x: vec![],
        },
        tol(),
    );
    assert!(r.pass, "{r:?}");
    assert!(r.agreement < 1e-12);
    let id = rows(&DMatrix::identity(4, 4));
    let r = check_4d_complex_pair(
        &FourDimPair {
            a1: id,
            a2: z,
            x: vec![],
        },
        tol(),
    );
    assert!(!r.pass);
    assert!((r.quadratic - 4.0).abs() < 1e-12, "{r:?}");
    assert!(r.agreement < 1e-12);
}

#[test]
fn four_dim_search_solutions_are_skt() {
    let found = search_4d_pairs(6, 11, tol());
    assert!(!found.is_empty());
    for (p, r) in &found {
        assert!(r.agreement < 1e-9, "{p:?}");
        sound(r.structure.as_ref().unwrap());
    }
}

#[test]
fn family_params_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let p = rnd::six_dim(&mut rng);
        let s = serde_json::to_string(&p).unwrap();
        let q: FamilyParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
    let p: FamilyParams =
        serde_json::from_str(r#"{"family":"six_dim3_comm","variant":"i","b":1,"h":1,"q":[0,0]}"#).unwrap();
    assert_eq!(p.name(), "six_dim3_comm");
}

#[test]
fn scan_is_deterministic_and_sound() {
    let a = scan_6d(60, 42, tol());
    let b = scan_6d(60, 42, tol());
    assert_eq!(a, b);
    assert_eq!(a.failures, 0);
    assert_eq!(
        a.rejected,
        0,
        "{:?}",
        a.records.iter().filter_map(|r| r.error.as_ref()).collect::<Vec<_>>()
    );
    assert_eq!(scan_6d(0, 1, tol()).records.len(), 0);
}

#[test]
fn codim2_constraint_is_the_dc_component() {
    // dc of the member with seeds scaled by t is affine in t², vanishing exactly at the root of the
    // scalar constraint.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 20 {
        let p = rnd::codim2(3, &mut rng);
        if p.entries.iter().all(|e| e.seed == [0.0, 0.0]) {
            continue;
        }
        let h = gen_codim2(&p, tol()).unwrap();
        assert!(skt_verdict(&h, tol()).is_skt());
        let mut q = p.clone();
        for e in &mut q.entries {
            e.seed = [e.seed[0] * 1.1, e.seed[1] * 1.1];
        }
        assert!(matches!(gen_codim2(&q, tol()), Err(SktError::Hypothesis { .. })));
        checked += 1;
    }
}
