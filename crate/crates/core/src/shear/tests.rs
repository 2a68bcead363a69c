use super::random::*;
use super::*;
use crate::hermitian::{gen::almost_abelian_hermitian, Verdict};
use crate::lie::{fingerprint_match, params};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tol {
    Tol::default()
}

/// Columns e_i for the listed (0-based) indices.
fn span(dim: usize, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, idx.len(), |r, c| if r == idx[c] { 1.0 } else { 0.0 })
}

fn zero_data(dim: usize, idx: &[usize]) -> PreShearData {
    PreShearData::standard(&span(dim, idx), |_, _| vec![0.0; dim], tol()).unwrap()
}

/// ω with ω(e_i, e_k) = v for the listed pairs (i < k).
fn data_with(dim: usize, idx: &[usize], entries: &[(usize, usize, Vec<f64>)]) -> Result<PreShearData> {
    PreShearData::standard(
        &span(dim, idx),
        |i, k| {
            entries
                .iter()
                .find(|e| (e.0, e.1) == (i, k))
                .map(|e| e.2.clone())
                .unwrap_or(vec![0.0; dim])
        },
        tol(),
    )
}

fn same_span(s: &Subspace, idx: &[usize]) -> bool {
    let dim = s.ambient();
    s.dim() == idx.len()
        && idx.iter().all(|&i| {
            s.defect(&{
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                v
            }) < 1e-12
        })
}

#[test]
fn decompose_examples() {
    let d = decompose(&zero_data(6, &[0, 1, 2]), tol()).unwrap();
    assert!(
        same_span(&d.a_j, &[0, 1]) && same_span(&d.a_r, &[2]) && same_span(&d.u_r, &[3]) && same_span(&d.u_j, &[4, 5])
    );
    assert_eq!(d.reassembly, 0.0);

    let d = decompose(&zero_data(6, &[0, 2, 4]), tol()).unwrap();
    assert_eq!((d.a_j.dim(), d.u_j.dim()), (0, 0));
    assert!(same_span(&d.u_r, &[1, 3, 5]));
}

#[test]
fn decomposition_reassembles_random_omega() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let data = draw(4, DrawKind::Generic, &mut rng, tol()).unwrap();
        let d = decompose(&data, tol()).unwrap();
        assert!(d.reassembly < 1e-12, "{}", d.reassembly);
    }
}

#[test]
fn values_outside_a_are_rejected() {
    let e = data_with(4, &[0], &[(1, 2, vec![0.0, 0.0, 1.0, 0.0])]);
    assert!(e.is_err());
    let e = data_with(4, &[0, 2], &[(0, 2, vec![1.0, 0.0, 0.0, 0.0])]);
    assert!(e.is_err());
}

#[test]
fn shear_data_equation() {
    assert!(check_shear_data(&zero_data(4, &[0]), tol()).pass);
    // 𝔞 = span{e₁,e₂}, ω(e₃,·) = A₁, ω(e₄,·) = A₂ on 𝔞 with [A₁,A₂] = diag(1,−1).
    let a1 = [[0.0, 1.0], [0.0, 0.0]];
    let a2 = [[0.0, 0.0], [1.0, 0.0]];
    let mut entries = Vec::new();
    for (y, a) in [(2usize, a1), (3, a2)] {
        for c in 0..2 {
            // ω(e_c, e_y) = −A e_c
            entries.push((c, y, vec![-a[0][c], -a[1][c], 0.0, 0.0, 0.0, 0.0]));
        }
    }
    let data = data_with(6, &[0, 1], &entries).unwrap();
    let c = check_shear_data(&data, tol());
    assert!(!c.pass);
    // 𝒜 carries 1/3!, the triple term is antisymmetric in its first two slots: ⅓‖[A₁,A₂]‖.
    assert!((c.residual - 1.0 / 3.0).abs() < 1e-12, "{}", c.residual);
    assert!(matches!(
        construct_shear(&data, tol()),
        Err(SktError::Hypothesis { .. })
    ));
}

fn almost_abelian_data(a: f64, z: &[(f64, f64)]) -> PreShearData {
    let l = almost_abelian_hermitian(a, z);
    let n = l.dim();
    let idx: Vec<usize> = (1..n).collect();
    let s = tensor::standard_structure(n / 2);
    PreShearData::from_bracket(&l, &span(n, &idx), s.g, s.j, tol()).unwrap()
}

#[test]
fn almost_abelian_data_is_shear_data() {
    let data = almost_abelian_data(1.3, &[(-0.65, 2.0), (0.4, -1.0)]);
    assert!(check_shear_data(&data, tol()).pass);
    assert!(check_integrability(&data, tol()).pass);
}

#[test]
fn integrability_examples() {
    assert!(check_integrability(&zero_data(6, &[0, 1, 2]), tol()).pass);
    // Totally real 𝔞 = span{e₁,e₃}; e¹², e³⁴ and e¹⁴ − e²³ are (1,1) and vanish on 𝔞∧𝔞.
    let (x, y, z) = (
        vec![0.3, 0.0, -1.2, 0.0],
        vec![0.7, 0.0, 0.4, 0.0],
        vec![-0.5, 0.0, 0.9, 0.0],
    );
    let neg = |v: &Vec<f64>| v.iter().map(|t| -t).collect::<Vec<f64>>();
    let data = data_with(4, &[0, 2], &[(0, 1, x), (2, 3, y), (0, 3, z.clone()), (1, 2, neg(&z))]).unwrap();
    assert!(check_integrability(&data, tol()).pass);
    // G_X ≠ 0: ω(JX, Y) has an 𝔞_r-component for X = e₃ ∈ 𝔞_r, Y = e₁ ∈ 𝔞_J.
    let data = data_with(6, &[0, 1, 2], &[(0, 3, vec![0.0, 0.0, -1.0, 0.0, 0.0, 0.0])]).unwrap();
    assert!(!check_integrability(&data, tol()).pass);
    let dec = decompose(&data, tol()).unwrap();
    let b = integrability_breakdown(&data, &dec, tol());
    assert!(!b.flags[0].pass);
}

#[test]
fn zero_omega_passes_everything() {
    let data = zero_data(6, &[0, 1, 2]);
    let dec = decompose(&data, tol()).unwrap();
    assert!(integrability_breakdown(&data, &dec, tol()).all_pass());
    assert_eq!(compute_nu(&data).nu.norm(), 0.0);
    let ops = extract_a(&data, &dec, tol());
    assert!(ops.a.iter().all(|m| linalg::max_abs(m) == 0.0));
    assert!(check_fk(&ops, tol()).all_pass());
    let h = construct_shear(&data, tol()).unwrap();
    assert_eq!(skt_report(&h, tol()).verdict, Verdict::Kahler);
}

#[test]
fn injected_rr_component_fails_only_flag_iv() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let basis = adapted_subspace(4, 1, 2, &mut rng);
        let s = tensor::standard_structure(4);
        let data = PreShearData::new(&basis, |_, _| vec![0.0; 8], s.g, s.j, tol()).unwrap();
        let dec = decompose(&data, tol()).unwrap();
        let bad = inject(&data, &dec, Slot::UR, Slot::UR, Part::R, 0.5, &mut rng).unwrap();
        let b = integrability_breakdown(&bad, &decompose(&bad, tol()).unwrap(), tol());
        assert_eq!(b.failing(), vec![3]);
        assert!(!check_integrability(&bad, tol()).pass);
    }
}

#[test]
fn fk_scalar_examples() {
    let a = 2.0;
    let data = almost_abelian_data(a, &[(-1.0, 5.0)]);
    let dec = decompose(&data, tol()).unwrap();
    assert!(check_fk(&extract_a(&data, &dec, tol()), tol()).all_pass());

    for a in [0.5, 2.0] {
        let data = almost_abelian_data(a, &[(0.3, 0.0)]);
        let dec = decompose(&data, tol()).unwrap();
        let r = check_fk(&extract_a(&data, &dec, tol()), tol());
        assert!(!r.antisymmetry.pass);
        assert!((r.antisymmetry.residual - 2.0 * 0.3 * (0.6 + a)).abs() < 1e-12);
    }
}

#[test]
fn extracted_operators_of_almost_abelian_data() {
    let (a, z) = (1.5, [(-0.75, 2.0), (0.0, -1.0)]);
    let data = almost_abelian_data(a, &z);
    let dec = decompose(&data, tol()).unwrap();
    let ops = extract_a(&data, &dec, tol());
    assert_eq!(ops.f.len(), 1);
    let f = ops.f[0][(0, 0)];
    assert!((f.abs() - a).abs() < 1e-12);
    assert!(linalg::max_abs(&ops.g[0]) < 1e-12 && linalg::max_abs(&ops.h[0]) < 1e-12);
    // K_X and F_X flip together with the orientation of X, so K_X / F_X = z / a.
    let eig = ops.eigen.expect("K_X is normal");
    for &(re, im) in &z {
        let want = Complex64::new(re, im) / a;
        assert!(
            (0..2).any(|i| (eig.alpha[(0, i)] / f - want).norm() < 1e-9),
            "{}",
            eig.alpha
        );
    }
}

#[test]
fn construct_aff() {
    let lam = 2.5;
    let data = data_with(2, &[0], &[(0, 1, vec![-lam, 0.0])]).unwrap();
    let h = construct_shear(&data, tol()).unwrap();
    assert_eq!(h.algebra.bracket_basis(1, 0), &[lam, 0.0]);
    assert!(fingerprint_match(&h.algebra, "aff", &params(&[]), tol()));
    assert_eq!(skt_report(&h, tol()).verdict, Verdict::Kahler);
}

#[test]
fn six_dim_almost_abelian_instance() {
    let data = almost_abelian_data(1.0, &[(-0.5, 1.0), (0.0, 1.0)]);
    let r = analyze(&data, tol()).unwrap();
    assert!(r.is_skt_data(), "{r:?}");
    assert_eq!(r.skt.as_ref().unwrap().verdict, Verdict::SktStrict);
    let h = construct_shear(&data, tol()).unwrap();
    assert!(h.algebra.is_two_step_solvable(1e-9));
    assert_eq!(h.algebra.derived_series(1e-7)[1], 5);

    // Re z outside {0, −a/2}: integrable shear data but ν ≠ 0.
    let data = almost_abelian_data(1.0, &[(0.1, 1.0), (0.0, 1.0)]);
    let r = analyze(&data, tol()).unwrap();
    assert!(r.shear_data.pass && r.integrability.pass && !r.nu.pass);
    assert_eq!(r.skt.unwrap().verdict, Verdict::HermitianNotSkt);
}

#[test]
fn shear_json_reads_back() {
    let data = almost_abelian_data(1.0, &[(-0.5, 1.0)]);
    let text = serde_json::to_string(&ShearJson::from_data(&data)).unwrap();
    let back: ShearJson = serde_json::from_str(&text).unwrap();
    let d2 = back.data(tol()).unwrap();
    assert_eq!(d2.bracket(), data.bracket());
    let bad = r#"{"n":1,"a_basis":[[1,0]],"omega":[{"i":2,"j":1,"value":[1,0]}]}"#;
    assert!(serde_json::from_str::<ShearJson>(bad).unwrap().data(tol()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn breakdown_matches_integrability(seed in any::<u64>(), n in 3usize..=4, kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = [DrawKind::Generic, DrawKind::Integrable, DrawKind::Perturbed][kind];
        let data = draw(n, kind, &mut rng, tol()).unwrap();
        let dec = decompose(&data, tol()).unwrap();
        let b = integrability_breakdown(&data, &dec, tol());
        prop_assert_eq!(check_integrability(&data, tol()).pass, b.all_pass());
        if kind == DrawKind::Integrable {
            prop_assert!(b.all_pass());
        }
    }

    #[test]
    fn nu_vanishes_on_fixed_blocks(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = draw_valid(n, &mut rng, tol()).unwrap();
        prop_assert!(check_shear_data(&data, tol()).pass && check_integrability(&data, tol()).pass);
        let dec = decompose(&data, tol()).unwrap();
        let nu = compute_nu(&data);
        let ajur = dec.a_j.sum(&dec.u_r, 1e-7);
        prop_assert!(restricted_norm(&nu.nu, &data.a, 4, None) < 1e-12);
        prop_assert!(restricted_norm(&nu.nu, &ajur, 4, None) < 1e-12);
        prop_assert!(restricted_norm(&nu.nu2, &dec.a_r, 3, Some(&dec.u_r)) < 1e-12);
        prop_assert!(restricted_norm(&nu.nu2, &dec.u_j, 4, None) < 1e-12);
    }

    #[test]
    fn sheared_bracket_lands_in_a(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = draw_valid(3, &mut rng, tol()).unwrap();
        let h = construct_shear(&data, tol()).unwrap();
        prop_assert!(h.algebra.jacobi_residual() < 1e-9);
        let l = &h.algebra;
        for i in 0..6 {
            for k in 0..6 {
                prop_assert!(data.a.defect(l.bracket_basis(i, k)) < 1e-12);
            }
        }
    }
}
