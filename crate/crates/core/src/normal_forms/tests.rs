use super::random::*;
use super::*;
use proptest::prelude::*;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tol {
    Tol::default()
}

fn sym(n: usize, entries: &[(usize, usize, Vec<f64>)]) -> SymBilinear {
    SymBilinear::from_fn(
        n,
        |i, j| {
            entries
                .iter()
                .find(|(a, b, _)| (*a, *b) == (i, j) || (*b, *a) == (i, j))
                .map(|e| e.2.clone())
                .unwrap_or_else(|| vec![0.0; n])
        },
        tol(),
    )
    .unwrap()
}

#[test]
fn g_skew_scalar_examples() {
    let r = g_skew_diagonalize(&CMatrix::from_element(1, 1, c(0.0, 1.0)), 3.7, tol()).unwrap();
    assert!(r.holds);
    assert_eq!(r.eigenvalues[0].re, 0.0);
    let r = g_skew_diagonalize(&CMatrix::from_element(1, 1, c(-1.0, 0.0)), 2.0, tol()).unwrap();
    assert!(r.holds);
    assert!((r.eigenvalues[0].re + 1.0).abs() < 1e-15);
    let e = g_skew_diagonalize(&CMatrix::from_element(1, 1, c(1.0, 0.0)), 0.0, tol());
    assert!(matches!(e, Err(SktError::Hypothesis { .. })));
}

#[test]
fn g_skew_recovers_constructed_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 1..5 {
        let a = rng.gen_range(-3.0..3.0);
        let p = g_skew_instance(m, a, &mut rng);
        let r = g_skew_diagonalize(&p, a, tol()).unwrap();
        assert!(r.holds, "{r:?}");
        let d = CMatrix::from_diagonal(&DVector::from_vec(r.eigenvalues.clone()));
        let back = &r.unitary * d * r.unitary.adjoint();
        assert!(linalg::cmax_abs(&(back - &p)) < 1e-9);
    }
}

#[test]
fn simultaneous_examples() {
    let k = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, 1.0), c(-0.5, 2.0)]));
    let sd = simultaneous_diagonalize(std::slice::from_ref(&k), tol()).unwrap();
    assert!(linalg::cmax_abs(&(sd.basis.map(|z| c(z.norm(), 0.0)) - CMatrix::identity(2, 2))) < 1e-12);
    assert_eq!(sd.eigenvalues.ncols(), 2);

    let nil = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(
        simultaneous_diagonalize(&[nil], tol()),
        Err(SktError::Defective(_))
    ));

    let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    let b = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(
        simultaneous_diagonalize(&[a, b], tol()),
        Err(SktError::NotCommuting(_))
    ));
}

#[test]
fn simultaneous_recovers_shared_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 1..6 {
        let (ks, v) = commuting_normal(m, 3, &mut rng);
        let sd = simultaneous_diagonalize(&ks, tol()).unwrap();
        assert!(sd.residual < 1e-9);
        // Each recovered vector is a unit multiple of one of the constructed ones.
        let overlap = v.adjoint() * &sd.basis;
        for i in 0..m {
            let best = (0..m).map(|r| overlap[(r, i)].norm()).fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-8);
        }
    }
    // A degenerate first matrix is split by the second.
    let v = random_complex_unitary(3, &mut rng);
    let d1 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]));
    let d2 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 1.0)]));
    let ks = [&v * d1 * v.adjoint(), &v * d2 * v.adjoint()];
    let sd = simultaneous_diagonalize(&ks, tol()).unwrap();
    let want = [
        (c(1.0, 0.0), c(0.0, 1.0)),
        (c(1.0, 0.0), c(-1.0, 0.0)),
        (c(0.0, 2.0), c(0.0, 1.0)),
    ];
    for (w0, w1) in want {
        let hits = (0..3)
            .filter(|&i| (sd.eigenvalues[(0, i)] - w0).norm() + (sd.eigenvalues[(1, i)] - w1).norm() < 1e-9)
            .count();
        assert_eq!(hits, 1, "{}", sd.eigenvalues);
    }
}

fn triangular_defect(f: &SymBilinear, b: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..b.ncols() {
        let v = b.column(i).into_owned();
        let w = f.eval(&v, &v);
        let span = b.columns(0, i + 1);
        let coef = span.transpose() * &w;
        worst = worst.max((w - span * coef).amax());
    }
    worst
}

#[test]
fn f_adapted_examples() {
    let id = |n| DMatrix::<f64>::identity(n, n);
    let r = find_f_adapted_basis(&SymBilinear::zero(3), &id(3), 1, tol()).unwrap();
    assert!(linalg::max_abs(&(r.basis.transpose() * &r.basis - id(3))) < 1e-12);

    let r = find_f_adapted_basis(&sym(1, &[(0, 0, vec![3.0])]), &id(1), 1, tol()).unwrap();
    assert!((r.basis[(0, 0)].abs() - 1.0).abs() < 1e-12);

    let diag = sym(2, &[(0, 0, vec![1.0, 0.0]), (1, 1, vec![0.0, 1.0])]);
    let r = find_f_adapted_basis(&diag, &id(2), 1, tol()).unwrap();
    assert!(triangular_defect(&diag, &r.basis) < 1e-9);
}

#[test]
fn f_adapted_random_and_non_identity_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=4 {
        for seed in 0..5 {
            let f = SymBilinear::from_fn(n, |_, _| vec![0.0; n], tol()).unwrap();
            let vals: Vec<Vec<f64>> = (0..n * n)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let f = SymBilinear::from_fn(n, |i, j| vals[i.min(j) * n + i.max(j)].clone(), tol()).unwrap_or(f);
            let r = find_f_adapted_basis(&f, &DMatrix::identity(n, n), seed, tol()).unwrap();
            assert!(triangular_defect(&f, &r.basis) < 1e-9);
        }
    }
    let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let f = sym(
        2,
        &[(0, 0, vec![1.0, 2.0]), (0, 1, vec![0.3, -1.0]), (1, 1, vec![0.0, 0.5])],
    );
    let r = find_f_adapted_basis(&f, &g, 9, tol()).unwrap();
    assert!(linalg::max_abs(&(r.basis.transpose() * &g * &r.basis - DMatrix::identity(2, 2))) < 1e-12);
    let v1 = r.basis.column(0).into_owned();
    let w = f.eval(&v1, &v1);
    // f(v₁, v₁) ∥ v₁.
    assert!((w[0] * v1[1] - w[1] * v1[0]).abs() < 1e-9);
}

#[test]
fn characteristic_polynomial_matches_eigenvalues() {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, -1.0]);
    let c = characteristic_coefficients(&a);
    // (λ−2)(λ−3)(λ+1) = λ³ − 4λ² + λ + 6.
    assert!((c[0] - 6.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12 && (c[2] + 4.0).abs() < 1e-12);
}

#[test]
fn identity_examples() {
    let f = sym(1, &[(0, 0, vec![2.0])]);
    let v = find_identity_element(&f, 0, tol()).unwrap().v;
    assert!((v[0] - 0.5).abs() < 1e-12);
    let f = sym(2, &[(0, 0, vec![1.0, 0.0]), (1, 1, vec![0.0, 1.0])]);
    let v = find_identity_element(&f, 0, tol()).unwrap().v;
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    // Not surjective.
    let f = sym(2, &[(0, 0, vec![1.0, 0.0])]);
    assert!(matches!(
        find_identity_element(&f, 0, tol()),
        Err(SktError::Hypothesis { .. })
    ));
    // Not associative: f(f(e1,e1),e2) = f(e2,e2) = e1 but f(f(e1,e2),e1) = 0.
    let f = sym(2, &[(0, 0, vec![0.0, 1.0]), (1, 1, vec![1.0, 0.0])]);
    assert!(matches!(
        find_identity_element(&f, 0, tol()),
        Err(SktError::Hypothesis { .. })
    ));
}

#[test]
fn identity_on_conjugated_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=3 {
        for _ in 0..20 {
            let (f, unit) = unital_model(n, &mut rng);
            let r = find_identity_element(&f, rng.gen(), tol()).unwrap();
            assert!(r.residual < 1e-8);
            assert!((&r.v - &unit).amax() < 1e-8);
            // f(v, u) = u gives v = f(u, .)⁻¹ u independently of the characteristic polynomial.
            let direct = f.op(&r.u).lu().solve(&r.u).unwrap();
            assert!((&r.v - direct).amax() < 1e-8);
            // f(v, .) ∘ f(w, .) = f(f(v, w), .) = f(w, .).
            let w = random_covector(n, &mut rng);
            assert!(linalg::max_abs(&(f.op(&r.v) * f.op(&w) - f.op(&w))) < 1e-8);
        }
    }
}

#[test]
fn normal_form_examples() {
    let id = |n| DMatrix::<f64>::identity(n, n);
    let r = f_normal_form(&SymBilinear::zero(3), &id(3), tol()).unwrap();
    assert_eq!((r.v1.ncols(), r.v2.ncols(), r.v3.ncols()), (0, 0, 3));

    let diag = sym(2, &[(0, 0, vec![2.0, 0.0]), (1, 1, vec![0.0, 3.0])]);
    let r = f_normal_form(&diag, &id(2), tol()).unwrap();
    assert_eq!((r.v1.ncols(), r.v2.ncols(), r.v3.ncols()), (2, 0, 0));
    let mut l = r.lambda.clone();
    l.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    assert!((l[0].abs() - 2.0).abs() < 1e-12 && (l[1].abs() - 3.0).abs() < 1e-12);

    let nil = sym(3, &[(2, 2, vec![0.0, 1.0, 0.0])]);
    let r = f_normal_form(&nil, &id(3), tol()).unwrap();
    assert_eq!((r.v1.ncols(), r.v2.ncols(), r.v3.ncols()), (0, 1, 2));
    assert!((r.v2[(1, 0)].abs() - 1.0).abs() < 1e-12);
    assert!(r.v3_spans_v2 && r.residual() < 1e-12);
    // e₃ lies in V₃.
    let e3 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let p = &r.v3 * (r.v3.transpose() * &e3);
    assert!((p - e3).amax() < 1e-12);

    let bad = sym(2, &[(0, 0, vec![0.0, 1.0]), (1, 1, vec![1.0, 0.0])]);
    assert!(f_normal_form(&bad, &id(2), tol()).is_err());
}

#[test]
fn normal_form_mixed_instance() {
    // V₁ = span{e₁} with λ = 2, V₂ = span{e₂}, V₃ ∋ e₃ with f(e₃,e₃) = e₂, rotated.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let base = sym(3, &[(0, 0, vec![2.0, 0.0, 0.0]), (2, 2, vec![0.0, 1.0, 0.0])]);
    let q = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let f = base.in_basis(&q.transpose(), &q);
    let r = f_normal_form(&f, &DMatrix::identity(3, 3), tol()).unwrap();
    assert_eq!((r.v1.ncols(), r.v2.ncols(), r.v3.ncols()), (1, 1, 1));
    assert!((r.lambda[0].abs() - 2.0).abs() < 1e-9);
    assert!(r.v3_spans_v2 && r.residual() < 1e-9, "{r:?}");
}

fn e(n: usize, i: usize, j: usize) -> AltForm {
    AltForm::basis(n, &[i, j])
}

fn std_j(n: usize) -> DMatrix<f64> {
    tensor::standard_j(n)
}

fn check_split(nu1: &AltForm, nu2: &AltForm, j: &DMatrix<f64>, s: &SplitPair) {
    let (r1, r2) = rotate_pair(nu1, nu2, s.angle);
    let m1 = tensor::two_form_matrix(&r1);
    let m2 = tensor::two_form_matrix(&r2);
    assert!(linalg::max_abs(&(m1 - decomposable_matrix(&s.alpha, j))) < 1e-7);
    assert!(linalg::max_abs(&(m2 - decomposable_matrix(&s.beta, j))) < 1e-7);
    let r = DMatrix::from_row_slice(
        2,
        2,
        &[s.rotation[0][0], s.rotation[0][1], s.rotation[1][0], s.rotation[1][1]],
    );
    assert!(linalg::max_abs(&(&r * r.transpose() - DMatrix::identity(2, 2))) < 1e-12);
}

#[test]
fn split_examples() {
    let j = std_j(2);
    // e¹² = −e¹∧J*e¹, so the decomposable pair needs the rotation by π.
    let (a, b) = (e(4, 0, 1), e(4, 2, 3));
    let s = split_rank_two_pair(&a, &b, &j, tol()).unwrap();
    check_split(&a, &b, &j, &s);
    assert!((s.angle.rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
    assert!((s.alpha[0].powi(2) + s.alpha[1].powi(2) - 1.0).abs() < 1e-12);
    assert!((s.beta[2].powi(2) + s.beta[3].powi(2) - 1.0).abs() < 1e-12);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = (&a + &b).scale(h);
    let m = (&a - &b).scale(h);
    let s = split_rank_two_pair(&p, &m, &j, tol()).unwrap();
    check_split(&p, &m, &j, &s);
    let quarter = (s.angle / std::f64::consts::FRAC_PI_4).round();
    assert!((s.angle - quarter * std::f64::consts::FRAC_PI_4).abs() < 1e-12 && quarter as i64 % 2 != 0);

    let zero = AltForm::zeros(4, 2, 0);
    let s = split_rank_two_pair(&a, &zero, &j, tol()).unwrap();
    check_split(&a, &zero, &j, &s);
    assert!(s.beta.amax() < 1e-12 && (s.alpha.norm() - 1.0).abs() < 1e-12, "{s:?}");

    // e¹²+e³⁴ alone has non-vanishing square.
    assert!(split_rank_two_pair(&p, &zero, &j, tol()).is_err());
    // e¹³ is not of type (1,1).
    assert!(split_rank_two_pair(&e(4, 0, 2), &zero, &j, tol()).is_err());
}

#[test]
fn rank_conditions_examples() {
    let n = 8;
    let z = AltForm::zeros(n, 2, 0);
    let r = verify_rank_conditions(&z, &z, &z, &z, tol()).unwrap();
    assert_eq!((r.theta_rank, r.kernel_dim, r.codim), (0, 8, 0));

    let s1 = &(&e(n, 0, 1) + &e(n, 2, 3)) + &e(n, 4, 5);
    let s2 = &(&e(n, 0, 1) + &e(n, 2, 3)) - &e(n, 4, 5);
    let re = &e(n, 0, 2) - &e(n, 1, 3);
    let im = &e(n, 0, 3) + &e(n, 1, 2);
    let r = verify_rank_conditions(&s1, &s2, &re, &im, tol()).unwrap();
    assert_eq!((r.theta_rank, r.codim), (2, 6));
    assert!(r.holds);

    assert!(verify_rank_conditions(&s1, &z, &z, &z, tol()).is_err());
}

#[test]
fn j_relation_examples() {
    let j = std_j(1);
    let id = DMatrix::identity(2, 2);
    assert!(check_2x2_j_relation(&id, &id, &j, tol()).unwrap().holds);
    let (s, c) = 0.7f64.sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    assert!(check_2x2_j_relation(&rot, &rot, &j, tol()).unwrap().holds);
    let sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    assert!(check_2x2_j_relation(&sym, &id, &j, tol()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_recovers_rotated_decomposables(seed in any::<u64>(), phi in -3.2f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = std_j(4);
        let (a, b) = (random_covector(8, &mut rng), random_covector(8, &mut rng));
        let (nu1, nu2) = (form(&decomposable_matrix(&a, &j)), form(&decomposable_matrix(&b, &j)));
        let (r1, r2) = rotate_pair(&nu1, &nu2, phi);
        let s = split_rank_two_pair(&r1, &r2, &j, tol()).unwrap();
        check_split(&r1, &r2, &j, &s);
        // The original pair is recovered.
        prop_assert!(linalg::max_abs(&(decomposable_matrix(&s.alpha, &j) - tensor::two_form_matrix(&nu1))) < 1e-7);
        prop_assert!(linalg::max_abs(&(decomposable_matrix(&s.beta, &j) - tensor::two_form_matrix(&nu2))) < 1e-7);
    }

    #[test]
    fn j_relation_lemma_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = std_j(1);
        if let Some((a1, a2)) = j_relation_instance(&j, &mut rng) {
            prop_assert!(check_2x2_j_relation(&a1, &a2, &j, tol()).unwrap().holds);
        }
    }
}
