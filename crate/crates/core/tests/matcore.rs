use chronocalc::linalg::{eigh, inverse};
use chronocalc::matcore::{expm, is_dissipative, resolvent, sqrt_cutoff, yosida};
use chronocalc::sample::{random_dissipative, random_hermitian, random_matrix, random_unit_vector, rng};
use chronocalc::{CMatrix, Complex, Error, C64};
use proptest::prelude::*;

/// Taylor series summed until the terms stop changing the sum, with Kahan compensation per entry.
fn taylor_expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let mut sum = CMatrix::identity(n);
    let mut comp = CMatrix::zeros(n);
    let mut term = CMatrix::identity(n);
    for k in 1..200 {
        term = term.matmul(a).scale_real(1.0 / k as f64);
        let before = sum.clone();
        for (i, t) in term.as_slice().iter().enumerate() {
            let y = *t - comp.as_slice()[i];
            let s = sum.as_slice()[i] + y;
            comp.as_mut_slice()[i] = (s - sum.as_slice()[i]) - y;
            sum.as_mut_slice()[i] = s;
        }
        if sum == before && k > 10 {
            break;
        }
    }
    sum
}

fn rel_op(x: &CMatrix, y: &CMatrix) -> f64 {
    (x - y).op_norm() / y.op_norm()
}

#[test]
fn expm_zero_and_nilpotent() {
    assert_eq!(expm(&CMatrix::zeros(2)).unwrap(), CMatrix::identity(2));
    let n = CMatrix::from_f64_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert_eq!(expm(&n).unwrap(), CMatrix::from_f64_rows(&[&[1.0, 1.0], &[0.0, 1.0]]));
}

#[test]
fn expm_matches_taylor_oracle_seed_42() {
    let a = random_matrix::<f64>(4, &mut rng(42));
    let e = expm(&a).unwrap();
    let oracle = taylor_expm(&a);
    assert!((&e - &oracle).op_norm() <= 1e-12, "{:e}", (&e - &oracle).op_norm());
}

#[test]
fn expm_defective_block() {
    // Jordan block J = λI + N: e^J = e^λ (I + N + N²/2)
    let lam = -0.7;
    let j = CMatrix::from_f64_rows(&[&[lam, 1.0, 0.0], &[0.0, lam, 1.0], &[0.0, 0.0, lam]]);
    let e = lam.exp();
    let expected = CMatrix::from_f64_rows(&[&[e, e, e / 2.0], &[0.0, e, e], &[0.0, 0.0, e]]);
    assert!(rel_op(&expm(&j).unwrap(), &expected) < 1e-14);
}

#[test]
fn expm_of_large_skew_hermitian_against_eigendecomposition() {
    // exp(iH) = V diag(e^{iλ}) V*, with ‖H‖ around 40
    let mut r = rng(5);
    for _ in 0..5 {
        let h = random_hermitian::<f64>(6, &mut r).scale_real(20.0);
        let eig = eigh(&h).unwrap();
        let v = &eig.vectors;
        let d = CMatrix::diag(&eig.values.iter().map(|&l| C64::new(0.0, l).exp()).collect::<Vec<_>>());
        let oracle = v.matmul(&d).matmul(&v.adjoint());
        let e = expm(&h.scale(C64::i())).unwrap();
        assert!(rel_op(&e, &oracle) < 1e-12, "{:e}", rel_op(&e, &oracle));
    }
}

#[test]
fn expm_overflow_is_a_range_error() {
    assert!(matches!(expm(&CMatrix::diag_real(&[1e308, 0.0])), Err(Error::Range(_))));
}

#[test]
fn resolvent_examples() {
    assert_eq!(resolvent(1.0, &CMatrix::zeros(3)).unwrap(), CMatrix::identity(3));
    let r = resolvent(1.0, &CMatrix::diag_real(&[-1.0, -2.0])).unwrap();
    assert!(r.max_abs_diff(&CMatrix::diag_real(&[0.5, 1.0 / 3.0])) < 1e-15);

    let a = random_dissipative::<f64>(4, 0.0, &mut rng(11));
    let r = resolvent(2.0, &a).unwrap();
    assert!(r.op_norm() <= 0.5 + 1e-12);
    let mut shifted = a.scale_real(-1.0);
    for i in 0..4 {
        shifted[(i, i)] += C64::new(2.0, 0.0);
    }
    assert!((r.matmul(&shifted) - CMatrix::identity(4)).op_norm() <= 1e-12);
    assert!(r.max_abs_diff(&inverse(&shifted).unwrap()) < 1e-14);
}

#[test]
fn resolvent_at_an_eigenvalue_is_singular() {
    let err = resolvent(2.0, &CMatrix::diag_real(&[2.0, -1.0])).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }), "{err}");
    assert!(resolvent(0.0, &CMatrix::identity(2)).is_err());
}

#[test]
fn yosida_scalar_and_commutation() {
    let y = yosida(&CMatrix::diag_real(&[-1.0]), 3.0).unwrap();
    assert!((y[(0, 0)] - C64::new(-0.75, 0.0)).norm() < 1e-15);

    let a = random_matrix::<f64>(4, &mut rng(3));
    let y = yosida(&a, 10.0).unwrap();
    assert!(a.commutator(&y).op_norm() <= 1e-12);
    // ‖A_λ − A‖ ≤ ‖A²‖ ‖R(λ, A)‖
    let bound = a.matmul(&a).op_norm() * resolvent(10.0, &a).unwrap().op_norm();
    assert!((&y - &a).op_norm() <= bound * (1.0 + 1e-12));
}

#[test]
fn yosida_error_decays_like_one_over_lambda() {
    let a = random_dissipative::<f64>(4, 0.0, &mut rng(8));
    let lambdas = [10.0, 1e2, 1e3, 1e4];
    let errs: Vec<f64> = lambdas.iter().map(|&l| (&yosida(&a, l).unwrap() - &a).op_norm()).collect();
    let slope = fit_slope(&lambdas, &errs);
    assert!((slope + 1.0).abs() <= 0.05, "slope {slope}");
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[test]
fn dissipativity_examples() {
    let d = is_dissipative(&CMatrix::identity(3).scale_real(-1.0), 0.0);
    assert!(d.dissipative && (d.margin + 1.0).abs() < 1e-14);
    let h = random_hermitian::<f64>(4, &mut rng(1));
    let d = is_dissipative(&h.scale(C64::i()), 1e-12);
    assert!(d.dissipative && d.margin.abs() < 1e-12);
    let d = is_dissipative(&CMatrix::diag_real(&[1.0, -2.0]), 0.0);
    assert!(!d.dissipative && (d.margin - 1.0).abs() < 1e-14);
}

#[test]
fn sqrt_cutoff_examples() {
    assert_eq!(sqrt_cutoff(&CMatrix::diag_real(&[2.0]), 0.0).unwrap(), CMatrix::diag_real(&[2.0]));
    let v = sqrt_cutoff(&CMatrix::diag_real(&[3.0]), 1.0).unwrap();
    assert!((v[(0, 0)].re - 3.0 / 10f64.sqrt()).abs() < 1e-15);

    let h = random_hermitian::<f64>(8, &mut rng(21)).scale_real(10.0);
    let rho = 1e-4;
    let vr = sqrt_cutoff(&h, rho).unwrap();
    assert!(vr.is_hermitian(1e-13));
    // oracle: ‖V_ρ − V‖ = max |v − v/√(1+ρv²)| over the spectrum
    let eig = eigh(&h).unwrap();
    let oracle = eig.values.iter().map(|&v| (v - v / (1.0 + rho * v * v).sqrt()).abs()).fold(0.0, f64::max);
    assert!(((&vr - &h).op_norm() - oracle).abs() <= 1e-12);
    assert!(vr.op_norm() <= 1.0 / rho.sqrt());
}

#[test]
fn sqrt_cutoff_rejects_non_hermitian() {
    let m = CMatrix::from_f64_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert!(matches!(sqrt_cutoff(&m, 0.1), Err(Error::Domain(_))));
}

#[test]
fn resolvent_identity() {
    let a = random_matrix::<f64>(4, &mut rng(17));
    let (l, m) = (5.0, 7.5);
    let rl = resolvent(l, &a).unwrap();
    let rm = resolvent(m, &a).unwrap();
    let lhs = &rl - &rm;
    let rhs = rl.matmul(&rm).scale_real(m - l);
    assert!((&lhs - &rhs).op_norm() <= 1e-10);
}

fn matrix_strategy(dim: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        CMatrix::from_vec(dim, v.into_iter().map(|(re, im)| Complex::new(re * scale, im * scale)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_inverse_pair(a in matrix_strategy(4, 2.5)) {
        let p = expm(&a).unwrap().matmul(&expm(&a.scale_real(-1.0)).unwrap());
        prop_assert!((&p - &CMatrix::identity(4)).op_norm() <= 1e-10);
    }

    #[test]
    fn semigroup_law(a in matrix_strategy(3, 1.0), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let lhs = expm(&a.scale_real(s + t)).unwrap();
        let rhs = expm(&a.scale_real(s)).unwrap().matmul(&expm(&a.scale_real(t)).unwrap());
        prop_assert!((&lhs - &rhs).op_norm() <= 1e-10 * lhs.op_norm().max(1.0));
    }

    #[test]
    fn dissipative_generators_contract(seed in 0u64..1000, t in 0.0..10.0f64) {
        let a = random_dissipative::<f64>(4, 0.0, &mut rng(seed));
        prop_assert!(expm(&a.scale_real(t)).unwrap().op_norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn yosida_converges_on_every_vector(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_dissipative::<f64>(3, 0.0, &mut r);
        let x = random_unit_vector::<f64>(3, &mut r);
        let ax = a.mul_vec(&x);
        let e1 = (&yosida(&a, 1e3).unwrap().mul_vec(&x) - &ax).norm();
        let e2 = (&yosida(&a, 1e4).unwrap().mul_vec(&x) - &ax).norm();
        prop_assert!(e2 < e1);
        prop_assert!(((e1 / e2).log10() - 1.0).abs() < 0.05);
    }
}
