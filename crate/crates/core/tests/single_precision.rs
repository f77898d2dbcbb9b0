use chronocalc::chrono::TimeOrderedExpr;
use chronocalc::evolution::propagate::{propagate, q_integral};
use chronocalc::gauge::hk_integrate;
use chronocalc::matcore::{expm, yosida};
use chronocalc::sample::{random_matrix, rng};
use chronocalc::{CMatrix, CMatrix32, ContinuityClass, GeneratorFamily, Real};

#[test]
fn expm_in_single_precision_tracks_double() {
    let a: CMatrix = random_matrix(4, &mut rng(42));
    let e64 = expm(&a).unwrap();
    let e32 = expm(&a.cast::<f32>()).unwrap().cast::<f64>();
    assert!((&e32 - &e64).op_norm() / e64.op_norm() < 1e-5);
    assert!(f32::is_single_precision() && !f64::is_single_precision());
}

#[test]
fn evolution_is_generic() {
    let f = GeneratorFamily::<f32>::from_fn(0.0, 1.0, 2, ContinuityClass::Smooth, |t| {
        CMatrix32::diag_real(&[-1.0 - t, -2.0 * t])
    })
    .unwrap();
    let q = q_integral(&f, 1.0, 1e-4).unwrap();
    assert!(q.max_abs_diff(&CMatrix32::diag_real(&[-1.5, -1.0])) < 1e-4);
    let u = propagate(&f, 1.0, 64).unwrap();
    assert!((&u - &expm(&q).unwrap()).op_norm() < 1e-5);
    let r = hk_integrate(&f, 0.0, 0.5, 1e-4).unwrap();
    assert!(r.value.is_finite());
}

#[test]
fn algebra_and_yosida_are_generic() {
    let a: CMatrix32 = random_matrix(3, &mut rng(1));
    let x = TimeOrderedExpr::lift((0.0f32, 1.0), 0.5, &a).unwrap();
    assert_eq!(x.disentangle(), a);
    let y = yosida(&a, 1e3f32).unwrap();
    assert!((&y - &a).op_norm() < 1e-2);
}
