use chronocalc::chrono::{expansional_expand, ExprJson, TimeFactor, TimeOrderedExpr, TimeOrderedTerm};
use chronocalc::matcore::expm;
use chronocalc::sample::{random_matrix, rng};
use chronocalc::{CMatrix, Complex, Error, C64};
use proptest::prelude::*;

type Expr = TimeOrderedExpr<f64>;
const DOM: (f64, f64) = (0.0, 1.0);

fn lift(t: f64, m: &CMatrix) -> Expr {
    Expr::lift(DOM, t, m).unwrap()
}

fn pair(seed: u64) -> (CMatrix, CMatrix) {
    let mut r = rng(seed);
    (random_matrix(3, &mut r), random_matrix(3, &mut r))
}

#[test]
fn lift_then_disentangle_is_identity() {
    let (a, _) = pair(1);
    assert_eq!(lift(0.5, &a).disentangle(), a);
    assert!(matches!(Expr::lift(DOM, 1.5, &a), Err(Error::Domain(_))));
}

#[test]
fn lifted_identity_is_the_unit() {
    let (a, b) = pair(2);
    let x = lift(0.2, &a).add(&lift(0.7, &b)).unwrap();
    let one = lift(0.4, &CMatrix::identity(3));
    assert_eq!(x.mul(&one).unwrap(), x);
    assert_eq!(one.mul(&x).unwrap(), x);
    assert_eq!(one, Expr::identity(3, DOM).unwrap());
}

#[test]
fn distinct_times_commute_equal_times_do_not() {
    let (a, b) = pair(3);
    let (x, y) = (lift(0.3, &a), lift(0.7, &b));
    assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());

    let (x, y) = (lift(0.5, &a), lift(0.5, &b));
    let xy = x.mul(&y).unwrap();
    let yx = y.mul(&x).unwrap();
    assert_eq!(xy.terms()[0].factors, vec![TimeFactor { time: 0.5, matrix: a.matmul(&b) }]);
    assert_eq!(yx.terms()[0].factors, vec![TimeFactor { time: 0.5, matrix: b.matmul(&a) }]);
}

#[test]
fn disentanglement_identities() {
    let (a, b) = pair(4);
    let (s, t) = (0.25, 0.75);
    let bs_at = lift(s, &b).mul(&lift(t, &a)).unwrap();
    assert_eq!(bs_at.disentangle(), a.matmul(&b));

    let other = lift(t, &b).mul(&lift(s, &a)).unwrap();
    let diff = bs_at.sub(&other).unwrap().disentangle();
    assert!(diff.max_abs_diff(&a.commutator(&b)) < 1e-15);

    // dT is not injective: moving a lone factor to another time leaves its image unchanged.
    let moved = lift(s, &a).exchange(s, t).unwrap();
    assert_ne!(moved, lift(s, &a));
    assert_eq!(moved.disentangle(), lift(s, &a).disentangle());
}

#[test]
fn exchange_axioms() {
    let (a, b) = pair(5);
    let times = [0.0, 0.2, 0.5, 0.9, 1.0];
    for &t in &times {
        for &s in &times {
            let x = lift(0.2, &a).mul(&lift(0.9, &b)).unwrap().add(&lift(0.5, &b)).unwrap();
            // involution
            assert_eq!(x.exchange(t, s).unwrap().exchange(s, t).unwrap(), x);
            for &tp in &times {
                // factors away from {t, t'} are untouched
                for &u in &times {
                    if u != t && u != tp {
                        assert_eq!(lift(u, &a).exchange(t, tp).unwrap(), lift(u, &a));
                    }
                }
                // composition on a factor sitting at t, and on factors at unrelated times
                for &u in &times {
                    if u == t || (u != s && u != tp) {
                        let lhs = lift(u, &a).exchange(t, s).unwrap().exchange(s, tp).unwrap();
                        let rhs = lift(u, &a).exchange(t, tp).unwrap();
                        assert_eq!(lhs, rhs, "t={t} s={s} t'={tp} u={u}");
                    }
                }
            }
        }
    }
}

#[test]
fn exchange_outside_domain_is_rejected() {
    let (a, _) = pair(6);
    assert!(lift(0.5, &a).exchange(0.5, 2.0).is_err());
}

#[test]
fn single_time_restriction_is_bijective() {
    let (a, b) = pair(7);
    assert_ne!(lift(0.4, &a), lift(0.4, &b));
    assert_eq!(lift(0.4, &a).disentangle(), a);
    assert_eq!(lift(0.4, &b).disentangle(), b);
}

#[test]
fn json_round_trip() {
    let (a, b) = pair(8);
    let x = lift(0.1, &a).mul(&lift(0.6, &b)).unwrap().scale(C64::new(0.5, -2.0));
    let text = serde_json::to_string(&x.to_json()).unwrap();
    let back: ExprJson = serde_json::from_str(&text).unwrap();
    assert_eq!(Expr::from_json(&back).unwrap(), x);
}

#[test]
fn empty_expression_disentangles_to_zero() {
    assert_eq!(Expr::zero(2, DOM).unwrap().disentangle(), CMatrix::zeros(2));
}

#[test]
fn from_terms_merges_in_list_order() {
    let (a, b) = pair(9);
    let term = TimeOrderedTerm {
        coeff: Complex::new(1.0, 0.0),
        factors: vec![
            TimeFactor { time: 0.6, matrix: a.clone() },
            TimeFactor { time: 0.3, matrix: b.clone() },
            TimeFactor { time: 0.6, matrix: b.clone() },
        ],
    };
    let x = Expr::from_terms(3, DOM, vec![term]).unwrap();
    assert_eq!(x.terms()[0].factors[0].time, 0.3);
    assert_eq!(x.terms()[0].factors[1].matrix, a.matmul(&b));
    assert_eq!(x.times(), vec![0.3, 0.6]);
}

#[test]
fn expansional_trivial_orders() {
    let (a, b) = pair(10);
    let e = expm(&a).unwrap();
    assert_eq!(expansional_expand(&a, &b, 0, 8).unwrap().value, e);
    for k in 0..=3 {
        assert_eq!(expansional_expand(&a, &CMatrix::zeros(3), k, 8).unwrap().value, e);
    }
    assert!(expansional_expand(&a, &b, 4, 8).is_err());
    assert!(expansional_expand(&a, &b, 1, 7).is_err());
}

#[test]
fn expansional_defect_scales_with_order() {
    let mut r = rng(11);
    let a = random_matrix::<f64>(4, &mut r);
    let b = random_matrix::<f64>(4, &mut r);
    let eps = [1e-1, 1e-2, 1e-3];
    for k in 1..=2usize {
        let errs: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let be = b.scale_real(e);
                let exact = expm(&(&a + &be)).unwrap();
                (&exact - &expansional_expand(&a, &be, k, 32).unwrap().value).op_norm()
            })
            .collect();
        let slope = (errs[2] / errs[0]).log10() / (eps[2] / eps[0]).log10();
        assert!((slope - (k as f64 + 1.0)).abs() <= 0.1, "k={k} slope={slope} errs={errs:?}");
        // the fitted constant C = err/ε^{k+1} is stable
        let c: Vec<f64> = errs.iter().zip(&eps).map(|(e, x)| e / x.powi(k as i32 + 1)).collect();
        assert!((c[1] / c[2] - 1.0).abs() < 0.05, "{c:?}");
    }
}

fn random_expr(seed: u64, times: &[f64]) -> Expr {
    let mut r = rng(seed);
    let mut x = Expr::zero(2, DOM).unwrap();
    for &t in times {
        x = x.add(&lift(t, &random_matrix(2, &mut r))).unwrap();
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
        // shared time tags exercise the equal-time multiplication
        let x = random_expr(s1, &[0.25, 0.5]);
        let y = random_expr(s2, &[0.5, 0.75]);
        let z = random_expr(s3, &[0.25, 0.75]);
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert!(l.disentangle().max_abs_diff(&r.disentangle()) < 1e-13);
        prop_assert_eq!(l.terms().len(), r.terms().len());
    }

    #[test]
    fn disjoint_times_commute_exactly(s1 in 0u64..1000, s2 in 0u64..1000) {
        let x = random_expr(s1, &[0.1, 0.3]);
        let y = random_expr(s2, &[0.6, 0.8]);
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }

    #[test]
    fn disentangle_is_multiplicative_on_ordered_products(s1 in 0u64..1000, s2 in 0u64..1000) {
        let late = random_expr(s1, &[0.6, 0.9]);
        let early = random_expr(s2, &[0.1, 0.4]);
        let lhs = late.mul(&early).unwrap().disentangle();
        let rhs = late.disentangle().matmul(&early.disentangle());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }
}
