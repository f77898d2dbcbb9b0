use chronocalc_kernels::{bessel_j, bessel_k, bessel_k2, bessel_y, hankel_h2_1, hankel_h2_2, KernelError};
use proptest::prelude::*;
use std::f64::consts::PI;

// Reference values from a 40-digit mpmath evaluation, frozen here.
const K_TABLE: &[(f64, [f64; 3])] = &[
    (0.001, [7.0236888005623813436, 999.99623815608557428, 1999999.5000009717109]),
    (0.1, [2.4270690247020166125, 9.8538447808706061348, 199.50396464211413931]),
    (0.5, [0.92441907122766586178, 1.6564411200033008937, 7.5501835512408694366]),
    (1.0, [0.42102443824070833334, 0.60190723019723457474, 1.6248388986351774828]),
    (2.0, [0.11389387274953343565, 0.13986588181652242728, 0.25375975456605586294]),
    (5.0, [0.0036910983340425942747, 0.0040446134454521642084, 0.0053089437122234599581]),
    (11.5, [3.7050381659564215186e-6, 3.8628941461609980035e-6, 4.3768458435496385627e-6]),
    (12.5, [1.3084036967769774253e-6, 1.3597678438215175933e-6, 1.5259665517884202403e-6]),
    (20.0, [5.7412378153365242927e-10, 5.8830579695570381777e-10, 6.3295436122922281105e-10]),
    (100.0, [4.6566282291759020189e-45, 4.6798537356369092866e-45, 4.7502253038886402047e-45]),
    (699.5, [7.7019099244821636299e-306, 7.7074132562924498155e-306, 7.7239468458725637723e-306]),
];

// (z, [J0, J1, J2, Y0, Y1, Y2])
const JY_TABLE: &[(f64, [f64; 6])] = &[
    (0.001, [0.999999750000015625, 0.00049999993750000260417, 1.2499998958333365885e-7, -4.471416611375923269, -636.62216723113942807, -1273239.8630456674802]),
    (0.1, [0.99750156206604003228, 0.049937526036241997556, 0.0012489586587999188454, -1.5342386513503668441, -6.4589510947020269877, -127.64478324269017291]),
    (1.0, [0.76519768655796655145, 0.44005058574493351596, 0.11490348493190048047, 0.088256964215676957983, -0.78121282130028871655, -1.6506826068162543911]),
    (3.0, [-0.26005195490193343762, 0.33905895852593645893, 0.48609126058589107691, 0.37685001001279038197, 0.32467442479179997844, -0.16040039348492372968]),
    (7.5, [0.26633965788037839687, 0.13524842757970550518, -0.23027341052579026215, 0.11731328614820863084, -0.2591285104861162518, -0.18641422227783963132]),
    (11.9, [0.025049441699589563728, -0.22898324966192407078, -0.063534021474702852935, -0.2298332139433750764, -0.034711498334030529216, 0.22399934867715145804]),
    (12.1, [0.069666773606807388498, -0.21574897337692477718, -0.10532776094183627729, -0.21843838055092545768, -0.078736931451395820909, 0.20542401171598399968]),
    (15.0, [-0.014224472826780773234, 0.20510403861352276115, 0.04157167797525047472, 0.20546429603891826479, 0.02107362803687351194, -0.20265447896733512987]),
    (30.0, [-0.086367983581040211336, -0.11875106261662293652, 0.078451246073265348901, -0.11729573168666402525, 0.084425570661747234891, 0.12292410306411384091]),
    (100.0, [0.019985850304223122424, -0.077145352014112158033, -0.021528757344505365585, -0.077244313365083152254, -0.020372312002759793305, 0.076836867125027956388]),
    (1000.0, [0.024786686152420174561, 0.0047283119070895239176, -0.024777229528605995513, 0.0047159179776228133998, -0.024784331292351778915, -0.0047654866402075169576]),
    (9999.0, [-0.00076458748603919629508, 0.0079424897098126263364, 0.00076617614284683958467, 0.0079425279330800067652, 0.00076498465310739402624, -0.0079423749208481621019]),
];

#[test]
fn k2_at_one() {
    assert!((bessel_k2(1.0).unwrap() - 1.6248388986351774828).abs() <= 1e-10);
}

#[test]
fn k_matches_high_precision_values() {
    for &(z, refs) in K_TABLE {
        for (n, &r) in refs.iter().enumerate() {
            let v = bessel_k(n as u32, z).unwrap();
            assert!(((v - r) / r).abs() <= 1e-10, "K{n}({z}) = {v:e}, want {r:e}");
        }
    }
}

#[test]
fn j_and_y_match_high_precision_values() {
    for &(z, refs) in JY_TABLE {
        for n in 0..3u32 {
            let (j, y) = (bessel_j(n, z).unwrap(), bessel_y(n, z).unwrap());
            let (rj, ry) = (refs[n as usize], refs[3 + n as usize]);
            // absolute near zeros of the oscillating functions, relative where they are large
            assert!((j - rj).abs() <= 1e-10 * rj.abs().max(1.0), "J{n}({z}) = {j:e}, want {rj:e}");
            assert!((y - ry).abs() <= 1e-10 * ry.abs().max(1.0), "Y{n}({z}) = {y:e}, want {ry:e}");
        }
    }
}

#[test]
fn out_of_range_arguments() {
    for z in [0.0, -1.0, 700.0, f64::NAN] {
        assert!(matches!(bessel_k2(z), Err(KernelError::Range(_))), "{z}");
    }
    for z in [0.0, 1e4, 2e4] {
        assert!(matches!(hankel_h2_1(z), Err(KernelError::Range(_))));
        assert!(matches!(hankel_h2_2(z), Err(KernelError::Range(_))));
    }
}

fn wronskian_defect(z: f64) -> f64 {
    let (j1, j2) = (bessel_j(1, z).unwrap(), bessel_j(2, z).unwrap());
    let (y1, y2) = (bessel_y(1, z).unwrap(), bessel_y(2, z).unwrap());
    // C₂' = C₁ − (2/z)C₂
    let dj2 = j1 - 2.0 * j2 / z;
    let dy2 = y1 - 2.0 * y2 / z;
    let w = j2 * dy2 - dj2 * y2;
    let expected = 2.0 / (PI * z);
    (w - expected).abs() / expected
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hankel_sum_is_twice_j2(z in 1e-2..9999.0f64) {
        let s = hankel_h2_1(z).unwrap() + hankel_h2_2(z).unwrap();
        let j2 = bessel_j(2, z).unwrap();
        prop_assert!((s.re - 2.0 * j2).abs() <= 1e-10);
        prop_assert_eq!(s.im, 0.0);
    }

    #[test]
    fn wronskian_of_order_two(z in 0.05..9999.0f64) {
        prop_assert!(wronskian_defect(z) <= 1e-9, "z={} defect={:e}", z, wronskian_defect(z));
    }

    #[test]
    fn wronskian_across_the_switchover(z in 0.01..20.0f64) {
        prop_assert!(wronskian_defect(z) <= 1e-9, "z={} defect={:e}", z, wronskian_defect(z));
    }

    #[test]
    fn k_recurrence_and_positivity(z in 1e-3..699.0f64) {
        let (k0, k1, k2) = (bessel_k(0, z).unwrap(), bessel_k(1, z).unwrap(), bessel_k(2, z).unwrap());
        prop_assert!(0.0 < k0 && k0 < k1 && k1 < k2);
        prop_assert!(((k2 - k0 - 2.0 * k1 / z) / k2).abs() <= 1e-14);
    }
}
