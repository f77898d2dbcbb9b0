#![allow(dead_code)]

use chronocalc::sample::{random_dissipative, rng};
use chronocalc::{ContinuityClass, Family};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `A(t) = D₀ + ½(1 + sin 3t) D₁` with both `Dᵢ` dissipative, on `[0, 1]`.
pub fn smooth_dissipative(dim: usize, seed: u64) -> Family {
    let mut r = rng(seed);
    let d0 = random_dissipative::<f64>(dim, 0.0, &mut r);
    let d1 = random_dissipative::<f64>(dim, 0.0, &mut r);
    Family::from_fn(0.0, 1.0, dim, ContinuityClass::Smooth, move |t: f64| {
        let mut m = d0.clone();
        m.axpy_real(0.5 * (1.0 + (3.0 * t).sin()), &d1);
        m
    })
    .unwrap()
}

/// Dormand–Prince 5(4) with step control, integrating `y' = f(t, y)` from `t0` to `t1`.
pub fn dopri5(f: impl Fn(f64, &[f64]) -> Vec<f64>, t0: f64, t1: f64, y0: &[f64], tol: f64) -> Vec<f64> {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = (t1 - t0) / 100.0;
    while t < t1 {
        h = h.min(t1 - t);
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        for s in 0..7 {
            let ys: Vec<f64> = (0..n).map(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
            k.push(f(t + C[s] * h, &ys));
        }
        let y5: Vec<f64> = (0..n).map(|i| y[i] + h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>()).collect();
        let err = (0..n)
            .map(|i| (h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>()).abs() / (1.0 + y5[i].abs()))
            .fold(0.0, f64::max);
        if err <= tol {
            t += h;
            y = y5;
        }
        h *= (0.9 * (tol / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
    }
    y
}
