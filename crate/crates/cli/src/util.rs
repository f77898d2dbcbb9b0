use chronocalc::sample::{random_dissipative, rng};
use chronocalc::{CMatrix, ContinuityClass, Family, C64};

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_slope(&lx, &ly)
}

pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// A(t) = D₀ + ½(1 + sin 3t)D₁ on [0, 1] with both Dᵢ dissipative.
pub fn smooth_dissipative(dim: usize, seed: u64) -> Family {
    let mut r = rng(seed);
    let d0 = random_dissipative::<f64>(dim, 0.0, &mut r);
    let d1 = random_dissipative::<f64>(dim, 0.0, &mut r);
    Family::from_fn(0.0, 1.0, dim, ContinuityClass::Smooth, move |t: f64| {
        let mut m = d0.clone();
        m.axpy_real(0.5 * (1.0 + (3.0 * t).sin()), &d1);
        m
    })
    .expect("smooth dissipative family")
}

/// Second difference with Dirichlet ends on `n` interior points of an interval of length `len`.
pub fn dirichlet_laplacian(n: usize, len: f64) -> CMatrix {
    let h = len / (n + 1) as f64;
    let c = 1.0 / (h * h);
    CMatrix::from_fn(n, |i, j| {
        let v = if i == j {
            -2.0 * c
        } else if i.abs_diff(j) == 1 {
            c
        } else {
            0.0
        };
        C64::new(v, 0.0)
    })
}

/// Classical RK4 on a scalar ODE, refined by one Richardson step (fifth order).
pub fn rk4_richardson(f: impl Fn(f64, f64) -> f64, t0: f64, t1: f64, y0: f64, steps: usize) -> f64 {
    let run = |n: usize| {
        let h = (t1 - t0) / n as f64;
        let mut y = y0;
        for k in 0..n {
            let t = t0 + k as f64 * h;
            let k1 = f(t, y);
            let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
            let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
            let k4 = f(t + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        y
    };
    let (coarse, fine) = (run(steps), run(2 * steps));
    fine + (fine - coarse) / 15.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn rk4_on_exponential() {
        let y = rk4_richardson(|_, y| -y, 0.0, 1.0, 1.0, 64);
        assert!((y - (-1f64).exp()).abs() < 1e-12);
    }
}
