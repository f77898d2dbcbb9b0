//! Bessel functions of integer order 0..=2 for real positive arguments.
//!
//! J and Y use the ascending series below |z| = 12 and the Hankel asymptotic
//! expansion above it. K uses the trapezoid rule on K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh νt dt,
//! which converges geometrically in the step. Order 2 comes from the three-term
//! recurrence except for J₂ below the switchover, where the series is used directly.

use crate::{KernelError, Result, C64};
use std::f64::consts::{FRAC_2_PI, FRAC_PI_4, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Switchover between series and asymptotic expansions.
pub const SERIES_LIMIT: f64 = 12.0;
/// Upper end of the validated range for K.
pub const K_MAX_ARG: f64 = 700.0;
/// Upper end of the validated range for J, Y and the Hankel functions.
pub const HANKEL_MAX_ARG: f64 = 1.0e4;

fn check_order(n: u32) -> Result<()> {
    if n > 2 {
        return Err(KernelError::Domain(format!("Bessel order {n} not supported (0..=2)")));
    }
    Ok(())
}

fn check_range(z: f64, hi: f64, what: &str) -> Result<()> {
    if !(z > 0.0 && z < hi) {
        return Err(KernelError::Range(format!("{what}: argument {z} outside (0, {hi})")));
    }
    Ok(())
}

/// (z/2)^ν Σ (−z²/4)^k / (k! (k+ν)!)
fn j_series(nu: u32, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = (0.5 * z).powi(nu as i32);
    for k in 1..=nu {
        term /= k as f64;
    }
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + nu) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
    }
    sum
}

fn y0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -q / (k as f64 * k as f64);
        harmonic += 1.0 / k as f64;
        let d = -term * harmonic;
        sum += d;
        if d.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
    }
    FRAC_2_PI * (((0.5 * z).ln() + EULER_GAMMA) * j_series(0, z) + sum)
}

fn y1_series(z: f64) -> f64 {
    // ψ(k+1) + ψ(k+2) = −2γ + H_k + H_{k+1}
    let q = -0.25 * z * z;
    let mut term = 0.5 * z;
    let mut hk = 0.0;
    let mut sum = term * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        hk += 1.0 / k as f64;
        let d = term * (-2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (k + 1) as f64);
        sum += d;
        if d.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
    }
    FRAC_2_PI * (0.5 * z).ln() * j_series(1, z) - FRAC_2_PI / z - sum / PI
}

/// Hankel asymptotic expansion for order ν ∈ {0, 1}: returns (J_ν, Y_ν).
fn asymptotic(nu: u32, z: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    // χ = z − (ν/2 + 1/4)π, expanded to keep the phase exact for large z
    let phi = (2 * nu + 1) as f64 * FRAC_PI_4;
    let (sz, cz) = z.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let cos_chi = cz * cp + sz * sp;
    let sin_chi = sz * cp - cz * sp;
    let amp = (FRAC_2_PI / z).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

fn j01(z: f64) -> (f64, f64) {
    if z < SERIES_LIMIT {
        (j_series(0, z), j_series(1, z))
    } else {
        (asymptotic(0, z).0, asymptotic(1, z).0)
    }
}

fn y01(z: f64) -> (f64, f64) {
    if z < SERIES_LIMIT {
        (y0_series(z), y1_series(z))
    } else {
        (asymptotic(0, z).1, asymptotic(1, z).1)
    }
}

/// Bessel function of the first kind J_n(z), n ∈ {0, 1, 2}, z ∈ (0, 10⁴).
pub fn bessel_j(n: u32, z: f64) -> Result<f64> {
    check_order(n)?;
    check_range(z, HANKEL_MAX_ARG, "bessel_j")?;
    if z < SERIES_LIMIT {
        return Ok(j_series(n, z));
    }
    let (j0, j1) = j01(z);
    Ok(match n {
        0 => j0,
        1 => j1,
        _ => 2.0 * j1 / z - j0,
    })
}

/// Bessel function of the second kind Y_n(z), n ∈ {0, 1, 2}, z ∈ (0, 10⁴).
pub fn bessel_y(n: u32, z: f64) -> Result<f64> {
    check_order(n)?;
    check_range(z, HANKEL_MAX_ARG, "bessel_y")?;
    let (y0, y1) = y01(z);
    Ok(match n {
        0 => y0,
        1 => y1,
        _ => 2.0 * y1 / z - y0,
    })
}

/// e^{z} K_ν(z) for ν ∈ {0, 1} by the trapezoid rule in t.
fn k_scaled(nu: u32, z: f64) -> f64 {
    // The integrand is analytic in |Im t| < π/2; near t = 0 it behaves like e^{−zt²/2}.
    let h = 0.1f64.min(0.5 / z.sqrt());
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let s = (0.5 * t).sinh();
        let f = (-2.0 * z * s * s).exp() * if nu == 0 { 1.0 } else { t.cosh() };
        sum += f;
        if f <= 1e-18 * sum {
            break;
        }
        k += 1;
    }
    h * sum
}

/// Modified Bessel function of the second kind K_n(z), n ∈ {0, 1, 2}, z ∈ (0, 700).
pub fn bessel_k(n: u32, z: f64) -> Result<f64> {
    check_order(n)?;
    check_range(z, K_MAX_ARG, "bessel_k")?;
    let e = (-z).exp();
    let k0 = e * k_scaled(0, z);
    if n == 0 {
        return Ok(k0);
    }
    let k1 = e * k_scaled(1, z);
    Ok(if n == 1 { k1 } else { k0 + 2.0 * k1 / z })
}

pub fn bessel_k2(z: f64) -> Result<f64> {
    bessel_k(2, z)
}

/// H₂⁽¹⁾(z) = J₂(z) + iY₂(z)
pub fn hankel_h2_1(z: f64) -> Result<C64> {
    Ok(C64::new(bessel_j(2, z)?, bessel_y(2, z)?))
}

/// H₂⁽²⁾(z) = J₂(z) − iY₂(z)
pub fn hankel_h2_2(z: f64) -> Result<C64> {
    Ok(C64::new(bessel_j(2, z)?, -bessel_y(2, z)?))
}
