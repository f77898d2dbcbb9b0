//! Semigroup primitives: matrix exponential, resolvent, Yosida approximator,
//! dissipativity and the square-root cutoff of a Hermitian potential.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eigh, Lu};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Largest number of squarings `expm` will perform before reporting a range error.
pub const MAX_SQUARINGS: i32 = 60;

// Padé coefficients b_0..b_m for degrees 3, 5, 7, 9, 13 (Higham 2005).
const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm thresholds below which degree m is accurate to unit roundoff.
const THETA_F64: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
    (13, 5.371920351148152),
];
const THETA_F32: [(usize, f64); 3] = [(3, 4.258730016922831e-1), (5, 1.880152677804762), (7, 3.925724783138660)];

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// Fails with a range error when the input has non-finite entries, would need more than
/// [`MAX_SQUARINGS`] squarings, or the result overflows.
pub fn expm<R: Real>(a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    if !a.is_finite() {
        return Err(Error::Range("expm input has non-finite entries".into()));
    }
    let n = a.dim();
    let norm = a.norm_1();
    if norm.is_zero() {
        return Ok(ComplexMatrix::identity(n));
    }
    let table: &[(usize, f64)] = if R::is_single_precision() { &THETA_F32 } else { &THETA_F64 };
    let norm64 = norm.as_f64();
    for &(m, theta) in table {
        if norm64 <= theta {
            return finish(pade(a, m), 0);
        }
    }
    let (m_max, theta_max) = *table.last().expect("nonempty table");
    let s = (norm64 / theta_max).log2().ceil().max(0.0);
    if !s.is_finite() || s > MAX_SQUARINGS as f64 {
        return Err(Error::Range(format!("expm needs 2^{s} scaling for 1-norm {norm64:e}")));
    }
    let s = s as i32;
    let scaled = a.scale_real(R::lit(2f64.powi(-s)));
    finish(pade(&scaled, m_max), s)
}

fn finish<R: Real>(mut x: Result<ComplexMatrix<R>>, squarings: i32) -> Result<ComplexMatrix<R>> {
    for _ in 0..squarings {
        x = x.map(|m| m.matmul(&m));
    }
    let x = x?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Range("expm overflowed".into()))
    }
}

fn pade<R: Real>(a: &ComplexMatrix<R>, m: usize) -> Result<ComplexMatrix<R>> {
    let n = a.dim();
    let id = ComplexMatrix::<R>::identity(n);
    let c = |x: f64| R::lit(x);
    let a2 = a.matmul(a);
    let (u, v) = match m {
        3 | 5 | 7 | 9 => {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            // powers[k] = A^{2k}
            let mut powers = vec![id.clone(), a2.clone()];
            while powers.len() <= m / 2 {
                let next = powers.last().expect("nonempty").matmul(&a2);
                powers.push(next);
            }
            let mut u = ComplexMatrix::zeros(n);
            let mut v = ComplexMatrix::zeros(n);
            for (k, p) in powers.iter().enumerate() {
                u.axpy_real(c(b[2 * k + 1]), p);
                v.axpy_real(c(b[2 * k]), p);
            }
            (a.matmul(&u), v)
        }
        13 => {
            let b = &B13;
            let a4 = a2.matmul(&a2);
            let a6 = a4.matmul(&a2);
            let mut inner_u = a6.scale_real(c(b[13]));
            inner_u.axpy_real(c(b[11]), &a4);
            inner_u.axpy_real(c(b[9]), &a2);
            let mut u = a6.matmul(&inner_u);
            u.axpy_real(c(b[7]), &a6);
            u.axpy_real(c(b[5]), &a4);
            u.axpy_real(c(b[3]), &a2);
            u.axpy_real(c(b[1]), &id);
            let u = a.matmul(&u);
            let mut inner_v = a6.scale_real(c(b[12]));
            inner_v.axpy_real(c(b[10]), &a4);
            inner_v.axpy_real(c(b[8]), &a2);
            let mut v = a6.matmul(&inner_v);
            v.axpy_real(c(b[6]), &a6);
            v.axpy_real(c(b[4]), &a4);
            v.axpy_real(c(b[2]), &a2);
            v.axpy_real(c(b[0]), &id);
            (u, v)
        }
        _ => unreachable!("unsupported Padé degree {m}"),
    };
    let p = &v + &u;
    let q = &v - &u;
    let lu = Lu::factor(&q).map_err(|_| Error::Range("Padé denominator is singular".into()))?;
    Ok(lu.solve(&p))
}

/// `exp(t A)`.
pub fn expm_scaled<R: Real>(a: &ComplexMatrix<R>, t: R) -> Result<ComplexMatrix<R>> {
    expm(&a.scale_real(t))
}

/// Resolvent `R(λ, A) = (λI − A)⁻¹`.
pub fn resolvent<R: Real>(lambda: R, a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    if !(lambda > R::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("resolvent needs λ > 0, got {lambda}")));
    }
    let mut m = a.scale_real(-R::one());
    for i in 0..a.dim() {
        m[(i, i)] += Complex::new(lambda, R::zero());
    }
    crate::linalg::inverse(&m)
}

/// Yosida approximator `A_λ = λ A R(λ, A)`.
pub fn yosida<R: Real>(a: &ComplexMatrix<R>, lambda: R) -> Result<ComplexMatrix<R>> {
    let r = resolvent(lambda, a)?;
    Ok(a.matmul(&r).scale_real(lambda))
}

/// Outcome of a dissipativity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipativity<R> {
    pub dissipative: bool,
    /// Largest eigenvalue of the Hermitian part.
    pub margin: R,
}

/// `Re⟨Ax, x⟩ ≤ tol ‖x‖²` for all `x`, decided through the spectrum of `(A + A*)/2`.
pub fn is_dissipative<R: Real>(a: &ComplexMatrix<R>, tol: R) -> Dissipativity<R> {
    let margin = match eigh(&a.hermitian_part()) {
        Ok(e) => e.max_value(),
        Err(_) => R::infinity(),
    };
    Dissipativity { dissipative: margin <= tol, margin }
}

/// Default entry tolerance used to decide whether a matrix is Hermitian.
pub fn hermitian_tolerance<R: Real>(v: &ComplexMatrix<R>) -> R {
    R::lit(64.0) * R::epsilon() * v.max_abs().max(R::one())
}

/// `V (I + ρV²)^{-1/2}` via the eigenvalue map `v ↦ v / √(1 + ρv²)`.
pub fn sqrt_cutoff<R: Real>(v: &ComplexMatrix<R>, rho: R) -> Result<ComplexMatrix<R>> {
    if !(rho >= R::zero()) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("sqrt_cutoff needs ρ ≥ 0, got {rho}")));
    }
    if !v.is_hermitian(hermitian_tolerance(v)) {
        return Err(Error::Domain("sqrt_cutoff needs a Hermitian matrix".into()));
    }
    if rho.is_zero() {
        return Ok(v.clone());
    }
    let e = eigh(v)?;
    Ok(e.map(|x| x / (R::one() + rho * x * x).sqrt()))
}

/// Smallest `β` with `‖Q₁x‖ ≤ α‖Q₀x‖ + β‖x‖` over the supplied probe vectors.
///
/// A finite-dimensional sanity gate for relative boundedness; with probes spanning the
/// space it gives a lower bound on the true constant.
pub fn relative_bound<R: Real>(
    q0: &ComplexMatrix<R>,
    q1: &ComplexMatrix<R>,
    alpha: R,
    probes: &[crate::matrix::StateVector<R>],
) -> R {
    probes
        .iter()
        .filter(|x| !x.norm().is_zero())
        .map(|x| (q1.mul_vec(x).norm() - alpha * q0.mul_vec(x).norm()) / x.norm())
        .fold(R::zero(), R::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn expm_trivial_cases() {
        assert_eq!(expm(&M::zeros(2)).unwrap(), M::identity(2));
        let n = M::from_f64_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm(&n).unwrap();
        assert!(e.max_abs_diff(&M::from_f64_rows(&[&[1.0, 1.0], &[0.0, 1.0]])) < 1e-15);
    }

    #[test]
    fn expm_diagonal_large_norm() {
        let d = M::diag_real(&[-40.0, 3.0, 0.5]);
        let e = expm(&d).unwrap();
        for (i, x) in [-40.0f64, 3.0, 0.5].iter().enumerate() {
            assert!((e[(i, i)].re - x.exp()).abs() <= 1e-13 * x.exp().max(1.0));
        }
    }

    #[test]
    fn expm_range_error() {
        let d = M::diag_real(&[1e300]);
        assert!(matches!(expm(&d), Err(Error::Range(_))));
        let d = M::diag_real(&[800.0]);
        assert!(matches!(expm(&d), Err(Error::Range(_))));
    }

    #[test]
    fn resolvent_and_yosida_scalars() {
        let r = resolvent(1.0, &M::diag_real(&[-1.0, -2.0])).unwrap();
        assert!(r.max_abs_diff(&M::diag_real(&[0.5, 1.0 / 3.0])) < 1e-15);
        let y = yosida(&M::diag_real(&[-1.0]), 3.0).unwrap();
        assert!((y[(0, 0)].re + 0.75).abs() < 1e-15);
        assert!(matches!(resolvent(1.0, &M::identity(2)), Err(Error::Singular { .. })));
    }

    #[test]
    fn dissipativity_examples() {
        let d = is_dissipative(&M::identity(3).scale_real(-1.0), 0.0);
        assert!(d.dissipative && (d.margin + 1.0).abs() < 1e-15);
        let d = is_dissipative(&M::from_f64_rows(&[&[1.0, 0.0], &[0.0, -2.0]]), 0.0);
        assert!(!d.dissipative && (d.margin - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_cutoff_scalars() {
        assert_eq!(sqrt_cutoff(&M::diag_real(&[2.0]), 0.0).unwrap(), M::diag_real(&[2.0]));
        let v = sqrt_cutoff(&M::diag_real(&[3.0]), 1.0).unwrap();
        assert!((v[(0, 0)].re - 3.0 / 10f64.sqrt()).abs() < 1e-15);
        let skew = M::from_f64_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(sqrt_cutoff(&skew, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision_expm() {
        let a = ComplexMatrix::<f32>::from_f64_rows(&[&[0.0, 2.0], &[-2.0, 0.0]]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)].re - 2f32.cos()).abs() < 1e-5);
        assert!((e[(0, 1)].re - 2f32.sin()).abs() < 1e-5);
    }
}
