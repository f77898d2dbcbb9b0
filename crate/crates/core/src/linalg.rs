//! LU factorization, inversion and Hermitian eigendecomposition.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// LU factorization with partial pivoting, `P A = L U`, stored packed.
#[derive(Debug, Clone)]
pub struct Lu<R> {
    lu: ComplexMatrix<R>,
    perm: Vec<usize>,
    norm_1: R,
}

impl<R: Real> Lu<R> {
    /// Factors `a`. Exactly zero pivots (or a non-finite factor) are reported as singular.
    pub fn factor(a: &ComplexMatrix<R>) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best.is_zero() || !best.is_finite() {
                return Err(Error::Singular { condition: f64::INFINITY });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, norm_1: a.norm_1() })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Solves `A x = b` for one right-hand side given as a slice.
    pub fn solve_slice(&self, b: &[Complex<R>]) -> Vec<Complex<R>> {
        let n = self.dim();
        let mut x: Vec<Complex<R>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix<R>) -> ComplexMatrix<R> {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        let mut col = vec![Complex::zero(); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve_slice(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix<R> {
        self.solve(&ComplexMatrix::identity(self.dim()))
    }

    /// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`, computed from the explicit inverse.
    pub fn condition_1(&self) -> R {
        self.norm_1 * self.inverse().norm_1()
    }
}

/// Inverse with a singularity check.
///
/// Fails when the 1-norm condition number exceeds `1 / (16 ε)`, carrying the estimate.
pub fn inverse<R: Real>(a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let lu = Lu::factor(a)?;
    let inv = lu.inverse();
    let cond = lu.norm_1 * inv.norm_1();
    if !cond.is_finite() || cond * R::lit(16.0) * R::epsilon() > R::one() {
        return Err(Error::Singular { condition: cond.as_f64() });
    }
    Ok(inv)
}

/// Solves `A X = B` with the same singularity rule as [`inverse`].
pub fn solve<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    a.ensure_same_dim(b)?;
    let lu = Lu::factor(a)?;
    let cond = lu.condition_1();
    if !cond.is_finite() || cond * R::lit(16.0) * R::epsilon() > R::one() {
        return Err(Error::Singular { condition: cond.as_f64() });
    }
    Ok(lu.solve(b))
}

/// Eigendecomposition `H = V diag(λ) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<R> {
    /// Eigenvalues in ascending order.
    pub values: Vec<R>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix<R>,
}

impl<R: Real> HermitianEigen<R> {
    /// Rebuilds `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(R) -> R) -> ComplexMatrix<R> {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            let mut s = Complex::zero();
            for (k, &lam) in self.values.iter().enumerate() {
                s += v[(i, k)] * v[(j, k)].conj() * f(lam);
            }
            s
        })
    }

    pub fn max_value(&self) -> R {
        *self.values.last().expect("nonempty spectrum")
    }
}

const JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Only the Hermitian part of `h` is used, so tiny asymmetries from round-off are harmless.
pub fn eigh<R: Real>(h: &ComplexMatrix<R>) -> Result<HermitianEigen<R>> {
    h.ensure_finite("eigh input")?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::<R>::identity(n);
    let two = R::lit(2.0);
    for _ in 0..JACOBI_SWEEPS {
        let off: R = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        let diag: R = (0..n).map(|i| a[(i, i)].norm_sqr()).sum();
        if off <= R::epsilon() * R::epsilon() * diag || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r.is_zero() {
                    continue;
                }
                // Remove the phase of a_pq, then apply a real Jacobi rotation.
                let phase = apq.unscale(r);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (two * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + R::one()).sqrt());
                let c = (t * t + R::one()).sqrt().recip();
                let s = t * c;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns p, q.
                let g_pp = Complex::new(c, R::zero());
                let g_pq = Complex::new(s, R::zero());
                let g_qp = -phase.conj().scale(s);
                let g_qq = phase.conj().scale(c);
                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, R::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, R::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Largest eigenvalue of the Hermitian part `(A + A*)/2`.
pub fn max_hermitian_eigenvalue<R: Real>(a: &ComplexMatrix<R>) -> Result<R> {
    Ok(eigh(&a.hermitian_part())?.max_value())
}

/// `true` if every entry of `a` is within `tol` of the identity.
pub fn is_identity<R: Real>(a: &ComplexMatrix<R>, tol: R) -> bool {
    a.max_abs_diff(&ComplexMatrix::identity(a.dim())) <= tol && a.trace().re.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn inverse_of_small_matrix() {
        let a = M::from_f64_rows(&[&[4.0, 7.0], &[2.0, 6.0]]);
        let inv = inverse(&a).unwrap();
        let expect = M::from_f64_rows(&[&[0.6, -0.7], &[-0.2, 0.4]]);
        assert!(inv.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = M::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
        let b = M::from_f64_rows(&[&[1.0, 0.0], &[0.0, 1e-17]]);
        match inverse(&b) {
            Err(Error::Singular { condition }) => assert!(condition > 1e16),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn eigh_recovers_complex_hermitian_spectrum() {
        // Pauli y has eigenvalues -1, 1.
        let y = M::from_rows(&[
            vec![Complex::new(0.0, 0.0), Complex::new(0.0, -1.0)],
            vec![Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)],
        ]);
        let e = eigh(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        assert!(e.map(|x| x).max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn eigh_handles_degenerate_and_diagonal() {
        let d = M::diag_real(&[3.0, -1.0, 3.0]);
        let e = eigh(&d).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0, 3.0]);
    }
}
