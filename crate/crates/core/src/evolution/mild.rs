//! Mild solutions of `u' = A(t)u + f(t, u)` by Picard iteration on
//! `u(t) = U(t,a)u_a + ∫_a^t U(t,s) f(s, u(s)) ds`.

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::matcore::expm;
use crate::matrix::{ComplexMatrix, StateVector};
use crate::scalar::Real;

/// Picard iterate on the step grid together with its convergence record.
#[derive(Debug, Clone)]
pub struct MildSolution<R> {
    /// `u(t)`.
    pub value: StateVector<R>,
    /// Grid values `u(t_k)`, `t_k = a + k(t − a)/n`.
    pub trajectory: Vec<StateVector<R>>,
    /// Max-norm difference between successive iterates.
    pub residuals: Vec<R>,
}

/// Smallest grid accepted by [`semilinear_mild`].
pub const MIN_STEPS: usize = 16;

/// Picard iteration with trapezoid quadrature on an `n`-step grid.
///
/// The step propagators `E_k = exp(h A(t_k + h/2))` are shared by the free part and the
/// Duhamel integral, whose trapezoid sum is updated in O(n) per sweep via
/// `G_{k+1} = E_k (G_k + c_k f_k)`.
#[allow(clippy::too_many_arguments)]
pub fn semilinear_mild<R, F>(
    fam: &GeneratorFamily<R>,
    f: F,
    u_a: &StateVector<R>,
    t: R,
    n: usize,
    max_picard: usize,
    tol: R,
) -> Result<MildSolution<R>>
where
    R: Real,
    F: Fn(R, &StateVector<R>) -> StateVector<R>,
{
    if n < MIN_STEPS {
        return Err(Error::InvalidArgument(format!("mild solution needs n ≥ {MIN_STEPS}, got {n}")));
    }
    if u_a.dim() != fam.dim() {
        return Err(Error::DimensionMismatch { expected: fam.dim(), got: u_a.dim() });
    }
    let a = fam.a();
    if !(t > a && t <= fam.b()) {
        return Err(Error::Domain(format!("time {t} outside ({a}, {}]", fam.b())));
    }
    let h = (t - a) / R::count(n);
    let half = R::lit(0.5);
    let times: Vec<R> = (0..=n).map(|k| if k == n { t } else { a + h * R::count(k) }).collect();
    let steps: Vec<ComplexMatrix<R>> = times
        .windows(2)
        .map(|w| expm(&fam.eval((w[0] + w[1]) * half)?.scale_real(w[1] - w[0])))
        .collect::<Result<_>>()?;

    let mut free = Vec::with_capacity(n + 1);
    free.push(u_a.clone());
    for e in &steps {
        let next = e.mul_vec(free.last().expect("nonempty"));
        free.push(next);
    }

    let mut current = free.clone();
    let mut residuals = Vec::new();
    for _ in 0..max_picard {
        let forcing: Vec<StateVector<R>> = times.iter().zip(&current).map(|(&s, u)| f(s, u)).collect();
        if forcing.iter().any(|v| !v.is_finite() || v.dim() != fam.dim()) {
            return Err(Error::NonFinite { context: "mild forcing term".into() });
        }
        let mut next = Vec::with_capacity(n + 1);
        let mut g = StateVector::zeros(fam.dim());
        for k in 0..=n {
            let mut u = free[k].clone();
            if k > 0 {
                let mut integral = g.clone();
                integral.axpy(half.into(), &forcing[k]);
                u.axpy(h.into(), &integral);
            }
            next.push(u);
            if k < n {
                let c = if k == 0 { half } else { R::one() };
                let mut inner = g;
                inner.axpy(c.into(), &forcing[k]);
                g = steps[k].mul_vec(&inner);
            }
        }
        let diff = next.iter().zip(&current).map(|(x, y)| x.max_abs_diff(y)).fold(R::zero(), R::max);
        residuals.push(diff);
        current = next;
        if diff < tol {
            return Ok(MildSolution { value: current[n].clone(), trajectory: current, residuals });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_picard,
        history: residuals.iter().map(|r| r.as_f64()).collect(),
    })
}
