//! Trotter products and their time-ordered generalization.

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::matcore::expm;
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

use super::propagate::power;

/// `(exp(tA/n) exp(tB/n))ⁿ`.
pub fn trotter<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>, t: R, n: usize) -> Result<ComplexMatrix<R>> {
    a.ensure_same_dim(b)?;
    if n == 0 {
        return Err(Error::InvalidArgument("trotter needs n ≥ 1".into()));
    }
    let h = t / R::count(n);
    let step = expm(&a.scale_real(h))?.matmul(&expm(&b.scale_real(h))?);
    Ok(power(&step, n))
}

/// Evaluation time for the `B` factors in [`generalized_trotter_kato`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GtkSchedule {
    /// `t'_n = t (1 − 10⁻¹⁰ e^{−(n+1)²})`.
    Perturbed,
    /// `t'_n = t`.
    Plain,
}

impl GtkSchedule {
    pub fn t_prime<R: Real>(self, t: R, n: usize) -> R {
        match self {
            GtkSchedule::Perturbed => {
                let np1 = R::count(n + 1);
                t * (R::one() - R::lit(1e-10) * (-(np1 * np1)).exp())
            }
            GtkSchedule::Plain => t,
        }
    }
}

/// `∏_{j=n..1} exp((t/n) A(jt/n)) exp((t/n) B(j t'_n/n))`, latest `j` leftmost.
pub fn generalized_trotter_kato<R: Real>(
    fa: &GeneratorFamily<R>,
    fb: &GeneratorFamily<R>,
    t: R,
    n: usize,
    schedule: GtkSchedule,
) -> Result<ComplexMatrix<R>> {
    if fa.dim() != fb.dim() {
        return Err(Error::DimensionMismatch { expected: fa.dim(), got: fb.dim() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("generalized Trotter–Kato needs n ≥ 1".into()));
    }
    let nn = R::count(n);
    let h = t / nn;
    let tp = schedule.t_prime(t, n);
    let mut u = ComplexMatrix::identity(fa.dim());
    for j in 1..=n {
        let jj = R::count(j);
        let ea = expm(&fa.eval(jj * t / nn)?.scale_real(h))?;
        let eb = expm(&fb.eval(jj * tp / nn)?.scale_real(h))?;
        u = ea.matmul(&eb).matmul(&u);
    }
    Ok(u)
}
