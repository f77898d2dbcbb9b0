//! Interaction representation for a Hamiltonian split `H(t) = F₀(t) + F₁(t)`.
//!
//! The free evolution `U₀` is generated by `−(i/ħ)F₀`. The interaction-picture
//! Hamiltonian `A_I(t) = U₀(a,t) F₁(t) U₀(t,a)` drives `iħ Ψ' = A_I Ψ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::matcore::{expm, hermitian_tolerance};
use crate::matrix::{ComplexMatrix, StateVector};
use crate::scalar::Real;

use super::propagate::propagate;

/// Interaction-picture data for a pair of Hamiltonian families.
#[derive(Debug, Clone)]
pub struct InteractionRep<R: Real> {
    f0: GeneratorFamily<R>,
    f1: GeneratorFamily<R>,
    hbar: R,
    n: usize,
}

fn generator<R: Real>(h: &GeneratorFamily<R>, hbar: R) -> GeneratorFamily<R> {
    h.scaled_complex(Complex::new(R::zero(), -hbar.recip()))
}

/// Checks that `(i/ħ)F₀` is skew-Hermitian (equivalently `F₀` Hermitian) at `samples` points.
fn check_unitary<R: Real>(f0: &GeneratorFamily<R>, samples: usize) -> Result<()> {
    for k in 0..samples {
        let t = f0.a() + (f0.b() - f0.a()) * R::count(k) / R::count(samples - 1);
        let m = f0.eval(t)?;
        if !m.is_hermitian(hermitian_tolerance(&m)) {
            return Err(Error::Domain(format!("(i/ħ)F₀({t}) is not skew-Hermitian")));
        }
    }
    Ok(())
}

impl<R: Real> InteractionRep<R> {
    pub fn new(f0: GeneratorFamily<R>, f1: GeneratorFamily<R>, hbar: R, n: usize) -> Result<Self> {
        if f0.dim() != f1.dim() {
            return Err(Error::DimensionMismatch { expected: f0.dim(), got: f1.dim() });
        }
        if f0.a() != f1.a() || f0.b() != f1.b() {
            return Err(Error::InvalidArgument("F₀ and F₁ must share their interval".into()));
        }
        if !(hbar > R::zero()) {
            return Err(Error::InvalidArgument(format!("ħ must be positive, got {hbar}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("interaction representation needs n ≥ 1".into()));
        }
        check_unitary(&f0, 17)?;
        Ok(Self { f0, f1, hbar, n })
    }

    /// `U₀(t, a)` at the configured resolution.
    pub fn free_propagator(&self, t: R) -> Result<ComplexMatrix<R>> {
        propagate(&generator(&self.f0, self.hbar), t, self.n)
    }

    /// `A_I(t) = U₀(t,a)* F₁(t) U₀(t,a)`.
    pub fn a_i(&self, t: R) -> Result<ComplexMatrix<R>> {
        let u0 = self.free_propagator(t)?;
        Ok(u0.adjoint().matmul(&self.f1.eval(t)?).matmul(&u0))
    }

    /// `A_I` as a family on the common interval.
    pub fn a_i_family(&self) -> Result<GeneratorFamily<R>> {
        let this = self.clone();
        GeneratorFamily::try_from_fn(self.f0.a(), self.f0.b(), self.f0.dim(), self.f1.class(), move |t| this.a_i(t))
    }

    /// `Ψ(t)` from `iħΨ' = A_I Ψ`, `Ψ(a) = Φ`, by the midpoint product integral.
    ///
    /// `U₀` is advanced alongside on the same grid, so the cost is linear in `n`.
    pub fn psi(&self, phi: &StateVector<R>, t: R) -> Result<StateVector<R>> {
        if phi.dim() != self.f0.dim() {
            return Err(Error::DimensionMismatch { expected: self.f0.dim(), got: phi.dim() });
        }
        let a = self.f0.a();
        let h = (t - a) / R::count(self.n);
        let g0 = generator(&self.f0, self.hbar);
        let minus_i_over_hbar = Complex::new(R::zero(), -self.hbar.recip());
        let half = R::lit(0.5);
        let quarter = R::lit(0.25);
        let mut u0 = ComplexMatrix::identity(self.f0.dim());
        let mut psi = phi.clone();
        for j in 0..self.n {
            let lo = a + h * R::count(j);
            let mid = lo + h * half;
            // U₀ at the step midpoint, then at the step end.
            let first = expm(&g0.eval(lo + h * quarter)?.scale_real(h * half))?;
            let second = expm(&g0.eval(mid + h * quarter)?.scale_real(h * half))?;
            let u_mid = first.matmul(&u0);
            let ai = u_mid.adjoint().matmul(&self.f1.eval(mid)?).matmul(&u_mid);
            psi = expm(&ai.scale(minus_i_over_hbar * Complex::new(h, R::zero())))?.mul_vec(&psi);
            u0 = second.matmul(&u_mid);
        }
        Ok(psi)
    }

    /// `U₀(t,a)* U(t,a) Φ` with `U` propagated directly from `−(i/ħ)(F₀ + F₁)`.
    pub fn psi_direct(&self, phi: &StateVector<R>, t: R) -> Result<StateVector<R>> {
        let full = generator(&self.f0.add(&self.f1)?, self.hbar);
        let u = propagate(&full, t, self.n)?;
        Ok(self.free_propagator(t)?.adjoint().matmul(&u).mul_vec(phi))
    }
}

/// Convenience wrapper returning the interaction-picture state at `t`.
pub fn interaction_rep<R: Real>(
    f0: &GeneratorFamily<R>,
    f1: &GeneratorFamily<R>,
    t: R,
    n: usize,
    hbar: R,
    phi: &StateVector<R>,
) -> Result<StateVector<R>> {
    InteractionRep::new(f0.clone(), f1.clone(), hbar, n)?.psi(phi, t)
}
