//! Product-integral propagators and the integrated generator `Q[t, a]`.

use crate::error::{Error, Result};
use crate::family::{ContinuityClass, GeneratorFamily};
use crate::gauge::hk_integrate;
use crate::matcore::expm;
use crate::matrix::ComplexMatrix;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Relative commutator threshold under which `exp(Q)` is accepted as the propagator.
pub const COMMUTATIVITY_TOL: f64 = 1e-12;

/// `Q[t, a] = ∫_a^t A(s) ds` by gauge integration.
pub fn q_integral<R: Real>(f: &GeneratorFamily<R>, t: R, tol: R) -> Result<ComplexMatrix<R>> {
    check_time(f, t)?;
    Ok(hk_integrate(f, f.a(), t, tol)?.value)
}

/// `∫_s^t A` by composite Gauss–Legendre, `panels` panels of 8 nodes.
pub fn q_gauss<R: Real>(f: &GeneratorFamily<R>, s: R, t: R, panels: usize) -> Result<ComplexMatrix<R>> {
    let rule = GaussLegendre::new(8)?;
    let panels = panels.max(1);
    let h = (t - s) / R::count(panels);
    let mut acc = ComplexMatrix::zeros(f.dim());
    for p in 0..panels {
        let lo = s + h * R::count(p);
        let hi = if p + 1 == panels { t } else { lo + h };
        for (x, w) in rule.on_interval(lo, hi) {
            acc.axpy_real(w, &f.eval(x)?);
        }
    }
    Ok(acc)
}

fn check_time<R: Real>(f: &GeneratorFamily<R>, t: R) -> Result<()> {
    if t >= f.a() && t <= f.b() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time {t} outside [{}, {}]", f.a(), f.b())))
    }
}

/// Midpoint product integral `U[t, s] ≈ ∏_{j=n..1} exp(Δt A(τ_j))`, latest factor leftmost.
pub fn propagate_span<R: Real>(f: &GeneratorFamily<R>, s: R, t: R, n: usize) -> Result<ComplexMatrix<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("propagate needs n ≥ 1".into()));
    }
    check_time(f, s)?;
    check_time(f, t)?;
    if t < s {
        return Err(Error::InvalidArgument(format!("propagate needs s ≤ t, got s = {s}, t = {t}")));
    }
    let mut u = ComplexMatrix::identity(f.dim());
    if t == s {
        return Ok(u);
    }
    let h = (t - s) / R::count(n);
    if f.class() == ContinuityClass::Constant {
        let e = expm(&f.eval(s)?.scale_real(h))?;
        return Ok(power(&e, n));
    }
    for j in 1..=n {
        let tau = s + h * (R::count(j) - R::lit(0.5));
        let e = expm(&f.eval(tau)?.scale_real(h))?;
        u = e.matmul(&u);
    }
    Ok(u)
}

/// `E^n`, by repeated squaring when `n` is a power of two and sequentially otherwise.
pub(crate) fn power<R: Real>(e: &ComplexMatrix<R>, n: usize) -> ComplexMatrix<R> {
    if n.is_power_of_two() {
        let mut p = e.clone();
        for _ in 0..n.trailing_zeros() {
            p = p.matmul(&p);
        }
        p
    } else {
        let mut p = e.clone();
        for _ in 1..n {
            p = e.matmul(&p);
        }
        p
    }
}

/// `U[t, a]` at resolution `n`.
pub fn propagate<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize) -> Result<ComplexMatrix<R>> {
    propagate_span(f, f.a(), t, n)
}

/// Richardson combination `(4 U_{2n} − U_n) / 3` over `[s, t]`.
pub fn propagate_span_richardson<R: Real>(f: &GeneratorFamily<R>, s: R, t: R, n: usize) -> Result<ComplexMatrix<R>> {
    let coarse = propagate_span(f, s, t, n)?;
    let fine = propagate_span(f, s, t, 2 * n)?;
    let mut out = fine.scale_real(R::lit(4.0 / 3.0));
    out.axpy_real(R::lit(-1.0 / 3.0), &coarse);
    Ok(out)
}

/// `U[t, a]` refined by Richardson extrapolation.
pub fn propagate_richardson<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize) -> Result<ComplexMatrix<R>> {
    propagate_span_richardson(f, f.a(), t, n)
}

/// Cumulative products `U[t_k, t_0]` on the grid `t_0 < t_1 < …` (first entry is the identity).
pub fn propagate_grid<R: Real>(f: &GeneratorFamily<R>, grid: &[R]) -> Result<Vec<ComplexMatrix<R>>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut u = ComplexMatrix::identity(f.dim());
    out.push(u.clone());
    for w in grid.windows(2) {
        let h = w[1] - w[0];
        let e = expm(&f.eval((w[0] + w[1]) * R::lit(0.5))?.scale_real(h))?;
        u = e.matmul(&u);
        out.push(u.clone());
    }
    Ok(out)
}

/// `‖(U[t+h, a] − U[t−h, a]) / 2h − A(t) U[t, a]‖` with `h = (b − a)/2¹²`.
pub fn ode_defect<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize) -> Result<R> {
    ode_defect_with_step(f, t, n, (f.b() - f.a()) / R::lit(4096.0))
}

/// [`ode_defect`] with an explicit difference step.
pub fn ode_defect_with_step<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize, h: R) -> Result<R> {
    if !(t - h >= f.a() && t + h <= f.b()) {
        return Err(Error::Domain(format!("ode_defect needs t ± h inside [{}, {}], got t = {t}", f.a(), f.b())));
    }
    let plus = propagate(f, t + h, n)?;
    let minus = propagate(f, t - h, n)?;
    let mid = propagate(f, t, n)?;
    let mut d = (&plus - &minus).scale_real((R::lit(2.0) * h).recip());
    d -= &f.eval(t)?.matmul(&mid);
    Ok(d.op_norm())
}

/// How a [`Propagator`] turns a family into `U[t, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    /// Time-ordered midpoint product integral. Always valid.
    ProductIntegral,
    /// `exp(Q[t, a])`, only valid for families whose values commute.
    ExpmOfQ,
    /// Truncated Dyson series of order `min(resolution, 4)`.
    Dyson,
}

/// A family paired with a propagation method and resolution.
#[derive(Debug, Clone)]
pub struct Propagator<R: Real> {
    family: GeneratorFamily<R>,
    method: PropagatorMethod,
    resolution: usize,
}

impl<R: Real> Propagator<R> {
    /// Builds a propagator; `ExpmOfQ` requires `‖[A(s), A(s')]‖ ≤ 1e-12 max(1, ‖A(s)‖‖A(s')‖)`
    /// on sampled pairs.
    pub fn new(family: GeneratorFamily<R>, method: PropagatorMethod, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidArgument("propagator resolution must be ≥ 1".into()));
        }
        if method == PropagatorMethod::ExpmOfQ {
            let defect = family.commutativity_defect(9)?;
            if defect > R::lit(COMMUTATIVITY_TOL) {
                return Err(Error::Domain(format!(
                    "exp(Q) is not the propagator of a non-commuting family (commutator defect {defect:e})"
                )));
            }
        }
        Ok(Self { family, method, resolution })
    }

    pub fn family(&self) -> &GeneratorFamily<R> {
        &self.family
    }

    pub fn method(&self) -> PropagatorMethod {
        self.method
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `U[t, a]`.
    pub fn evaluate(&self, t: R) -> Result<ComplexMatrix<R>> {
        match self.method {
            PropagatorMethod::ProductIntegral => propagate(&self.family, t, self.resolution),
            PropagatorMethod::ExpmOfQ => {
                check_time(&self.family, t)?;
                let q = q_gauss(&self.family, self.family.a(), t, self.resolution)?;
                expm(&q)
            }
            PropagatorMethod::Dyson => {
                let order = self.resolution.min(super::dyson::MAX_DYSON_ORDER);
                let mut u = ComplexMatrix::identity(self.family.dim());
                for k in 1..=order {
                    u += &super::dyson::dyson_term(&self.family, t, k, super::dyson::DEFAULT_QUAD_NODES)?;
                }
                Ok(u)
            }
        }
    }
}
