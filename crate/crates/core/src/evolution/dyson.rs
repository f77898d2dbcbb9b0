//! Dyson expansion of `U^w[t, a]` (the propagator of `w·A`) with its exact integral remainder.

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::matcore::expm;
use crate::matrix::ComplexMatrix;
use crate::quadrature::{simplex_integral, GaussLegendre};
use crate::scalar::Real;

/// Highest simplex order accepted by [`dyson_term`].
pub const MAX_DYSON_ORDER: usize = 4;
/// Highest truncation order accepted by [`dyson_expand`].
pub const MAX_EXPAND_ORDER: usize = 3;
/// Gauss–Legendre nodes per axis unless configured otherwise.
pub const DEFAULT_QUAD_NODES: usize = 24;
/// Largest number of integrand evaluations a single simplex integral may request.
pub const DEFAULT_COST_BUDGET: u128 = 4_000_000;

fn cost_guard(nodes: usize, k: usize, budget: u128) -> Result<()> {
    let requested = (nodes as u128).saturating_pow(k as u32);
    if requested > budget {
        Err(Error::CostGuard { requested, budget })
    } else {
        Ok(())
    }
}

/// `∫_{a<s_k<…<s₁<t} A(s₁)A(s₂)⋯A(s_k) ds`, Gauss–Legendre on each axis.
pub fn dyson_term<R: Real>(f: &GeneratorFamily<R>, t: R, k: usize, quad_nodes: usize) -> Result<ComplexMatrix<R>> {
    dyson_term_with_budget(f, t, k, quad_nodes, DEFAULT_COST_BUDGET)
}

/// [`dyson_term`] with an explicit evaluation budget.
pub fn dyson_term_with_budget<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    k: usize,
    quad_nodes: usize,
    budget: u128,
) -> Result<ComplexMatrix<R>> {
    if k == 0 || k > MAX_DYSON_ORDER {
        return Err(Error::InvalidArgument(format!("Dyson term order must be in 1..={MAX_DYSON_ORDER}, got {k}")));
    }
    if !(t >= f.a() && t <= f.b()) {
        return Err(Error::Domain(format!("time {t} outside [{}, {}]", f.a(), f.b())));
    }
    cost_guard(quad_nodes, k, budget)?;
    let rule = GaussLegendre::new(quad_nodes)?;
    let mut integrand = |s: &[R]| -> Result<ComplexMatrix<R>> {
        let mut p = f.eval(s[0])?;
        for &x in &s[1..] {
            p = p.matmul(&f.eval(x)?);
        }
        Ok(p)
    };
    simplex_integral(&rule, k, f.a(), t, f.dim(), &mut integrand)
}

/// Node counts for the remainder integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderOptions {
    /// Gauss–Legendre nodes per simplex axis.
    pub simplex_nodes: usize,
    /// Gauss–Legendre nodes on `ξ ∈ [0, w]`.
    pub xi_nodes: usize,
    /// Product-integral substeps per unit time when marching `U^ξ`.
    pub steps_per_unit: usize,
}

impl Default for RemainderOptions {
    fn default() -> Self {
        Self { simplex_nodes: 12, xi_nodes: 8, steps_per_unit: 512 }
    }
}

/// Truncated Dyson series plus integral remainder.
#[derive(Debug, Clone)]
pub struct DysonResult<R> {
    /// `I + Σ_{k=1}^n w^k D_k`.
    pub partial_sum: ComplexMatrix<R>,
    pub remainder: ComplexMatrix<R>,
    pub order: usize,
    pub w: R,
    /// Quadrature and propagation error estimate for `partial_sum + remainder`.
    pub est_error: R,
}

impl<R: Real> DysonResult<R> {
    pub fn total(&self) -> ComplexMatrix<R> {
        &self.partial_sum + &self.remainder
    }
}

/// Dyson expansion of order `n` with default remainder options.
pub fn dyson_expand<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize, w: R, quad_nodes: usize) -> Result<DysonResult<R>> {
    dyson_expand_with(f, t, n, w, quad_nodes, &RemainderOptions::default())
}

/// Dyson expansion of `U^w[t, a]`, the propagator of `w·A`:
///
/// `U^w = I + Σ_{k=1}^n w^k D_k + (n+1) ∫_0^w (w−ξ)^n J_{n+1}(ξ) dξ`,
///
/// where `D_k` is [`dyson_term`] and
/// `J_m(ξ) = ∫_{a<s_m<…<s₁<t} U^ξ[t,s₁] A(s₁) U^ξ[s₁,s₂] A(s₂) ⋯ A(s_m) U^ξ[s_m,a] ds`
/// is the `m`-th ξ-derivative of `U^ξ` divided by `m!`.
pub fn dyson_expand_with<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    n: usize,
    w: R,
    quad_nodes: usize,
    opts: &RemainderOptions,
) -> Result<DysonResult<R>> {
    if n > MAX_EXPAND_ORDER {
        return Err(Error::InvalidArgument(format!("Dyson expansion order must be ≤ {MAX_EXPAND_ORDER}, got {n}")));
    }
    if !(t >= f.a() && t <= f.b()) {
        return Err(Error::Domain(format!("time {t} outside [{}, {}]", f.a(), f.b())));
    }
    if !w.is_finite() || w < R::zero() {
        return Err(Error::InvalidArgument(format!("w must be a finite nonnegative number, got {w}")));
    }
    let budget = DEFAULT_COST_BUDGET;
    cost_guard(opts.simplex_nodes, n + 1, budget)?;
    let dim = f.dim();

    let mut partial_sum = ComplexMatrix::identity(dim);
    let mut partial_coarse = ComplexMatrix::identity(dim);
    let coarse_nodes = (quad_nodes * 2 / 3).max(4);
    let mut wk = R::one();
    for k in 1..=n {
        wk *= w;
        partial_sum.axpy_real(wk, &dyson_term_with_budget(f, t, k, quad_nodes, budget)?);
        partial_coarse.axpy_real(wk, &dyson_term_with_budget(f, t, k, coarse_nodes, budget)?);
    }

    let fine = remainder(f, t, n, w, opts.simplex_nodes, opts.xi_nodes, opts.steps_per_unit)?;
    let coarse_opts = (
        (opts.simplex_nodes * 2 / 3).max(4),
        (opts.xi_nodes * 2 / 3).max(3),
        (opts.steps_per_unit / 2).max(8),
    );
    let coarse = remainder(f, t, n, w, coarse_opts.0, coarse_opts.1, coarse_opts.2)?;
    let est_error = (&partial_sum - &partial_coarse).op_norm() + (&fine - &coarse).op_norm();
    Ok(DysonResult { partial_sum, remainder: fine, order: n, w, est_error })
}

fn remainder<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    n: usize,
    w: R,
    simplex_nodes: usize,
    xi_nodes: usize,
    steps_per_unit: usize,
) -> Result<ComplexMatrix<R>> {
    let dim = f.dim();
    if w.is_zero() || t == f.a() {
        return Ok(ComplexMatrix::zeros(dim));
    }
    let m = n + 1;
    let srule = GaussLegendre::new(simplex_nodes)?;
    let xrule = GaussLegendre::new(xi_nodes)?;

    // Every time at which U^ξ[·, a] is needed: all nested node positions plus t.
    let mut times = Vec::new();
    collect_nodes(&srule, m, f.a(), t, &mut times);
    times.push(t);
    times.sort_by(|x, y| x.partial_cmp(y).expect("finite nodes"));
    times.dedup();

    let mut acc = ComplexMatrix::zeros(dim);
    let n_factor = R::count(m);
    for (xi, wx) in xrule.on_interval(R::zero(), w) {
        let march = UMarch::new(f, xi, &times, steps_per_unit)?;
        // B(s) = U^ξ[s,a]⁻¹ A(s) U^ξ[s,a] turns the integrand into U^ξ[t,a] B(s₁)⋯B(s_m).
        let mut integrand = |s: &[R]| -> Result<ComplexMatrix<R>> {
            let mut p = march.conjugated(s[0])?;
            for &x in &s[1..] {
                p = p.matmul(&march.conjugated(x)?);
            }
            Ok(p)
        };
        let inner = simplex_integral(&srule, m, f.a(), t, dim, &mut integrand)?;
        let j = march.forward(t)?.matmul(&inner);
        let weight = wx * n_factor * (w - xi).powi(n as i32);
        acc.axpy_real(weight, &j);
    }
    Ok(acc)
}

fn collect_nodes<R: Real>(rule: &GaussLegendre<R>, depth: usize, lo: R, hi: R, out: &mut Vec<R>) {
    if depth == 0 {
        return;
    }
    for (x, _) in rule.on_interval(lo, hi) {
        out.push(x);
        collect_nodes(rule, depth - 1, lo, x, out);
    }
}

/// `U^ξ[s, a]` and its inverse at a fixed sorted set of times, by a Richardson-refined
/// midpoint product integral marched once from `a`.
struct UMarch<R> {
    times: Vec<R>,
    forward: Vec<ComplexMatrix<R>>,
    conj: Vec<ComplexMatrix<R>>,
}

impl<R: Real> UMarch<R> {
    fn new(f: &GeneratorFamily<R>, xi: R, times: &[R], steps_per_unit: usize) -> Result<Self> {
        let dim = f.dim();
        let h_max = R::count(steps_per_unit).recip();
        let id = ComplexMatrix::identity(dim);
        // coarse (n) and fine (2n) products and their inverses
        let (mut pc, mut pf, mut ic, mut i_f) = (id.clone(), id.clone(), id.clone(), id.clone());
        let mut prev = f.a();
        let mut forward = Vec::with_capacity(times.len());
        let mut conj = Vec::with_capacity(times.len());
        let third = R::lit(1.0 / 3.0);
        let four_thirds = R::lit(4.0 / 3.0);
        for &s in times {
            let gap = s - prev;
            if gap > R::zero() {
                let sub = (gap / h_max).ceil().to_usize().unwrap_or(1).max(1);
                let h = gap / R::count(sub);
                for j in 0..sub {
                    let lo = prev + h * R::count(j);
                    let a_mid = f.eval(lo + h * R::lit(0.5))?.scale_real(xi);
                    let a_q1 = f.eval(lo + h * R::lit(0.25))?.scale_real(xi);
                    let a_q3 = f.eval(lo + h * R::lit(0.75))?.scale_real(xi);
                    let e = expm(&a_mid.scale_real(h))?;
                    let e_inv = expm(&a_mid.scale_real(-h))?;
                    let half = h * R::lit(0.5);
                    let e1 = expm(&a_q1.scale_real(half))?;
                    let e3 = expm(&a_q3.scale_real(half))?;
                    let e1_inv = expm(&a_q1.scale_real(-half))?;
                    let e3_inv = expm(&a_q3.scale_real(-half))?;
                    pc = e.matmul(&pc);
                    ic = ic.matmul(&e_inv);
                    pf = e3.matmul(&e1.matmul(&pf));
                    i_f = i_f.matmul(&e1_inv).matmul(&e3_inv);
                }
            }
            prev = s;
            let mut p = pf.scale_real(four_thirds);
            p.axpy_real(-third, &pc);
            let mut inv = i_f.scale_real(four_thirds);
            inv.axpy_real(-third, &ic);
            let a_s = f.eval(s)?;
            conj.push(inv.matmul(&a_s).matmul(&p));
            forward.push(p);
        }
        Ok(Self { times: times.to_vec(), forward, conj })
    }

    fn index(&self, s: R) -> Result<usize> {
        self.times
            .binary_search_by(|x| x.partial_cmp(&s).expect("finite times"))
            .map_err(|_| Error::Evaluation { t: s.as_f64(), reason: "time not on the marching grid".into() })
    }

    fn forward(&self, s: R) -> Result<ComplexMatrix<R>> {
        Ok(self.forward[self.index(s)?].clone())
    }

    fn conjugated(&self, s: R) -> Result<ComplexMatrix<R>> {
        Ok(self.conj[self.index(s)?].clone())
    }
}

/// Which `U^w` enters the Poincaré difference quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoincareMode {
    /// `U^w = exp(wQ)`, compared against `Σ_{k≤n} (wQ)^k/k!`; limit `Q^{n+1}/(n+1)!`.
    ExpmOfQ,
    /// Time-ordered `U^w`, compared against the Dyson partial sum; limit `D_{n+1}`.
    TimeOrdered,
}

/// Difference quotient `w^{−(n+1)} (U^w − S_n(w)) x` and its `w → 0` limit.
#[derive(Debug, Clone)]
pub struct PoincareQuotient<R> {
    pub quotient: crate::matrix::StateVector<R>,
    pub limit: crate::matrix::StateVector<R>,
}

impl<R: Real> PoincareQuotient<R> {
    /// `‖quotient − limit‖ / ‖limit‖`.
    pub fn relative_error(&self) -> R {
        (&self.quotient - &self.limit).norm() / self.limit.norm()
    }
}

/// Poincaré asymptotics of the truncated expansion at order `n`.
///
/// `q_tol` is the gauge-integration tolerance for `Q[t, a]`; the time-ordered mode uses a
/// Richardson product integral with `steps` steps for `U^w`.
#[allow(clippy::too_many_arguments)]
pub fn poincare_quotient<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    n: usize,
    w: R,
    x: &crate::matrix::StateVector<R>,
    mode: PoincareMode,
    q_tol: R,
    steps: usize,
) -> Result<PoincareQuotient<R>> {
    if !(w > R::zero()) {
        return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
    }
    let dim = f.dim();
    let scale = w.powi(-(n as i32 + 1));
    let (u, partial, limit) = match mode {
        PoincareMode::ExpmOfQ => {
            let q = super::propagate::q_integral(f, t, q_tol)?;
            let wq = q.scale_real(w);
            let u = expm(&wq)?;
            let mut partial = ComplexMatrix::identity(dim);
            let mut term = ComplexMatrix::identity(dim);
            for k in 1..=n {
                term = term.matmul(&wq).scale_real(R::count(k).recip());
                partial += &term;
            }
            let mut lim = ComplexMatrix::identity(dim);
            for k in 1..=n + 1 {
                lim = lim.matmul(&q).scale_real(R::count(k).recip());
            }
            (u, partial, lim)
        }
        PoincareMode::TimeOrdered => {
            let fw = f.scaled(w);
            let u = super::propagate::propagate_richardson(&fw, t, steps)?;
            let mut partial = ComplexMatrix::identity(dim);
            let mut wk = R::one();
            for k in 1..=n {
                wk *= w;
                partial.axpy_real(wk, &dyson_term(f, t, k, DEFAULT_QUAD_NODES)?);
            }
            let lim = dyson_term(f, t, n + 1, DEFAULT_QUAD_NODES)?;
            (u, partial, lim)
        }
    };
    let quotient = (&u - &partial).scale_real(scale).mul_vec(x);
    Ok(PoincareQuotient { quotient, limit: limit.mul_vec(x) })
}
