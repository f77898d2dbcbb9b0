//! Sum over measurement paths.
//!
//! A schedule of measurement times `τ₁ < … < τₙ` splits `[0, t]` into cells; each cell's
//! integrated generator is concentrated at its tag. Averaging the resulting products with
//! Poisson weights in the number of measurements gives the experimental evolution operator.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::propagate;
use crate::family::GeneratorFamily;
use crate::gauge::hk_integrate;
use crate::matcore::{expm, sqrt_cutoff, yosida};
use crate::matrix::ComplexMatrix;
use crate::sample;
use crate::scalar::Real;

/// Measurement times and the cell boundaries between them.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSchedule<R> {
    taus: Vec<R>,
    boundaries: Vec<R>,
}

impl<R: Real> MeasurementSchedule<R> {
    /// Schedule on `[origin, t]`; boundaries are the midpoints between consecutive taus.
    pub fn new(origin: R, t: R, taus: Vec<R>) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one measurement time".into()));
        }
        if !(origin < t) {
            return Err(Error::InvalidArgument(format!("schedule needs origin < t, got [{origin}, {t}]")));
        }
        if taus.windows(2).any(|w| !(w[0] < w[1])) || taus.iter().any(|&x| !(x >= origin && x <= t)) {
            return Err(Error::InvalidArgument("measurement times must increase strictly inside [origin, t]".into()));
        }
        let n = taus.len();
        let mut boundaries = Vec::with_capacity(n + 1);
        boundaries.push(origin);
        for w in taus.windows(2) {
            boundaries.push((w[0] + w[1]) * R::lit(0.5));
        }
        boundaries.push(t);
        Ok(Self { taus, boundaries })
    }

    /// `τ_j = origin + j (t − origin)/n`.
    pub fn equispaced(origin: R, t: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("schedule needs n ≥ 1".into()));
        }
        let h = (t - origin) / R::count(n);
        let taus = (1..=n).map(|j| if j == n { t } else { origin + h * R::count(j) }).collect();
        Self::new(origin, t, taus)
    }

    pub fn taus(&self) -> &[R] {
        &self.taus
    }

    pub fn boundaries(&self) -> &[R] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// `∏_{j=n..1} exp(M_j)` with `M_j = ∫_{t_{j−1}}^{t_j} A` concentrated at `τ_j`.
pub fn u_schedule<R: Real>(f: &GeneratorFamily<R>, sched: &MeasurementSchedule<R>, tol: R) -> Result<ComplexMatrix<R>> {
    let mut u = ComplexMatrix::identity(f.dim());
    for w in sched.boundaries().windows(2) {
        let m = hk_integrate(f, w[0], w[1], tol)?.value;
        u = expm(&m)?.matmul(&u);
    }
    Ok(u)
}

/// [`u_schedule`] on the equispaced schedule `τ_j = jt/n` (measured from the family's start).
pub fn u_n<R: Real>(f: &GeneratorFamily<R>, t: R, n: usize, tol: R) -> Result<ComplexMatrix<R>> {
    u_schedule(f, &MeasurementSchedule::equispaced(f.a(), t, n)?, tol)
}

/// Mean of [`u_schedule`] over `samples` schedules of `n` sorted uniform times.
///
/// A qualitative comparison only; the equispaced schedule is the primary method.
pub fn u_n_monte_carlo<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    n: usize,
    samples: usize,
    seed: u64,
    tol: R,
) -> Result<ComplexMatrix<R>> {
    if samples == 0 || n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs samples ≥ 1 and n ≥ 1".into()));
    }
    let mut rng = sample::rng(seed);
    let mut acc = ComplexMatrix::zeros(f.dim());
    let (a, span) = (f.a().as_f64(), (t - f.a()).as_f64());
    for _ in 0..samples {
        let mut taus: Vec<f64> = (0..n).map(|_| a + span * rng.gen::<f64>()).collect();
        taus.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
        taus.dedup();
        let sched = MeasurementSchedule::new(f.a(), t, taus.into_iter().map(R::lit).collect())?;
        acc += &u_schedule(f, &sched, tol)?;
    }
    Ok(acc.scale_real(R::count(samples).recip()))
}

/// Poisson weights `w_n = e^{−μ} μⁿ/n!` for `n = 0..=last` and the tail `P(N > last)`.
///
/// The weight at the mode `m = ⌊μ⌋` is formed in log space with the exponent written as
/// `m ln(μ/m) − (μ − m) − ln √(2πm) − …`, so nothing cancels and `e^{−μ}` never underflows.
/// The other weights follow by the ratio recurrences `w_{k±1} = w_k · (μ/(k+1))^{±1}`.
pub fn poisson_weights(mu: f64, last: usize) -> (Vec<f64>, f64) {
    if !(mu > 0.0) {
        let mut w = vec![0.0; last + 1];
        w[0] = 1.0;
        return (w, 0.0);
    }
    let m = mu.floor() as usize;
    let kmax = last.max(m) + 20 + (40.0 * mu.sqrt()).ceil() as usize;
    let mut w = vec![0.0f64; kmax + 1];
    w[m] = poisson_mode_weight(mu, m);
    for k in (1..=m).rev() {
        w[k - 1] = w[k] * k as f64 / mu;
    }
    for k in m..kmax {
        w[k + 1] = w[k] * mu / (k + 1) as f64;
    }
    // smallest terms first
    let tail = w[last + 1..].iter().rev().sum();
    w.truncate(last + 1);
    (w, tail)
}

fn poisson_mode_weight(mu: f64, m: usize) -> f64 {
    if m < 30 {
        let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
        return (-mu + m as f64 * mu.ln() - ln_fact).exp();
    }
    let mf = m as f64;
    let d = mu - mf;
    let series = 1.0 / (12.0 * mf) - 1.0 / (360.0 * mf.powi(3)) + 1.0 / (1260.0 * mf.powi(5));
    (mf * (d / mf).ln_1p() - d - 0.5 * (std::f64::consts::TAU * mf).ln() - series).exp()
}

/// How the truncated Poisson sum is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Weights as they are; the missing mass is reported as the deficit.
    Report,
    /// Weights divided by their sum.
    Renormalize,
}

/// Controls for [`experimental_evolution_with`].
#[derive(Debug, Clone, Copy)]
pub struct PathSumOptions {
    /// Largest number of Poisson terms, `⌊λt⌋ + 1`.
    pub budget: usize,
    pub normalization: Normalization,
    /// Tolerance for the cell integrals.
    pub tol: f64,
    /// Terms whose weight is below this fraction of the largest weight are skipped.
    pub weight_cutoff: f64,
}

impl Default for PathSumOptions {
    fn default() -> Self {
        Self { budget: 2000, normalization: Normalization::Report, tol: 1e-12, weight_cutoff: 1e-17 }
    }
}

/// Outcome of [`experimental_evolution`].
#[derive(Debug, Clone)]
pub struct PathSumResult<R> {
    pub value: ComplexMatrix<R>,
    pub lambda: R,
    /// `⌊λt⌋ + 1`.
    pub terms_used: usize,
    /// `P(N > ⌊λt⌋)` for `N` Poisson with mean `λt`.
    pub poisson_deficit: f64,
    /// Number of terms actually evaluated after dropping negligible weights.
    pub terms_evaluated: usize,
}

/// Experimental evolution operator with default options.
pub fn experimental_evolution<R: Real>(f: &GeneratorFamily<R>, t: R, lambda: R) -> Result<PathSumResult<R>> {
    experimental_evolution_with(f, t, lambda, &PathSumOptions::default())
}

/// `U_λ[t, a] = Σ_{n=0}^{⌊λt⌋} e^{−λt} (λt)ⁿ/n! U_n[t, a]`, with `U_0 = I`.
pub fn experimental_evolution_with<R: Real>(
    f: &GeneratorFamily<R>,
    t: R,
    lambda: R,
    opts: &PathSumOptions,
) -> Result<PathSumResult<R>> {
    if !(lambda > R::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
    }
    let span = t - f.a();
    if !(span > R::zero()) || t > f.b() {
        return Err(Error::Domain(format!("time {t} outside ({}, {}]", f.a(), f.b())));
    }
    let mu = (lambda * span).as_f64();
    let last = mu.floor();
    if !(last < opts.budget as f64) {
        return Err(Error::CostGuard { requested: last as u128 + 1, budget: opts.budget as u128 });
    }
    let last = last as usize;
    let (weights, deficit) = poisson_weights(mu, last);
    let top = weights.iter().copied().fold(0.0, f64::max);
    let scale = match opts.normalization {
        Normalization::Report => 1.0,
        Normalization::Renormalize => 1.0 / weights.iter().sum::<f64>(),
    };
    let tol = R::lit(opts.tol);
    let mut value = ComplexMatrix::zeros(f.dim());
    let mut evaluated = 0;
    for (n, &w) in weights.iter().enumerate() {
        if w < opts.weight_cutoff * top {
            continue;
        }
        evaluated += 1;
        let coeff = R::lit(w * scale);
        if n == 0 {
            value.axpy_real(coeff, &ComplexMatrix::identity(f.dim()));
        } else {
            value.axpy_real(coeff, &u_n(f, t, n, tol)?);
        }
    }
    Ok(PathSumResult { value, lambda, terms_used: last + 1, poisson_deficit: deficit, terms_evaluated: evaluated })
}

/// Bounded surrogate for the potential in [`feynman_kac`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Regularizer {
    /// `λ V R(λ, V)`, relaxed as `λ → ∞`.
    Yosida(f64),
    /// `V (I + ρV²)^{-1/2}`, relaxed as `ρ → 0`.
    SqrtCutoff(f64),
}

/// `V_reg(s)` for every `s`.
pub fn regularize<R: Real>(v: &GeneratorFamily<R>, reg: Regularizer) -> GeneratorFamily<R> {
    match reg {
        Regularizer::Yosida(lambda) => v.map(move |_, m| yosida(&m, R::lit(lambda))),
        Regularizer::SqrtCutoff(rho) => v.map(move |_, m| sqrt_cutoff(&m, R::lit(rho))),
    }
}

/// Propagator of `F₀ + c·V_reg` at resolution `n`.
///
/// `coupling` is `1` for diffusions and `−i/ħ` when `F₀` is already a Schrödinger
/// generator and `V` a real potential.
pub fn feynman_kac<R: Real>(
    f0: &GeneratorFamily<R>,
    v: &GeneratorFamily<R>,
    coupling: Complex<R>,
    t: R,
    regularizer: Regularizer,
    n: usize,
) -> Result<ComplexMatrix<R>> {
    let total = f0.add(&regularize(v, regularizer).scaled_complex(coupling))?;
    propagate(&total, t, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_deficit_sum_to_one() {
        for &mu in &[0.3, 2.0, 20.0, 29.5, 30.5, 999.5, 1500.0] {
            let (w, d) = poisson_weights(mu, mu.floor() as usize);
            let s: f64 = w.iter().sum();
            assert!((s + d - 1.0).abs() < 1e-12, "mu = {mu}: {}", s + d);
        }
    }

    #[test]
    fn blank_film_weight() {
        let (w, _) = poisson_weights(0.5, 0);
        assert_eq!(w, vec![(-0.5f64).exp()]);
    }

    #[test]
    fn schedule_boundaries_interleave() {
        let s = MeasurementSchedule::equispaced(0.0, 1.0, 4).unwrap();
        assert_eq!(s.taus(), &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.boundaries(), &[0.0, 0.375, 0.625, 0.875, 1.0]);
        assert!(MeasurementSchedule::new(0.0, 1.0, vec![0.5, 0.5]).is_err());
    }
}
