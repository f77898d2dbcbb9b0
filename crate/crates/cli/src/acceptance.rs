//! Acceptance bundles C1–C13, grouped into suites.

use crate::rows::{write_rows, ResultRow};
use crate::util::{dirichlet_laplacian, loglog_slope, rk4_richardson, smooth_dissipative};
use anyhow::{anyhow, Result};
use chronocalc::chrono::{expansional_expand, TimeOrderedExpr};
use chronocalc::evolution::dyson::{dyson_expand, poincare_quotient, PoincareMode};
use chronocalc::evolution::mild::semilinear_mild;
use chronocalc::evolution::propagate::{propagate_richardson, q_integral};
use chronocalc::evolution::trotter::{generalized_trotter_kato, trotter, GtkSchedule};
use chronocalc::gauge::{cousin, hk_integrate, is_fine, Gauge, TaggedPartition, DEFAULT_MAX_DEPTH};
use chronocalc::matcore::{expm, yosida};
use chronocalc::pathsum::{
    experimental_evolution_with, feynman_kac, poisson_weights, Normalization, PathSumOptions, Regularizer,
};
use chronocalc::sample::{random_dissipative, random_matrix, random_unit_vector, rng};
use chronocalc::{CMatrix, CVector, ContinuityClass, Family, StateVector, C64};
use chronocalc_kernels::{
    bessel_j, bessel_k2, bessel_y, compose, hankel_h2_1, hankel_h2_2, symbol_to_kernel, Grid1D, KernelFunction,
    LightConeRegion,
};
use rand::Rng;
use serde::Serialize;
use std::time::Instant;

pub const SUITES: &[&str] = &["gauge", "dyson", "trotter", "pathsum", "kernels", "all"];

/// Criterion ids run by a suite; `all` adds C13 on top of C1–C12.
pub fn suite_criteria(name: &str) -> Option<Vec<&'static str>> {
    Some(match name {
        "gauge" => vec!["C1", "C2"],
        "dyson" => vec!["C3", "C4", "C5", "C6", "C7", "C12"],
        "trotter" => vec!["C8"],
        "pathsum" => vec!["C9", "C10"],
        "kernels" => vec!["C11"],
        "all" => vec!["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C13"],
        _ => return None,
    })
}

pub fn criterion_title(id: &str) -> &'static str {
    match id {
        "C1" => "gauge integral agrees with the Bochner sum on a step family",
        "C2" => "gauge fineness, monotonicity and additivity",
        "C3" => "Yosida approximator rate and commutation",
        "C4" => "disentanglement identities and exchange axioms",
        "C5" => "Feynman expansional order",
        "C6" => "Dyson partial sum plus remainder is the propagator",
        "C7" => "Poincaré asymptotics of the truncated expansion",
        "C8" => "Trotter and generalized Trotter–Kato rates",
        "C9" => "Poisson path sum",
        "C10" => "Feynman–Kac with square-root cutoff",
        "C11" => "closed-form kernels, Bessel functions, symbol quadrature",
        "C12" => "semilinear mild solution",
        "C13" => "full suite budget and determinism",
        _ => "unknown",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtMost { value: f64 },
    Within { target: f64, tol: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Wall-clock checks; left out of CSV rows unless timings are requested.
    #[serde(skip)]
    pub timing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl CriterionReport {
    /// One human-readable line: id, verdict, title and the checks.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let bound = match c.bound {
                    Bound::AtMost { value } => format!("≤ {value:e}"),
                    Bound::Within { target, tol } => format!("= {target} ± {tol}"),
                };
                format!("{} {:.3e} {bound}{}", c.label, c.measured, if c.passed { "" } else { " ✗" })
            })
            .collect();
        let err = self.error.as_ref().map(|e| format!(" error: {e}")).unwrap_or_default();
        format!("{} {verdict} {}: {}{err}", self.id, self.title, checks.join("; "))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    /// CSV rows: criterion id as the experiment, check label as the metric.
    pub fn rows(&self, timings: bool) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for c in &self.criteria {
            for check in c.checks.iter().filter(|k| timings || !k.timing) {
                rows.push(ResultRow {
                    experiment: c.id.clone(),
                    sweep_value: None,
                    metric: check.label.clone(),
                    value: check.measured,
                    runtime_ms: None,
                });
            }
            rows.push(ResultRow {
                experiment: c.id.clone(),
                sweep_value: None,
                metric: "passed".into(),
                value: if c.passed { 1.0 } else { 0.0 },
                runtime_ms: if timings { c.runtime_ms } else { None },
            });
        }
        rows
    }

    pub fn csv(&self, timings: bool) -> String {
        let mut buf = Vec::new();
        write_rows(&mut buf, &self.rows(timings)).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 rows")
    }
}

/// Collects the checks of one criterion, applying an optional tolerance override.
pub struct Ctx {
    tolerance: Option<f64>,
    checks: Vec<Check>,
}

impl Ctx {
    fn new(tolerance: Option<f64>) -> Self {
        Self { tolerance, checks: Vec::new() }
    }

    fn at_most(&mut self, label: &str, measured: f64, value: f64) {
        let value = self.tolerance.unwrap_or(value);
        self.push(label, measured, Bound::AtMost { value }, measured <= value, false);
    }

    fn within(&mut self, label: &str, measured: f64, target: f64, tol: f64) {
        let tol = self.tolerance.unwrap_or(tol);
        self.push(label, measured, Bound::Within { target, tol }, (measured - target).abs() <= tol, false);
    }

    /// A count that must be zero; not subject to the tolerance override.
    fn none(&mut self, label: &str, failures: usize) {
        self.push(label, failures as f64, Bound::AtMost { value: 0.0 }, failures == 0, false);
    }

    fn timing(&mut self, label: &str, seconds: f64, limit: f64) {
        self.push(label, seconds, Bound::AtMost { value: limit }, seconds <= limit, true);
    }

    fn push(&mut self, label: &str, measured: f64, bound: Bound, passed: bool, timing: bool) {
        self.checks.push(Check { label: label.into(), measured, bound, passed: passed && !measured.is_nan(), timing });
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Replaces every numeric tolerance (not counts or time budgets).
    pub tolerance: Option<f64>,
    pub timings: bool,
}

pub fn run_criterion(id: &str, opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let mut ctx = Ctx::new(opts.tolerance);
    let outcome = match id {
        "C1" => c1(&mut ctx),
        "C2" => c2(&mut ctx),
        "C3" => c3(&mut ctx),
        "C4" => c4(&mut ctx),
        "C5" => c5(&mut ctx),
        "C6" => c6(&mut ctx),
        "C7" => c7(&mut ctx),
        "C8" => c8(&mut ctx),
        "C9" => c9(&mut ctx),
        "C10" => c10(&mut ctx),
        "C11" => c11(&mut ctx),
        "C12" => c12(&mut ctx),
        "C13" => c13(&mut ctx, opts),
        other => Err(anyhow!("unknown criterion {other}")),
    };
    let error = outcome.err().map(|e| format!("{e:#}"));
    let passed = error.is_none() && !ctx.checks.is_empty() && ctx.checks.iter().all(|c| c.passed);
    CriterionReport {
        id: id.into(),
        title: criterion_title(id).into(),
        passed,
        checks: ctx.checks,
        error,
        runtime_ms: opts.timings.then(|| start.elapsed().as_millis()),
    }
}

/// Runs a suite with criteria spread over the current rayon pool, results in suite order.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    use rayon::prelude::*;
    let ids = suite_criteria(name).ok_or_else(|| anyhow!("unknown suite `{name}` (expected one of {})", SUITES.join(", ")))?;
    let criteria: Vec<CriterionReport> = ids.par_iter().map(|id| run_criterion(id, opts)).collect();
    let passed = criteria.iter().all(|c| c.passed);
    Ok(SuiteReport { suite: name.into(), passed, criteria })
}

fn c1(ctx: &mut Ctx) -> Result<()> {
    let mut r = rng(101);
    let pieces: Vec<CMatrix> = (0..3).map(|_| random_matrix(2, &mut r)).collect();
    let f = Family::piecewise_constant(0.0, 1.0, vec![0.3, 0.75], pieces.clone())?;
    let mut exact = pieces[0].scale_real(0.3);
    exact.axpy_real(0.45, &pieces[1]);
    exact.axpy_real(0.25, &pieces[2]);
    let start = Instant::now();
    let res = hk_integrate(&f, 0.0, 1.0, 1e-13)?;
    let secs = start.elapsed().as_secs_f64();
    ctx.at_most("hk_minus_bochner", (&res.value - &exact).op_norm(), 1e-12);
    ctx.timing("runtime_s", secs, 1.0);
    Ok(())
}

fn c2(ctx: &mut Ctx) -> Result<()> {
    let mut r = rng(102);
    let (mut fine_fail, mut mono_fail) = (0, 0);
    for _ in 0..100 {
        let (c0, c1, c2, bump) =
            (r.gen_range(1e-3..0.05), r.gen_range(0.0..0.2), r.gen_range(0.0..30.0), r.gen_range(0.0..0.5));
        let g1 = Gauge::new(0.0, 1.0, move |t: f64| c0 + c1 * (1.0 + (c2 * t).sin()))?;
        let g2 = Gauge::new(0.0, 1.0, move |t: f64| c0 + bump + c1 * (1.0 + (c2 * t).sin()))?;
        let p = cousin(&g1, DEFAULT_MAX_DEPTH)?;
        fine_fail += usize::from(!is_fine(&p, &g1));
        mono_fail += usize::from(!is_fine(&p, &g2));
        // a uniform partition at the gauge minimum is fine for both
        let n = (1.0f64 / c0).ceil() as usize;
        let u = TaggedPartition::uniform(0.0, 1.0, n)?;
        mono_fail += usize::from(is_fine(&u, &g1) && !is_fine(&u, &g2));
    }
    ctx.none("fineness_failures", fine_fail);
    ctx.none("monotonicity_failures", mono_fail);

    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let c = r.gen_range(0.05..0.95);
        let m = random_matrix::<f64>(2, &mut r);
        let f = Family::from_fn(0.0, 1.0, 2, ContinuityClass::Smooth, move |t: f64| m.scale_real((2.0 * t).exp()))?;
        let whole = hk_integrate(&f, 0.0, 1.0, tol)?.value;
        let split = &hk_integrate(&f, 0.0, c, tol)?.value + &hk_integrate(&f, c, 1.0, tol)?.value;
        worst = worst.max((&whole - &split).op_norm());
    }
    ctx.at_most("additivity_defect", worst, 2.0 * tol);
    Ok(())
}

fn c3(ctx: &mut Ctx) -> Result<()> {
    let mut r = rng(103);
    let lambdas = [10.0, 1e2, 1e3, 1e4];
    let (mut worst_slope, mut worst_comm) = (-1.0f64, 0.0f64);
    for _ in 0..10 {
        let a = random_dissipative::<f64>(4, 0.0, &mut r);
        let x = random_unit_vector::<f64>(4, &mut r);
        let ax = a.mul_vec(&x);
        let mut errs = Vec::new();
        for &l in &lambdas {
            let y = yosida(&a, l)?;
            errs.push((&y.mul_vec(&x) - &ax).norm());
            worst_comm = worst_comm.max(a.commutator(&y).op_norm());
        }
        let s = loglog_slope(&lambdas, &errs);
        if (s + 1.0).abs() > (worst_slope + 1.0).abs() {
            worst_slope = s;
        }
    }
    ctx.within("worst_slope", worst_slope, -1.0, 0.05);
    ctx.at_most("commutation_defect", worst_comm, 1e-12);
    Ok(())
}

fn c4(ctx: &mut Ctx) -> Result<()> {
    let mut r = rng(104);
    let (a, b) = (random_matrix::<f64>(3, &mut r), random_matrix::<f64>(3, &mut r));
    let dom = (0.0, 1.0);
    let lift = |t: f64, m: &CMatrix| TimeOrderedExpr::lift(dom, t, m);
    let (s, t) = (0.25, 0.75);
    let bs_at = lift(s, &b)?.mul(&lift(t, &a)?)?;
    ctx.at_most("dT_BsAt_minus_AB", bs_at.disentangle().max_abs_diff(&a.matmul(&b)), 0.0);
    let other = lift(t, &b)?.mul(&lift(s, &a)?)?;
    let diff = bs_at.sub(&other)?.disentangle();
    ctx.at_most("dT_difference_minus_commutator", diff.max_abs_diff(&a.commutator(&b)), 0.0);

    let times = [0.0, 0.2, 0.5, 0.9, 1.0];
    let mut failures = 0;
    let x = lift(0.2, &a)?.mul(&lift(0.9, &b)?)?.add(&lift(0.5, &b)?)?;
    for &t in &times {
        for &s in &times {
            failures += usize::from(x.exchange(t, s)?.exchange(s, t)? != x);
            for &tp in &times {
                for &u in &times {
                    let single = lift(u, &a)?;
                    if u != t && u != tp {
                        failures += usize::from(single.exchange(t, tp)? != single);
                    }
                    if u == t || (u != s && u != tp) {
                        failures += usize::from(single.exchange(t, s)?.exchange(s, tp)? != single.exchange(t, tp)?);
                    }
                }
            }
        }
    }
    ctx.none("exchange_axiom_failures", failures);
    Ok(())
}

fn c5(ctx: &mut Ctx) -> Result<()> {
    let start = Instant::now();
    let mut r = rng(105);
    let (a, b) = (random_matrix::<f64>(4, &mut r), random_matrix::<f64>(4, &mut r));
    let eps = [1e-1, 1e-2, 1e-3];
    for k in 1..=2usize {
        let mut errs = Vec::new();
        for &e in &eps {
            let be = b.scale_real(e);
            let exact = expm(&(&a + &be))?;
            errs.push((&exact - &expansional_expand(&a, &be, k, 32)?.value).op_norm());
        }
        ctx.within(&format!("slope_k{k}"), loglog_slope(&eps, &errs), k as f64 + 1.0, 0.1);
    }
    ctx.timing("runtime_s", start.elapsed().as_secs_f64(), 30.0);
    Ok(())
}

fn c6(ctx: &mut Ctx) -> Result<()> {
    let (mut worst_ratio, mut worst_abs) = (0.0f64, 0.0f64);
    for seed in 0..5 {
        let f = smooth_dissipative(3, 600 + seed);
        for &w in &[0.5, 1.0] {
            let reference = propagate_richardson(&f.scaled(w), 1.0, 2048)?;
            for n in 0..=2 {
                let res = dyson_expand(&f, 1.0, n, w, 24)?;
                let err = (&res.total() - &reference).op_norm();
                worst_abs = worst_abs.max(err);
                worst_ratio = worst_ratio.max(err / res.est_error.max(1e-12));
            }
        }
    }
    ctx.at_most("error_over_estimate", worst_ratio, 1.0);
    ctx.at_most("abs_error", worst_abs, 1e-8);
    Ok(())
}

fn c7(ctx: &mut Ctx) -> Result<()> {
    let f = smooth_dissipative(3, 700);
    let x = random_unit_vector::<f64>(3, &mut rng(701));
    let mut worst: f64 = 0.0;
    for n in 0..=2 {
        let p = poincare_quotient(&f, 1.0, n, 1e-3, &x, PoincareMode::ExpmOfQ, 1e-12, 0)?;
        worst = worst.max(p.relative_error());
    }
    ctx.at_most("relative_error", worst, 0.01);
    Ok(())
}

fn c8(ctx: &mut Ctx) -> Result<()> {
    let mut r = rng(108);
    let (a, b) = (random_dissipative::<f64>(3, 0.0, &mut r), random_dissipative::<f64>(3, 0.0, &mut r));
    let exact = expm(&(&a + &b))?;
    let ns: Vec<f64> = (1..=10).map(|k| 2f64.powi(k)).collect();
    let mut max_norm: f64 = 0.0;
    let mut errs = Vec::new();
    for &n in &ns {
        let p = trotter(&a, &b, 1.0, n as usize)?;
        max_norm = max_norm.max(p.op_norm());
        errs.push((&p - &exact).op_norm());
    }
    ctx.within("trotter_slope", loglog_slope(&ns, &errs), -1.0, 0.1);

    let fa = smooth_dissipative(3, 801);
    let fb = smooth_dissipative(3, 802);
    let reference = propagate_richardson(&fa.add(&fb)?, 1.0, 4096)?;
    let mut gerrs = Vec::new();
    for &n in &ns {
        let g = generalized_trotter_kato(&fa, &fb, 1.0, n as usize, GtkSchedule::Perturbed)?;
        max_norm = max_norm.max(g.op_norm());
        gerrs.push((&g - &reference).op_norm());
    }
    ctx.within("gtk_slope", loglog_slope(&ns, &gerrs), -1.0, 0.1);

    let ca = Family::constant(0.0, 1.0, a.clone())?;
    let cb = Family::constant(0.0, 1.0, b.clone())?;
    let mut worst: f64 = 0.0;
    for &n in &ns {
        let g = generalized_trotter_kato(&ca, &cb, 1.0, n as usize, GtkSchedule::Perturbed)?;
        worst = worst.max((&g - &trotter(&a, &b, 1.0, n as usize)?).op_norm());
        max_norm = max_norm.max(g.op_norm());
    }
    ctx.at_most("gtk_constant_minus_trotter", worst, 1e-9);
    ctx.at_most("contraction_excess", (max_norm - 1.0).max(0.0), 1e-10);
    Ok(())
}

fn diag_family() -> Result<Family> {
    Ok(Family::from_fn(0.0, 1.0, 2, ContinuityClass::Smooth, |t: f64| {
        CMatrix::diag_real(&[-1.0 - t.sin(), -2.0 * t * t])
    })?)
}

fn c9(ctx: &mut Ctx) -> Result<()> {
    let a = random_matrix::<f64>(3, &mut rng(109)).scale_real(0.5);
    let f = Family::constant(0.0, 1.0, a.clone())?;
    let e = expm(&a)?;
    let report = PathSumOptions::default();
    let mut worst: f64 = 0.0;
    for lambda in [40.0, 150.0, 1000.0] {
        let res = experimental_evolution_with(&f, 1.0, lambda, &report)?;
        let (_, d) = poisson_weights(lambda, res.terms_used - 1);
        let err = (&res.value - &e).op_norm();
        worst = worst.max((err - e.op_norm() * d).abs());
    }
    ctx.at_most("constant_error_minus_deficit", worst, 1e-12);

    let f = diag_family()?;
    let t = 0.02;
    let exact = expm(&q_integral(&f, t, 1e-13)?)?;
    let renorm = PathSumOptions { normalization: Normalization::Renormalize, ..Default::default() };
    let mut errs = Vec::new();
    for lambda in [10.0, 1e2, 1e3] {
        let res = experimental_evolution_with(&f, t, lambda, &renorm)?;
        errs.push((&res.value - &exact).op_norm());
    }
    let inversions: Vec<f64> = errs.windows(2).filter(|w| w[1] >= w[0]).map(|w| w[1] / w[0]).collect();
    let bad = inversions.len().saturating_sub(1) + inversions.iter().filter(|&&q| q > 1.1).count();
    ctx.none("ladder_inversions", bad);
    ctx.at_most("error_at_lambda_1e3", errs[2], 1e-3);
    Ok(())
}

/// Relative errors of the cutoff propagator against exp(t(F₀ + cV)) for each ρ.
fn cutoff_errors(f0: &CMatrix, v: &CMatrix, coupling: C64, t: f64, rhos: &[f64]) -> Result<Vec<f64>> {
    let mut total = f0.clone();
    total.axpy(coupling, v);
    let exact = expm(&total.scale_real(t))?;
    let ff0 = Family::constant(0.0, 1.0, f0.clone())?;
    let fv = Family::constant(0.0, 1.0, v.clone())?;
    rhos.iter()
        .map(|&rho| {
            let u = feynman_kac(&ff0, &fv, coupling, t, Regularizer::SqrtCutoff(rho), 1)?;
            Ok((&u - &exact).op_norm() / exact.op_norm())
        })
        .collect()
}

fn c10(ctx: &mut Ctx) -> Result<()> {
    let start = Instant::now();
    let rhos = [1e-2, 1e-4, 1e-6];
    let n = 64;
    let lap = dirichlet_laplacian(n, 1.0).scale_real(0.01);
    let xs: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
    let v = CMatrix::diag_real(&xs.iter().map(|x| -(1.0 + (std::f64::consts::TAU * x).sin())).collect::<Vec<_>>());
    let errs = cutoff_errors(&lap, &v, C64::new(1.0, 0.0), 0.1, &rhos)?;
    ctx.none("heat_non_decreasing_steps", errs.windows(2).filter(|w| w[1] >= w[0]).count());
    ctx.at_most("heat_final_rel_error", errs[2], 1e-6);

    // −i(−½Δ + x⁴) on 32 points of (−1.5, 1.5)
    let m = 32;
    let len = 3.0;
    let kinetic = dirichlet_laplacian(m, len).scale(C64::new(0.0, 0.5));
    let xq: Vec<f64> = (1..=m).map(|i| -1.5 + len * i as f64 / (m + 1) as f64).collect();
    let quartic = CMatrix::diag_real(&xq.iter().map(|x| x.powi(4)).collect::<Vec<_>>());
    let qerrs = cutoff_errors(&kinetic, &quartic, C64::new(0.0, -1.0), 0.02, &rhos)?;
    ctx.none("quartic_non_decreasing_steps", qerrs.windows(2).filter(|w| w[1] >= w[0]).count());
    ctx.at_most("quartic_final_rel_error", qerrs[2], 1e-5);
    ctx.timing("runtime_s", start.elapsed().as_secs_f64(), 60.0);
    Ok(())
}

fn c11(ctx: &mut Ctx) -> Result<()> {
    let heat = KernelFunction::heat(1.0)?;
    let r = compose(&heat, 1.0, 0.5, 0.0, &Grid1D::new(12.0, 512)?)?;
    ctx.at_most("heat_chapman_kolmogorov", r.defect, 1e-6);
    let mehler = KernelFunction::mehler(1.0, 1.0, 1.0)?;
    let r = compose(&mehler, 0.6, 0.3, 0.0, &Grid1D::new(24.0, 4097)?)?;
    ctx.at_most("mehler_composition", r.defect, 1e-4);

    // 40-digit reference values
    ctx.at_most("k2_at_1_rel", (bessel_k2(1.0)? / 1.6248388986351774828 - 1.0).abs(), 1e-10);
    let frozen = [
        (1.0, 0.11490348493190048047, -1.6506826068162543911),
        (12.1, -0.10532776094183627729, 0.20542401171598399968),
        (100.0, -0.021528757344505365585, 0.076836867125027956388),
        (9999.0, 0.00076617614284683958467, -0.0079423749208481621019),
    ];
    let mut hankel: f64 = 0.0;
    for (z, j2, y2) in frozen {
        hankel = hankel.max((hankel_h2_1(z)? - C64::new(j2, y2)).norm()).max((hankel_h2_2(z)? - C64::new(j2, -y2)).norm());
    }
    ctx.at_most("hankel_vs_reference", hankel, 1e-10);
    let (mut sum_id, mut wronskian): (f64, f64) = (0.0, 0.0);
    for k in 0..=200 {
        let z = 0.05 * (9999.0f64 / 0.05).powf(k as f64 / 200.0);
        let s = hankel_h2_1(z)? + hankel_h2_2(z)?;
        sum_id = sum_id.max((s - C64::new(2.0 * bessel_j(2, z)?, 0.0)).norm());
        let (j1, j2, y1, y2) = (bessel_j(1, z)?, bessel_j(2, z)?, bessel_y(1, z)?, bessel_y(2, z)?);
        let w = j2 * (y1 - 2.0 * y2 / z) - (j1 - 2.0 * j2 / z) * y2;
        wronskian = wronskian.max((w * std::f64::consts::PI * z / 2.0 - 1.0).abs());
    }
    ctx.at_most("hankel_sum_identity", sum_id, 1e-10);
    ctx.at_most("wronskian_rel", wronskian, 1e-9);

    let (mu, c) = (1.3, 0.8);
    let rel = KernelFunction::sqrt_relativistic(mu, c)?;
    let mut r = rng(111);
    let mut wrong = 0;
    for _ in 0..1000 {
        let dx: Vec<f64> = (0..3).map(|_| r.gen_range(-2.0..2.0)).collect();
        let t: f64 = r.gen_range(-4.0..4.0);
        let dist = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
        let expected = if c * t.abs() < dist {
            LightConeRegion::Spacelike
        } else if t > 0.0 {
            LightConeRegion::TimelikeFuture
        } else {
            LightConeRegion::TimelikePast
        };
        let region = KernelFunction::region(c, t, dist)?;
        let v = rel.eval(&dx, t, &[0.0, 0.0, 0.0], 0.0)?;
        let spacelike_real = region != LightConeRegion::Spacelike || v.re == 0.0;
        wrong += usize::from(region != expected || !spacelike_real);
    }
    ctx.none("branch_mismatches", wrong);

    let g = Grid1D::new(12.0, 512)?;
    let sk = symbol_to_kernel(|_, eta| C64::new(0.0, -eta * eta), 0.5, 1.0, &g)?;
    let exact = heat.sample(0.5, 0.0, &g)?;
    ctx.at_most("symbol_heat_max_diff", sk.table.max_abs_diff(&exact), 1e-6);
    Ok(())
}

fn c12(ctx: &mut Ctx) -> Result<()> {
    // u' = a(t)u + r u(1 − u)
    let rate = 1.5;
    let a = |t: f64| -0.5 - 0.3 * t.sin();
    let fam = Family::from_fn(0.0, 2.0, 1, ContinuityClass::Smooth, move |t| CMatrix::diag_real(&[a(t)]))?;
    let u0 = 0.2;
    let sol = semilinear_mild(
        &fam,
        move |_, u: &CVector| StateVector::from_vec(vec![u[0] * (1.0 - u[0]) * rate]),
        &CVector::from_real(&[u0]),
        2.0,
        1024,
        100,
        1e-13,
    )?;
    let oracle = rk4_richardson(|t, y| a(t) * y + rate * y * (1.0 - y), 0.0, 2.0, u0, 4096);
    ctx.at_most("mild_minus_ode", (sol.value[0].re - oracle).abs(), 1e-6);
    Ok(())
}

fn c13(ctx: &mut Ctx, opts: &SuiteOptions) -> Result<()> {
    let inner = SuiteOptions { tolerance: opts.tolerance, timings: false };
    let ids = suite_criteria("all").expect("all suite");
    let body = &ids[..ids.len() - 1];
    let run = || -> (String, f64) {
        let start = Instant::now();
        let report = SuiteReport {
            suite: "all".into(),
            passed: true,
            criteria: body.iter().map(|id| run_criterion(id, &inner)).collect(),
        };
        (report.csv(false), start.elapsed().as_secs_f64())
    };
    let (first, secs) = run();
    let (second, _) = run();
    ctx.none("csv_byte_differences", usize::from(first != second));
    ctx.timing("suite_runtime_s", secs, 600.0);
    Ok(())
}
