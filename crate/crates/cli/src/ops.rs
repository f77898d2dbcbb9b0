//! Registry of sweepable experiment ops.

use crate::config::FamilySpec;
use crate::util::{dirichlet_laplacian, rk4_richardson, smooth_dissipative};
use anyhow::{anyhow, bail, Result};
use chronocalc::chrono::expansional_expand;
use chronocalc::evolution::{
    dyson_expand, generalized_trotter_kato, propagate, propagate_richardson, q_integral, semilinear_mild, trotter,
    GtkSchedule,
};
use chronocalc::gauge::hk_integrate;
use chronocalc::matcore::{expm, yosida};
use chronocalc::pathsum::{experimental_evolution_with, feynman_kac, Normalization, PathSumOptions, Regularizer};
use chronocalc::sample::{random_dissipative, random_matrix, random_unit_vector, rng};
use chronocalc::{CMatrix, CVector, ContinuityClass, Family, C64};
use chronocalc_kernels::{compose, symbol_to_kernel, Grid1D, KernelFunction, KernelTable};
use std::collections::BTreeMap;

pub type Params = BTreeMap<String, f64>;

/// What one sweep point produces.
#[derive(Debug, Default)]
pub struct OpOutput {
    pub metrics: Vec<(String, f64)>,
    pub table: Option<KernelTable>,
}

impl OpOutput {
    fn metrics(m: &[(&str, f64)]) -> Self {
        Self { metrics: m.iter().map(|(k, v)| (k.to_string(), *v)).collect(), table: None }
    }
}

pub struct OpSpec {
    pub name: &'static str,
    pub summary: &'static str,
    /// Known parameters with defaults.
    pub params: &'static [(&'static str, f64)],
    pub takes_family: bool,
    pub writes_table: bool,
    pub eval: fn(&Params, u64, Option<&Family>) -> Result<OpOutput>,
}

impl OpSpec {
    pub fn param_names(&self) -> String {
        self.params.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
    }
}

pub const FAMILIES: &[&str] = &["smooth_dissipative", "commuting_diagonal", "piecewise_constant"];

pub static REGISTRY: &[OpSpec] = &[
    OpSpec {
        name: "trotter.error",
        summary: "‖(e^{tA/n}e^{tB/n})ⁿ − e^{t(A+B)}‖ for random dissipative A, B",
        params: &[("n", 16.0), ("dim", 3.0), ("t", 1.0)],
        takes_family: false,
        writes_table: false,
        eval: trotter_error,
    },
    OpSpec {
        name: "gtk.error",
        summary: "generalized Trotter–Kato product against a Richardson propagator",
        params: &[("n", 16.0), ("dim", 3.0), ("t", 1.0), ("reference_steps", 4096.0)],
        takes_family: false,
        writes_table: false,
        eval: gtk_error,
    },
    OpSpec {
        name: "yosida.error",
        summary: "‖A_λx − Ax‖ for a random dissipative A",
        params: &[("lambda", 100.0), ("dim", 4.0)],
        takes_family: false,
        writes_table: false,
        eval: yosida_error,
    },
    OpSpec {
        name: "expansional.error",
        summary: "‖e^{A+εB} − expansional of order k‖",
        params: &[("eps", 0.01), ("k", 1.0), ("dim", 4.0), ("nodes", 32.0)],
        takes_family: false,
        writes_table: false,
        eval: expansional_error,
    },
    OpSpec {
        name: "dyson.exactness",
        summary: "Dyson partial sum plus remainder against the propagator of wA",
        params: &[("w", 1.0), ("n", 1.0), ("t", 1.0), ("nodes", 24.0), ("reference_steps", 2048.0)],
        takes_family: true,
        writes_table: false,
        eval: dyson_exactness,
    },
    OpSpec {
        name: "propagate.error",
        summary: "midpoint product integral against a Richardson reference",
        params: &[("n", 64.0), ("t", 1.0), ("reference_steps", 4096.0)],
        takes_family: true,
        writes_table: false,
        eval: propagate_error,
    },
    OpSpec {
        name: "pathsum.lambda",
        summary: "Poisson path sum against exp(Q) (renormalize: 0 reports the deficit, 1 renormalizes)",
        params: &[("lambda", 100.0), ("t", 0.02), ("renormalize", 1.0)],
        takes_family: true,
        writes_table: false,
        eval: pathsum_lambda,
    },
    OpSpec {
        name: "feynman_kac.rho",
        summary: "square-root cutoff Feynman–Kac on a Dirichlet heat model against expm",
        params: &[("rho", 1e-4), ("points", 64.0), ("kappa", 0.01), ("t", 0.1)],
        takes_family: false,
        writes_table: false,
        eval: feynman_kac_rho,
    },
    OpSpec {
        name: "hk.tolerance",
        summary: "gauge integral of a step family against its exact Bochner sum",
        params: &[("tol", 1e-10)],
        takes_family: false,
        writes_table: false,
        eval: hk_tolerance,
    },
    OpSpec {
        name: "mild.error",
        summary: "Picard mild solution of a logistic equation against an RK4 oracle",
        params: &[("n", 1024.0), ("t", 2.0), ("u0", 0.2), ("rate", 1.5)],
        takes_family: false,
        writes_table: false,
        eval: mild_error,
    },
    OpSpec {
        name: "kernels.heat_compose",
        summary: "Chapman–Kolmogorov defect of the heat kernel",
        params: &[("points", 512.0), ("half_width", 12.0), ("kappa", 1.0), ("t", 1.0), ("tau", 0.5)],
        takes_family: false,
        writes_table: false,
        eval: heat_compose,
    },
    OpSpec {
        name: "kernels.mehler_compose",
        summary: "composition defect of the Mehler kernel",
        params: &[("points", 4097.0), ("half_width", 24.0), ("omega", 1.0), ("t", 0.6), ("tau", 0.3)],
        takes_family: false,
        writes_table: false,
        eval: mehler_compose,
    },
    OpSpec {
        name: "kernels.heat_table",
        summary: "heat kernel samples; compares the symbol quadrature with the closed form",
        params: &[("t", 0.5), ("points", 256.0), ("half_width", 8.0), ("kappa", 1.0)],
        takes_family: false,
        writes_table: true,
        eval: heat_table,
    },
];

pub fn find(name: &str) -> Option<&'static OpSpec> {
    REGISTRY.iter().find(|o| o.name == name)
}

fn get(p: &Params, k: &str) -> Result<f64> {
    p.get(k).copied().ok_or_else(|| anyhow!("missing parameter {k}"))
}

/// A parameter that must be a positive integer.
fn count(p: &Params, k: &str) -> Result<usize> {
    let v = get(p, k)?;
    if v < 1.0 || v.fract() != 0.0 || v > 1e9 {
        bail!("parameter {k} must be a positive integer, got {v}");
    }
    Ok(v as usize)
}

pub fn build_family(spec: &FamilySpec, seed: u64) -> Result<Family> {
    match spec {
        FamilySpec::Named { name, params } => {
            let dim = params.get("dim").copied().unwrap_or(3.0);
            if dim < 1.0 || dim.fract() != 0.0 {
                bail!("family dim must be a positive integer");
            }
            let dim = dim as usize;
            let seed = params.get("seed").map(|s| *s as u64).unwrap_or(seed);
            match name.as_str() {
                "smooth_dissipative" => Ok(smooth_dissipative(dim, seed)),
                "commuting_diagonal" => commuting_diagonal(),
                "piecewise_constant" => {
                    let mut r = rng(seed);
                    let pieces = (0..3).map(|_| random_dissipative::<f64>(dim, 0.0, &mut r)).collect();
                    Ok(Family::piecewise_constant(0.0, 1.0, vec![0.3, 0.75], pieces)?)
                }
                other => bail!("unknown family {other}"),
            }
        }
        FamilySpec::Tabulated { times, samples } => {
            let mats = samples.iter().map(CMatrix::from_json).collect::<chronocalc::Result<Vec<_>>>()?;
            Ok(Family::tabulated(times.clone(), mats)?)
        }
    }
}

/// diag(−1 − sin t, −2t²) on [0, 1].
pub fn commuting_diagonal() -> Result<Family> {
    Ok(Family::from_fn(0.0, 1.0, 2, ContinuityClass::Smooth, |t: f64| CMatrix::diag_real(&[-1.0 - t.sin(), -2.0 * t * t]))?)
}

fn family_or(fam: Option<&Family>, seed: u64) -> Family {
    fam.cloned().unwrap_or_else(|| smooth_dissipative(3, seed))
}

fn trotter_error(p: &Params, seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (n, dim, t) = (count(p, "n")?, count(p, "dim")?, get(p, "t")?);
    let mut r = rng(seed);
    let (a, b) = (random_dissipative::<f64>(dim, 0.0, &mut r), random_dissipative::<f64>(dim, 0.0, &mut r));
    let exact = expm(&(&a + &b).scale_real(t))?;
    let prod = trotter(&a, &b, t, n)?;
    Ok(OpOutput::metrics(&[("error", (&prod - &exact).op_norm()), ("norm", prod.op_norm())]))
}

fn gtk_error(p: &Params, seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (n, dim, t) = (count(p, "n")?, count(p, "dim")?, get(p, "t")?);
    let (fa, fb) = (smooth_dissipative(dim, seed), smooth_dissipative(dim, seed.wrapping_add(1)));
    let reference = propagate_richardson(&fa.add(&fb)?, t, count(p, "reference_steps")?)?;
    let g = generalized_trotter_kato(&fa, &fb, t, n, GtkSchedule::Perturbed)?;
    Ok(OpOutput::metrics(&[("error", (&g - &reference).op_norm()), ("norm", g.op_norm())]))
}

fn yosida_error(p: &Params, seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (lambda, dim) = (get(p, "lambda")?, count(p, "dim")?);
    let mut r = rng(seed);
    let a = random_dissipative::<f64>(dim, 0.0, &mut r);
    let x = random_unit_vector::<f64>(dim, &mut r);
    let y = yosida(&a, lambda)?;
    Ok(OpOutput::metrics(&[
        ("error", (&y.mul_vec(&x) - &a.mul_vec(&x)).norm()),
        ("commutator", a.commutator(&y).op_norm()),
    ]))
}

fn expansional_error(p: &Params, seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (eps, k, dim, nodes) = (get(p, "eps")?, count(p, "k")?, count(p, "dim")?, count(p, "nodes")?);
    let mut r = rng(seed);
    let (a, b) = (random_matrix::<f64>(dim, &mut r), random_matrix::<f64>(dim, &mut r));
    let be = b.scale_real(eps);
    let res = expansional_expand(&a, &be, k, nodes)?;
    let exact = expm(&(&a + &be))?;
    Ok(OpOutput::metrics(&[("error", (&exact - &res.value).op_norm()), ("est_error", res.est_error)]))
}

fn dyson_exactness(p: &Params, seed: u64, fam: Option<&Family>) -> Result<OpOutput> {
    let f = family_or(fam, seed);
    let (w, n, t, nodes) = (get(p, "w")?, get(p, "n")?, get(p, "t")?, count(p, "nodes")?);
    if n < 0.0 || n.fract() != 0.0 {
        bail!("parameter n must be a nonnegative integer, got {n}");
    }
    let res = dyson_expand(&f, t, n as usize, w, nodes)?;
    let reference = propagate_richardson(&f.scaled(w), t, count(p, "reference_steps")?)?;
    Ok(OpOutput::metrics(&[("error", (&res.total() - &reference).op_norm()), ("est_error", res.est_error)]))
}

fn propagate_error(p: &Params, seed: u64, fam: Option<&Family>) -> Result<OpOutput> {
    let f = family_or(fam, seed);
    let (n, t) = (count(p, "n")?, get(p, "t")?);
    let reference = propagate_richardson(&f, t, count(p, "reference_steps")?)?;
    Ok(OpOutput::metrics(&[("error", (&propagate(&f, t, n)? - &reference).op_norm())]))
}

fn pathsum_lambda(p: &Params, _seed: u64, fam: Option<&Family>) -> Result<OpOutput> {
    let f = match fam {
        Some(f) => f.clone(),
        None => commuting_diagonal()?,
    };
    let (lambda, t) = (get(p, "lambda")?, get(p, "t")?);
    let normalization = if get(p, "renormalize")? != 0.0 { Normalization::Renormalize } else { Normalization::Report };
    let opts = PathSumOptions { normalization, ..Default::default() };
    let res = experimental_evolution_with(&f, t, lambda, &opts)?;
    let exact = expm(&q_integral(&f, t, 1e-13)?)?;
    Ok(OpOutput::metrics(&[
        ("terms_used", res.terms_used as f64),
        ("deficit", res.poisson_deficit),
        ("error", (&res.value - &exact).op_norm()),
    ]))
}

fn feynman_kac_rho(p: &Params, _seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (rho, n, kappa, t) = (get(p, "rho")?, count(p, "points")?, get(p, "kappa")?, get(p, "t")?);
    let lap = dirichlet_laplacian(n, 1.0).scale_real(kappa);
    let v = CMatrix::diag_real(
        &(1..=n).map(|i| -(1.0 + (std::f64::consts::TAU * i as f64 / (n + 1) as f64).sin())).collect::<Vec<_>>(),
    );
    let exact = expm(&(&lap + &v).scale_real(t))?;
    let u = feynman_kac(
        &Family::constant(0.0, 1.0, lap)?,
        &Family::constant(0.0, 1.0, v)?,
        C64::new(1.0, 0.0),
        t,
        Regularizer::SqrtCutoff(rho),
        1,
    )?;
    Ok(OpOutput::metrics(&[("rel_error", (&u - &exact).op_norm() / exact.op_norm())]))
}

fn hk_tolerance(p: &Params, seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let tol = get(p, "tol")?;
    let mut r = rng(seed);
    let pieces: Vec<CMatrix> = (0..3).map(|_| random_matrix(2, &mut r)).collect();
    let f = Family::piecewise_constant(0.0, 1.0, vec![0.3, 0.75], pieces.clone())?;
    let mut exact = pieces[0].scale_real(0.3);
    exact.axpy_real(0.45, &pieces[1]);
    exact.axpy_real(0.25, &pieces[2]);
    let res = hk_integrate(&f, 0.0, 1.0, tol)?;
    Ok(OpOutput::metrics(&[
        ("error", (&res.value - &exact).op_norm()),
        ("est_error", res.est_error),
        ("partitions_used", res.partitions_used as f64),
    ]))
}

fn mild_error(p: &Params, _seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (n, t, u0, rate) = (count(p, "n")?, get(p, "t")?, get(p, "u0")?, get(p, "rate")?);
    let a = |s: f64| -0.5 - 0.3 * s.sin();
    let fam = Family::from_fn(0.0, t, 1, ContinuityClass::Smooth, move |s| CMatrix::diag_real(&[a(s)]))?;
    let sol = semilinear_mild(
        &fam,
        move |_, u: &CVector| CVector::from_vec(vec![u[0] * (1.0 - u[0]) * rate]),
        &CVector::from_real(&[u0]),
        t,
        n,
        100,
        1e-13,
    )?;
    let oracle = rk4_richardson(|s, y| a(s) * y + rate * y * (1.0 - y), 0.0, t, u0, 4096);
    Ok(OpOutput::metrics(&[("error", (sol.value[0].re - oracle).abs()), ("picard_sweeps", sol.residuals.len() as f64)]))
}

fn heat_compose(p: &Params, _seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let k = KernelFunction::heat(get(p, "kappa")?)?;
    let g = Grid1D::new(get(p, "half_width")?, count(p, "points")?)?;
    let r = compose(&k, get(p, "t")?, get(p, "tau")?, 0.0, &g)?;
    Ok(OpOutput::metrics(&[("defect", r.defect)]))
}

fn mehler_compose(p: &Params, _seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let k = KernelFunction::mehler(1.0, get(p, "omega")?, 1.0)?;
    let g = Grid1D::new(get(p, "half_width")?, count(p, "points")?)?;
    let r = compose(&k, get(p, "t")?, get(p, "tau")?, 0.0, &g)?;
    let mut out = OpOutput::metrics(&[("defect", r.defect), ("raw_defect", r.raw_defect)]);
    if let Some(b) = r.window_bias {
        out.metrics.push(("window_bias".into(), b));
    }
    Ok(out)
}

fn heat_table(p: &Params, _seed: u64, _: Option<&Family>) -> Result<OpOutput> {
    let (t, kappa) = (get(p, "t")?, get(p, "kappa")?);
    let g = Grid1D::new(get(p, "half_width")?, count(p, "points")?)?;
    let exact = KernelFunction::heat(kappa)?.sample(t, 0.0, &g)?;
    let sk = symbol_to_kernel(|_, eta| C64::new(0.0, -kappa * eta * eta), t, 1.0, &g)?;
    Ok(OpOutput {
        metrics: vec![("symbol_max_diff".into(), sk.table.max_abs_diff(&exact))],
        table: Some(exact),
    })
}
