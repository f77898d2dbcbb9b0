//! The `run`, `suite` and `plot` subcommands as library calls.

use crate::acceptance::{run_suite, SuiteOptions, SuiteReport};
use crate::config::{ExperimentConfig, Fit, PlotKind};
use crate::ops::{build_family, OpOutput};
use crate::rows::{write_rows, ResultRow};
use crate::svg;
use crate::util::loglog_slope;
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const THREADS_VAR: &str = "CHRONOCALC_THREADS";

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const TOLERANCE: i32 = 2;
}

/// Worker count from `CHRONOCALC_THREADS`, default 1.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => bail!("{THREADS_VAR}: expected a positive integer, got `{v}`"),
        },
    }
}

pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()?).build()?;
    Ok(pool.install(f))
}

#[derive(Debug)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub csv: String,
    /// Descriptions of the configured checks that failed.
    pub failures: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            exit::OK
        } else {
            exit::TOLERANCE
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::parse(&text).with_context(|| format!("{}", path.display()))
}

/// Executes a config's sweep and writes its outputs. Sweep points may run in parallel;
/// rows come out in sweep order.
pub fn run(path: &Path, timings: bool) -> Result<RunOutcome> {
    let cfg = load_config(path)?;
    let spec = cfg.op_spec()?;
    let family = cfg.family.as_ref().map(|f| build_family(f, cfg.seed)).transpose().context("family")?;
    let points: Vec<(f64, Result<OpOutput>, u128)> = with_pool(|| {
        cfg.sweep
            .values
            .par_iter()
            .map(|&v| {
                let start = Instant::now();
                let out = cfg.params_at(v).and_then(|p| (spec.eval)(&p, cfg.seed, family.as_ref()));
                (v, out, start.elapsed().as_millis())
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut tables = Vec::new();
    for (v, out, ms) in points {
        let out = out.with_context(|| format!("{} at {} = {v}", cfg.op, cfg.sweep.param))?;
        for (metric, value) in out.metrics {
            if !value.is_finite() {
                bail!("{} at {} = {v}: metric {metric} is not finite ({value})", cfg.op, cfg.sweep.param);
            }
            rows.push(ResultRow {
                experiment: cfg.name.clone(),
                sweep_value: Some(v),
                metric,
                value,
                runtime_ms: timings.then_some(ms),
            });
        }
        tables.extend(out.table);
    }
    if cfg.fit == Some(Fit::Loglog) {
        rows.extend(slope_rows(&cfg.name, &rows));
    }

    let failures = evaluate_checks(&cfg, &rows);
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows)?;
    let csv = String::from_utf8(buf)?;
    if let Some(p) = &cfg.output.csv {
        write_file(p, csv.as_bytes())?;
    }
    if let Some(p) = &cfg.output.table {
        let mut buf = Vec::new();
        for (i, t) in tables.iter().enumerate() {
            let mut one = Vec::new();
            t.write_csv(&mut one)?;
            // one header for the whole file
            let skip = if i == 0 { 0 } else { one.iter().position(|&b| b == b'\n').map_or(0, |k| k + 1) };
            buf.extend_from_slice(&one[skip..]);
        }
        write_file(p, &buf)?;
    }
    if let Some(p) = &cfg.output.svg {
        let kind = cfg.output.plot.unwrap_or(if cfg.fit == Some(Fit::Loglog) { PlotKind::Loglog } else { PlotKind::Line });
        write_file(p, svg::plot(&csv, kind, &cfg.name)?.as_bytes())?;
    }
    Ok(RunOutcome { config: cfg, rows, csv, failures })
}

/// `slope:<metric>` rows from a least-squares fit of ln(value) on ln(sweep value).
fn slope_rows(name: &str, rows: &[ResultRow]) -> Vec<ResultRow> {
    let mut metrics: Vec<&str> = Vec::new();
    for r in rows {
        if !metrics.contains(&r.metric.as_str()) {
            metrics.push(&r.metric);
        }
    }
    metrics
        .into_iter()
        .filter_map(|m| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.metric == m && r.value > 0.0)
                .filter_map(|r| r.sweep_value.map(|x| (x, r.value)))
                .unzip();
            let distinct = xs.iter().any(|&x| x != xs[0]);
            (xs.len() >= 2 && distinct).then(|| ResultRow {
                experiment: name.to_string(),
                sweep_value: None,
                metric: format!("slope:{m}"),
                value: loglog_slope(&xs, &ys),
                runtime_ms: None,
            })
        })
        .collect()
}

fn evaluate_checks(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Vec<String> {
    let mut failures = Vec::new();
    for (i, c) in cfg.checks.iter().enumerate() {
        let hits: Vec<&ResultRow> = rows.iter().filter(|r| r.metric == c.metric).collect();
        if hits.is_empty() {
            failures.push(format!("checks[{i}]: no rows for metric {}", c.metric));
        }
        for r in hits.into_iter().filter(|r| !c.holds(r.value)) {
            let at = r.sweep_value.map(|v| format!(" at {} = {v}", cfg.sweep.param)).unwrap_or_default();
            failures.push(format!("checks[{i}]: {} = {:e}{at} violates the bound", c.metric, r.value));
        }
    }
    failures
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub struct SuiteOutputs<'a> {
    pub csv: Option<&'a Path>,
    pub json: Option<&'a Path>,
}

/// Runs a suite and writes the optional CSV and JSON summaries.
pub fn suite(name: &str, opts: &SuiteOptions, out: &SuiteOutputs) -> Result<SuiteReport> {
    let report = with_pool(|| run_suite(name, opts))??;
    if let Some(p) = out.csv {
        write_file(p, report.csv(opts.timings).as_bytes())?;
    }
    if let Some(p) = out.json {
        write_file(p, summary_json(&report)?.as_bytes())?;
    }
    Ok(report)
}

pub fn summary_json(report: &SuiteReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// Plots a CSV file; the SVG goes next to it unless `out` is given.
pub fn plot(csv_path: &Path, kind: PlotKind, out: Option<&Path>) -> Result<PathBuf> {
    let text = std::fs::read_to_string(csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
    let title = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let svg = svg::plot(&text, kind, title).with_context(|| format!("{}", csv_path.display()))?;
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| csv_path.with_extension("svg"));
    if target == csv_path {
        return Err(anyhow!("refusing to overwrite the input {}", csv_path.display()));
    }
    write_file(&target, svg.as_bytes())?;
    Ok(target)
}
