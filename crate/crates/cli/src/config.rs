//! Experiment configuration: JSON, one file per run.

use crate::ops::{self, OpSpec};
use anyhow::{anyhow, bail, Result};
use chronocalc::MatrixJson;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub op: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub sweep: Sweep,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub fit: Option<Fit>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

/// Generator family for ops that take one: a registry entry or tabulated samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Named {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// Piecewise-linear interpolation between samples.
    Tabulated { times: Vec<f64>, samples: Vec<MatrixJson> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fit {
    /// Appends a `slope:<metric>` row per metric from ln(value) against ln(sweep value).
    Loglog,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub metric: String,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Loglog,
    Line,
    Heatmap,
}

impl std::str::FromStr for PlotKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loglog" => Ok(Self::Loglog),
            "line" => Ok(Self::Line),
            "heatmap" => Ok(Self::Heatmap),
            _ => bail!("unknown plot kind `{s}` (loglog, line, heatmap)"),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Result rows; printed to stdout when absent.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub plot: Option<PlotKind>,
    /// Kernel sample table (x, y, t, re, im) for table-producing ops.
    #[serde(default)]
    pub table: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses and validates; diagnostics name the line/column or the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn op_spec(&self) -> Result<&'static OpSpec> {
        ops::find(&self.op).ok_or_else(|| {
            let known: Vec<&str> = ops::REGISTRY.iter().map(|o| o.name).collect();
            anyhow!("op: unknown op `{}` (known: {})", self.op, known.join(", "))
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            bail!("name: `{}` must be a nonempty identifier of [A-Za-z0-9_.-]", self.name);
        }
        let spec = self.op_spec()?;
        for (k, v) in &self.params {
            if !spec.params.iter().any(|(p, _)| p == k) {
                bail!("params.{k}: not a parameter of {} (known: {})", spec.name, spec.param_names());
            }
            if !v.is_finite() {
                bail!("params.{k}: value must be finite");
            }
        }
        if !spec.params.iter().any(|(p, _)| *p == self.sweep.param) {
            bail!("sweep.param: `{}` is not a parameter of {} (known: {})", self.sweep.param, spec.name, spec.param_names());
        }
        if self.sweep.values.is_empty() {
            bail!("sweep.values: sweep values nonempty");
        }
        if let Some(i) = self.sweep.values.iter().position(|v| !v.is_finite()) {
            bail!("sweep.values[{i}]: sweep values must be finite");
        }
        if self.family.is_some() && !spec.takes_family {
            bail!("family: op {} does not take a generator family", spec.name);
        }
        if let Some(FamilySpec::Named { name, .. }) = &self.family {
            if !ops::FAMILIES.contains(&name.as_str()) {
                bail!("family.named.name: unknown family `{name}` (known: {})", ops::FAMILIES.join(", "));
            }
        }
        if self.fit == Some(Fit::Loglog) && self.sweep.values.iter().any(|&v| v <= 0.0) {
            bail!("fit: loglog needs positive sweep values");
        }
        for (i, c) in self.checks.iter().enumerate() {
            let n = [c.max.is_some(), c.min.is_some(), c.target.is_some()].iter().filter(|&&b| b).count();
            if n == 0 {
                bail!("checks[{i}]: give max, min or target");
            }
            if c.target.is_some() != c.tol.is_some() {
                bail!("checks[{i}]: target and tol go together");
            }
        }
        if self.output.table.is_some() && !spec.writes_table {
            bail!("output.table: op {} does not produce a kernel table", spec.name);
        }
        if self.output.svg.is_some() && self.output.plot == Some(PlotKind::Heatmap) {
            bail!("output.plot: heatmaps are drawn from kernel tables with the plot subcommand");
        }
        Ok(())
    }

    /// Op parameters for one sweep point: defaults, then config values, then the sweep value.
    pub fn params_at(&self, sweep_value: f64) -> Result<BTreeMap<String, f64>> {
        let spec = self.op_spec()?;
        let mut p: BTreeMap<String, f64> = spec.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        p.extend(self.params.iter().map(|(k, v)| (k.clone(), *v)));
        p.insert(self.sweep.param.clone(), sweep_value);
        Ok(p)
    }
}

impl CheckSpec {
    pub fn holds(&self, value: f64) -> bool {
        if value.is_nan() {
            return false;
        }
        self.max.map_or(true, |m| value <= m)
            && self.min.map_or(true, |m| value >= m)
            && self.target.map_or(true, |t| (value - t).abs() <= self.tol.unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"name": "t", "op": "trotter.error", "sweep": {"param": "n", "values": [2, 4]}}"#;

    #[test]
    fn parses_minimal() {
        let c = ExperimentConfig::parse(BASE).unwrap();
        assert_eq!(c.params_at(4.0).unwrap()["n"], 4.0);
    }

    #[test]
    fn diagnostics() {
        let err = |s: &str| ExperimentConfig::parse(s).unwrap_err().to_string();
        assert!(err(&BASE.replace("[2, 4]", "[]")).contains("sweep values nonempty"));
        assert!(err(&BASE.replace("trotter.error", "nope")).contains("unknown op"));
        assert!(err(&BASE.replace("\"n\"", "\"q\"")).contains("sweep.param"));
        assert!(err(&BASE.replace("\"seed\"", "x").replace("}}", "}, \"bogus\": 1}")).contains("line 1"));
        assert!(err("{\n\"name\": 3}").contains("line 2"));
    }
}
