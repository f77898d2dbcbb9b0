//! Result rows and the CSV dialect shared by `run` and `suite`.

use anyhow::{bail, Context, Result};
use std::io::Write;

pub const HEADER: &str = "experiment,sweep_value,metric,value,runtime_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep_value: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub runtime_ms: Option<u128>,
}

/// Header plus one LF-terminated line per row. Floats use the shortest round-trip form.
pub fn write_rows<W: Write>(mut out: W, rows: &[ResultRow]) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        let sweep = r.sweep_value.map(|v| v.to_string()).unwrap_or_default();
        let ms = r.runtime_ms.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{},{sweep},{},{},{ms}", r.experiment, r.metric, r.value)?;
    }
    Ok(())
}

pub fn read_rows(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == HEADER => {}
        Some(h) => bail!("line 1: expected header `{HEADER}`, found `{h}`"),
        None => bail!("empty CSV: header row missing"),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            bail!("line {lineno}: expected 5 columns, found {}", cols.len());
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().with_context(|| format!("line {lineno}: {what} `{s}` is not a number"))
        };
        rows.push(ResultRow {
            experiment: cols[0].to_string(),
            sweep_value: if cols[1].is_empty() { None } else { Some(num(cols[1], "sweep_value")?) },
            metric: cols[2].to_string(),
            value: num(cols[3], "value")?,
            runtime_ms: if cols[4].is_empty() {
                None
            } else {
                Some(cols[4].parse().with_context(|| format!("line {lineno}: runtime_ms `{}`", cols[4]))?)
            },
        });
    }
    if rows.is_empty() {
        bail!("CSV has a header but no rows");
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            ResultRow { experiment: "e".into(), sweep_value: Some(0.1), metric: "err".into(), value: 1e-17, runtime_ms: None },
            ResultRow { experiment: "e".into(), sweep_value: None, metric: "slope:err".into(), value: -1.0, runtime_ms: Some(3) },
        ];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        assert_eq!(read_rows(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
    }

    #[test]
    fn malformed() {
        assert!(read_rows("").is_err());
        assert!(read_rows(HEADER).is_err());
        assert!(read_rows(&format!("{HEADER}\na,b,c\n")).is_err());
    }
}
