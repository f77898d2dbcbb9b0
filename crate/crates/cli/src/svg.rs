//! Hand-written SVG plots. Output depends only on the input bytes.

use crate::config::PlotKind;
use crate::rows::{read_rows, ResultRow};
use crate::util::linear_slope;
use anyhow::{bail, Context, Result};
use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
const HEATMAP_MAX: usize = 128;

/// Renders a CSV file's contents as the requested kind of plot.
pub fn plot(csv: &str, kind: PlotKind, title: &str) -> Result<String> {
    match kind {
        PlotKind::Loglog | PlotKind::Line => series_plot(&read_rows(csv)?, kind == PlotKind::Loglog, title),
        PlotKind::Heatmap => heatmap(csv, title),
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn collect_series(rows: &[ResultRow], log: bool) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let Some(x) = r.sweep_value else { continue };
        if !r.value.is_finite() || (log && (x <= 0.0 || r.value <= 0.0)) {
            continue;
        }
        let label = format!("{}:{}", r.experiment, r.metric);
        let pt = if log { (x.log10(), r.value.log10()) } else { (x, r.value) };
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(pt),
            None => out.push(Series { label, points: vec![pt] }),
        }
    }
    out
}

fn series_plot(rows: &[ResultRow], log: bool, title: &str) -> Result<String> {
    let series = collect_series(rows, log);
    if series.is_empty() {
        bail!("no plottable rows: need sweep values{}", if log { " and positive values" } else { "" });
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = header(title);
    axes(&mut s);
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let (lx, ly) = if log { (format!("1e{fx:.1}"), format!("1e{fy:.1}")) } else { (tick(fx), tick(fy)) };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{lx}</text>"#, px(fx), H - BOTTOM + 18.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{ly}</text>"#, LEFT - 6.0, py(fy) + 4.0);
    }
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        for &(x, y) in &ser.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let mut label = escape(&ser.label);
        if log && ser.points.len() >= 2 {
            let (xs, ys): (Vec<f64>, Vec<f64>) = ser.points.iter().copied().unzip();
            let _ = write!(label, " slope {:.2}", linear_slope(&xs, &ys));
        }
        let ly = TOP + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, W - RIGHT + 12.0, ly);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{label}</text>"#, W - RIGHT + 26.0, ly + 9.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn heatmap(csv: &str, title: &str) -> Result<String> {
    let mut lines = csv.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == "x,y,t,re,im" => {}
        Some(h) => bail!("line 1: heatmap needs a kernel table header `x,y,t,re,im`, found `{h}`"),
        None => bail!("empty CSV: header row missing"),
    }
    let mut cells: Vec<[f64; 5]> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}: not numeric", i + 2))?;
        if v.len() != 5 {
            bail!("line {}: expected 5 columns, found {}", i + 2, v.len());
        }
        cells.push([v[0], v[1], v[2], v[3], v[4]]);
    }
    if cells.is_empty() {
        bail!("kernel table has no rows");
    }
    let t = cells[0][2];
    let block: Vec<&[f64; 5]> = cells.iter().filter(|c| c[2] == t).collect();
    let n = (block.len() as f64).sqrt().round() as usize;
    if n * n != block.len() {
        bail!("kernel table block at t = {t} is not square ({} rows)", block.len());
    }
    let stride = n.div_ceil(HEATMAP_MAX);
    let m = n.div_ceil(stride);
    let mag = |i: usize, j: usize| {
        let c = block[i * n + j];
        c[3].hypot(c[4])
    };
    let mut vmax: f64 = 0.0;
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            vmax = vmax.max(mag(i, j));
        }
    }
    let size = (H - TOP - BOTTOM).min(W - LEFT - RIGHT);
    let cell = size / m as f64;
    let mut s = header(&format!("{title} |K| at t = {t}"));
    for (a, i) in (0..n).step_by(stride).enumerate() {
        for (b, j) in (0..n).step_by(stride).enumerate() {
            let v = if vmax > 0.0 { mag(i, j) / vmax } else { 0.0 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                LEFT + b as f64 * cell,
                TOP + a as f64 * cell,
                cell + 0.05,
                cell + 0.05,
                color(v)
            );
        }
    }
    let (x0, x1) = (block[0][1], block[n - 1][1]);
    let _ = writeln!(s, r#"<text x="{LEFT:.2}" y="{:.2}" font-size="11">y: {} … {}</text>"#, TOP + size + 18.0, tick(x0), tick(x1));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">max |K| = {vmax:.4e}</text>"#, LEFT + size + 12.0, TOP + 12.0);
    s.push_str("</svg>\n");
    Ok(s)
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    s
}

fn axes(s: &mut String) {
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let d = 0.05 * (hi - lo);
        (lo - d, hi + d)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Dark blue through teal to yellow.
fn color(v: f64) -> String {
    const STOPS: [(f64, f64, f64); 4] = [(68.0, 1.0, 84.0), (49.0, 104.0, 142.0), (53.0, 183.0, 121.0), (253.0, 231.0, 37.0)];
    let x = v.clamp(0.0, 1.0) * 3.0;
    let k = (x.floor() as usize).min(2);
    let f = x - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_annotates_slope() {
        let csv = "experiment,sweep_value,metric,value,runtime_ms\ne,1,err,1,\ne,10,err,0.1,\ne,100,err,0.01,\n";
        let svg = plot(csv, PlotKind::Loglog, "t").unwrap();
        assert!(svg.contains("slope -1.00"), "{svg}");
        assert_eq!(svg, plot(csv, PlotKind::Loglog, "t").unwrap());
    }

    #[test]
    fn heatmap_needs_square_block() {
        let csv = "x,y,t,re,im\n0,0,1,1,0\n0,1,1,0.5,0\n1,0,1,0.5,0\n1,1,1,1,0\n";
        assert!(plot(csv, PlotKind::Heatmap, "k").unwrap().contains("<rect"));
        assert!(plot("x,y,t,re,im\n0,0,1,1,0\n0,1,1,1,0\n", PlotKind::Heatmap, "k").is_err());
        assert!(plot("", PlotKind::Heatmap, "k").is_err());
    }
}
