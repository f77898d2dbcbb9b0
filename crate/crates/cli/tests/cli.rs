use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chronocalc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("CHRONOCALC_THREADS").output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn trotter_config(dir: &Path, csv: &Path) -> String {
    format!(
        r#"{{
  "name": "trotter_sweep",
  "op": "trotter.error",
  "params": {{"dim": 3}},
  "sweep": {{"param": "n", "values": [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]}},
  "seed": 7,
  "fit": "loglog",
  "checks": [{{"metric": "slope:error", "target": -1.0, "tol": 0.1}}],
  "output": {{"csv": "{}", "svg": "{}"}}
}}"#,
        csv.display(),
        dir.join("trotter.svg").display()
    )
}

#[test]
fn trotter_sweep_appends_slope_row_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trotter.csv");
    let cfg = write_config(dir.path(), "trotter.json", &trotter_config(dir.path(), &csv));
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read(&csv).unwrap();
    let svg = fs::read(dir.path().join("trotter.svg")).unwrap();

    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("experiment,sweep_value,metric,value,runtime_ms\n"));
    let slope_line = text.lines().find(|l| l.contains(",slope:error,")).expect("slope row");
    let slope: f64 = slope_line.split(',').nth(3).unwrap().parse().unwrap();
    // independent fit over the emitted error rows
    let pts: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(2) == Some("error"))
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].parse::<f64>().unwrap().ln(), c[3].parse::<f64>().unwrap().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let fit = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((fit - slope).abs() < 1e-12);
    assert!((slope + 1.0).abs() <= 0.1);
    assert!(String::from_utf8(svg.clone()).unwrap().contains("slope -1.0"));

    let again = run(&["run", cfg.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(fs::read(&csv).unwrap(), first);
    assert_eq!(fs::read(dir.path().join("trotter.svg")).unwrap(), svg);

    // more threads, same bytes
    let threaded = bin().args(["run", cfg.to_str().unwrap()]).env("CHRONOCALC_THREADS", "4").output().unwrap();
    assert!(threaded.status.success());
    assert_eq!(fs::read(&csv).unwrap(), first);
}

#[test]
fn empty_sweep_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "empty.json",
        r#"{"name": "e", "op": "trotter.error", "sweep": {"param": "n", "values": []}}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep values nonempty"));
}

#[test]
fn schema_violations_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        "{\n  \"name\": \"e\",\n  \"op\": \"trotter.error\",\n  \"colour\": 1,\n  \"sweep\": {\"param\": \"n\", \"values\": [2]}\n}",
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("colour") && err.contains("line 4"), "{err}");
}

#[test]
fn failed_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "strict.json",
        r#"{"name": "y", "op": "yosida.error", "sweep": {"param": "lambda", "values": [10, 100]},
            "checks": [{"metric": "error", "max": 0}]}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1 + 2 * 2);
}

#[test]
fn unknown_suite_exits_one() {
    let out = run(&["suite", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn zero_tolerance_suite_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("summary.json");
    let out = run(&["suite", "gauge", "--tolerance", "0", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(json).unwrap()).unwrap();
    assert_eq!(summary["passed"], false);
    assert_eq!(summary["suite"], "gauge");
}

#[test]
fn gauge_suite_passes_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gauge.csv");
    let out = run(&["suite", "gauge", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["criteria"].as_array().unwrap().len(), 2);
    // timing checks stay out of the default CSV
    assert!(!fs::read_to_string(csv).unwrap().contains("runtime_s"));
}

#[test]
fn plot_errors_and_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = run(&["plot", empty.to_str().unwrap(), "--kind", "loglog"]);
    assert_eq!(out.status.code(), Some(1));

    let header_only = dir.path().join("header.csv");
    fs::write(&header_only, "experiment,sweep_value,metric,value,runtime_ms\n").unwrap();
    assert_eq!(run(&["plot", header_only.to_str().unwrap(), "--kind", "line"]).status.code(), Some(1));

    let cfg = write_config(
        dir.path(),
        "heat.json",
        &format!(
            r#"{{"name": "heat", "op": "kernels.heat_table", "params": {{"points": 64}},
                "sweep": {{"param": "t", "values": [0.5, 1.0]}},
                "output": {{"table": "{}"}}}}"#,
            dir.path().join("heat_table.csv").display()
        ),
    );
    assert!(run(&["run", cfg.to_str().unwrap()]).status.success());
    let table = dir.path().join("heat_table.csv");
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 64 * 64);
    let svg = dir.path().join("heat.svg");
    let out = run(&["plot", table.to_str().unwrap(), "--kind", "heatmap", "-o", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(svg).unwrap().contains("t = 0.5"));
    // a kernel table is not a result CSV
    assert_eq!(run(&["plot", table.to_str().unwrap(), "--kind", "line"]).status.code(), Some(1));
}

#[test]
fn shipped_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let mut n = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") || path.ends_with("schema.json") {
            continue;
        }
        let out = bin().arg("run").arg(&path).current_dir(dir.path()).env_remove("CHRONOCALC_THREADS").output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn schema_lists_every_op() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../configs/schema.json")).unwrap();
    let listed: Vec<&str> = schema["properties"]["op"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let registry: Vec<&str> = chronocalc_cli::ops::REGISTRY.iter().map(|o| o.name).collect();
    assert_eq!(listed, registry);
}
