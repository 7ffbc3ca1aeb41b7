use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bi-waves"));
    cmd.env_remove("BI_WAVES_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn dispersion_csv_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disp.csv");
    let status = run(&[
        "dispersion",
        "--N",
        "3",
        "--eps-max",
        "0.5",
        "--steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["eps", "omega2_over_k2"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    let e2: f64 = 0.25;
    let printed = 1.0 - e2 / 2.0 + e2 * e2 / 4.0 - 125.0 * e2.powi(3) / 1024.0;
    assert_eq!(rows[2][0].parse::<f64>().unwrap(), 0.5);
    assert!((rows[2][1].parse::<f64>().unwrap() - printed).abs() < 1e-15);

    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("disp.meta.json")).unwrap())
            .unwrap();
    assert_eq!(
        meta["xi"],
        serde_json::json!([[1, 1], [-1, 2], [1, 4], [-125, 1024]])
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "fig1", "--N", "1,2", "--eps", "0.05,0.1", "--nx", "12", "--nt", "12",
    ];
    let a = run(&args);
    let b = bin()
        .args(args)
        .env("BI_WAVES_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fig1_orders_and_slopes() {
    let out = run(&[
        "fig1",
        "--N",
        "2,1",
        "--eps",
        "0.02,0.04,0.06,0.1,0.2",
        "--nx",
        "16",
        "--nt",
        "16",
        "--format",
        "json",
    ]);
    let v = stdout_json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["F"].as_f64().unwrap() > 0.0));
    assert_eq!(v["summary"]["monotone_in_N"], true);
    for s in v["summary"]["slopes"].as_array().unwrap() {
        let expected = s["expected"].as_f64().unwrap();
        assert!((s["slope"].as_f64().unwrap() - expected).abs() < 0.3, "{s}");
    }
}

#[test]
fn compare_reports_agreement() {
    let v = stdout_json(&run(&[
        "compare", "--N", "3", "--A", "0.1", "--k", "1", "--b", "1",
    ]));
    let c = v["gap_over_eps_power"].as_f64().unwrap();
    assert!(c > 0.0 && c < 10.0, "{v}");
    assert!(v["max_field_difference"].as_f64().unwrap() < 1e-8);

    let v = stdout_json(&run(&["compare", "--A", "0", "--k", "2"]));
    assert!((v["two_K"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-14);
    assert!((v["lindstedt_period"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn lindstedt_table_is_exact() {
    let v = stdout_json(&run(&["lindstedt-table", "--N", "3"]));
    assert_eq!(v["N"], 3);
    assert_eq!(
        v["xi"],
        serde_json::json!([[1, 1], [-1, 2], [1, 4], [-125, 1024]])
    );
    let first = v["alpha"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["M"] == 1 && a["nu"] == 0 && a["mu"] == 1)
        .unwrap();
    assert_eq!(
        (first["num"].as_i64(), first["den"].as_i64()),
        (Some(1), Some(32))
    );

    let series = stdout_json(&run(&["lindstedt-table", "--N", "1", "--dump-series"]));
    let terms = series.as_array().unwrap();
    assert!(terms
        .iter()
        .all(|t| t.get("epsPower").is_some() && t.get("parity").is_some()));
}

#[test]
fn config_keys_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"lindstedt": {"N": 1, "eps": [0.0, 0.2]}, "output": {"format": "json"}}"#,
    );
    let v = stdout_json(&run(&["dispersion", "--config", &cfg]));
    assert_eq!(v["N"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let v = stdout_json(&run(&["dispersion", "--config", &cfg, "--N", "2"]));
    assert_eq!(v["xi"].as_array().unwrap().len(), 3);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n \"example\": {\"A\": 0.1, \"typo\": 3}\n}");
    let out = run(&["example", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "ConfigError");
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains("typo") && msg.contains("line 2"), "{msg}");

    let out = run(&["dispersion", "--eps-max", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["fig1", "--N", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["lindstedt-table"])
        .env("BI_WAVES_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"parametric": {"displacement": [[1, 0.1]], "velocity": [[1, 2.0]], "b": 1.0}}"#,
    );
    let out = run(&["parametric", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "HyperbolicityViolation");
}

#[test]
fn parametric_and_example_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let cfg = write_config(
        dir.path(),
        r#"{"parametric": {"L": 3.141592653589793, "displacement": [[1, 0.2], [3, 0.01]],
            "grid": {"x0": 0.5, "x1": 2.5, "nx": 4, "t0": 0.0, "t1": 3.0, "nt": 4}}}"#,
    );
    assert!(run(&[
        "parametric",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["x", "t", "u", "ux", "ut", "margin", "residual"]);
    assert_eq!(rows.len(), 16);
    assert!(rows
        .iter()
        .all(|r| r[6].parse::<f64>().unwrap().abs() < 1e-5));
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.meta.json")).unwrap())
            .unwrap();
    assert!(meta["symmetries"]["t_periodicity"].as_f64().unwrap() < 1e-9);

    let ex = run(&["example", "--A", "0.1", "--nx", "3", "--nt", "2"]);
    assert!(ex.status.success());
    let (header, rows) = csv_rows(std::str::from_utf8(&ex.stdout).unwrap());
    assert_eq!(header, ["x", "t", "u"]);
    assert_eq!(rows.len(), 6);
}

#[test]
fn background_reports_velocity_and_period() {
    let v = stdout_json(&run(&[
        "background",
        "--B",
        "0.5",
        "--A",
        "0.05",
        "--k",
        "1",
        "--b",
        "1",
    ]));
    let speed = v["v"].as_f64().unwrap();
    assert!((speed - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
    let ratio = v["KoverL"].as_f64().unwrap();
    assert!(ratio > 1.25f64.sqrt() && ratio < 1.25f64.sqrt() * 1.01);
    assert_eq!(
        v["dispersion"]["first_order"]["printed_coefficient"].as_f64(),
        Some(0.25 + 100.0)
    );

    let out = run(&["background", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}
