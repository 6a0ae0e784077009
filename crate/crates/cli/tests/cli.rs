use std::path::{Path, PathBuf};
use std::process::Command;

use finsler_cli::config::{validate, RunConfig};
use finsler_cli::info::{metric_info, parse_spec};
use finsler_cli::output::{csv_string, CSV_HEADER};
use finsler_cli::{load, run, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finsler-hardy"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/hardy_core.json")
}

fn base() -> Value {
    json!({
        "metric": {"kind": "euclidean", "n": 3},
        "grid": {"half_width": 1.125, "h": 0.125},
        "domain": {"kind": "punctured_ball", "radius": 1.1, "excision": 0.0},
        "battery_domain": {"kind": "punctured_ball", "radius": 1.1},
        "weight": {"kind": "inverse_distance"},
        "test_function": {"kind": "radial_cutoff", "radius": 1.0, "power": 2.0},
        "battery": {"lattice": 3, "scales": [0.15, 0.25], "random": 4, "seed": 3},
        "checks": [{"theorem": "HARDY_CORE"}]
    })
}

fn write_config(dir: &Path, v: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

#[test]
fn hardy_core_row() {
    let cfg = load(&fixture()).unwrap();
    let report = run(&cfg, &cfg.checks[..1]).unwrap();
    let csv = csv_string(&report.rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], ["HARDY_CORE", "euclidean", "3"]);
    assert_eq!(row[9], "true");
    assert_eq!(row[11], "");
    assert!(lines.next().is_none());
}

#[test]
fn every_check_appears_once_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base();
    v["checks"] = json!([
        {"theorem": "CACCIOPPOLI", "params": {"q": 0.0}},
        {"theorem": "HARDY_CORE"},
        {"theorem": "DIST_HARDY", "params": {"alpha": 0.5}}
    ]);
    v["weight"] = json!({"kind": "distance_power", "exponent": 2.0});
    let cfg = load(&write_config(dir.path(), &v)).unwrap();
    let report = run(&cfg, &cfg.checks).unwrap();
    let ids: Vec<&str> = report.rows.iter().map(|r| r.theorem_id.as_str()).collect();
    assert_eq!(ids, ["CACCIOPPOLI", "HARDY_CORE", "DIST_HARDY"]);
    // r² is subharmonic, not superharmonic: the Hardy row carries the error
    // and its report values, the others still run.
    let hardy = &report.rows[1];
    assert!(!hardy.passed);
    assert!(hardy.error.as_deref().unwrap().contains("superharmonic"), "{:?}", hardy.error);
    assert!(hardy.lhs.is_some());
    assert!(report.rows[0].passed && report.rows[2].passed);
    assert_eq!(report.exit_code(), EXIT_FAIL);
}

#[test]
fn config_errors_carry_path_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base();
    v["checks"] = json!([]);
    let p = write_config(dir.path(), &v);
    let e = load(&p).unwrap_err();
    assert_eq!(e.field, "checks");
    assert_eq!(e.path, p.display().to_string());

    let mut v = base();
    v["checks"] = json!([{"theorem": "HARDY_CORE"}, {"theorem": "HARDY_CORE"}]);
    let raw: RunConfig = serde_json::from_value(v).unwrap();
    assert_eq!(validate(&p, raw).unwrap_err().field, "checks[1]");

    let e = load(&dir.path().join("missing.json")).unwrap_err();
    assert_eq!(e.field, "<file>");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let pass = write_config(dir.path(), &base());
    let s = bin()
        .args(["verify", "--config"])
        .arg(&pass)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(EXIT_PASS), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(out.join("report.csv").is_file());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 1);
    assert_eq!(json["config"]["metric"]["kind"], "euclidean");
    assert!(json["rows"][0]["runtime_ms"].as_f64().unwrap() >= 0.0);

    let mut v = base();
    v["weight"] = json!({"kind": "distance_power", "exponent": 2.0});
    let fail = write_config(dir.path(), &v);
    let s = bin().args(["verify", "--config"]).arg(&fail).arg("--out").arg(&out).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_FAIL));

    let mut v = base();
    v["checks"] = json!([{"theorem": "DIST_HARDY", "params": {"alpha": 1.0}}]);
    let bad = write_config(dir.path(), &v);
    let s = bin().args(["verify", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&s.stderr).contains("checks[0]"));

    let s = bin().args(["capacity", "--config"]).arg(&pass).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_CONFIG));

    let s = bin().args(["metric-info", "--spec", r#"{"kind":"randers","n":3,"b":[2,0,0]}"#]).output().unwrap();
    assert_eq!(s.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn constant_subcommand_runs_the_minimiser() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base();
    v["grid"] = json!({"half_width": 1.125, "h": 0.125});
    v["checks"] = json!([
        {"theorem": "HARDY_CORE"},
        {"theorem": "BEST_CONSTANT", "params": {"max_iters": 40}},
        {"theorem": "SHARPNESS", "params": {"widths": [0.2, 0.1]}}
    ]);
    let p = write_config(dir.path(), &v);
    let s = bin().args(["constant", "--config"]).arg(&p).output().unwrap();
    let stdout = String::from_utf8_lossy(&s.stdout);
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "{stdout}");
    assert!(rows[0].starts_with("BEST_CONSTANT,"));
    assert!(rows[1].starts_with("SHARPNESS,"));
    assert_eq!(s.status.code(), Some(EXIT_PASS), "{stdout}");
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), &base());
    let run_once = |name: &str| {
        let out = dir.path().join(name);
        let s = bin().args(["verify", "--config"]).arg(&p).arg("--out").arg(&out).output().unwrap();
        assert!(s.status.success());
        std::fs::read(out.join("report.csv")).unwrap()
    };
    assert_eq!(run_once("a"), run_once("b"));
}

#[test]
fn metric_info_examples() {
    let e = metric_info(&parse_spec(r#"{"kind":"euclidean","n":3}"#).unwrap()).unwrap();
    assert_eq!(e.reversibility_declared, Some(1.0));
    assert!((e.reversibility_estimated - 1.0).abs() <= 1e-6);

    let r = metric_info(&parse_spec(r#"{"kind":"randers","n":3,"b":[0.5,0,0]}"#).unwrap()).unwrap();
    assert_eq!(r.reversibility_declared, Some(3.0));
    assert!((r.reversibility_estimated - 3.0).abs() <= 1e-4);

    let c = metric_info(&parse_spec(r#"{"kind":"custom","n":3,"norm":{"type":"l2"}}"#).unwrap()).unwrap();
    assert_eq!(c.reversibility_declared, None);
    assert!((c.reversibility_estimated - e.reversibility_estimated).abs() <= 1e-6);
    assert!((c.lambda.value - 1.0).abs() <= 1e-6);
    assert!((c.big_lambda.value - 1.0).abs() <= 1e-6);
    assert!(c.curvature_bound.is_none());

    let s = bin().args(["metric-info", "--spec", r#"{"kind":"euclidean","n":3}"#]).output().unwrap();
    let text = String::from_utf8_lossy(&s.stdout);
    assert!(text.contains("r_F declared: 1\n"), "{text}");
    assert!(text.contains("[declared]"));
}

#[test]
fn custom_weight_file() {
    let dir = tempfile::tempdir().unwrap();
    let cells = 18usize.pow(3);
    let values: Vec<f64> = vec![1.0; cells];
    std::fs::write(dir.path().join("w.json"), serde_json::to_string(&values).unwrap()).unwrap();
    let mut v = base();
    v["weight"] = json!({"kind": "custom_field", "path": "w.json"});
    let cfg = load(&write_config(dir.path(), &v)).unwrap();
    let report = run(&cfg, &cfg.checks).unwrap();
    // ρ ≡ 1 has Dρ = 0, so both sides of the Hardy core vanish on the left.
    assert_eq!(report.rows[0].lhs, Some(0.0));
    assert!(report.rows[0].passed);

    v["weight"] = json!({"kind": "custom_field", "path": "w.json"});
    std::fs::write(dir.path().join("w.json"), "[1.0, 2.0]").unwrap();
    let cfg = load(&write_config(dir.path(), &v)).unwrap();
    assert!(run(&cfg, &cfg.checks).is_err());
}
