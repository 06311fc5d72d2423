use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use spectral_lattice::config::ConfigRecord;
use tempfile::TempDir;

fn speclat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speclat")).args(args).output().unwrap()
}

fn run(dir: &TempDir, command: &str, spec: Option<&str>, extra: &[&str]) -> (i32, PathBuf) {
    let out = dir.path().join(format!("out-{command}"));
    let mut args = vec![command.to_string(), "--out".into(), out.display().to_string()];
    if let Some(text) = spec {
        let path = dir.path().join(format!("{command}-spec.json"));
        std::fs::write(&path, text).unwrap();
        args.extend(["--spec".into(), path.display().to_string()]);
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let output = speclat(&refs);
    (output.status.code().unwrap(), out)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn default_verify_passes_with_every_residual_reported() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&dir, "verify", None, &[]);
    assert_eq!(code, 0);
    let report = read_json(&out.join("verify_report.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["run_spec"]["lattice"]["d"], 4);
    assert_eq!(report["run_spec"]["N"], 2);
    let checks = report["checks"].as_array().unwrap();
    for name in ["decomposition", "cancellation", "trace_constancy_m6", "vertex_collapse", "gauge_invariance"] {
        assert_eq!(checks.iter().filter(|c| c["name"] == name).count(), 5, "{name}");
    }
    assert!(checks.iter().all(|c| c["measured"].as_f64().unwrap() <= c["threshold"].as_f64().unwrap()));
}

#[test]
fn asserting_cancellation_on_unconstrained_configs_fails() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"generator": {"kind": "unconstrained"}, "assert_cancellation": true, "configs": 2, "gauge_checks": 0}"#;
    let (code, out) = run(&dir, "verify", Some(spec), &[]);
    assert_eq!(code, 1);
    let report = read_json(&out.join("verify_report.json"));
    let cancellation: Vec<&Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["name"] == "cancellation").collect();
    assert_eq!(cancellation.len(), 2);
    assert!(cancellation.iter().all(|c| c["passed"] == false && c["measured"].as_f64().unwrap() > 1e-3));
}

#[test]
fn malformed_input_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    for (i, text) in ["{not json", r#"{"unknown_key": 1}"#, r#"{"N": 3, "generator": {"kind": "constrained", "spectrum": [1, -1]}}"#, r#"{"c": 0}"#].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let spec = dir.path().join(format!("s{i}.json"));
        std::fs::write(&spec, text).unwrap();
        let code = speclat(&["verify", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code();
        assert_eq!(code, Some(2), "{text}");
        assert!(!out.exists());
    }
    assert_eq!(speclat(&["verify", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(speclat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(speclat(&["verify", "--threads", "0", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn spec_naming_a_different_command_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&dir, "generate", Some(r#"{"command": "verify"}"#), &[]);
    assert_eq!(code, 2);
    assert!(!out.exists());
}

#[test]
fn calibration_reproduces_closed_forms() {
    let dir = TempDir::new().unwrap();
    for (d, expected) in [(4, [1.0, 4.0, 4.0, 480.0]), (2, [0.5, 2.0, 2.0, 14.0])] {
        let spec = format!(r#"{{"lattice": {{"d": {d}, "n": 2, "l": 1.0}}, "N": 1}}"#);
        let (code, out) = run(&dir, "calibrate", Some(&spec), &[]);
        assert_eq!(code, 0);
        let doc = read_json(&out.join("calibration.json"));
        let m = &doc["report"]["measured"];
        for (key, want) in ["alpha_w", "alpha_4", "alpha_2", "alpha_0"].iter().zip(expected) {
            assert!((m[key].as_f64().unwrap() - want).abs() < 1e-8 * want, "{key}");
        }
    }
}

#[test]
fn calibration_refuses_large_lattices() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run(&dir, "calibrate", Some(r#"{"lattice": {"d": 4, "n": 6, "l": 1.0}, "N": 1}"#), &[]);
    assert_eq!(code, 2);
}

#[test]
fn continuum_default_writes_csv_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&dir, "continuum", None, &[]);
    assert_eq!(code, 0);
    for obs in ["wilson", "quartic", "kinetic", "mass"] {
        let csv = std::fs::read_to_string(out.join(format!("{obs}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# run_spec: {"));
        assert_eq!(lines.next().unwrap(), "n,l,observable,target,abs_err,rel_err");
        assert_eq!(lines.count(), 4);
    }
    let doc = read_json(&out.join("continuum.json"));
    let wilson = doc["verdicts"].as_array().unwrap().iter().find(|v| v["observable"] == "wilson").unwrap().clone();
    let order = wilson["order"].as_f64().unwrap();
    assert!((1.6..=2.4).contains(&order), "{order}");
    let leftovers: Vec<_> = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with('.')).collect();
    assert!(leftovers.is_empty());
}

#[test]
fn flat_field_uses_absolute_errors() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"fields": {"period": 1.0, "d": 2, "N": 1, "gauge": [[], []]}}"#;
    let (code, out) = run(&dir, "continuum", Some(spec), &[]);
    assert_eq!(code, 0);
    let doc = read_json(&out.join("continuum.json"));
    assert!(doc["reports"].as_array().unwrap().iter().all(|r| r["mode"] == "absolute"));
}

#[test]
fn two_point_sweep_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&dir, "continuum", Some(r#"{"n_list": [8, 16]}"#), &[]);
    assert_eq!(code, 2);
    assert!(!out.exists());
}

#[test]
fn out_of_bracket_order_fails() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run(&dir, "continuum", Some(r#"{"observables": ["wilson"], "order_bracket": [3.0, 4.0]}"#), &[]);
    assert_eq!(code, 1);
}

#[test]
fn generated_constrained_config_reloads_and_satisfies_the_constraint() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"N": 3, "generator": {"kind": "constrained", "spectrum": [1, 1, -1]}}"#;
    let (code, out) = run(&dir, "generate", Some(spec), &["--seed", "4"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out.join("config.json")).unwrap();
    let record: ConfigRecord = serde_json::from_str(&text).unwrap();
    let prov = record.provenance.clone().unwrap();
    assert_eq!(prov["seed"], 4);
    assert_eq!(prov["generator"]["kind"], "constrained");
    assert!(prov["version"].is_string());
    assert!(record.into_config().unwrap().check_representation() <= 1e-10 * 2.0);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(speclat(&["generate", "--seed", "9", "--out", out.to_str().unwrap()]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a.join("config.json")).unwrap(), std::fs::read(b.join("config.json")).unwrap());
    let c = dir.path().join("c");
    speclat(&["generate", "--seed", "10", "--out", c.to_str().unwrap()]);
    assert_ne!(std::fs::read(a.join("config.json")).unwrap(), std::fs::read(c.join("config.json")).unwrap());
}

#[test]
fn unconstrained_generation_counts() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"lattice": {"d": 2, "n": 2, "l": 1.0}, "N": 1, "generator": {"kind": "unconstrained"}}"#;
    let (code, out) = run(&dir, "generate", Some(spec), &[]);
    assert_eq!(code, 0);
    let doc = read_json(&out.join("config.json"));
    assert_eq!(doc["D"].as_array().unwrap().len(), 4);
    assert_eq!(doc["L"].as_array().unwrap().len(), 8);
}

#[test]
fn strict_rejects_loosened_tolerances() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"tolerances": {"cancellation": 1.0}}"#;
    let (code, _) = run(&dir, "verify", Some(spec), &["--strict"]);
    assert_eq!(code, 2);
}
