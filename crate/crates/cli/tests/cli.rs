use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinfw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinfw")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, mode: &str, config: Option<&str>, extra: &[&str]) -> (i32, Value) {
    let out = dir.join("out");
    let mut args = vec![mode.to_string(), "--out".into(), out.display().to_string()];
    if let Some(text) = config {
        let path = dir.join("run.toml");
        std::fs::write(&path, text).unwrap();
        args.extend(["--config".into(), path.display().to_string()]);
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let o = spinfw(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let code = o.status.code().expect("exit code");
    let results = std::fs::read_to_string(out.join("results.json"))
        .map(|t| serde_json::from_str(&t).unwrap())
        .unwrap_or(Value::Null);
    (code, results)
}

fn stderr(dir: &Path, mode: &str, config: &str) -> (i32, String) {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    let out = dir.join("out");
    let o = spinfw(&[mode, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn check<'a>(results: &'a Value, name: &str) -> &'a Value {
    results["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("{name}"))
}

#[test]
fn larmor_preset_passes_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "simulate", Some("mode = \"simulate\"\n[field]\nkind = \"uniform\"\n"), &[]);
    assert_eq!(code, 0);
    assert_eq!(r["pass"], true);
    assert_eq!(check(&r, "C01_larmor_limit")["pass"], true);
    assert_eq!(check(&r, "C02_conservation")["pass"], true);
    for f in ["trajectory.json", "trajectory.csv", "metadata.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,z,px,py,pz,sx,sy,sz,h_total,s_norm,s_drift,energy_drift\n"));
}

#[test]
fn results_are_deterministic() {
    let cfg =
        "[field]\nkind = \"stern-gerlach\"\nb0 = 1.0\nb = 0.01\n[simulate]\np = [0.3, 0.1, 0.0]\nduration = 2.0\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_in(a.path(), "simulate", Some(cfg), &["--seed", "5"]);
    run_in(b.path(), "simulate", Some(cfg), &["--seed", "5"]);
    let ra = std::fs::read(a.path().join("out/results.json")).unwrap();
    let rb = std::fs::read(b.path().join("out/results.json")).unwrap();
    assert_eq!(ra, rb);
    let c = tempfile::tempdir().unwrap();
    let (_, rc) = run_in(c.path(), "simulate", Some(cfg), &["--seed", "6"]);
    let ra: Value = serde_json::from_slice(&ra).unwrap();
    assert_ne!(ra["run_id"], rc["run_id"]);
    assert_ne!(ra["config_hash"], rc["config_hash"]);
}

#[test]
fn superluminal_boost_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = stderr(dir.path(), "boost", "[boost]\nbeta = [0.6, 0.8, 0.1]\n");
    assert_eq!(code, 2);
    assert!(err.contains("line 2: boost.beta"), "{err}");
    assert!(!dir.path().join("out/results.json").exists());
}

#[test]
fn odd_lattice_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = stderr(dir.path(), "verify-fw", "[lattice]\nsites = 13\n");
    assert_eq!(code, 2);
    assert!(err.contains("lattice.sites") && err.contains("even"), "{err}");
}

#[test]
fn unknown_keys_and_missing_files_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = stderr(dir.path(), "simulate", "[simulate]\nduraton = 3.0\n");
    assert_eq!(code, 2);
    assert!(err.contains("duraton"), "{err}");
    let o = spinfw(&["simulate", "--config", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let (code, _) = stderr(dir.path(), "simulate", "mode = \"boost\"\n");
    assert_eq!(code, 2);
}

#[test]
fn verify_algebra_at_order_eight() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "verify-algebra", None, &["--order", "8"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "C06_symbolic_case_equality")["pass"], true);
    assert_eq!(check(&r, "C07_ordering_identity")["pass"], true);
    let alg: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/algebra.json")).unwrap()).unwrap();
    assert_eq!(alg["order"], 8);
    assert_eq!(alg["cases"]["II"]["discrepancy_terms"], 0);
}

#[test]
fn omitted_darwin_term_is_an_expected_failure() {
    let cfg = "[fw]\ncase = \"II\"\ndarwin = false\n";
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "verify-fw", Some(cfg), &["--profile", "negative-result"]);
    assert_eq!(code, 0);
    let c10 = check(&r, "C10_correspondence_scaling/case_II");
    assert_eq!(c10["pass"], false);
    assert_eq!(c10["expected_failure"], true);
    assert_eq!(c10["accepted"], true);
    let slope = c10["metrics"][0]["value"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.1, "{slope}");
    assert_eq!(check(&r, "C11_darwin_negative_result/case_II")["pass"], true);

    // the default profile does not forgive it
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "verify-fw", Some(cfg), &[]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
}

#[test]
fn verify_fw_with_darwin_passes_and_honours_lambda_list() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) =
        run_in(dir.path(), "verify-fw", Some("[fw]\ncase = \"II\"\n"), &["--lambda-list", "2e-3,2e-4,2e-5"]);
    assert_eq!(code, 0, "{r}");
    let fw: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/fw.json")).unwrap()).unwrap();
    assert_eq!(fw["cases"]["II"]["lambdas"], serde_json::json!([2e-3, 2e-4, 2e-5]));
    assert_eq!(fw["records"].as_array().unwrap().len(), 3);
}

#[test]
fn boost_reports_the_linear_residual() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "boost", None, &["--profile", "negative-result"]);
    assert_eq!(code, 0);
    let c13 = check(&r, "C13_boost_covariance");
    assert_eq!(c13["expected_failure"], true);
    let b: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/boost.json")).unwrap()).unwrap();
    assert!(b["metric_defect"].as_f64().unwrap() < 1e-12);
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), "boost", None, &[]).0, 1);
}

#[test]
fn integration_failure_exits_one_with_partial_trajectory() {
    // adaptive stepping cannot meet a tolerance far below rounding
    let cfg = "[integrator]\nmethod = \"rkf45\"\ntolerance = 1e-300\nmax_steps = 50\n[simulate]\np = [0.3, 0.0, 0.0]\n";
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "simulate", Some(cfg), &[]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    assert!(r["error"].as_str().unwrap().contains("integration"));
    assert!(dir.path().join("out/trajectory.json").exists());
}

#[test]
fn report_lists_every_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_in(dir.path(), "report", None, &["--profile", "negative-result"]);
    assert_eq!(code, 0);
    assert_eq!(r["checks"].as_array().unwrap().len(), 13);
    let text = std::fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(text.contains("C13_boost_covariance             FAIL (expected)"), "{text}");
    assert!(text.contains("12/13 criteria pass"));
}
