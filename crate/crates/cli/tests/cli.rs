use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn spinpair(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinpair"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn coefficients_writes_report_and_manifest() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["coefficients"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("coefficients.json")).unwrap()).unwrap();
    let r = report["rate_ratios"]["r01_12"].as_f64().unwrap();
    assert!((r - 2.34).abs() < 0.01);
    assert!(report["rate_ratio_uncertainty"].is_object());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "coefficients");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|f| f["file"] == "coefficients.json"));
    assert!(dir.path().join("resolved_config.toml").exists());
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first");
    let o = spinpair(&first, &["frozen-fraction", "--temp", "44", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let config = first.join("resolved_config.toml");
    let second = dir.path().join("second");
    let o = spinpair(&second, &["frozen-fraction", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["frozen_fraction.json", "resolved_config.toml"] {
        assert_eq!(std::fs::read(first.join(name)).unwrap(), std::fs::read(second.join(name)).unwrap());
    }
}

#[test]
fn time_series_starts_in_the_initial_state() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["time-series", "--max-modes", "60", "--steps", "10", "--t-max-ms", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("time_series.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time_s,p00,p1m1,p2m2"));
    assert_eq!(lines.next(), Some("0,1,0,0"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn small_basis_records_capture_warning() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["time-series", "--max-modes", "10", "--steps", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn empty_field_scan_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["field-scan", "--fields"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("empty"));
}

#[test]
fn negative_field_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["time-series", "--b-field=-1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oversized_basis_needs_explicit_permission() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(dir.path(), &["time-series", "--memory-budget-mb", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--allow-large"));
}

#[test]
fn malformed_rate_data_reports_location() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "time_s,p00,p1m1,p2m2\n0,1,0,0\n0.001,0.9,abc,0.05\n").unwrap();
    let o = spinpair(&dir.path().join("out"), &["rate-fit", "--data", data.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("p1m1"), "{err}");
}

#[test]
fn rate_fit_recovers_written_trajectory() {
    let dir = TempDir::new().unwrap();
    let params = spinpair::RateParams::from_ratio(25.0, 2.34).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| 2e-3 * i as f64).collect();
    let traj = spinpair::solve_rate_equations(&params, [1.0, 0.0, 0.0], &times).unwrap();
    let data = dir.path().join("data.csv");
    let mut buf = Vec::new();
    spinpair::rate_model::write_trajectory_csv(&mut buf, &traj).unwrap();
    std::fs::write(&data, buf).unwrap();
    let out = dir.path().join("out");
    let o = spinpair(&out, &["rate-fit", "--data", data.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fit: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("rate_fit.json")).unwrap()).unwrap();
    assert!((fit["gamma12"].as_f64().unwrap() - 25.0).abs() < 1e-6 * 25.0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn squeezing_reports_detection_discrepancy() {
    let dir = TempDir::new().unwrap();
    let o = spinpair(
        dir.path(),
        &["squeezing", "--trials", "10000", "--counts", "20,41,39", "--expected", "0.2,0.4,0.4"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("squeezing.json")).unwrap()).unwrap();
    assert!((report["measured"]["db"].as_f64().unwrap() + 11.94).abs() < 0.005);
    assert_eq!(report["detection"]["within_target"], false);
    assert!(report["chi_squared"]["p_value"].as_f64().unwrap() > 0.5);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "temprature_uk = 3.0\n").unwrap();
    let o = spinpair(&dir.path().join("out"), &["coefficients", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}
