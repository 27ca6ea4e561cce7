//! End-to-end runs of the binary: exit codes, output channels, CSV shape,
//! and determinism. Numerical depth lives in the acceptance suite; here we
//! care that the tool behaves like a well-mannered Unix citizen.

use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use predicates::prelude::PredicateBooleanExt;

fn bin() -> Command {
    Command::cargo_bin("swankit").expect("binary builds")
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("model.json");
    fs::write(&path, text).expect("temp config writes");
    path
}

#[test]
fn hermitize_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for out in [&first, &second] {
        bin()
            .args(["hermitize", "--samples", "201"])
            .arg("--config")
            .arg(shipped("swanson.json"))
            .arg("--out")
            .arg(out)
            .assert()
            .success();
    }
    let a = fs::read(&first).unwrap();
    let b = fs::read(&second).unwrap();
    assert_eq!(a, b, "identical invocations must produce identical bytes");

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,V_eff,sigma");
    assert_eq!(lines.len(), 202, "header plus 201 sample rows");
    assert!(!text.contains('\r'), "line endings are plain LF");
}

#[test]
fn csv_goes_to_stdout_and_report_to_stderr_without_out() {
    let assert = bin()
        .args(["hermitize", "--samples", "11"])
        .arg("--config")
        .arg(shipped("swanson.json"))
        .assert()
        .success();
    let output = assert.get_output();
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stdout.starts_with("x,V_eff,sigma\n"));
    assert_eq!(stdout.lines().count(), 12);
    assert!(stderr.contains("hermitize: pass"));
    assert!(stderr.contains("tol"), "every reported number carries its tolerance");
}

#[test]
fn pdm_table_has_mass_and_straightened_coordinate() {
    let assert = bin()
        .arg("pdm")
        .arg("--config")
        .arg(shipped("pdm_rational.json"))
        .assert()
        .success();
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    assert!(stdout.starts_with("x,m,u,V\n"));
    assert_eq!(stdout.lines().count(), 102, "header plus the default 101 rows");
}

#[test]
fn spectrum_emits_the_requested_number_of_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    bin()
        .args(["spectrum", "--k", "3"])
        .arg("--config")
        .arg(shipped("swanson.json"))
        .arg("--out")
        .arg(&out)
        .assert()
        .success()
        .stdout(predicates::str::contains("spectrum: pass"));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,energy,error_estimate,residual");
    assert_eq!(lines.len(), 4);
    let e0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((e0 - 1.0068429181).abs() < 1e-6, "ground level, got {e0}");
}

#[test]
fn spectrum_grid_override_is_parsed_and_reported() {
    let assert = bin()
        .args(["spectrum", "--k", "2", "--grid", "-10:10:1500", "--json"])
        .arg("--config")
        .arg(shipped("swanson.json"))
        .assert()
        .success();
    let doc: serde_json::Value =
        serde_json::from_slice(&assert.get_output().stdout).expect("stdout is one JSON document");
    assert_eq!(doc["grid"]["n"], 1500);
    assert_eq!(doc["command"], "spectrum");
    assert_eq!(doc["pass"], true);
}

#[test]
fn riccati_tabulates_the_recovered_slope() {
    let assert = bin()
        .args(["riccati", "--samples", "9"])
        .arg("--config")
        .arg(shipped("typea_harmonic.json"))
        .assert()
        .success();
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    assert!(stdout.starts_with("u,B0\n"));
    assert_eq!(stdout.lines().count(), 10);
}

#[test]
fn typea_check_passes_on_the_shipped_harmonic_model() {
    bin()
        .arg("typea-check")
        .arg("--config")
        .arg(shipped("typea_harmonic.json"))
        .assert()
        .success()
        .stdout(predicates::str::contains("typea-check: pass"));
}

#[test]
fn json_mode_embeds_table_and_tolerances() {
    let assert = bin()
        .args(["hermitize", "--samples", "7", "--json"])
        .arg("--config")
        .arg(shipped("swanson.json"))
        .assert()
        .success();
    let doc: serde_json::Value =
        serde_json::from_slice(&assert.get_output().stdout).expect("stdout is one JSON document");
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["table"]["columns"], serde_json::json!(["x", "V_eff", "sigma"]));
    assert_eq!(doc["table"]["rows"].as_array().unwrap().len(), 7);
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        assert!(check["tolerance"].is_f64(), "check without a tolerance: {check}");
    }
}

#[test]
fn missing_config_flag_is_a_usage_error() {
    bin()
        .arg("hermitize")
        .assert()
        .code(1)
        .stderr(predicates::str::contains("--config"));
}

#[test]
fn malformed_json_reports_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "{ \"params\": { \"omega\": } }");
    bin()
        .arg("hermitize")
        .arg("--config")
        .arg(&path)
        .assert()
        .code(1)
        .stderr(predicates::str::contains("line"));
}

#[test]
fn both_profiles_exit_one_naming_both_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{
            "params": { "omega": 2.0, "alpha": 0.5, "beta": 0.25, "gamma": 1.0, "delta": 0.0 },
            "a_expr": "1",
            "m_expr": "1",
            "domain": { "x_min": -5.0, "x_max": 5.0 },
            "grid": { "n": 100 }
        }"#,
    );
    bin()
        .arg("hermitize")
        .arg("--config")
        .arg(&path)
        .assert()
        .code(1)
        .stderr(predicates::str::contains("a_expr").and(predicates::str::contains("m_expr")));
}

#[test]
fn nonpositive_tolerances_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{
            "params": { "omega": 2.0, "alpha": 0.5, "beta": 0.25, "gamma": 1.0, "delta": 0.0 },
            "a_expr": "1",
            "domain": { "x_min": -5.0, "x_max": 5.0 },
            "grid": { "n": 100 },
            "tolerances": { "abs": 0.0 }
        }"#,
    );
    bin()
        .arg("hermitize")
        .arg("--config")
        .arg(&path)
        .assert()
        .code(1)
        .stderr(predicates::str::contains("tolerances.abs"));
}

#[test]
fn elliptic_class_is_refused_by_name() {
    let text = fs::read_to_string(shipped("typea_harmonic.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, &text.replace("\"f_class\": \"I\"", "\"f_class\": \"V\""));
    bin()
        .arg("typea-check")
        .arg("--config")
        .arg(&path)
        .assert()
        .code(1)
        .stderr(predicates::str::contains("f_class"));
}

#[test]
fn failed_numerical_check_exits_two() {
    let text = fs::read_to_string(shipped("typea_harmonic.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, &text.replace("sqrt(3)/2 * u", "u^3"));
    let assert = bin()
        .arg("typea-check")
        .arg("--config")
        .arg(&path)
        .assert()
        .code(2);
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    assert!(stdout.contains("FAIL"), "the offending check is flagged:\n{stdout}");
    assert!(stdout.contains("typea-check: fail"));
}

#[test]
fn verify_runs_the_whole_suite() {
    let assert = bin().args(["verify", "--json"]).assert().success();
    let doc: serde_json::Value =
        serde_json::from_slice(&assert.get_output().stdout).expect("stdout is one JSON document");
    assert_eq!(doc["total"], 10);
    assert_eq!(doc["passed"], 10);
    assert_eq!(doc["criteria"].as_array().unwrap().len(), 10);
}
