use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-spinor"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(path: &std::path::Path) -> Output {
    bin().arg("run").arg(path).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn version_prints_semver() {
    let out = bin().arg("version").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v = text.split_whitespace().nth(1).unwrap();
    assert!(v.split('.').all(|p| p.parse::<u32>().is_ok()) && v.split('.').count() == 3);
}

#[test]
fn identity_suite_passes() {
    let out = run(&scenario("identity_suite.toml"));
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    let checks = report["actions"][0]["result"]["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn nonlocality_demo_report() {
    let out = run(&scenario("nonlocality_demo.toml"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    for action in &report["actions"].as_array().unwrap()[1..] {
        let v = &action["result"]["variants"];
        assert!(v["integral_discrepancy"].as_f64().unwrap() <= 1e-8);
        assert!(action["result"]["spread_fraction"].as_f64().unwrap() > 0.1);
    }
}

#[test]
fn describe_lists_three_actions_in_order() {
    let out = bin()
        .arg("describe")
        .arg(scenario("nonlocality_demo.toml"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("actions (3)"));
    let a = text.find("1. mode_observables").unwrap();
    let b = text.find("2. spin_densities").unwrap();
    let c = text.find("3. probability_densities").unwrap();
    assert!(a < b && b < c);
}

#[test]
fn superluminal_beta_exits_2_naming_key() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let text = format!(
        r#"
name = "bad"
units = "natural"
[state]
kind = "random"
count = 2
k_min = 1.0
k_max = 2.0
[[actions]]
kind = "covariance_check"
name = "boost"
betas = [0.2, 1.5]
[output]
report = "{}"
"#,
        report.display()
    );
    let out = run(&write_config(&dir, &text));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("actions[0].betas[1]"), "{err}");
    assert!(!report.exists(), "no partial report on exit 2");
}

#[test]
fn duplicate_action_names_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        r#"
name = "dup"
units = "natural"
[[actions]]
kind = "identity_suite"
name = "same"
[[actions]]
kind = "identity_suite"
name = "same"
"#,
    );
    let out = bin().arg("describe").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("same"));
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, "name = \"x\"\nunits = \"natural\"\ncolour = 3\n");
    let out = run(&p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("colour") && err.contains('3'), "{err}");
}

#[test]
fn oversized_grid_is_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        r#"
name = "big"
units = "natural"
memory_budget_mb = 1
[grid]
n = 64
dx = 1.0
[state]
kind = "random"
count = 1
k_min = 0.5
k_max = 1.0
[[actions]]
kind = "spin_density_variants"
name = "d"
"#,
    );
    let out = run(&p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("MB"));
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // a single plane wave has uniform densities, so no spread can be found
    let p = write_config(
        &dir,
        r#"
name = "flat"
units = "natural"
[grid]
n = 8
dx = 1.0
[state]
kind = "modes"
[[state.modes]]
k = [0.7853981633974483, 0.0, 0.0]
a_plus = [1.0, 0.0]
a_minus = [0.0, 0.0]
weight = 1.0
[[actions]]
kind = "probability_density_variants"
name = "flat"
min_spread_fraction = 0.1
"#,
    );
    let out = run(&p);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(!report["actions"][0]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn csv_slice_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("slice.csv");
    let report = dir.path().join("r.json");
    let text = std::fs::read_to_string(scenario("nonlocality_demo.toml"))
        .unwrap()
        .replace(
            "name = \"spin_densities\"",
            &format!("name = \"spin_densities\"\ncsv = {{ path = \"{}\" }}", csv.display()),
        );
    let out = bin()
        .arg("run")
        .arg(write_config(&dir, &text))
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["passed"], true);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 32 * 32);
}

#[test]
fn invalid_thread_cap_exits_2() {
    let out = bin()
        .env("PHOTON_SPINOR_THREADS", "zero")
        .arg("run")
        .arg(scenario("identity_suite.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_bit_identical_across_runs_and_thread_caps() {
    for name in ["conservation.toml", "covariance.toml", "nonlocality_demo.toml"] {
        let a = run(&scenario(name)).stdout;
        let b = bin()
            .env("PHOTON_SPINOR_THREADS", "1")
            .arg("run")
            .arg(scenario(name))
            .output()
            .unwrap()
            .stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name}");
    }
}
