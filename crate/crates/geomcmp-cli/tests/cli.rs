//! End-to-end runner checks: golden outputs, exit-code taxonomy, byte-stable
//! reruns, and the config round-trip through the JSON summary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_geomcmp")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("golden {name}: {e}"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "expected success, got {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

const PASSING: [&str; 9] = [
    "focal", "index", "lemma_a", "rauch3", "thm_d", "ratio", "quad", "cor_c", "cor_e",
];

#[test]
fn golden_csv_matches_for_every_experiment() {
    for name in PASSING {
        let config = fixture(&format!("{name}.json"));
        let got = stdout_of(&["--config", config.to_str().unwrap()]);
        assert_eq!(got, golden(&format!("{name}.csv")), "csv drift in {name}");
    }
}

#[test]
fn golden_json_matches_for_every_experiment() {
    for name in PASSING {
        let config = fixture(&format!("{name}.json"));
        let got = stdout_of(&["--config", config.to_str().unwrap(), "--format", "json"]);
        assert_eq!(got, golden(&format!("{name}.json")), "json drift in {name}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    for name in ["focal", "lemma_a", "cor_e"] {
        let config = fixture(&format!("{name}.json"));
        let first = stdout_of(&["--config", config.to_str().unwrap()]);
        let second = stdout_of(&["--config", config.to_str().unwrap()]);
        assert_eq!(first, second, "nondeterministic csv in {name}");
    }
}

#[test]
fn violation_exits_one() {
    let out = run(&["--config", fixture("index_tight.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("identity_residual"), "csv still emitted");
}

#[test]
fn failed_hypothesis_exits_two_and_names_the_check() {
    let config = fixture("rauch3_badhyp.json");
    let out = run(&["--config", config.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let summary: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("json summary");
    assert_eq!(summary["status"], "hypothesis_failed");
    let checks = summary["results"]["hypothesis"]["checks"]
        .as_array()
        .expect("checks array");
    assert!(checks
        .iter()
        .any(|c| c["name"] == "curvature_bound" && c["passed"] == false));
}

#[test]
fn missing_key_exits_three_naming_the_key() {
    let out = run(&["--config", fixture("focal_missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("params.l"), "stderr was: {err}");
}

#[test]
fn unknown_experiment_exits_three() {
    let out = run(&["--config", fixture("unknown.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown experiment"), "stderr was: {err}");
}

#[test]
fn unreadable_config_exits_three() {
    let out = run(&["--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn embedded_config_round_trips() {
    let config = fixture("lemma_a.json");
    let first = stdout_of(&["--config", config.to_str().unwrap(), "--format", "json"]);
    let summary: serde_json::Value = serde_json::from_str(&first).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let replay_path = dir.path().join("replay.json");
    std::fs::write(
        &replay_path,
        serde_json::to_string(&summary["config"]).unwrap(),
    )
    .unwrap();

    // The embedded config carries the resolved format, so replaying it with
    // no flags must reproduce the original summary byte for byte.
    let second = stdout_of(&["--config", replay_path.to_str().unwrap()]);
    assert_eq!(first, second, "replay drifted from the original run");
}

#[test]
fn out_path_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.csv");
    let config = fixture("thm_d.json");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "file mode should not print data");

    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv, golden("thm_d.csv"));

    let companion = dir.path().join("run.csv.json");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&companion).unwrap()).unwrap();
    assert_eq!(summary["status"], "hold");
    // The embedded output path points at the temp file, so only the results
    // are comparable against the golden summary.
    let golden_summary: serde_json::Value =
        serde_json::from_str(&golden("thm_d.json")).unwrap();
    assert_eq!(summary["results"], golden_summary["results"]);
}

#[test]
fn cli_overrides_beat_config_values() {
    let config = fixture("thm_d.json");
    let got = stdout_of(&[
        "--config",
        config.to_str().unwrap(),
        "--steps",
        "8",
        "--format",
        "json",
    ]);
    let summary: serde_json::Value = serde_json::from_str(&got).unwrap();
    assert_eq!(summary["config"]["params"]["steps"], 8);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
