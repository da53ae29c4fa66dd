use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn demolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_demolab")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = demolab(&["gen", "--rows", "4", "--cols", "8", "--dist", "gaussian", "--seed", "1", "--out", &out_arg(dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(a.join("phi.bin")).unwrap(), fs::read(b.join("phi.bin")).unwrap());
    assert_eq!(fs::read(a.join("phi.csv")).unwrap(), fs::read(b.join("phi.csv")).unwrap());
    assert_eq!(fs::read_to_string(a.join("phi.csv")).unwrap().lines().count(), 4);

    let manifest = read_json(&a.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "gen");
    assert_eq!(manifest["master_seed"], 1);
    assert_eq!(manifest["config"]["cols"], 8);
    assert!(manifest["timestamp"].as_str().unwrap().ends_with('Z'));
}

#[test]
fn zero_rows_is_a_usage_error() {
    let out = demolab(&["gen", "--rows", "0", "--cols", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rows"));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("gen.conf");
    fs::write(&cfg, "rows = 3\ncols = 4\nrowz = 5\n").unwrap();
    let out = demolab(&["gen", "--config", &out_arg(&cfg), "--out", &out_arg(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rowz"));
}

#[test]
fn rip_reports_json_and_budget_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert!(demolab(&["gen", "--rows", "6", "--cols", "12", "--seed", "5", "--out", &out_arg(dir)]).status.success());
    let phi = dir.join("phi.bin");
    let rip_dir = dir.join("rip");
    let out = demolab(&["rip", "--in", &out_arg(&phi), "--order", "3", "--out", &out_arg(&rip_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&rip_dir.join("rip.json"));
    assert_eq!(report["order"], 3);
    assert_eq!(report["worst_high_subset"]["indices"].as_array().unwrap().len(), 3);
    assert!(report["delta"].as_f64().unwrap() > 0.0);

    let out = demolab(&["rip", "--in", &out_arg(&phi), "--order", "3", "--budget", "10", "--out", &out_arg(&rip_dir)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn flags_override_config_file_and_manifest_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = dir.join("gen.json");
    fs::write(&cfg, r#"{"rows": 3, "cols": 5, "seed": 9, "dist": "rademacher"}"#).unwrap();
    let first = dir.join("first");
    let out = demolab(&["gen", "--config", &out_arg(&cfg), "--cols", "7", "--out", &out_arg(&first)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read_json(&first.join("manifest.json"));
    assert_eq!(manifest["config"]["cols"], 7);
    assert_eq!(manifest["config"]["rows"], 3);
    assert_eq!(manifest["config"]["dist"], "rademacher");

    let replay = dir.join("replay");
    let out = demolab(&["gen", "--config", &out_arg(&first.join("manifest.json")), "--out", &out_arg(&replay)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(first.join("phi.bin")).unwrap(), fs::read(replay.join("phi.bin")).unwrap());
}

#[test]
fn small_experiment_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.conf");
    fs::write(
        &cfg,
        "n = 64\nk = 2\nm_grid = 24, 32\ntrials = 2\nr_submatrices = 3\npolicies = random_single, random_multi\n",
    )
    .unwrap();
    let dir = tmp.path().join("exp");
    let out = demolab(&["experiment", "--config", &out_arg(&cfg), "--master-seed", "4", "--record-attempts", "--out", &out_arg(&dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["results.csv", "summary.csv", "fits.csv", "fits.json", "figure1.gp", "attempts.csv", "manifest.json"] {
        assert!(dir.join(name).exists(), "missing {name}");
    }
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("policy,m,d_max"));
    assert_eq!(summary.lines().count(), 5);
    let manifest = read_json(&dir.join("manifest.json"));
    assert_eq!(manifest["master_seed"], 4);
    assert_eq!(manifest["config"]["record_attempts"], true);
}

#[test]
fn numeric_precondition_exit_codes() {
    let out = demolab(&["constants", "--k", "2", "--d", "2", "--n", "14", "--c1", "50", "--delta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = demolab(&["recover", "--in", "/nonexistent/phi.bin", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
