//! End-to-end tests that drive the compiled `planscore` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use planscore::graph::FloorPlanIr;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planscore"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should run")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Generates a plan into `dir`, returning the raster path.
fn gen_plan(dir: &Path, seed: &str, name: &str) -> String {
    let png = format!("{name}.png");
    let out = run_in(dir, &["synth", "gen", "--seed", seed, "--png", &png]);
    assert!(out.status.success(), "gen failed: {}", stderr_of(&out));
    png
}

#[test]
fn score_of_svg_against_its_own_raster_is_unity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["synth", "gen", "--seed", "5", "--png", "p.png", "--svg", "p.svg"],
    );
    assert!(out.status.success(), "gen failed: {}", stderr_of(&out));

    let out = run_in(dir.path(), &["score", "p.svg", "p.png"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("composite        1.0000"), "got:\n{text}");
    assert!(text.contains("violations       0"), "got:\n{text}");
}

#[test]
fn score_json_output_parses_and_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let png = gen_plan(dir.path(), "7", "p");
    let out = run_in(dir.path(), &["score", &png, &png, "--format", "json"]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(record["breakdown"]["composite"], 1.0);
    assert_eq!(record["violations"], 0);
    assert!(record["failure"].is_null());
}

#[test]
fn validate_clean_plan_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let png = gen_plan(dir.path(), "11", "clean");
    let out = run_in(dir.path(), &["validate", &png]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "no violations found");
}

#[test]
fn validate_flags_a_deleted_room_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["synth", "perturb", "delete-dot", "--seed", "5", "--png", "bad.png"],
    );
    assert!(out.status.success(), "perturb failed: {}", stderr_of(&out));

    let out = run_in(dir.path(), &["validate", "bad.png"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("rule 6"), "got:\n{}", stdout_of(&out));

    let out = run_in(dir.path(), &["validate", "bad.png", "--format", "json"]);
    let body: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(body["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn extract_matches_generated_truth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["synth", "gen", "--seed", "3", "--png", "p.png", "--ir", "truth.json"],
    );
    assert!(out.status.success());

    let out = run_in(dir.path(), &["extract", "p.png", "--out", "got.json"]);
    assert!(out.status.success());

    let truth = FloorPlanIr::from_json(&fs::read_to_string(dir.path().join("truth.json")).unwrap())
        .unwrap();
    let got = FloorPlanIr::from_json(&fs::read_to_string(dir.path().join("got.json")).unwrap())
        .unwrap();
    assert_eq!(got, truth);
}

#[test]
fn extract_to_stdout_is_valid_ir_json() {
    let dir = tempfile::tempdir().unwrap();
    let png = gen_plan(dir.path(), "9", "p");
    let out = run_in(dir.path(), &["extract", &png]);
    assert!(out.status.success());
    let ir = FloorPlanIr::from_json(&stdout_of(&out)).unwrap();
    assert!(ir.room_count() >= 3);
}

#[test]
fn baseline_ir_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_in(dir.path(), &["synth", "baseline", "--seed", "42"]);
    let b = run_in(dir.path(), &["synth", "baseline", "--seed", "42"]);
    let c = run_in(dir.path(), &["synth", "baseline", "--seed", "43"]);
    assert!(a.status.success());
    assert_eq!(stdout_of(&a), stdout_of(&b));
    assert_ne!(stdout_of(&a), stdout_of(&c));
}

#[test]
fn missing_manifest_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["batch", "nope.toml", "subs"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).starts_with("error:"));
}

#[test]
fn unknown_flag_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["score", "--bogus", "a", "b"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_flag_value_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["synth", "gen", "--rooms", "many"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--rooms"));
}

#[test]
fn bad_env_raster_size_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let png = gen_plan(dir.path(), "2", "p");
    let out = Command::new(env!("CARGO_BIN_EXE_planscore"))
        .args(["validate", &png])
        .env("PLANSCORE_RASTER_SIZE", "wide")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("PLANSCORE_RASTER_SIZE"));
}

#[test]
fn flag_shadows_broken_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let png = gen_plan(dir.path(), "2", "p");
    let out = Command::new(env!("CARGO_BIN_EXE_planscore"))
        .args(["validate", &png, "--raster-size", "1000"])
        .env("PLANSCORE_RASTER_SIZE", "wide")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
}

#[test]
fn unsatisfiable_generator_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["synth", "gen", "--rooms", "40", "--canvas", "100x100"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("no rule-compliant plan"));
}

#[test]
fn batch_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::create_dir_all(root.join("truth")).unwrap();
    let out = run_in(
        root,
        &["synth", "gen", "--seed", "1", "--png", "truth/apt1.png"],
    );
    assert!(out.status.success());

    fs::write(
        root.join("dataset.toml"),
        "version = 1\n\n[[apartments]]\nid = \"apt1\"\ntruth = \"truth/apt1.png\"\n",
    )
    .unwrap();
    fs::create_dir_all(root.join("subs/alice/apt1")).unwrap();
    fs::create_dir_all(root.join("subs/bob/apt1")).unwrap();
    fs::copy(root.join("truth/apt1.png"), root.join("subs/alice/apt1/0.png")).unwrap();

    let out = run_in(root, &["batch", "dataset.toml", "subs", "--out", "run.jsonl"]);
    assert!(out.status.success(), "batch failed: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("scored 1 submission(s), 1 missing"), "got:\n{text}");
    assert!(text.contains("missing: bob/apt1/0"), "got:\n{text}");

    let out = run_in(root, &["report", "run.jsonl"]);
    assert!(out.status.success());
    let table = stdout_of(&out);
    assert!(table.lines().next().unwrap().starts_with("submitter"));
    assert!(table.contains("alice"), "got:\n{table}");

    let out = run_in(root, &["report", "run.jsonl", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["submitter"], "alice");
    assert_eq!(rows[0]["samples"], 1);
    assert_eq!(rows[0]["mean"]["composite"], 1.0);
    assert_eq!(rows[0]["std_composite"], 0.0);
}

#[test]
fn unreadable_submission_scores_zero_with_failure_reason() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::create_dir_all(root.join("truth")).unwrap();
    let out = run_in(
        root,
        &["synth", "gen", "--seed", "1", "--png", "truth/apt1.png"],
    );
    assert!(out.status.success());
    fs::write(
        root.join("dataset.toml"),
        "version = 1\n\n[[apartments]]\nid = \"apt1\"\ntruth = \"truth/apt1.png\"\n",
    )
    .unwrap();
    fs::create_dir_all(root.join("subs/eve/apt1")).unwrap();
    fs::write(root.join("subs/eve/apt1/0.png"), b"not an image").unwrap();

    let out = run_in(root, &["batch", "dataset.toml", "subs", "--out", "run.jsonl"]);
    assert!(out.status.success(), "batch failed: {}", stderr_of(&out));

    let line = fs::read_to_string(root.join("run.jsonl")).unwrap();
    let record: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(record["submitter"], "eve");
    assert_eq!(record["breakdown"]["composite"], 0.0);
    assert!(!record["failure"].is_null());
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("PLANSCORE_TOLERANCE"));
    let out = run_in(dir.path(), &["--version"]);
    assert_eq!(out.status.code(), Some(0));
}
