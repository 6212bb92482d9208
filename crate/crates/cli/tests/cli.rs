use std::path::{Path, PathBuf};
use std::process::Command;

use biasprobe_cli::{dispatch, EXIT_FINDINGS, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use serde_json::{json, Value};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn write_config(dir: &Path, body: Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&body).unwrap()).unwrap();
    path
}

fn fixture_config(dir: &Path, languages: &[&str]) -> PathBuf {
    write_config(
        dir,
        json!({
            "languages": languages,
            "templates": [fixtures().join("templates.json")],
            "lexicons": [fixtures().join("lexicon.json")],
            "seed": 7,
            "models": [{"mode": "mock", "model_id": "mono"}],
        }),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(
        std::iter::once("biasprobe").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn expand_writes_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path(), &["en", "he"]);
    let out = dir.path().join("samples.jsonl");
    let (code, stdout, stderr) = run(&[
        "expand",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2 * 2232);
    assert!(stderr.contains("4464"));
}

#[test]
fn expand_to_stdout_then_score_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path(), &["en"]);
    let (code, stdout, _) = run(&["expand", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(stdout.lines().count(), 2232);
    let samples = dir.path().join("s.jsonl");
    std::fs::write(&samples, &stdout).unwrap();

    let (code, scores, stderr) = run(&[
        "score",
        "--config",
        config.to_str().unwrap(),
        "--samples",
        samples.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let first: Value = serde_json::from_str(scores.lines().next().unwrap()).unwrap();
    assert!(first["p_positive"].as_f64().is_some());
    assert_eq!(scores.lines().count(), 2232);

    // the flag seed replaces the config seed
    let (_, reseeded, _) = run(&[
        "score",
        "--config",
        config.to_str().unwrap(),
        "--samples",
        samples.to_str().unwrap(),
        "--scorer",
        "mock",
        "--seed",
        "8",
    ]);
    assert_ne!(scores, reseeded);
}

#[test]
fn validate_reports_missing_variant() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value =
        serde_json::from_slice(&std::fs::read(fixtures().join("templates.json")).unwrap()).unwrap();
    let variants = doc["templates"][3]["variants"].as_array_mut().unwrap();
    variants.retain(|v| !(v["language"] == "he" && v["gender"] == "male"));
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_vec(&doc).unwrap()).unwrap();

    let (code, stdout, _) = run(&["validate", "--templates", broken.to_str().unwrap()]);
    assert_eq!(code, EXIT_FINDINGS);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["findings"].as_array().unwrap().len(), 1);

    let clean = fixtures().join("templates.json");
    let (code, _, _) = run(&["validate", "--templates", clean.to_str().unwrap(), "--languages", "en,es"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn unknown_subcommand_prints_usage() {
    let (code, stdout, stderr) = run(&["explode"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(stdout.is_empty());
    assert!(stderr.contains("Usage"));
}

#[test]
fn config_errors_are_runtime_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), json!({"languages": ["en"], "alpha": 1.5}));
    let (code, _, stderr) = run(&["expand", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(stderr.contains("malformed config"), "{stderr}");

    let config = write_config(
        dir.path(),
        json!({"languages": ["en"], "templates": ["t.json"], "lexicons": ["absent.json"]}),
    );
    std::fs::write(dir.path().join("t.json"), b"{\"templates\": []}").unwrap();
    let (code, _, stderr) = run(&["expand", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(stderr.contains("absent.json"), "{stderr}");
}

#[test]
fn phase_reports_round_trip_through_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path(), &["en", "es"]);
    let (code, stdout, stderr) = run(&["phase2", "--config", config.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let saved = dir.path().join("p2.json");
    std::fs::write(&saved, &stdout).unwrap();

    let out = dir.path().join("tables");
    let (code, _, stderr) = run(&[
        "report",
        "--input",
        saved.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert_eq!(std::fs::read_to_string(out.join("phase2.json")).unwrap(), stdout);
    assert!(out.join("phase2_race.csv").exists());
}

#[test]
fn phase3_requires_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path(), &["en"]);
    let (code, _, stderr) = run(&["phase3", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(stderr.contains("comparisons"));
}

#[test]
fn output_env_directs_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path(), &["en"]);
    let target = dir.path().join("env-out");
    let status = Command::new(env!("CARGO_BIN_EXE_biasprobe"))
        .args(["phase2", "--config", config.to_str().unwrap()])
        .env("BIASPROBE_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(status.stdout.is_empty());
    assert!(target.join("phase2.json").exists());
    assert!(target.join("v_distributions.csv").exists());

    // an explicit --out still wins over the environment
    let explicit = dir.path().join("explicit");
    let status = Command::new(env!("CARGO_BIN_EXE_biasprobe"))
        .args(["phase2", "--config", config.to_str().unwrap(), "--out", explicit.to_str().unwrap()])
        .env("BIASPROBE_OUT", &target)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(explicit.join("phase2.json").exists());
}

#[test]
fn binary_exit_codes() {
    let status = Command::new(env!("CARGO_BIN_EXE_biasprobe"))
        .arg("nope")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    let status = Command::new(env!("CARGO_BIN_EXE_biasprobe"))
        .args(["phase1", "--help"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("--alpha"));
}
