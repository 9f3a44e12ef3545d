use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclogaudin"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strip_wall_time(text: &[u8]) -> String {
    String::from_utf8_lossy(text)
        .lines()
        .filter(|l| !l.contains("\"wall_time_s\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn surat_passes_on_regular_config() {
    let cfg = config("sl2_regular.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "surat"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(r["command"], "surat");
    assert_eq!(r["pass"], true);
    assert_eq!(r["details"]["samples"].as_array().unwrap().len(), 8);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn all_aggregates_sections() {
    let cfg = config("sl2_closed_form.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "all"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let names: Vec<&str> = r["sections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["command"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "info",
            "commute",
            "surat",
            "bethe-solve",
            "bethe-verify",
            "singular"
        ]
    );
    let root = &r["sections"][3]["details"]["solutions"][0]["roots"][0];
    assert!((root[0].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!(root[1].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn two_word_and_hyphenated_commands_agree() {
    let cfg = config("sl2_closed_form.json");
    let a = run(&["--config", cfg.to_str().unwrap(), "bethe", "solve"]);
    let b = run(&["--config", cfg.to_str().unwrap(), "bethe-solve"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip_wall_time(&a.stdout), strip_wall_time(&b.stdout));
}

#[test]
fn unknown_command_exits_2() {
    let cfg = config("sl2_regular.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
    let out = run(&["--config", cfg.to_str().unwrap(), "bethe", "dance"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"algebra": {"series": "A", "rank": 1},
            "automorphism": {"diagram_perm": [0], "tau_simple": [1], "T": 2},
            "points": [[1, 0], [-1, 0]], "lambda": [[1], [1]], "lambda0": [1]}"#,
    )
    .unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "info"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("z[1]"));

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(
        run(&["--config", path.to_str().unwrap(), "info"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--config", "/does/not/exist.json", "info"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failed_check_exits_1() {
    let text = std::fs::read_to_string(config("sl2_closed_form.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["tolerances"] = serde_json::json!({"eigen": -1.0});
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "bethe-verify"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn reports_are_reproducible() {
    let cfg = config("sl2_inner.json");
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            a.to_str().unwrap(),
            "all",
        ])
        .env("CYCLOGAUDIN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            b.to_str().unwrap(),
            "all",
        ])
        .env("CYCLOGAUDIN_THREADS", "3")
        .output()
        .unwrap();
    let ra = std::fs::read(&a).unwrap();
    let rb = std::fs::read(&b).unwrap();
    assert_eq!(strip_wall_time(&ra), strip_wall_time(&rb));
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["seed"], 11);
    assert!(v["wall_time_s"].is_number());
}

#[test]
fn bad_thread_count_exits_2() {
    let cfg = config("sl2_regular.json");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "info"])
        .env("CYCLOGAUDIN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_flags_add_payloads() {
    let cfg = config("sl2_closed_form.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--dump-algebra", "info"]);
    let r = report(&out);
    assert_eq!(r["details"]["dump"]["basis"].as_array().unwrap().len(), 3);
    assert!(!r["details"]["dump"]["structure_constants"]
        .as_array()
        .unwrap()
        .is_empty());

    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--dump-matrices",
        "commute",
    ]);
    let r = report(&out);
    let mats = r["details"]["matrices"].as_array().unwrap();
    assert!(!mats.is_empty());
    assert!(mats
        .iter()
        .all(|m| m["matrix"].as_array().unwrap().len() == m["basis"].as_array().unwrap().len()));
    let plain = report(&run(&["--config", cfg.to_str().unwrap(), "commute"]));
    assert!(plain["details"].get("matrices").is_none());
}

#[test]
fn chi_is_reported_not_asserted_for_singular() {
    let cfg = config("sl3_flip_twisted.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "singular"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["details"]["chi_zero"], false);
    assert!(r["checks"].as_array().unwrap().is_empty());
    assert!(!r["details"]["residuals"].as_array().unwrap().is_empty());
}
