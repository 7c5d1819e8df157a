use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-epsilon")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const GAUSS_GRID: &str =
    r#"{"p": 5, "f": 1, "precision": 20, "kummer": [{"point": 0, "a": 1}], "dwork_c": 1, "grid": {"a": [1, 2, 3]}}"#;

#[test]
fn gauss_of_trivial_character_is_one() {
    let out = run(&["gauss", "--p", "5", "--f", "1", "--a", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "padic-epsilon/v1");
    let value = v["value"].as_str().unwrap();
    let (head, rest) = value.split_once(";digits=").unwrap();
    assert_eq!(head, "v=0/1");
    let digits = rest.rsplit_once(";prec=").unwrap().0;
    assert!(digits.starts_with("0:0:1") && digits.trim_start_matches("0:0:1").chars().all(|c| c == ';'), "{value}");
}

#[test]
fn gauss_reports_stickelberger_valuation() {
    let out = run(&["gauss", "--p", "7", "--f", "1", "--a", "2", "--precision", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["stickelberger"]["valuation"], 4);
    assert_eq!(v["gross_koblitz"]["pass"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["gauss", "--p", "4", "--f", "1", "--a", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#"{"p": 5, "kummer": [{"point": 0, "a": 1}], "colour": 3}"#);
    assert_eq!(run(&["verify", "--config", &bad]).status.code(), Some(2));
    let truncated = write_config(dir.path(), "cut.json", r#"{"p": 5, "kummer": ["#);
    assert_eq!(run(&["lfunc", "--config", &truncated]).status.code(), Some(2));
}

#[test]
fn verify_grid_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", GAUSS_GRID);
    let first = run(&["verify", "--config", &cfg, "--which", "pf", "--workers", "2"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&["verify", "--config", &cfg, "--which", "pf", "--workers", "2"]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(json(&first)["all_pass"], true);
}

#[test]
fn lastcor_on_ramified_module_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", GAUSS_GRID);
    assert_eq!(run(&["verify", "--config", &cfg, "--which", "lastcor"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k.json",
        r#"{"p": 3, "f": 1, "precision": 20, "kummer": [{"point": 0, "a": 1}, {"point": 1, "a": 1}]}"#,
    );
    let target = dir.path().join("l.tsv");
    let out = run(&["lfunc", "--config", &cfg, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.contains("degree\tcoefficient"));
    assert!(text.lines().any(|l| l.starts_with("# h0=0 h1=1 h2=0")), "{text}");
}
