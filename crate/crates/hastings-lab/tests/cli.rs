//! Exit-code and output-shape checks against the installed binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hastings-lab");

const D2: &str = r#"
[model]
kind = "discrete"
p = [1.0, 2.0]
gamma = [[0.5, 0.5], [0.5, 0.5]]

[rule]
name = "m"
param = "const"
value = 3.0

[run]
steps = 100
seed = 5
"#;

fn write_cfg(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_cfg(sub: &str, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2)); // missing --config
}

#[test]
fn missing_or_broken_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(
        run_cfg("verify", &missing, &[]).status.code(),
        Some(2)
    );
    let broken = write_cfg(&dir, "[model]\nkind = \"discrete\"");
    assert_eq!(run_cfg("run", &broken, &[]).status.code(), Some(2));
}

#[test]
fn verify_passes_then_fails_under_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, D2);
    let ok = run_cfg("verify", &cfg, &[]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    let report = String::from_utf8(ok.stdout).unwrap();
    assert!(report.starts_with("rule,metric,value,pass"));
    assert!(report.contains("balance_max_violation"));
    let bad = run_cfg("verify", &cfg, &["--fault-inject"]);
    assert_eq!(bad.status.code(), Some(1), "{bad:?}");
}

#[test]
fn run_emits_the_expected_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, D2);
    let out = run_cfg("run", &cfg, &["--steps", "20", "--discard", "5"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,state,accepted,duplication_type"));
    // 20 steps minus 5 discarded leaves rows 6..=20.
    let data: Vec<&str> = lines.by_ref().take_while(|l| *l != "metric,value").collect();
    assert_eq!(data.len(), 15);
    assert!(data[0].starts_with("6,"));
    let footer: Vec<&str> = lines.collect();
    assert!(footer.iter().any(|l| l.starts_with("acceptance_rate,")));
    assert!(footer.iter().any(|l| l.starts_with("freq_1,")));
}

#[test]
fn two_stage_run_reports_duplication_types() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        &dir,
        &D2.replace("name = \"m\"", "name = \"l\"")
            .replace("value = 3.0", "value = 1.0"),
    );
    let out = run_cfg("run", &cfg, &["--steps", "500"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(",typex\n"));
    // k = 1 is at or below every ratio: stage two never rejects.
    assert!(!text.contains(",typey\n"));
    assert!(!text.contains("typex_rate,n/a"));
}

#[test]
fn normal_model_run_works() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        &dir,
        r#"
        [model]
        kind = "normal"
        sigma = 2.0
        proposal = "random_walk"

        [run]
        steps = 200
        seed = 1
    "#,
    );
    let out = run_cfg("run", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mean,"));
    assert!(text.contains("variance,"));
}

#[test]
fn compare_and_map_pass_on_d2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, D2);
    let cmp = run_cfg("compare", &cfg, &[]);
    assert_eq!(cmp.status.code(), Some(0), "{cmp:?}");
    assert!(String::from_utf8(cmp.stdout).unwrap().contains("m[const=3],"));
    let map = run_cfg("map", &cfg, &[]);
    assert_eq!(map.status.code(), Some(0), "{map:?}");
    let text = String::from_utf8(map.stdout).unwrap();
    assert!(text.starts_with("x,y,transform,"));
    assert!(text.contains(",ok"));
    assert!(!text.contains("mismatch"));
}

#[test]
fn map_without_a_parameter_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, &D2.replace("name = \"m\"", "name = \"mh\""));
    assert_eq!(run_cfg("map", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn verify_rejects_a_continuous_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        &dir,
        r#"
        [model]
        kind = "normal"
        sigma = 1.0
        proposal = "random_walk"
    "#,
    );
    assert_eq!(run_cfg("verify", &cfg, &[]).status.code(), Some(2));
}
