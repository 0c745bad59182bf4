use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::tempdir;

fn kmlab(args: &[&str], dir: &Path) -> Output {
    let out = dir.join("out");
    let cache = dir.join("cache");
    Command::new(env!("CARGO_BIN_EXE_kmlab"))
        .args(["--out", out.to_str().unwrap(), "--cache", cache.to_str().unwrap()])
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn loss_gap_passes_and_reports_the_ratio() {
    let dir = tempdir().unwrap();
    let out = kmlab(&["experiment", "loss-gap"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let verdicts = fs::read_to_string(dir.path().join("out/verdicts.csv")).unwrap();
    assert!(verdicts.contains("16/15"));
    assert!(verdicts.contains("48/41"));
    assert!(dir.path().join("out/manifest.txt").exists());
    assert!(dir.path().join("out/loss-gap/range_actions.csv").exists());
}

#[test]
fn unknown_inputs_exit_nonzero_with_usage() {
    let dir = tempdir().unwrap();
    for args in [
        &["bogus-command"][..],
        &["--bogus-flag", "all"][..],
        &["experiment", "nonsense"][..],
        &["--eps", "not-a-rational", "experiment", "loss-gap"][..],
        &["--machine", "X", "table"][..],
    ] {
        let out = kmlab(args, dir.path());
        assert!(!out.status.success(), "{:?} should fail", args);
        let text = format!(
            "{}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!text.is_empty(), "{:?} should explain itself", args);
    }
}

#[test]
fn table_export_has_the_pinned_columns() {
    let dir = tempdir().unwrap();
    let out = kmlab(&["--budget-l", "6", "--budget-s", "256", "--horizon", "3", "table"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out/table.csv")).unwrap();
    assert!(csv.starts_with("x,km,k,bigM_num,bigM_den,budget_L,budget_S"));
    assert_eq!(csv.lines().count(), 1 + 15);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    let args = ["--budget-l", "8", "--budget-s", "512", "--horizon", "6", "experiment", "krels"];
    assert!(kmlab(&args, a.path()).status.success());
    assert!(kmlab(&args, b.path()).status.success());
    for file in ["out/verdicts.csv", "out/manifest.txt", "out/krels/table.csv"] {
        let left = fs::read(a.path().join(file)).unwrap();
        let right = fs::read(b.path().join(file)).unwrap();
        assert_eq!(left, right, "{} differs between reruns", file);
    }
}

#[test]
fn predict_traces_each_step() {
    let dir = tempdir().unwrap();
    let out = kmlab(
        &["--budget-l", "8", "--budget-s", "512", "--horizon", "8", "--seed", "3", "predict", "--env", "bern:1/2"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/predict.csv")).unwrap();
    assert!(csv.starts_with("t,context,b_p0,b_p1,mu_p0,mu_p1,action_b,action_mu,loss_b,loss_mu"));
    assert_eq!(csv.lines().count(), 1 + 8);
}
