//! End-to-end checks of the command-line interface: exit codes, report
//! files, determinism, and fixture validation.

use std::process::{Command, Output};

fn ks_verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ks-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn local_suite_passes_with_exit_zero() {
    let out = ks_verify(&["verify", "local", "--p", "5", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("local/bad/p5k2"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn good_and_bad_flags_select_sides() {
    let out = ks_verify(&["verify", "local", "--p", "13", "--k", "3", "--good"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("local/good/p13k3"));
    assert!(!text.contains("local/bad/"));
}

#[test]
fn inadmissible_cover_fails_with_exit_one() {
    let out = ks_verify(&["verify", "cech", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ks_verify(&[
            "verify",
            "siegel",
            "--r",
            "1",
            "--g",
            "1",
            "--samples",
            "10",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn report_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ks_verify(&[
        "verify",
        "ks-pairing",
        "--r",
        "2",
        "--out",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // stdout JSON equals the file content.
    assert_eq!(stdout(&out), std::fs::read_to_string(&path).unwrap());
    let rendered = ks_verify(&["report", "--in", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(rendered.status.code(), Some(0));
    assert!(stdout(&rendered).contains("ks-pairing/exact/r2"));
}

#[test]
fn missing_fixture_path_is_exit_two() {
    let out = ks_verify(&["verify", "twisted", "--fixture", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read fixture"));
}

#[test]
fn invalid_fixture_names_the_precondition() {
    // mu = j has mu^2 = +1: not totally negative.
    let bad = r#"{
      "name": "bad-mu",
      "field": { "min_poly": ["0", "1"], "integral_basis": [["1"]] },
      "quaternion": {
        "a": ["1"], "b": ["1"],
        "order_basis": [
          ["1/2", "1/2", "0", "0"],
          ["1/2", "-1/2", "0", "0"],
          ["0", "0", "1/2", "1/2"],
          ["0", "0", "1/2", "-1/2"]
        ],
        "mu": ["0", "0", "1", "0"],
        "d_B": ["1"]
      }
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let out = ks_verify(&["verify", "twisted", "--fixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("totally negative"), "{}", stderr(&out));
}

#[test]
fn builtin_fixture_runs_from_name() {
    let out = ks_verify(&[
        "verify",
        "twisted",
        "--fixture",
        "split-q",
        "--samples",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("twisted/unimodular/split-q"));
}

#[test]
fn digits_env_variable_sets_default_precision() {
    let out = Command::new(env!("CARGO_BIN_EXE_ks-verify"))
        .args(["verify", "local", "--p", "5", "--k", "2"])
        .env("KS_VERIFY_DIGITS", "25")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("25 digits"));
}
