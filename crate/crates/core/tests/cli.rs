//! Golden-file tests for the `simspec` binary. Numeric fields are compared
//! to 1e-9, everything else exactly.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_simspec");

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("SIMSPEC_MAX_ORDER").output().expect("spawn simspec")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn tokens(s: &str) -> Vec<String> {
    s.split(|c: char| c == ',' || c == '\n' || c == '[' || c == ']' || c == '{' || c == '}' || c == ':' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn assert_matches(actual: &str, name: &str) {
    let expected = std::fs::read_to_string(golden(name)).unwrap();
    let (a, e) = (tokens(actual), tokens(&expected));
    assert_eq!(a.len(), e.len(), "{name}: token count");
    for (x, y) in a.iter().zip(&e) {
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(p), Ok(q)) => assert!((p - q).abs() <= 1e-9, "{name}: {x} vs {y}"),
            _ => assert_eq!(x, y, "{name}"),
        }
    }
}

#[test]
fn subdivide_writes_levels_and_f_vectors() {
    let dir = tempdir("subdivide");
    let input = golden("triangle.json");
    stdout_of(&["subdivide", "--kind", "cd", "--n", "2", "--in", input.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    let read = |f: &str| std::fs::read_to_string(dir.join(f)).unwrap();
    assert_matches(&read("f_vectors.csv"), "subdivide_cd_n2_f_vectors.csv");
    assert_matches(&read("level_1.json"), "subdivide_cd_n2_level_1.json");
    assert!(dir.join("level_2.json").exists());
}

#[test]
fn spectrum() {
    let input = golden("subdivide_cd_n2_level_1.json");
    assert_matches(&stdout_of(&["spectrum", "--in", input.to_str().unwrap()]), "spectrum_cd1.csv");
}

#[test]
fn schreier_with_verification() {
    assert_matches(&stdout_of(&["schreier", "--d", "2", "--n", "2", "--verify-approx"]), "schreier_d2_n2.csv");
}

#[test]
fn predict_with_verification() {
    assert_matches(&stdout_of(&["predict", "--d", "2", "--n", "3", "--verify"]), "predict_d2_n3.json");
}

#[test]
fn limit() {
    assert_matches(&stdout_of(&["limit", "--d", "2", "--depth", "2"]), "limit_d2_depth2.csv");
}

#[test]
fn converge() {
    assert_matches(&stdout_of(&["converge", "--n", "3"]), "converge_cd_d2_n3.csv");
    assert_matches(&stdout_of(&["converge", "--kind", "esd", "--r", "2", "--n", "2"]), "converge_esd2_d2_n2.csv");
}

#[test]
fn fractal_with_verification() {
    assert_matches(&stdout_of(&["fractal", "--kind", "cd", "--d", "2", "--k", "1", "--verify"]), "fractal_cd_d2_k1.json");
}

#[test]
fn figures() {
    let dir = tempdir("figures");
    stdout_of(&["figures", "--d", "2", "--depth", "4", "--out", dir.to_str().unwrap()]);
    let steps = std::fs::read_to_string(dir.join("limit_steps.csv")).unwrap();
    let rows: Vec<&str> = steps.lines().skip(1).take(2).collect();
    assert_eq!(rows, ["3.000000000000,1/6,0,P", "5.000000000000,1/6,0,Q"]);
    let poly = std::fs::read_to_string(dir.join("decimation_polynomial.csv")).unwrap();
    assert!(poly.lines().count() == 202);
    assert!(!run(&["figures", "--d", "4", "--out", dir.to_str().unwrap()]).status.success());
}

#[test]
fn selftest_passes() {
    let out = stdout_of(&["selftest", "--seed", "7"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn failures_exit_nonzero() {
    assert!(!run(&["predict", "--d", "1", "--n", "2"]).status.success());
    assert!(!run(&["fractal", "--kind", "esd", "--d", "2", "--k", "1"]).status.success());
    let out = Command::new(BIN).args(["schreier", "--d", "2", "--n", "6"]).env("SIMSPEC_MAX_ORDER", "100").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds budget"));
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("simspec-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
