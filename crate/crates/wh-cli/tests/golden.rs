//! Golden-file tests: every documented subcommand runs with fixed inputs and
//! seeds and must reproduce its stored stdout byte for byte. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p wh-cli`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_wh")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, args: &[&str]) {
    let output = run(args);
    assert!(
        output.status.success(),
        "{name}: exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    let path = golden_dir().join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, &output.stdout).unwrap();
        return;
    }
    let expected = fs::read(&path)
        .unwrap_or_else(|_| panic!("{name}: golden file missing, run with UPDATE_GOLDEN=1"));
    assert_eq!(
        output.stdout,
        expected,
        "{name}: stdout diverged from golden file\n--- got ---\n{}",
        String::from_utf8_lossy(&output.stdout)
    );
}

#[test]
fn golden_reduce() {
    check_golden("reduce", &["reduce", "abBa"]);
}

#[test]
fn golden_cyclic() {
    check_golden("cyclic", &["cyclic", "Bab"]);
}

#[test]
fn golden_count() {
    check_golden("count", &["count", "ab", "abab"]);
}

#[test]
fn golden_minimize() {
    check_golden("minimize", &["minimize", "abab"]);
}

#[test]
fn golden_minimize_json() {
    check_golden("minimize_json", &["minimize", "abab", "--json"]);
}

#[test]
fn golden_equiv() {
    check_golden("equiv", &["equiv", "ab", "a"]);
    check_golden("equiv_inequivalent", &["equiv", "abAB", "abab"]);
}

#[test]
fn golden_whgraph() {
    check_golden("whgraph", &["whgraph", "abAB"]);
    check_golden("whgraph_json", &["whgraph", "aa", "--json"]);
}

#[test]
fn golden_dist() {
    check_golden("dist", &["dist", "aa", "bb"]);
}

#[test]
fn golden_euler() {
    check_golden("euler", &["euler", "--m", "2"]);
    check_golden("euler_k3", &["euler", "--m", "2", "--k", "3"]);
}

#[test]
fn golden_stretch() {
    check_golden("stretch", &["stretch", "a->ab, b->b"]);
    check_golden("stretch_json", &["stretch", "a->ab, b->b", "--json"]);
}

#[test]
fn golden_ideal_step() {
    check_golden("ideal_step", &["ideal-step", "a->ab, b->b"]);
}

#[test]
fn golden_factorize() {
    check_golden("factorize", &["factorize", "a->abb, b->b"]);
}

#[test]
fn golden_current_uniform() {
    check_golden("current_uniform", &["current", "uniform", "--radius", "2"]);
}

#[test]
fn golden_current_rational() {
    check_golden("current_rational", &["current", "rational", "ab", "--radius", "2"]);
}

#[test]
fn golden_current_check() {
    let dir = std::env::temp_dir().join(format!("wh-golden-check-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let current = run(&["current", "rational", "abAB", "--radius", "3"]);
    let path = dir.join("current.json");
    fs::write(&path, &current.stdout).unwrap();
    check_golden("current_check", &["current", "check", path.to_str().unwrap()]);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn golden_limit_check() {
    check_golden(
        "limit_check",
        &["limit-check", "a->a", "--n", "200", "--samples", "10", "--seed", "7"],
    );
}

#[test]
fn golden_genericity() {
    check_golden(
        "genericity",
        &[
            "genericity",
            "--predicate",
            "strictly-minimal",
            "--lengths",
            "20,40",
            "--samples",
            "20",
            "--seed",
            "3",
        ],
    );
}

#[test]
fn golden_run_and_outputs() {
    let dir = std::env::temp_dir().join(format!("wh-golden-run-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let config = serde_json::json!({
        "k": 2,
        "sample_size": 30,
        "word_length": 80,
        "automorphisms": ["a->ab, b->b"],
        "apply_probability": 1.0,
        "epsilon": 0.05,
        "seed": 99
    });
    let config_path = dir.join("config.json");
    fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();

    let out_a = dir.join("out-a");
    let out_b = dir.join("out-b");
    check_golden(
        "run",
        &["run", "--config", config_path.to_str().unwrap(), "--out", out_a.to_str().unwrap()],
    );
    // identical config and seed give byte-identical artifacts
    let rerun = run(&["run", "--config", config_path.to_str().unwrap(), "--out", out_b.to_str().unwrap()]);
    assert!(rerun.status.success());
    for file in ["report.json", "features.csv", "clusters.svg"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} must be reproducible");
        assert!(!a.is_empty());
    }
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes_and_notices() {
    // empty input is a usage error
    let out = run(&["minimize", ""]);
    assert_eq!(out.status.code(), Some(2));

    // unknown flags and subcommands are rejected
    assert_eq!(run(&["minimize", "abab", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));

    // unreduced input is reduced with a notice on stderr, then processed
    let out = run(&["minimize", "abB"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("note:"));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("a"));

    // letters outside the rank are usage errors
    assert_eq!(run(&["minimize", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["minimize", "abc", "--k", "3"]).status.code(), Some(0));

    // domain errors exit 1
    assert_eq!(run(&["ideal-step", "perm(a->b, b->a)"]).status.code(), Some(1));
    assert_eq!(run(&["euler", "--m", "12", "--cap", "100"]).status.code(), Some(1));

    // malformed automorphism literal
    assert_eq!(run(&["stretch", "a->"]).status.code(), Some(2));
}
