//! End-to-end checks of the `refex` binary: output bytes, the exit-code
//! contract (0 success / 1 input error / 2 generation failure), and the
//! stdout-is-payload rule.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenes")
        .join(name)
}

fn refex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn generate_surface_form() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("dogs.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "incremental",
        "--format",
        "surface",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "the black dog\n");
    assert_eq!(stderr(&out), "");
}

#[test]
fn generate_spl_form() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("dogs.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "incremental",
        "--format",
        "spl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "(X / Dog\n    :determiner definite\n    :relations ((Y / Colour\n                    :domain X\n                    :range (Z / Black))))\n"
    );
}

#[test]
fn generate_pairs_is_the_default_format() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("cups.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "greedy",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "material=plastic\ncolour=red\nsize=large\ntype=cup\n"
    );
}

#[test]
fn generate_honours_a_contrast_override() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("dogs_basic.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "incremental",
        "--contrast",
        "Object3",
        "--format",
        "surface",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "the dog\n");
}

#[test]
fn empty_contrast_flag_means_no_distractors() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("twins.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "incremental",
        "--contrast",
        "",
        "--format",
        "surface",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "the dog\n");

    let out = refex(&[
        "generate",
        "--scene",
        scene("twins.scn").to_str().unwrap(),
        "--referent",
        "",
        "--algorithm",
        "incremental",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_referent_exits_one_and_names_the_id() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("dogs.scn").to_str().unwrap(),
        "--referent",
        "Nope",
        "--algorithm",
        "incremental",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "", "stdout carries only payload");
    assert!(
        stderr(&out).contains("Nope"),
        "diagnostic names the id: {}",
        stderr(&out)
    );
}

#[test]
fn generation_failure_exits_two() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("twins.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "full-brevity",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "failure\n");
}

#[test]
fn usage_errors_exit_one() {
    let out = refex(&[
        "generate",
        "--scene",
        scene("dogs.scn").to_str().unwrap(),
        "--referent",
        "Object1",
        "--algorithm",
        "magic",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "");
}

#[test]
fn validate_accepts_the_corpus() {
    for name in ["dogs.scn", "dogs_basic.scn", "cups.scn", "twins.scn"] {
        let out = refex(&["validate", scene(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert_eq!(stdout(&out), "");
    }
}

#[test]
fn validate_reports_violations_one_per_line() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("refex-broken-{}.scn", std::process::id()));
    std::fs::write(
        &path,
        "taxonomy colour\n  black\nentity Object1\n  colour blue\npreferred type colour\n",
    )
    .unwrap();
    let out = refex(&["validate", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "");
    let err = stderr(&out);
    assert!(err.contains("missing-type(Object1)"), "{err}");
    assert!(
        err.contains("unknown-value(Object1, colour, blue)"),
        "{err}"
    );
}

#[test]
fn validate_rejects_missing_files() {
    let out = refex(&["validate", "/no/such/scene.scn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_emits_deterministic_csv() {
    let args = [
        "bench",
        "--na",
        "3,6",
        "--nd",
        "4",
        "--algorithms",
        "incremental",
        "--seed",
        "1",
        "--trials",
        "5",
    ];
    let first = refex(&args);
    let second = refex(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "identical invocations give identical bytes"
    );
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,n_a,n_d,n_l,user_knows_calls,distinguishing_checks,candidates_enumerated,wall_ms,outcome"
    );
    assert_eq!(lines.count(), 10, "2 n_a values x 5 trials");
    assert!(text.ends_with('\n'));
}

#[test]
fn bench_with_zero_trials_prints_only_the_header() {
    let out = refex(&["bench", "--na", "4", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "algorithm,n_a,n_d,n_l,user_knows_calls,distinguishing_checks,candidates_enumerated,wall_ms,outcome\n"
    );
}

#[test]
fn bench_rejects_invalid_sweeps() {
    let out = refex(&["bench", "--na", "0", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = refex(&["bench", "--na", "3", "--family", "planted", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(1), "planted needs na >= 4");
}

#[test]
fn bench_wall_flag_changes_only_the_wall_column() {
    let out = refex(&[
        "bench",
        "--na",
        "4",
        "--trials",
        "2",
        "--algorithms",
        "greedy",
        "--wall",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert!(fields[7].parse::<f64>().is_ok());
    }
}
