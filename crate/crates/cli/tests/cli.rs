//! End-to-end runs of the `jcover` binary.

use std::path::Path;
use std::process::{Command, Output};

fn jcover(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jcover"))
        .args(args)
        .env("JCOVER_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cosets_of_six() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["cosets", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn class_polynomial_of_minus_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["classpoly", "-4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "HCLASS D -4\n0 -1728\n1 1\n");
}

#[test]
fn modpoly_two_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let first = jcover(dir.path(), &["modpoly", "2"]);
    let second = jcover(dir.path(), &["modpoly", "2"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("PHI N 2\n"));
    assert!(text.contains("\n0 0 -157464000000000\n"));
    assert!(text.contains("\n3 0 1\n"));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("phi_2.txt")).unwrap(),
        text
    );
}

#[test]
fn out_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h7.txt");
    let o = jcover(
        dir.path(),
        &["classpoly", "-7", "--out", path.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        "HCLASS D -7\n0 3375\n1 1\n"
    );
}

#[test]
fn isogeny_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["isogeny", "-3375", "16581375"]);
    assert_eq!(stdout(&o), "related N=2\n");
    let o = jcover(dir.path(), &["isogeny", "1728", "1728"]);
    assert_eq!(stdout(&o), "related N=1\n");
    let o = jcover(dir.path(), &["isogeny", "1", "2", "--max-n", "3"]);
    assert_eq!(stdout(&o), "unrelated up to 3\n");
}

#[test]
fn j_eval_at_i() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["j-eval", "i", "--digits", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("re 1728.0000000000\n"), "{text}");
}

#[test]
fn galois_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["galois-order", "6"]);
    assert_eq!(stdout(&o), "|PSL2(Z/6)| = 72\n");
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jcover(dir.path(), &["frobnicate"]).status.code(), Some(64));
    assert_eq!(
        jcover(dir.path(), &["cosets", "--bogus"]).status.code(),
        Some(64)
    );
    assert_eq!(
        jcover(dir.path(), &["classpoly", "-5"]).status.code(),
        Some(1)
    );
    assert_eq!(jcover(dir.path(), &["cosets", "0"]).status.code(), Some(1));
    assert_eq!(jcover(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn quick_verify_and_demo_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = jcover(dir.path(), &["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("8 of 8 checks passed\n"));
    let o = jcover(dir.path(), &["backforth", "--level", "2", "--demo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("6 of 6 twists extended"));
}
