//! End-to-end runs of the `coxkit` binary: exit codes, stream routing and
//! byte-identical output across runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coxkit-bin-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn coxkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxkit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decided_answers_exit_zero() {
    let a3 = scratch("a3.txt", "3\n1 3 2\n3 1 3\n2 3 1\n");
    let a3 = a3.to_str().unwrap();
    let o = coxkit(&["reduce", a3, "2 1 2 3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("normal_form: 1 2 1 3"), "{}", stdout(&o));
    assert!(o.stderr.is_empty());

    let o = coxkit(&["conj", a3, "1", "3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: conjugate"));

    let o = coxkit(&["pc", a3, "1 3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = coxkit(&["classify", a3]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("schema: coxkit-report/1\n"));
}

#[test]
fn retraction_in_an_even_group() {
    let m = scratch("even.txt", "3\n1 4 inf\n4 1 2\ninf 2 1\n");
    let o = coxkit(&["retract", m.to_str().unwrap(), "1,2", "1 3 2 3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("image: 1 2"), "{}", stdout(&o));
}

#[test]
fn undecided_answers_exit_two() {
    let b2 = scratch("b2.txt", "2\n1 4\n4 1\n");
    let o = coxkit(&["separate", b2.to_str().unwrap(), "1", "2 1 2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: not_found"));
}

#[test]
fn bad_input_exits_one_on_stderr() {
    let bad = scratch("asym.txt", "2\n1 3\n4 1\n");
    let o = coxkit(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains("asym.txt"));

    let o = coxkit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));

    let a2 = scratch("a2.txt", "2\n1 3\n3 1\n");
    let o = coxkit(&["reduce", a2.to_str().unwrap(), "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_automorphism_is_rejected() {
    let a2 = scratch("a2b.txt", "2\n1 3\n3 1\n");
    let spec = scratch("notaut.txt", "1 -> 1\n2 -> 1\n\n1 -> 1\n2 -> 1\n");
    let o = coxkit(&["autcheck", a2.to_str().unwrap(), spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic() {
    let m = scratch("det.txt", "4\n1 4 inf 2\n4 1 6 inf\ninf 6 1 4\n2 inf 4 1\n");
    let spec = scratch("det-id.txt", "1 -> 1\n2 -> 2\n3 -> 3\n4 -> 4\n\n1 -> 1\n2 -> 2\n3 -> 3\n4 -> 4\n");
    let (m, spec) = (m.to_str().unwrap(), spec.to_str().unwrap());
    let runs: [&[&str]; 5] = [
        &["classify", m],
        &["conj", m, "1 2", "2 1", "--verify"],
        &["separate", m, "1", "3", "--verify"],
        &["autcheck", m, spec, "--radius", "4"],
        &["pc", m, "1 2 3 4"],
    ];
    for args in runs {
        let (a, b) = (coxkit(args), coxkit(args));
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
}
