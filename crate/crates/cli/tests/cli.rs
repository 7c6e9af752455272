use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aucert_core::proof::ProofObject;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn aucert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aucert")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sample() -> String {
    fixture("cons_succ.in").to_string_lossy().into_owned()
}

#[test]
fn certifies_sample() {
    let o = aucert(&[&sample()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("Proof of: "));
    assert!(out.ends_with("Checked: true\n"));
}

#[test]
fn output_is_deterministic() {
    let a = aucert(&[&sample(), "--json"]);
    let b = aucert(&[&sample(), "--json", "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn stats_and_quiet() {
    let o = aucert(&[&sample(), "--stats", "-q"]);
    assert_eq!(stdout(&o), "Checked: true\nsteps: 2\nlines: 82\nlgg: cons(z1,cons(z3,z4))\n");
}

#[test]
fn semantics_flag() {
    let o = aucert(&[&sample(), "-q", "--verify-semantics", "depth=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Semantics (depth 2): equivalent"));
    assert_eq!(aucert(&[&sample(), "--verify-semantics", "depth=9"]).status.code(), Some(2));
}

#[test]
fn emit_and_check_only() {
    let dir = tempfile::tempdir().unwrap();
    for (name, json) in [("p.proof", false), ("p.json", true)] {
        let target = dir.path().join(name);
        let target_s = target.to_string_lossy().into_owned();
        let mut args = vec![sample(), "-q".into(), "--emit-proof".into(), target_s.clone()];
        if json {
            args.push("--json".into());
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(aucert(&args).status.code(), Some(0));
        let text = fs::read_to_string(&target).unwrap();
        assert_eq!(text.trim_start().starts_with('{'), json);
        let o = aucert(&["--check-only", &target_s]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "Checked: true\n");
    }
}

#[test]
fn corrupted_proof_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("p.proof");
    let target_s = target.to_string_lossy().into_owned();
    aucert(&[&sample(), "-q", "--emit-proof", &target_s]);
    let mut po = ProofObject::from_text(&fs::read_to_string(&target).unwrap()).unwrap();
    po.lines[40].just.premises.reverse();
    po.lines[2].just.premises.swap(0, 1);
    fs::write(&target, po.to_text()).unwrap();
    let o = aucert(&["--check-only", &target_s]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "Checked: false\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("rejected line 3"));
}

#[test]
fn several_files_go_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("proofs");
    let java = fixture("java_like.in").to_string_lossy().into_owned();
    let o = aucert(&[&sample(), &java, "-q", "--emit-proof", &out.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.matches("Checked: true").count(), 2);
    assert!(s.find("cons_succ").unwrap() < s.find("java_like").unwrap());
    assert!(out.join("cons_succ.proof").exists());
    assert!(out.join("java_like.proof").exists());
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.in");
    fs::write(&bad, "variables: x\nsymbols: succ\nproblem: succ(x)=?plus(x,x)\n").unwrap();
    let o = aucert(&[&bad.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("plus"), "{err}");
    assert_eq!(aucert(&[&dir.path().join("missing.in").to_string_lossy()]).status.code(), Some(2));
    let junk = dir.path().join("junk.proof");
    fs::write(&junk, "not a proof\n").unwrap();
    assert_eq!(aucert(&["--check-only", &junk.to_string_lossy()]).status.code(), Some(2));
}
