use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

fn vlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlc")).args(args).output().expect("vlc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_hash_app() {
    let o = vlc(&["run", path(&fixture("hash/App.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "5519");
}

#[test]
fn run_pinned_app() {
    let o = vlc(&["run", path(&fixture("hash/AppPinned.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1309");
}

#[test]
fn trace_prints_specialized_program() {
    let o = vlc(&["run", "--trace", path(&fixture("hash/AppPinned.vl"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("mkHash__Hash__1_0_0"), "{}", stderr(&o));
}

#[test]
fn check_prints_labels() {
    let o = vlc(&["check", path(&fixture("hash/App.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "main : {Dir=1.0.0, Hash=2.0.0}");
}

#[test]
fn matrix_inconsistency_exits_one() {
    let o = vlc(&["check", path(&fixture("matrix/Main.vl"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("0.15.0") && err.contains("0.16.0"), "{err}");
    assert!(err.starts_with("error: "), "{err}");
}

#[test]
fn matrix_unversion_runs() {
    let o = vlc(&["run", path(&fixture("matrix/MainUnversion.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "[3, 2, 1, 4]");
}

#[test]
fn explicit_module_path() {
    let tmp = tempfile::tempdir().unwrap();
    let entry = tmp.path().join("Main.vl");
    fs::write(&entry, "module Main where\nimport Hash\nmain = mkHash 1").unwrap();
    let o = vlc(&["--module-path", path(&fixture("hash")), "run", path(&entry)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "148");
}

#[test]
fn missing_file_exits_two() {
    let o = vlc(&["check", "/nonexistent/Main.vl"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn syntax_error_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let entry = tmp.path().join("Bad.vl");
    fs::write(&entry, "module Bad where\nmain = (1 +").unwrap();
    let o = vlc(&["check", path(&entry)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax error"), "{}", stderr(&o));
}

#[test]
fn build_writes_mangled_program() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vlc(&["build", path(&fixture("hash/App.vl")), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("App.vl")).unwrap();
    assert!(text.starts_with("module App where"), "{text}");
    assert!(text.contains("mkHash__Hash__2_0_0"), "{text}");
    assert!(!text.contains("ver ") && !text.contains("unversion"), "{text}");
}

#[test]
fn emit_smt2_writes_file() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vlc(&["check", "--emit", "smt2", "--out", tmp.path().to_str().unwrap(), path(&fixture("hash/App.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let smt = fs::read_to_string(tmp.path().join("App.main.smt2")).unwrap();
    assert!(smt.starts_with("(set-logic QF_LIA)"));
    assert!(smt.trim_end().ends_with("(get-model)"));
}

#[test]
fn emit_interface() {
    let o = vlc(&["check", "--emit", "interface", path(&fixture("matrix/MainUnversion.vl"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("Matrix.join : ") && out.contains("Matrix.vjoin : "), "{out}");
}

#[test]
fn core_eval_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("t.lvl");
    fs::write(&f, "let [x] = [5] in x").unwrap();
    let o = vlc(&["core-eval", path(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines, vec!["   0  let [x] = [5] in x", "   1  5", "value after 1 steps"]);
}

#[test]
fn core_eval_stuck_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("t.lvl");
    fs::write(&f, "3 4").unwrap();
    assert_eq!(vlc(&["core-eval", path(&f)]).status.code(), Some(1));
    fs::write(&f, "let [x] =").unwrap();
    assert_eq!(vlc(&["core-eval", path(&f)]).status.code(), Some(2));
}

#[test]
fn bench_csv() {
    let o = vlc(&["bench", "--mods", "2", "--vers", "1", "--reps", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "mods,vers,reps,mean_ms,stddev_ms");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,1,2,") && lines[2].starts_with("2,1,2,"), "{out}");
}
