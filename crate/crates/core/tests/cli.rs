use std::path::Path;
use std::process::{Command, Output};

fn catalia(args: &[&str]) -> Output {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_catalia"));
    cmd.current_dir(dir).arg("--transcripts").arg(dir.join("tests/transcripts")).args(args);
    if let Ok(exe) = std::env::var("CATALIA_Z3") {
        cmd.env("CATALIA_BACKEND", exe);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let o = catalia(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage"));
}

#[test]
fn missing_file_is_an_error() {
    let o = catalia(&["tests/corpus/missing.smt2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.smt2"));
}

#[test]
fn bad_flag_is_an_error() {
    assert_eq!(catalia(&["--ladder-cap", "many"]).status.code(), Some(1));
}

#[test]
fn sat_with_model() {
    let o = catalia(&["tests/corpus/plus_nat.smt2", "--print-model"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("sat"));
    assert!(out.contains("define-funs-rec"));
    assert!(out.contains("(define-fun PlusNat"));
    assert!(out.contains("(define-fun Lt"));
    assert!(!out.contains("adm!"));
}

#[test]
fn unsat_with_proof() {
    let o = catalia(&["tests/corpus/plus_nat_unsat.smt2", "--print-proof"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("unsat\n"));
    assert!(out.contains("; counterexample"));
}

#[test]
fn unknown_exits_two() {
    let o = catalia(&["tests/corpus/plus_nat.smt2", "--ladder-cap", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "unknown\n");
}

#[test]
fn reads_standard_input_and_dumps_counterexamples() {
    use std::io::Write;
    let dump = tempfile::tempdir().unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut child = Command::new(env!("CARGO_BIN_EXE_catalia"))
        .arg("--transcripts")
        .arg(dir.join("tests/transcripts"))
        .arg("--dump-cex")
        .arg(dump.path())
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let text = std::fs::read_to_string(dir.join("tests/corpus/even_odd_list.smt2")).unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "sat\n");
    let dumped: Vec<_> = std::fs::read_dir(dump.path()).unwrap().collect();
    assert!(!dumped.is_empty());
}

#[test]
fn benchmark_mode_prints_csv() {
    let o = catalia(&["--benchmark", "tests/corpus"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("instance,expected,verdict"));
}
