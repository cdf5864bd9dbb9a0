//! Exit codes and output files of the `tailor` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const MODEL: &str = "language ESSENCE' 1.0\nfind x, y : int(1..4)\nsuch that x + y = 5, x < y\n";
const UNSAT: &str = "language ESSENCE' 1.0\nfind x : int(1..3)\nsuch that x > 5\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailor")).current_dir(dir).args(args).output().unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.eprime"), MODEL).unwrap();
    fs::write(dir.path().join("u.eprime"), UNSAT).unwrap();
    fs::write(dir.path().join("bad.eprime"), "language ESSENCE' 1.0\nfind x : int(1..3\n").unwrap();
    dir
}

fn info(dir: &Path, name: &str) -> Vec<(String, String)> {
    fs::read_to_string(dir.join(name))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(':').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn key<'a>(info: &'a [(String, String)], k: &str) -> Option<&'a str> {
    info.iter().find(|(x, _)| x == k).map(|(_, v)| v.as_str())
}

#[test]
fn tailoring_only_writes_dimacs_and_statistics() {
    let dir = setup();
    let d = dir.path();
    let out = run(d, &["m.eprime"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(d.join("m.eprime.dimacs")).unwrap();
    let header = text.lines().find(|l| l.starts_with("p cnf")).unwrap();
    let i = info(d, "m.eprime.info");
    let fields: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(key(&i, "SATVars"), Some(fields[2]));
    assert_eq!(key(&i, "SATClauses"), Some(fields[3]));
    assert!(key(&i, "TailorTime").is_some());
    assert_eq!(key(&i, "RemovedVars"), Some("0"));
    assert!(key(&i, "SolverSatisfiable").is_none());
    assert!(!d.join("m.eprime.solution").exists());
    assert!(!d.join("m.eprime.aux").exists());
}

#[test]
fn solving_reports_satisfiability() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(run(d, &["m.eprime", "-run-solver", "-save-symbols"]).status.code(), Some(0));
    let i = info(d, "m.eprime.info");
    assert_eq!(key(&i, "SolverSatisfiable"), Some("1"));
    assert_eq!(key(&i, "SolverSolutionsFound"), Some("1"));
    assert!(d.join("m.eprime.aux").exists());
    let sol = fs::read_to_string(d.join("m.eprime.solution")).unwrap();
    assert!(sol == "letting x = 1\nletting y = 4\n" || sol == "letting x = 2\nletting y = 3\n", "{sol}");

    let out = run(d, &["u.eprime", "-run-solver"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(key(&info(d, "u.eprime.info"), "SolverSatisfiable"), Some("0"));
    assert!(!d.join("u.eprime.solution").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solution"));
}

#[test]
fn all_solutions_are_counted() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(run(d, &["m.eprime", "-all-solutions", "-solutions-to-null"]).status.code(), Some(0));
    assert_eq!(key(&info(d, "m.eprime.info"), "SolverSolutionsFound"), Some("2"));
    assert!(!d.join("m.eprime.solution.000001").exists());
    assert_eq!(run(d, &["m.eprime", "-num-solutions", "1"]).status.code(), Some(0));
    assert!(d.join("m.eprime.solution.000001").exists());
    assert!(!d.join("m.eprime.solution.000002").exists());
}

#[test]
fn unconstrained_variables_are_reported_removed() {
    let dir = setup();
    let d = dir.path();
    fs::write(d.join("free.eprime"), "language ESSENCE' 1.0\nfind x, y, z : int(1..3)\nsuch that x != y\n").unwrap();
    assert_eq!(run(d, &["free.eprime"]).status.code(), Some(0));
    assert_eq!(key(&info(d, "free.eprime.info"), "RemovedVars"), Some("1"));
    assert_eq!(run(d, &["free.eprime", "-S0"]).status.code(), Some(0));
    assert_eq!(key(&info(d, "free.eprime.info"), "RemovedVars"), Some("0"));
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = setup();
    let d = dir.path();
    let out = run(d, &["bad.eprime"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.eprime"));
    assert_eq!(run(d, &["m.eprime", "-no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(d, &["m.eprime", "-minion"]).status.code(), Some(2));
    assert_eq!(run(d, &["m.eprime", "-all-solutions", "-num-solutions", "2"]).status.code(), Some(2));
    assert_eq!(run(d, &["missing.eprime"]).status.code(), Some(4));

    assert_eq!(run(d, &["m.eprime"]).status.code(), Some(0));
    assert!(d.join("m.eprime.dimacs").exists());
    assert_eq!(run(d, &["m.eprime", "-cnflimit", "1"]).status.code(), Some(3));
    assert!(!d.join("m.eprime.dimacs").exists());
    assert!(d.join("m.eprime.info").exists());
}

#[test]
fn help_exits_cleanly() {
    let dir = setup();
    let out = run(dir.path(), &["-help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("-run-solver"));
}
