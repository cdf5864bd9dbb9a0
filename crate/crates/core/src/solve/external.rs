//! External SAT solvers run as child processes on a DIMACS file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::error::{Error, Result};
use crate::satenc::{Cnf, Lit};

use super::cdcl::Status;

/// How the solver reports its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputStyle {
    /// `s SATISFIABLE` and `v` lines on standard output.
    Competition,
    /// A result file named as the last argument: `SAT` then literals.
    ResultFile,
}

/// Reads a solver answer in either output convention.
pub fn parse_output(text: &str) -> (Status, Vec<Lit>) {
    let mut status = Status::Unknown;
    let mut lits = Vec::new();
    let mut result_file = false;
    for line in text.lines().map(str::trim) {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("s") => {
                status = match words.next() {
                    Some("SATISFIABLE") => Status::Sat,
                    Some("UNSATISFIABLE") => Status::Unsat,
                    _ => Status::Unknown,
                }
            }
            Some("v") => lits.extend(words.filter_map(|w| w.parse::<Lit>().ok()).filter(|&l| l != 0)),
            Some("SAT") => {
                status = Status::Sat;
                result_file = true;
            }
            Some("UNSAT") => status = Status::Unsat,
            Some("INDET" | "UNKNOWN") => status = Status::Unknown,
            Some(w) if result_file && w.parse::<Lit>().is_ok() => {
                lits.extend(line.split_whitespace().filter_map(|w| w.parse::<Lit>().ok()).filter(|&l| l != 0))
            }
            _ => {}
        }
    }
    (status, lits)
}

/// Runs `bin [options] <cnf> [<result>]` on a clause set and returns the
/// answer. Options are split on whitespace.
pub fn run(bin: &Path, options: &str, style: OutputStyle, cnf_path: &Path, cnf: &Cnf) -> Result<(Status, Vec<Lit>)> {
    let mut file = fs::File::create(cnf_path)?;
    cnf.write_dimacs(&mut file)?;
    drop(file);
    let mut cmd = Command::new(bin);
    cmd.args(options.split_whitespace()).arg(cnf_path);
    let result_path: Option<PathBuf> = match style {
        OutputStyle::ResultFile => {
            let p = cnf_path.with_extension("result");
            cmd.arg(&p);
            Some(p)
        }
        OutputStyle::Competition => None,
    };
    let out = cmd.output().map_err(|e| Error::Io(format!("cannot run {}: {e}", bin.display())))?;
    let text = match &result_path {
        Some(p) => {
            let t = fs::read_to_string(p).unwrap_or_default();
            let _ = fs::remove_file(p);
            t
        }
        None => String::from_utf8_lossy(&out.stdout).into_owned(),
    };
    let (status, lits) = parse_output(&text);
    if status == Status::Unknown && !out.status.success() {
        eprintln!("{} exited with {}: {}", bin.display(), out.status, String::from_utf8_lossy(&out.stderr).trim());
    }
    Ok((status, lits))
}
