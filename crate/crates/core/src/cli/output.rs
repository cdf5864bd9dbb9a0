//! Output file names and the statistics and symbol files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::satenc::{Encoding, VarEnc};
use crate::solve::Status;
use crate::term::{GroundModel, VarKind, VarState};

use super::args::Config;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paths {
    pub sat: PathBuf,
    /// Single-solution file, or the stem of numbered ones.
    pub solution: PathBuf,
    pub info: PathBuf,
    pub aux: PathBuf,
}

fn append(base: &Path, ext: &str) -> PathBuf {
    let mut s: OsString = base.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// Outputs are named after the parameter file when there is one,
/// otherwise after the model file; explicit names take precedence.
pub fn derive_paths(c: &Config) -> Result<Paths> {
    let base = c.param.as_ref().or(c.model.as_ref()).ok_or_else(|| Error::Usage("no model file given".into()))?;
    let pick = |o: &Option<PathBuf>, ext: &str| o.clone().unwrap_or_else(|| append(base, ext));
    Ok(Paths {
        sat: pick(&c.out_sat, ".dimacs"),
        solution: pick(&c.out_solution, ".solution"),
        info: pick(&c.out_info, ".info"),
        aux: pick(&c.out_aux, ".aux"),
    })
}

/// `<stem>.000001` and so on, counting from 1.
pub fn numbered(stem: &Path, k: u64) -> PathBuf {
    append(stem, &format!(".{k:06}"))
}

/// Statistics of one run, written as `key:value` lines.
#[derive(Debug, Clone, Default)]
pub struct Info {
    pub tailor_time: Duration,
    pub sat_vars: Option<u32>,
    pub sat_clauses: Option<usize>,
    /// Find and auxiliary variables deleted as unconstrained.
    pub removed_vars: Option<usize>,
    /// Present when a solver ran.
    pub solver: Option<SolverInfo>,
}

#[derive(Debug, Clone)]
pub struct SolverInfo {
    pub nodes: u64,
    pub status: Status,
    pub solutions: u64,
    pub time: Duration,
}

impl Info {
    pub fn render(&self) -> String {
        let mut s = String::new();
        if let Some(sol) = &self.solver {
            let _ = writeln!(s, "SolverNodes:{}", sol.nodes);
            match sol.status {
                Status::Sat => s.push_str("SolverSatisfiable:1\n"),
                Status::Unsat => s.push_str("SolverSatisfiable:0\n"),
                Status::Unknown => s.push_str("SolverTimeOut:1\n"),
            }
            let _ = writeln!(s, "SolverSolutionsFound:{}", sol.solutions);
            let _ = writeln!(s, "SolverTime:{:.3}", sol.time.as_secs_f64());
        }
        let _ = writeln!(s, "TailorTime:{:.3}", self.tailor_time.as_secs_f64());
        if let Some(v) = self.sat_vars {
            let _ = writeln!(s, "SATVars:{v}");
        }
        if let Some(c) = self.sat_clauses {
            let _ = writeln!(s, "SATClauses:{c}");
        }
        if let Some(r) = self.removed_vars {
            let _ = writeln!(s, "RemovedVars:{r}");
        }
        s
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Symbol table: a version line, then one line per variable of the form
/// `name kind domain state encoding`.
pub fn render_symbols(m: &GroundModel, enc: Option<&Encoding>) -> String {
    let mut s = String::from("tailor-symbols 1\n");
    for (v, info) in m.vars.iter() {
        let kind = match info.kind {
            VarKind::Find => "find",
            VarKind::Aux => "aux",
        };
        let dom = if info.is_bool { "bool".to_string() } else { info.domain.to_string() };
        let state = match &info.state {
            VarState::Active => "active".to_string(),
            VarState::Fixed(x) => format!("fixed={x}"),
            VarState::Alias(w) => format!("alias={}", m.vars.get(*w).name),
            VarState::Removed => "removed".to_string(),
        };
        let code = match enc.and_then(|e| e.vars.get(v)).and_then(Option::as_ref) {
            None => "-".to_string(),
            Some(VarEnc::Const(c)) => format!("const={c}"),
            Some(VarEnc::Two { lo, hi, v }) => format!("two={lo},{hi}:{v}"),
            Some(VarEnc::Int(e)) => {
                let mut parts = vec![format!("values={}", join(&e.dom))];
                if let Some(d) = &e.direct {
                    parts.push(format!("direct={}", join(d)));
                }
                if let Some(o) = &e.order {
                    parts.push(format!("order={}", join(o)));
                }
                parts.join(":")
            }
        };
        let _ = writeln!(s, "{} {kind} {dom} {state} {code}", info.name);
    }
    s
}
