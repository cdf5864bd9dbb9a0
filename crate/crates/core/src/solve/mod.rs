//! Running a SAT backend on an encoding and reading solutions back.

pub mod cdcl;
pub mod external;
mod optimize;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::eval::{reshape, Value};
use crate::satenc::{Cnf, Encoding, Lit, FALSE, TRUE};
use crate::term::{FindShape, GroundModel, VarId, VarState};

pub use cdcl::{Solver, Stats, Status};
pub use external::OutputStyle;
pub use optimize::Strategy;

/// An incremental SAT interface.
pub trait Backend {
    fn add_clause(&mut self, lits: &[Lit]);
    fn solve(&mut self, assumptions: &[Lit]) -> Result<Status>;
    /// Truth value of a literal in the last model.
    fn value(&self, l: Lit) -> bool;
    /// Search nodes so far, when the backend reports them.
    fn nodes(&self) -> u64;
}

pub struct Builtin(pub Solver);

impl Builtin {
    pub fn new(cnf: &Cnf, seed: u64) -> Builtin {
        Builtin(Solver::from_cnf(cnf, seed))
    }
}

impl Backend for Builtin {
    fn add_clause(&mut self, lits: &[Lit]) {
        self.0.add_clause(lits);
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<Status> {
        Ok(self.0.solve(assumptions))
    }

    fn value(&self, l: Lit) -> bool {
        l == TRUE || (l != FALSE && self.0.model_value(l))
    }

    fn nodes(&self) -> u64 {
        self.0.stats().decisions
    }
}

/// An external solver re-run on an amended file for every call.
pub struct External {
    pub bin: PathBuf,
    pub options: String,
    pub style: OutputStyle,
    /// Scratch DIMACS file for each call.
    pub path: PathBuf,
    cnf: Cnf,
    model: Vec<bool>,
}

impl External {
    pub fn new(cnf: &Cnf, bin: PathBuf, options: String, style: OutputStyle, path: PathBuf) -> External {
        External { bin, options, style, path, cnf: cnf.clone(), model: Vec::new() }
    }
}

impl Backend for External {
    fn add_clause(&mut self, lits: &[Lit]) {
        self.cnf.add(lits);
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<Status> {
        let mut cnf = self.cnf.clone();
        for &a in assumptions {
            cnf.unit(a);
        }
        let res = external::run(&self.bin, &self.options, self.style, &self.path, &cnf);
        let _ = std::fs::remove_file(&self.path);
        let (status, lits) = res?;
        if status == Status::Sat {
            self.model = vec![false; cnf.num_vars() as usize + 1];
            for l in lits {
                if let Some(b) = self.model.get_mut(l.unsigned_abs() as usize) {
                    *b = l > 0;
                }
            }
        }
        Ok(status)
    }

    fn value(&self, l: Lit) -> bool {
        if l == TRUE || l == FALSE {
            return l == TRUE;
        }
        let b = self.model.get(l.unsigned_abs() as usize).copied().unwrap_or(false);
        if l > 0 { b } else { !b }
    }

    fn nodes(&self) -> u64 {
        0
    }
}

/// Values of the find variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<(String, Value)>,
    pub objective: Option<i64>,
}

impl Solution {
    /// One `letting` per find variable.
    pub fn to_eprime(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.values {
            s.push_str(&format!("letting {name} = {}\n", v.to_solution_string()));
        }
        s
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Reads the find variables from a model of the encoding.
pub fn decode(m: &GroundModel, enc: &Encoding, val: &dyn Fn(Lit) -> bool) -> Result<Solution> {
    let err = std::cell::RefCell::new(None);
    let active = |v: VarId| match enc.value(v, val) {
        Ok(x) => x,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0
        }
    };
    let scalar = |v: VarId, active: &dyn Fn(VarId) -> i64| {
        let x = m.vars.value_of(v, active);
        if m.vars.get(v).is_bool { Value::Bool(x != 0) } else { Value::Int(x) }
    };
    let mut values = Vec::new();
    for f in &m.finds {
        let value = match &f.shape {
            FindShape::Scalar(v) => scalar(*v, &active),
            FindShape::Matrix { index, base, vars } => {
                let flat: Vec<Value> = vars.iter().map(|&v| scalar(v, &active)).collect();
                reshape(index, &flat, *base)
            }
        };
        values.push((f.name.clone(), value));
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(Solution { values, objective: enc.objective_value(val)? })
}

/// Active variables whose values distinguish solutions: the branching
/// list when present, otherwise every find variable.
pub fn distinctness_scope(m: &GroundModel) -> Vec<VarId> {
    let scope = if m.branching.is_empty() { m.find_var_ids() } else { m.branching.clone() };
    let mut out: Vec<VarId> = scope
        .into_iter()
        .map(|v| m.vars.resolve(v))
        .filter(|&v| m.vars.get(v).state == VarState::Active)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// A clause excluding the current values of `scope`, or `None` when the
/// scope is empty.
pub fn blocking_clause(enc: &Encoding, scope: &[VarId], val: &dyn Fn(Lit) -> bool) -> Result<Option<Vec<Lit>>> {
    let mut clause = Vec::new();
    for &v in scope {
        let Some(e) = &enc.vars[v] else { continue };
        let a = e.decode(val).map_err(|m| Error::Internal(format!("variable {v}: {m}")))?;
        if let Some(l) = e.eq_lit(a) {
            clause.push(-l);
        } else {
            // order literals only: x ≤ a−1 ∨ x > a
            clause.push(e.le_lit(a - 1).unwrap());
            clause.push(-e.le_lit(a).unwrap());
        }
    }
    clause.retain(|&l| l != FALSE);
    if clause.is_empty() {
        return Ok(None);
    }
    Ok(Some(clause))
}

/// A backend attached to an encoding, with call accounting.
pub struct Session<'a> {
    pub model: &'a GroundModel,
    pub enc: &'a Encoding,
    pub backend: Box<dyn Backend + 'a>,
    pub calls: u64,
    pub time: Duration,
    /// Set when a backend call could not decide satisfiability.
    pub incomplete: bool,
}

impl<'a> Session<'a> {
    pub fn new(model: &'a GroundModel, enc: &'a Encoding, backend: Box<dyn Backend + 'a>) -> Session<'a> {
        Session { model, enc, backend, calls: 0, time: Duration::ZERO, incomplete: false }
    }

    pub fn builtin(model: &'a GroundModel, enc: &'a Encoding, seed: u64) -> Session<'a> {
        Session::new(model, enc, Box::new(Builtin::new(&enc.cnf, seed)))
    }

    fn call(&mut self, assumptions: &[Lit]) -> Result<Status> {
        let start = Instant::now();
        self.calls += 1;
        let s = self.backend.solve(assumptions);
        self.time += start.elapsed();
        let s = s?;
        if s == Status::Unknown {
            self.incomplete = true;
        }
        Ok(s)
    }

    fn current(&self) -> Result<Solution> {
        let b = &self.backend;
        decode(self.model, self.enc, &|l| b.value(l))
    }

    pub fn nodes(&self) -> u64 {
        self.backend.nodes()
    }

    /// Finds up to `limit` solutions that differ on the distinctness
    /// scope, in discovery order, passing each to `emit`.
    pub fn enumerate(&mut self, limit: Option<u64>, emit: &mut dyn FnMut(&Solution) -> Result<()>) -> Result<u64> {
        let scope = distinctness_scope(self.model);
        let mut found = 0;
        while limit.is_none_or(|n| found < n) {
            if self.call(&[])? != Status::Sat {
                break;
            }
            let sol = self.current()?;
            found += 1;
            emit(&sol)?;
            let b = &self.backend;
            match blocking_clause(self.enc, &scope, &|l| b.value(l))? {
                Some(c) => self.backend.add_clause(&c),
                None => break,
            }
        }
        Ok(found)
    }

    /// First solution, if any.
    pub fn solve_once(&mut self) -> Result<Option<Solution>> {
        match self.call(&[])? {
            Status::Sat => self.current().map(Some),
            _ => Ok(None),
        }
    }
}
