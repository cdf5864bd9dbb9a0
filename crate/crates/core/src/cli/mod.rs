//! The `tailor` command: flags in, DIMACS, solutions and statistics out.
//!
//! Exit codes: 0 when tailoring (and solving, if requested) completed,
//! 1 for errors in the model or parameters, 2 for bad or unsupported
//! flags, 3 when a time or clause limit stopped the run or the solver
//! gave no answer, 4 for I/O and internal errors.

pub mod args;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::Error;
use crate::frontend::{parse_model, parse_param};
use crate::pipeline::{compile, Options};
use crate::satenc::SatOptions;
use crate::solve::{Backend, Builtin, External, Session, Solution, Status};
use crate::term::VarState;

pub use args::{parse_args, Config, HELP};
pub use output::{derive_paths, numbered, Paths};

use output::{render_symbols, Info, SolverInfo};

/// Separator between solutions printed to standard output.
pub const SEPARATOR: &str = "----------";

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Lex { .. } | Error::Syntax { .. } | Error::Type { .. } | Error::Instance { .. } => 1,
        Error::Usage(_) | Error::Unsupported(_) => 2,
        Error::Timeout | Error::ClauseLimit(_) => 3,
        Error::Io(_) | Error::Internal(_) => 4,
    }
}

/// An error with the input file it concerns, if any.
struct Failure {
    file: Option<PathBuf>,
    err: Error,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        Failure { file: None, err }
    }
}

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |err| Failure { file: Some(path.to_path_buf()), err }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Runs the command with `argv` (program name excluded) and returns the
/// exit code.
pub fn main_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "tailor: {e}");
            return exit_code(&e);
        }
    };
    if config.help {
        let _ = write!(out, "{HELP}");
        return 0;
    }
    match run(&config, start, out, err) {
        Ok(code) => code,
        Err(Failure { file, err: e }) => {
            match file {
                Some(f) => {
                    let _ = writeln!(err, "tailor: {}: {e}", f.display());
                }
                None => {
                    let _ = writeln!(err, "tailor: {e}");
                }
            }
            exit_code(&e)
        }
    }
}

fn run(c: &Config, start: Instant, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let paths = derive_paths(c)?;
    let model_path = c.model.as_deref().ok_or_else(|| Error::Usage("no model file given".into()))?;
    let src = fs::read_to_string(model_path).map_err(|e| io_err(model_path, e))?;
    let model = parse_model(&src).map_err(in_file(model_path))?;
    let params = match (&c.param, &c.params_inline) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            parse_param(&text).map_err(in_file(p))?
        }
        (None, Some(text)) => parse_param(text)?,
        (None, None) => Vec::new(),
    };

    let mut opts = Options { passes: c.passes(), sat: SatOptions { amo: c.amo, clause_limit: c.cnflimit } };
    if let Some(t) = c.timelimit {
        opts.passes.deadline = Some(start + Duration::from_secs_f64(t));
    }
    let compiled = match compile(&model, &params, &opts) {
        Ok(x) => x,
        Err(e @ (Error::ClauseLimit(_) | Error::Timeout)) => {
            if matches!(e, Error::ClauseLimit(_)) && paths.sat.exists() {
                fs::remove_file(&paths.sat).map_err(|x| io_err(&paths.sat, x))?;
            }
            let info = Info { tailor_time: start.elapsed(), ..Info::default() };
            write_file(&paths.info, &info.render())?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    for w in &compiled.model.warnings {
        let _ = writeln!(err, "tailor: warning: {w}");
    }

    let cnf = &compiled.encoding.cnf;
    let mut file = fs::File::create(&paths.sat).map_err(|e| io_err(&paths.sat, e))?;
    cnf.write_dimacs(&mut file).map_err(|e| io_err(&paths.sat, e))?;
    drop(file);
    let mut info = Info {
        tailor_time: start.elapsed(),
        sat_vars: Some(cnf.num_vars()),
        sat_clauses: Some(cnf.num_clauses()),
        removed_vars: Some(compiled.model.vars.iter().filter(|(_, v)| v.state == VarState::Removed).count()),
        solver: None,
    };
    if c.save_symbols {
        write_file(&paths.aux, &render_symbols(&compiled.model, Some(&compiled.encoding)))?;
    }
    if !c.run_solver {
        write_file(&paths.info, &info.render())?;
        return Ok(0);
    }

    let backend: Box<dyn Backend> = match &c.satsolver_bin {
        Some(bin) => {
            let mut scratch = paths.sat.clone().into_os_string();
            scratch.push(".call");
            Box::new(External::new(cnf, bin.clone(), c.solver_options.clone(), c.family.style(), scratch.into()))
        }
        None => Box::new(Builtin::new(cnf, c.seed)),
    };
    let mut session = Session::new(&compiled.model, &compiled.encoding, backend);
    let mut written = 0u64;
    let mut emit = |sol: &Solution| -> Result<(), Error> {
        written += 1;
        if c.to_null {
            return Ok(());
        }
        if c.to_stdout {
            if written > 1 {
                writeln!(out, "{SEPARATOR}").map_err(|e| Error::Io(e.to_string()))?;
            }
            return write!(out, "{}", sol.to_eprime()).map_err(|e| Error::Io(e.to_string()));
        }
        let path = if c.multiple_solutions() { numbered(&paths.solution, written) } else { paths.solution.clone() };
        write_file(&path, &sol.to_eprime())
    };

    let found = if compiled.encoding.objective.is_some() {
        if c.multiple_solutions() {
            let _ = writeln!(err, "tailor: warning: optimisation reports one optimal solution; solution count flags ignored");
        }
        match session.optimize(c.strategy)? {
            Some(sol) => {
                emit(&sol)?;
                1
            }
            None => 0,
        }
    } else {
        let limit = if c.all_solutions { None } else { Some(c.num_solutions.unwrap_or(1)) };
        session.enumerate(limit, &mut emit)?
    };
    let status = if found > 0 {
        Status::Sat
    } else if session.incomplete {
        Status::Unknown
    } else {
        Status::Unsat
    };
    if found == 0 {
        let msg = if status == Status::Unknown { "solver gave no answer" } else { "no solution found" };
        let _ = writeln!(err, "tailor: {msg}");
    }
    info.solver = Some(SolverInfo { nodes: session.nodes(), status, solutions: found, time: session.time });
    write_file(&paths.info, &info.render())?;
    Ok(if session.incomplete { 3 } else { 0 })
}
