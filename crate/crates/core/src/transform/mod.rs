//! Model-to-model passes between instantiation and encoding.

pub mod aggregate;
pub mod bounds;
pub mod cse;
pub mod decompose;
pub mod deletevars;
pub mod filter;
pub mod flatten;
pub mod simplify;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::term::{GroundModel, Term, VarId};

/// Restarts of the pass loop after a domain shrinks.
const MAX_RESTARTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CseMode {
    Off,
    Identical,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassOptions {
    pub cse: CseMode,
    pub ac_cse: bool,
    pub active_ac_cse: bool,
    pub deletevars: bool,
    pub aggregate: bool,
    pub reduce_domains: bool,
    pub reduce_domains_extend: bool,
    pub remove_redundant_vars: bool,
    pub aux_non_functional: bool,
    pub warn_undef: bool,
    pub deadline: Option<Instant>,
}

impl PassOptions {
    /// Settings of an optimisation level (0 to 3) and symmetry level (0 or 1).
    pub fn preset(opt: u8, sym: u8) -> PassOptions {
        PassOptions {
            cse: if opt >= 1 { CseMode::Active } else { CseMode::Off },
            ac_cse: opt >= 3,
            active_ac_cse: opt >= 3,
            deletevars: opt >= 1,
            aggregate: opt >= 2,
            reduce_domains: opt >= 2,
            reduce_domains_extend: opt >= 2,
            remove_redundant_vars: sym >= 1,
            aux_non_functional: sym >= 1,
            warn_undef: false,
            deadline: None,
        }
    }

    fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

impl Default for PassOptions {
    fn default() -> Self {
        PassOptions::preset(2, 1)
    }
}

/// Runs every enabled pass and flattens the result. Returns the
/// functional definitions of flattening auxiliaries.
pub fn run(m: &mut GroundModel, o: &PassOptions) -> Result<Vec<(VarId, Term)>> {
    crate::undef::remove_undefinedness(m, o.warn_undef);
    simplify::simplify_model(m);
    if o.ac_cse && !m.unsat {
        cse::eliminate_ac(m, o.active_ac_cse);
    }
    for _ in 0..MAX_RESTARTS {
        o.check_time()?;
        if m.unsat {
            break;
        }
        if o.deletevars {
            deletevars::delete_vars(m);
        }
        if o.aggregate {
            aggregate::aggregate(m);
        }
        decompose::decompose_globals(m);
        match o.cse {
            CseMode::Off => {}
            CseMode::Identical => cse::eliminate_common(m, false),
            CseMode::Active => cse::eliminate_common(m, true),
        }
        if o.deletevars {
            deletevars::delete_vars(m);
        }
        o.check_time()?;
        if o.reduce_domains && filter::filter_domains(m, o.reduce_domains_extend) && !m.unsat {
            simplify::simplify_model(m);
            continue;
        }
        break;
    }
    if m.unsat {
        m.constraints = vec![Term::Bool(false)];
        return Ok(Vec::new());
    }
    if o.remove_redundant_vars {
        deletevars::remove_redundant_vars(m);
    }
    o.check_time()?;
    let opts = flatten::FlattenOptions { cse: o.cse != CseMode::Off, aux_non_functional: o.aux_non_functional };
    Ok(flatten::flatten_model(m, opts))
}
