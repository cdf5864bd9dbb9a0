//! Model text to CNF in one call.

use crate::error::Result;
use crate::frontend::{parse_model, parse_param, Model, ParamBindings};
use crate::instantiate::instantiate;
use crate::satenc::{encode, Encoding, SatOptions};
use crate::solve::Session;
use crate::term::{GroundModel, Term, VarId};
use crate::transform::{self, PassOptions};

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub passes: PassOptions,
    pub sat: SatOptions,
}

impl Options {
    pub fn preset(opt: u8, sym: u8) -> Options {
        Options { passes: PassOptions::preset(opt, sym), sat: SatOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    /// The flat model the encoding was built from.
    pub model: GroundModel,
    pub encoding: Encoding,
    /// Functional definitions of flattening auxiliaries.
    pub aux_defs: Vec<(VarId, Term)>,
}

impl Compiled {
    pub fn session(&self, seed: u64) -> Session<'_> {
        Session::builtin(&self.model, &self.encoding, seed)
    }
}

pub fn compile(model: &Model, params: &ParamBindings, opts: &Options) -> Result<Compiled> {
    let mut m = instantiate(model, params)?;
    let aux_defs = transform::run(&mut m, &opts.passes)?;
    let encoding = encode(&m, opts.sat)?;
    Ok(Compiled { model: m, encoding, aux_defs })
}

/// Parses and compiles a model with optional parameter text.
pub fn compile_text(model: &str, params: Option<&str>, opts: &Options) -> Result<Compiled> {
    let model = parse_model(model)?;
    let params = match params {
        Some(p) => parse_param(p)?,
        None => Vec::new(),
    };
    compile(&model, &params, opts)
}
