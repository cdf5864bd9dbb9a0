//! Compiler from Essence Prime constraint models to DIMACS CNF, with a
//! built-in CDCL solver, solution decoding, enumeration and optimisation.

pub mod cli;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod instantiate;
pub mod pipeline;
pub mod satenc;
pub mod solve;
pub mod term;
pub mod transform;
pub mod undef;

pub use error::{Error, Pos, Result};
