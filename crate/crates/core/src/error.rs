use std::fmt;

use thiserror::Error;

/// Line/column of a token or AST node in the source text (both 1-based).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lex error at {pos}: {msg}")]
    Lex { pos: Pos, msg: String },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("type error at {pos}: {msg}")]
    Type { pos: Pos, msg: String },
    /// The instance is ill-formed: bad parameter values, failed `where`,
    /// undefined preamble statements, arithmetic overflow and so on.
    #[error("instance error at {pos}: {msg}")]
    Instance { pos: Pos, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("time limit reached during tailoring")]
    Timeout,
    #[error("clause limit of {0} reached")]
    ClauseLimit(u64),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }

    pub fn type_err(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Type { pos, msg: msg.into() }
    }

    pub fn instance(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Instance { pos, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
