//! Lexing, parsing and printing of Essence Prime text.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{Domain, DomainKind, Expr, ExprKind, Model, ParamBindings, Statement};
pub use parser::{parse_domain, parse_expr, parse_model, parse_param};
