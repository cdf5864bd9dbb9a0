//! Pratt parser for models and parameter files.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, TokKind, Token};
use crate::error::{Error, Pos, Result};

/// Minimum binding power that excludes the comma operator (precedence -20).
const NO_COMMA: i32 = -19;
const QUANT_PREC: i32 = -10;
const NEG_PREC: i32 = 15;
const NOT_PREC: i32 = 20;

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: tokenize(text)?, i: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.i + k).min(self.toks.len() - 1)]
    }

    fn pos(&self) -> Pos {
        self.peek().pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(&self.peek().kind, TokKind::Sym(x) if *x == s)
    }

    fn at_kw(&self, s: &str) -> bool {
        matches!(&self.peek().kind, TokKind::Keyword(x) if x == s)
    }

    fn at_word(&self, s: &str) -> bool {
        matches!(&self.peek().kind, TokKind::Ident(x) if x == s)
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokKind::Eof
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        Err(Error::syntax(self.pos(), format!("expected {wanted}, found '{}'", self.peek().text())))
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Result<()> {
        if self.at_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn expect_word(&mut self, s: &str) -> Result<()> {
        if self.at_word(s) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().kind {
            TokKind::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            TokKind::Keyword(k) => Err(Error::syntax(
                self.pos(),
                format!("reserved word '{k}' cannot be used as an identifier"),
            )),
            _ => self.unexpected("identifier"),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.eat_sym(",") {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn int_literal(&mut self) -> Result<i64> {
        match self.peek().kind {
            TokKind::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.unexpected("integer"),
        }
    }

    fn header(&mut self) -> Result<String> {
        self.expect_kw("language")?;
        let lang = self.ident()?;
        if lang != "ESSENCE" {
            return Err(Error::syntax(self.pos(), format!("unknown language '{lang}'")));
        }
        self.expect_sym("'")?;
        let major = self.int_literal()?;
        self.expect_sym(".")?;
        let minor = self.int_literal()?;
        Ok(format!("{major}.{minor}"))
    }

    // ---- expressions ----

    /// Comma-separated list of expressions, each excluding the comma operator.
    fn expr_list(&mut self) -> Result<Vec<Expr>> {
        let mut v = vec![self.expr(NO_COMMA)?];
        while self.eat_sym(",") {
            v.push(self.expr(NO_COMMA)?);
        }
        Ok(v)
    }

    fn binop(&self) -> Option<BinOp> {
        use BinOp::*;
        let TokKind::Sym(s) = self.peek().kind else { return None };
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "**" => Pow,
            "=" => Eq,
            "!=" => Neq,
            "<" => Lt,
            "<=" => Leq,
            ">" => Gt,
            ">=" => Geq,
            "<lex" => LexLt,
            "<=lex" => LexLeq,
            ">lex" => LexGt,
            ">=lex" => LexGeq,
            "/\\" => And,
            "\\/" => Or,
            "->" => Imp,
            "<->" => Iff,
            _ => return None,
        })
    }

    fn expr(&mut self, min: i32) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            if self.at_kw("in") {
                if 0 < min {
                    break;
                }
                let pos = self.bump().pos;
                let dom = self.domain(0)?;
                lhs = Expr::new(ExprKind::In(Box::new(lhs), Box::new(dom)), pos);
                continue;
            }
            let Some(op) = self.binop() else { break };
            let p = op.precedence();
            if p < min {
                break;
            }
            let pos = self.bump().pos;
            let rhs = self.expr(if op.right_assoc() { p } else { p + 1 })?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let e = match self.peek().kind.clone() {
            TokKind::Int(v) => {
                self.bump();
                Expr::new(ExprKind::Int(v), pos)
            }
            TokKind::Keyword(k) if k == "true" || k == "false" => {
                self.bump();
                Expr::new(ExprKind::Bool(k == "true"), pos)
            }
            TokKind::Keyword(k) if k == "sum" && matches!(self.peek_at(1).kind, TokKind::Sym("(")) => {
                self.bump();
                self.call(Func::Sum, pos)?
            }
            TokKind::Keyword(k) if matches!(k.as_str(), "forAll" | "forall" | "exists" | "sum") => {
                self.bump();
                let kind = match k.as_str() {
                    "exists" => QuantKind::Exists,
                    "sum" => QuantKind::Sum,
                    _ => QuantKind::ForAll,
                };
                let vars = self.ident_list()?;
                self.expect_sym(":")?;
                let domain = self.domain(0)?;
                self.expect_sym(".")?;
                let body = self.expr(QUANT_PREC)?;
                return Ok(Expr::new(
                    ExprKind::Quant { kind, vars, domain: Box::new(domain), body: Box::new(body) },
                    pos,
                ));
            }
            TokKind::Sym("-") => {
                self.bump();
                let a = self.expr(NEG_PREC)?;
                return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(a)), pos));
            }
            TokKind::Sym("!") => {
                self.bump();
                let a = self.expr(NOT_PREC)?;
                return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(a)), pos));
            }
            TokKind::Sym("|") => {
                self.bump();
                let a = self.expr(NO_COMMA)?;
                self.expect_sym("|")?;
                Expr::new(ExprKind::Unary(UnOp::Abs, Box::new(a)), pos)
            }
            TokKind::Sym("(") => {
                self.bump();
                let mut items = self.expr_list()?;
                self.expect_sym(")")?;
                let first = items.remove(0);
                items.into_iter().fold(first, |acc, e| Expr::binary(BinOp::And, acc, e))
            }
            TokKind::Sym("[") => self.matrix()?,
            TokKind::Ident(name) => {
                self.bump();
                match Func::from_name(&name) {
                    Some(f) if self.at_sym("(") => self.call(f, pos)?,
                    _ => Expr::new(ExprKind::Ident(name), pos),
                }
            }
            TokKind::Keyword(k) => {
                return Err(Error::syntax(pos, format!("unexpected reserved word '{k}'")));
            }
            _ => return self.unexpected("expression"),
        };
        self.postfix(e)
    }

    fn call(&mut self, f: Func, pos: Pos) -> Result<Expr> {
        self.expect_sym("(")?;
        let args = if self.at_sym(")") { Vec::new() } else { self.expr_list()? };
        self.expect_sym(")")?;
        Ok(Expr::new(ExprKind::Call(f, args), pos))
    }

    fn postfix(&mut self, mut e: Expr) -> Result<Expr> {
        while self.at_sym("[") {
            let pos = self.bump().pos;
            let mut subs: Vec<Option<Expr>> = Vec::new();
            loop {
                if self.eat_sym("..") {
                    subs.push(None);
                } else {
                    subs.push(Some(self.expr(NO_COMMA)?));
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("]")?;
            let kind = if subs.iter().all(Option::is_some) {
                ExprKind::Index(Box::new(e), subs.into_iter().flatten().collect())
            } else {
                ExprKind::Slice(Box::new(e), subs)
            };
            e = Expr::new(kind, pos);
        }
        Ok(e)
    }

    fn index_domain(&mut self) -> Result<Option<Box<Domain>>> {
        if self.eat_sym(";") {
            Ok(Some(Box::new(self.domain(0)?)))
        } else {
            Ok(None)
        }
    }

    fn at_generator(&self) -> bool {
        let mut k = 0;
        loop {
            if !matches!(self.peek_at(k).kind, TokKind::Ident(_)) {
                return false;
            }
            match self.peek_at(k + 1).kind {
                TokKind::Sym(":") => return true,
                TokKind::Sym(",") => k += 2,
                _ => return false,
            }
        }
    }

    fn matrix(&mut self) -> Result<Expr> {
        let pos = self.pos();
        self.expect_sym("[")?;
        if self.eat_sym("]") {
            return Ok(Expr::new(ExprKind::Matrix { elems: Vec::new(), index: None }, pos));
        }
        if self.at_sym(";") {
            let index = self.index_domain()?;
            self.expect_sym("]")?;
            return Ok(Expr::new(ExprKind::Matrix { elems: Vec::new(), index }, pos));
        }
        let first = self.expr(NO_COMMA)?;
        if self.eat_sym("|") {
            let mut generators = Vec::new();
            let mut conditions = Vec::new();
            loop {
                if self.at_generator() {
                    let vars = self.ident_list()?;
                    self.expect_sym(":")?;
                    let domain = self.domain(0)?;
                    generators.push(Generator { vars, domain });
                } else {
                    conditions.push(self.expr(NO_COMMA)?);
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
            if generators.is_empty() {
                return Err(Error::syntax(pos, "comprehension without a generator"));
            }
            let index = self.index_domain()?;
            self.expect_sym("]")?;
            return Ok(Expr::new(
                ExprKind::Comprehension { body: Box::new(first), generators, conditions, index },
                pos,
            ));
        }
        let mut elems = vec![first];
        while self.eat_sym(",") {
            elems.push(self.expr(NO_COMMA)?);
        }
        let index = self.index_domain()?;
        self.expect_sym("]")?;
        Ok(Expr::new(ExprKind::Matrix { elems, index }, pos))
    }

    // ---- domains ----

    fn domain_op(&self) -> Option<DomainOp> {
        if self.at_kw("union") {
            Some(DomainOp::Union)
        } else if self.at_kw("intersect") {
            Some(DomainOp::Intersect)
        } else if self.at_sym("-") {
            Some(DomainOp::Minus)
        } else {
            None
        }
    }

    fn domain(&mut self, min: i32) -> Result<Domain> {
        let mut lhs = self.domain_primary()?;
        while let Some(op) = self.domain_op() {
            let p = op.precedence();
            if p < min {
                break;
            }
            let pos = self.bump().pos;
            let rhs = self.domain(p + 1)?;
            lhs = Domain::new(DomainKind::Op(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn domain_primary(&mut self) -> Result<Domain> {
        let pos = self.pos();
        if self.at_kw("bool") {
            self.bump();
            return Ok(Domain::new(DomainKind::Bool, pos));
        }
        if self.at_kw("int") {
            self.bump();
            let mut items = Vec::new();
            if self.eat_sym("(") {
                loop {
                    items.push(self.range_item()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
            }
            return Ok(Domain::new(DomainKind::Int(items), pos));
        }
        if self.eat_sym("(") {
            let d = self.domain(0)?;
            self.expect_sym(")")?;
            return Ok(d);
        }
        if self.at_word("matrix") {
            self.bump();
            self.expect_word("indexed")?;
            self.expect_word("by")?;
            self.expect_sym("[")?;
            let mut index = vec![self.domain(0)?];
            while self.eat_sym(",") {
                index.push(self.domain(0)?);
            }
            self.expect_sym("]")?;
            self.expect_word("of")?;
            let base = self.domain(0)?;
            return Ok(Domain::new(DomainKind::Matrix { index, base: Box::new(base) }, pos));
        }
        if self.at_word("toSet") && matches!(self.peek_at(1).kind, TokKind::Sym("(")) {
            self.bump();
            self.expect_sym("(")?;
            let e = self.expr(NO_COMMA)?;
            self.expect_sym(")")?;
            return Ok(Domain::new(DomainKind::ToSet(Box::new(e)), pos));
        }
        let name = self.ident()?;
        Ok(Domain::new(DomainKind::Named(name), pos))
    }

    fn range_item(&mut self) -> Result<RangeItem> {
        if self.eat_sym("..") {
            return Ok(RangeItem::Range(None, Some(self.expr(NO_COMMA)?)));
        }
        let lo = self.expr(NO_COMMA)?;
        if !self.eat_sym("..") {
            return Ok(RangeItem::Single(lo));
        }
        if self.at_sym(",") || self.at_sym(")") {
            Ok(RangeItem::Range(Some(lo), None))
        } else {
            Ok(RangeItem::Range(Some(lo), Some(self.expr(NO_COMMA)?)))
        }
    }

    // ---- statements ----

    fn at_statement_start(&self) -> bool {
        self.at_eof()
            || ["given", "letting", "find", "where", "such"].iter().any(|k| self.at_kw(k))
            || (["minimising", "maximising", "heuristic"].iter().any(|w| self.at_word(w))
                && !matches!(self.peek_at(1).kind, TokKind::Sym(_)))
            || (self.at_word("branching")
                && matches!(&self.peek_at(1).kind, TokKind::Ident(w) if w == "on"))
    }

    fn letting(&mut self, pos: Pos) -> Result<Statement> {
        let name = self.ident()?;
        if self.at_word("be") {
            self.bump();
            if self.at_word("domain") {
                self.bump();
                let domain = self.domain(0)?;
                return Ok(Statement::LettingDomain { name, domain, pos });
            }
            let value = self.expr(NO_COMMA)?;
            return Ok(Statement::Letting { name, domain: None, value, pos });
        }
        let domain = if self.eat_sym(":") { Some(self.domain(0)?) } else { None };
        if !self.eat_sym("=") {
            self.expect_word("be")?;
        }
        let value = self.expr(NO_COMMA)?;
        Ok(Statement::Letting { name, domain, value, pos })
    }

    fn statement(&mut self) -> Result<Statement> {
        let pos = self.pos();
        if self.at_kw("given") {
            self.bump();
            let names = self.ident_list()?;
            self.expect_sym(":")?;
            let domain = self.domain(0)?;
            return Ok(Statement::Given { names, domain, pos });
        }
        if self.at_kw("letting") {
            self.bump();
            return self.letting(pos);
        }
        if self.at_kw("find") {
            self.bump();
            let names = self.ident_list()?;
            self.expect_sym(":")?;
            let domain = self.domain(0)?;
            return Ok(Statement::Find { names, domain, pos });
        }
        if self.at_kw("where") {
            self.bump();
            let conditions = self.expr_list()?;
            return Ok(Statement::Where { conditions, pos });
        }
        if self.at_kw("such") {
            self.bump();
            self.expect_kw("that")?;
            let constraints = if self.at_statement_start() { Vec::new() } else { self.expr_list()? };
            return Ok(Statement::SuchThat { constraints, pos });
        }
        if self.at_word("minimising") || self.at_word("maximising") {
            let dir = if self.at_word("minimising") {
                ObjectiveDir::Minimising
            } else {
                ObjectiveDir::Maximising
            };
            self.bump();
            let expr = self.expr(NO_COMMA)?;
            return Ok(Statement::Objective { dir, expr, pos });
        }
        if self.at_word("branching") {
            self.bump();
            self.expect_word("on")?;
            let list = self.expr(NO_COMMA)?;
            return Ok(Statement::BranchingOn { list, pos });
        }
        if self.at_word("heuristic") {
            self.bump();
            let name = self.ident()?;
            let heuristic = match name.as_str() {
                "static" => Heuristic::Static,
                "sdf" => Heuristic::Sdf,
                "conflict" => Heuristic::Conflict,
                "srf" => Heuristic::Srf,
                _ => return Err(Error::syntax(pos, format!("unknown heuristic '{name}'"))),
            };
            return Ok(Statement::Heuristic { heuristic, pos });
        }
        self.unexpected("statement")
    }
}

fn declared_names(s: &Statement) -> Vec<&str> {
    match s {
        Statement::Given { names, .. } | Statement::Find { names, .. } => {
            names.iter().map(String::as_str).collect()
        }
        Statement::Letting { name, .. } | Statement::LettingDomain { name, .. } => vec![name],
        _ => Vec::new(),
    }
}

fn check_model(statements: &[Statement]) -> Result<()> {
    let mut names = HashSet::new();
    let mut objective_seen = false;
    for s in statements {
        let decl = declared_names(s);
        let pos = match s {
            Statement::Given { pos, .. }
            | Statement::Letting { pos, .. }
            | Statement::LettingDomain { pos, .. }
            | Statement::Find { pos, .. }
            | Statement::Where { pos, .. }
            | Statement::Objective { pos, .. }
            | Statement::BranchingOn { pos, .. }
            | Statement::Heuristic { pos, .. }
            | Statement::SuchThat { pos, .. } => *pos,
        };
        if !decl.is_empty() && objective_seen {
            return Err(Error::syntax(pos, "declarations must precede the objective"));
        }
        for n in decl {
            if !names.insert(n.to_string()) {
                return Err(Error::syntax(pos, format!("'{n}' is declared more than once")));
            }
        }
        if let Statement::Objective { .. } = s {
            if objective_seen {
                return Err(Error::syntax(pos, "only one objective is allowed"));
            }
            objective_seen = true;
        }
    }
    Ok(())
}

pub fn parse_model(text: &str) -> Result<Model> {
    let mut p = Parser::new(text)?;
    let version = p.header()?;
    let mut statements = Vec::new();
    while !p.at_eof() {
        statements.push(p.statement()?);
    }
    check_model(&statements)?;
    Ok(Model { version, statements })
}

/// Parses a parameter file (or `-params` string): value lettings only,
/// with an optional language header.
pub fn parse_param(text: &str) -> Result<ParamBindings> {
    let mut p = Parser::new(text)?;
    if p.at_kw("language") {
        p.header()?;
    }
    let mut out: ParamBindings = Vec::new();
    while !p.at_eof() {
        let pos = p.pos();
        if !p.at_kw("letting") {
            return Err(Error::syntax(pos, "parameter files may only contain letting statements"));
        }
        p.bump();
        match p.letting(pos)? {
            Statement::Letting { name, value, .. } => {
                if out.iter().any(|(n, _)| *n == name) {
                    return Err(Error::syntax(pos, format!("'{name}' is given more than once")));
                }
                out.push((name, value));
            }
            _ => return Err(Error::syntax(pos, "parameter files may only contain value lettings")),
        }
    }
    Ok(out)
}

/// Parses a single expression (commas at the top level become conjunctions).
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let mut items = p.expr_list()?;
    if !p.at_eof() {
        return p.unexpected("end of expression");
    }
    let first = items.remove(0);
    Ok(items.into_iter().fold(first, |acc, e| Expr::binary(BinOp::And, acc, e)))
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let mut p = Parser::new(text)?;
    let d = p.domain(0)?;
    if !p.at_eof() {
        return p.unexpected("end of domain");
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::binary(op, a, b)
    }

    fn i(v: i64) -> Expr {
        Expr::int(v)
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(
            parse_expr("2**3**4").unwrap(),
            bin(BinOp::Pow, i(2), bin(BinOp::Pow, i(3), i(4)))
        );
    }

    #[test]
    fn every_operator_pair_nests_by_precedence() {
        // (symbol, precedence); only ** is right-associative
        let table: [(&str, i32); 20] = [
            ("**", 18),
            ("*", 10),
            ("/", 10),
            ("%", 10),
            ("+", 1),
            ("-", 1),
            ("=", 0),
            ("!=", 0),
            ("<=", 0),
            ("<", 0),
            (">=", 0),
            (">", 0),
            ("<=lex", 0),
            ("<lex", 0),
            (">=lex", 0),
            (">lex", 0),
            ("/\\", -1),
            ("\\/", -2),
            ("->", -4),
            ("<->", -4),
        ];
        for (s1, p1) in table {
            for (s2, p2) in table {
                let e = parse_expr(&format!("a {s1} b {s2} c")).unwrap();
                let ExprKind::Binary(_, l, r) = &e.kind else { panic!("{s1} {s2}") };
                let left_grouped = p1 > p2 || (p1 == p2 && !(s1 == "**" && s2 == "**"));
                if left_grouped {
                    assert!(matches!(l.kind, ExprKind::Binary(..)) && matches!(r.kind, ExprKind::Ident(_)), "a {s1} b {s2} c");
                } else {
                    assert!(matches!(l.kind, ExprKind::Ident(_)) && matches!(r.kind, ExprKind::Binary(..)), "a {s1} b {s2} c");
                }
            }
        }
    }

    #[test]
    fn unary_minus_below_power() {
        let e = parse_expr("-2**2**3").unwrap();
        let expect = Expr::unary(UnOp::Neg, bin(BinOp::Pow, i(2), bin(BinOp::Pow, i(2), i(3))));
        assert_eq!(e, expect);
    }

    #[test]
    fn division_is_left_associative() {
        assert_eq!(
            parse_expr("2/3/4").unwrap(),
            bin(BinOp::Div, bin(BinOp::Div, i(2), i(3)), i(4))
        );
    }

    #[test]
    fn mixed_bool_int_expression() {
        let e = parse_expr("1+2-3+true-(x<y)=5").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Eq, _, _)));
    }

    #[test]
    fn abs_and_comprehension_bars() {
        let e = parse_expr("[ |x| | i : int(1..3), i != 2 ]").unwrap();
        let ExprKind::Comprehension { body, generators, conditions, .. } = e.kind else {
            panic!()
        };
        assert!(matches!(body.kind, ExprKind::Unary(UnOp::Abs, _)));
        assert_eq!(generators.len(), 1);
        assert_eq!(conditions.len(), 1);
    }

    #[test]
    fn slices_and_indexes() {
        let e = parse_expr("M[row,..]").unwrap();
        assert!(matches!(&e.kind, ExprKind::Slice(_, s) if s.len() == 2 && s[1].is_none()));
        let e = parse_expr("M[1,2]").unwrap();
        assert!(matches!(&e.kind, ExprKind::Index(_, s) if s.len() == 2));
    }

    #[test]
    fn quantifier_body_stops_at_comma() {
        let m = parse_model(
            "language ESSENCE' 1.0\nfind x : matrix indexed by [int(1..3)] of int(1..3)\n\
             such that forAll i : int(1..3) . x[i] = i /\\ x[i] > 0, exists i : int(1..3) . x[i] = 1",
        )
        .unwrap();
        assert_eq!(m.constraints().count(), 2);
    }

    #[test]
    fn in_takes_domain_expression() {
        let e = parse_expr("x in int(1..3) union toSet([5,6])").unwrap();
        let ExprKind::In(_, d) = e.kind else { panic!() };
        assert!(matches!(d.kind, DomainKind::Op(DomainOp::Union, _, _)));
    }

    #[test]
    fn model_errors() {
        let two = "language ESSENCE' 1.0\nfind x : int(1..3)\nminimising x\nmaximising x";
        assert!(parse_model(two).is_err());
        let late = "language ESSENCE' 1.0\nfind x : int(1..3)\nminimising x\nfind y : bool";
        assert!(parse_model(late).is_err());
        let dup = "language ESSENCE' 1.0\nfind x : int(1..3)\nfind x : bool";
        assert!(parse_model(dup).is_err());
        assert!(parse_model("find x : bool").is_err());
        let empty = "language ESSENCE' 1.0\nfind x : bool\nsuch that\n";
        assert_eq!(parse_model(empty).unwrap().constraints().count(), 0);
    }

    #[test]
    fn reserved_words_rejected_as_identifiers() {
        for w in super::super::lexer::RESERVED {
            let text = format!("language ESSENCE' 1.0\nfind {w} : bool");
            assert!(parse_model(&text).is_err(), "{w}");
        }
    }

    #[test]
    fn params() {
        let p = parse_param("letting n_nurses=4 letting Demand=[[1,0,1,0],[0,2,1,0]]").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].0, "n_nurses");
        assert!(parse_param("").unwrap().is_empty());
        assert!(parse_param("find x : bool").is_err());
        assert!(parse_param("language ESSENCE' 1.0\nletting n=7").is_ok());
    }
}
