//! Binds parameters, evaluates lettings and `where` clauses, and unrolls
//! quantifiers and comprehensions into a ground model.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::error::{Error, Pos, Result};
use crate::eval::{
    self, domain_value, enumerate_domain, fit_index, for_each_binding, Binding, BaseKind, DomainValue,
    Env, EvalResult, IntDomain, Stop, Value,
};
use crate::frontend::ast::*;
use crate::term::*;

/// A partially symbolic value: constants and decision terms, possibly
/// arranged in (nested) matrices.
#[derive(Debug, Clone)]
pub enum SVal {
    T(Term),
    M(Rc<SMat>),
}

#[derive(Debug, Clone)]
pub struct SMat {
    pub index: IntDomain,
    pub elems: Vec<SVal>,
    pub base: BaseKind,
}

impl SVal {
    fn from_value(v: &Value) -> SVal {
        match v {
            Value::Int(x) => SVal::T(Term::Int(*x)),
            Value::Bool(b) => SVal::T(Term::Bool(*b)),
            Value::Matrix(m) => SVal::M(Rc::new(SMat {
                index: m.index.clone(),
                elems: m.elems.iter().map(SVal::from_value).collect(),
                base: m.base,
            })),
        }
    }

    fn dims(&self) -> usize {
        match self {
            SVal::T(_) => 0,
            SVal::M(m) => 1 + m.elems.first().map_or(0, SVal::dims),
        }
    }

    fn index_domains(&self) -> Vec<IntDomain> {
        let mut out = Vec::new();
        let mut cur = self;
        while let SVal::M(m) = cur {
            out.push(m.index.clone());
            match m.elems.first() {
                Some(e) => cur = e,
                None => break,
            }
        }
        out
    }

    fn flatten(&self) -> Vec<Term> {
        let mut out = Vec::new();
        fn go(v: &SVal, out: &mut Vec<Term>) {
            match v {
                SVal::T(t) => out.push(t.clone()),
                SVal::M(m) => m.elems.iter().for_each(|e| go(e, out)),
            }
        }
        go(self, &mut out);
        out
    }

    fn base(&self, vars: &VarTable) -> BaseKind {
        match self {
            SVal::T(t) if t.is_bool(vars) => BaseKind::Bool,
            SVal::T(_) => BaseKind::Int,
            SVal::M(m) => m.base,
        }
    }
}

fn vector(elems: Vec<SVal>, base: BaseKind) -> SVal {
    let n = elems.len() as i64;
    SVal::M(Rc::new(SMat { index: IntDomain::range(1, n), elems, base }))
}

fn err<T>(e: Error) -> EvalResult<T> {
    Err(Stop::Err(e))
}

fn type_err<T>(pos: Pos, msg: impl Into<String>) -> EvalResult<T> {
    err(Error::type_err(pos, msg))
}

/// Undefinedness stops at a boolean node, which becomes `false`.
fn bool_ctx(r: EvalResult<Term>) -> EvalResult<Term> {
    match r {
        Err(Stop::Undef) => Ok(Term::Bool(false)),
        r => r,
    }
}

fn finish<T>(r: EvalResult<T>, pos: Pos, what: &str) -> Result<T> {
    match r {
        Ok(v) => Ok(v),
        Err(Stop::Undef) => Err(Error::instance(pos, format!("{what} is undefined"))),
        Err(Stop::Err(e)) => Err(e),
    }
}

/// Reindexes a parameter value to its declared domain and checks membership.
fn conform(v: &Value, d: &DomainValue) -> Option<Value> {
    match d {
        DomainValue::Bool => matches!(v, Value::Bool(_)).then(|| v.clone()),
        DomainValue::Int(dom) => match v {
            Value::Int(x) if dom.contains(*x) => Some(v.clone()),
            _ => None,
        },
        DomainValue::Matrix { index, base } => {
            fn go(v: &Value, index: &[IntDomain], base: &DomainValue) -> Option<Value> {
                let Some((first, rest)) = index.split_first() else { return conform(v, base) };
                let m = v.as_matrix()?;
                if first.size()? != m.elems.len() as u64 {
                    return None;
                }
                let elems = m.elems.iter().map(|e| go(e, rest, base)).collect::<Option<Vec<_>>>()?;
                Some(Value::matrix(first.clone(), elems, base.base_kind()))
            }
            go(v, index, base)
        }
    }
}

struct Grounder {
    env: Env,
    dec: HashMap<String, SVal>,
    vars: VarTable,
    memo: HashMap<*const Expr, bool>,
}

impl Grounder {
    fn decision_free(&mut self, e: &Expr) -> bool {
        let key = e as *const Expr;
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = match &e.kind {
            ExprKind::Ident(n) => !(self.dec.contains_key(n) && !self.env.contains(n)),
            _ => {
                let mut kids = Vec::new();
                e.for_each_child(&mut |c| kids.push(c));
                kids.into_iter().all(|c| self.decision_free(c))
            }
        };
        self.memo.insert(key, r);
        r
    }

    fn int_term(&self, v: SVal, pos: Pos) -> EvalResult<Term> {
        match v {
            SVal::T(Term::Bool(b)) => Ok(Term::Int(b as i64)),
            // bool variables stay wrapped so integer matrices keep their type
            SVal::T(t @ (Term::App(..) | Term::Var(_))) if t.is_bool(&self.vars) => Ok(Term::App(Op::ToInt, vec![t])),
            SVal::T(t) => Ok(t),
            SVal::M(_) => type_err(pos, "expected an integer expression, found a matrix"),
        }
    }

    fn bool_term(&self, v: SVal, pos: Pos) -> EvalResult<Term> {
        match v {
            SVal::T(t) if t.is_bool(&self.vars) => Ok(t),
            SVal::T(_) => type_err(pos, "expected a boolean expression, found an integer"),
            SVal::M(_) => type_err(pos, "expected a boolean expression, found a matrix"),
        }
    }

    fn int(&mut self, e: &Expr) -> EvalResult<Term> {
        let v = self.inst(e)?;
        self.int_term(v, e.pos)
    }

    fn boolean(&mut self, e: &Expr) -> EvalResult<Term> {
        bool_ctx(self.inst(e).and_then(|v| self.bool_term(v, e.pos)))
    }

    fn list(&mut self, e: &Expr) -> EvalResult<Vec<Term>> {
        match self.inst(e)? {
            v @ SVal::M(_) => Ok(v.flatten()),
            SVal::T(_) => type_err(e.pos, "expected a matrix"),
        }
    }

    fn int_list(&mut self, e: &Expr) -> EvalResult<Vec<Term>> {
        self.list(e)?.into_iter().map(|t| self.int_term(SVal::T(t), e.pos)).collect()
    }

    fn const_ints(&mut self, e: &Expr) -> EvalResult<Vec<i64>> {
        let ts = self.int_list(e)?;
        ts.iter()
            .map(|t| t.as_const().ok_or(()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .or_else(|_| type_err(e.pos, "expected constant values"))
    }

    fn const_int(&mut self, e: &Expr) -> EvalResult<i64> {
        match self.int(e)?.as_const() {
            Some(v) => Ok(v),
            None => type_err(e.pos, "expression must not contain decision variables"),
        }
    }

    fn matrix_of(&self, elems: Vec<SVal>, index: IntDomain) -> SVal {
        let base = if elems.is_empty() {
            BaseKind::Int
        } else if let SVal::M(m) = &elems[0] {
            m.base
        } else if elems.iter().all(|e| e.base(&self.vars) == BaseKind::Bool) {
            BaseKind::Bool
        } else {
            BaseKind::Int
        };
        let elems = if base == BaseKind::Int {
            elems
                .into_iter()
                .map(|e| match e {
                    SVal::T(t) => SVal::T(self.int_term(SVal::T(t), Pos::default()).expect("scalar")),
                    m => m,
                })
                .collect()
        } else {
            elems
        };
        SVal::M(Rc::new(SMat { index, elems, base }))
    }

    fn inst(&mut self, e: &Expr) -> EvalResult<SVal> {
        if self.decision_free(e) {
            return eval::eval(e, &mut self.env).map(|v| SVal::from_value(&v));
        }
        let pos = e.pos;
        match &e.kind {
            ExprKind::Int(v) => Ok(SVal::T(Term::Int(*v))),
            ExprKind::Bool(b) => Ok(SVal::T(Term::Bool(*b))),
            ExprKind::Ident(n) => match self.env.get(n) {
                Some(Binding::Value(v)) => Ok(SVal::from_value(v)),
                Some(Binding::Domain(_)) => type_err(pos, format!("domain '{n}' used as a value")),
                None => match self.dec.get(n) {
                    Some(v) => Ok(v.clone()),
                    None => err(Error::instance(pos, format!("undefined identifier '{n}'"))),
                },
            },
            ExprKind::Matrix { elems, index } => {
                let mut vals = Vec::with_capacity(elems.len());
                for x in elems {
                    vals.push(self.inst(x)?);
                }
                let ix = match index {
                    Some(d) => fit_index(&self.scalar_domain(d)?, vals.len(), d.pos)?,
                    None => IntDomain::range(1, vals.len() as i64),
                };
                Ok(self.matrix_of(vals, ix))
            }
            ExprKind::Unary(op, a) => Ok(SVal::T(match op {
                UnOp::Neg => Term::sum(vec![(-1, self.int(a)?)]),
                UnOp::Abs => Term::app(Op::Abs, vec![self.int(a)?]),
                UnOp::Not => bool_ctx(self.boolean(a).map(Term::not))?,
            })),
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b, pos).map(SVal::T),
            ExprKind::In(a, d) => Ok(SVal::T(bool_ctx((|| {
                let x = self.int(a)?;
                let set = self.scalar_domain(d)?;
                Ok(Term::app(Op::InSet(set), vec![x]))
            })())?)),
            ExprKind::Quant { kind, vars, domain, body } => {
                let values = enumerate_domain(domain, &mut self.env)?;
                let mut parts = Vec::new();
                let kind = *kind;
                let mut env = std::mem::take(&mut self.env);
                let r = for_each_binding(vars, &values, &mut env, &mut |env| {
                    std::mem::swap(&mut self.env, env);
                    let t = if kind == QuantKind::Sum { self.int(body) } else { self.boolean(body) };
                    std::mem::swap(&mut self.env, env);
                    parts.push(t?);
                    Ok(())
                });
                self.env = env;
                r?;
                Ok(SVal::T(match kind {
                    QuantKind::ForAll => Term::and(parts),
                    QuantKind::Exists => Term::or(parts),
                    QuantKind::Sum => Term::sum(parts.into_iter().map(|t| (1, t)).collect()),
                }))
            }
            ExprKind::Comprehension { body, generators, conditions, index } => {
                let mut out = Vec::new();
                self.comprehension(body, generators, conditions, &mut out)?;
                let ix = match index {
                    Some(d) => fit_index(&self.scalar_domain(d)?, out.len(), d.pos)?,
                    None => IntDomain::range(1, out.len() as i64),
                };
                Ok(self.matrix_of(out, ix))
            }
            ExprKind::Call(f, args) => self.call(*f, args, pos),
            ExprKind::Index(m, subs) => {
                let mv = self.inst(m)?;
                let dims = mv.dims();
                if subs.len() > dims {
                    return type_err(pos, format!("{} subscripts for a {dims}-dimensional matrix", subs.len()));
                }
                let bool_scalar = subs.len() == dims && mv.base(&self.vars) == BaseKind::Bool;
                let r = (|| {
                    let mut idx = Vec::with_capacity(subs.len());
                    for s in subs {
                        idx.push(self.int(s)?);
                    }
                    self.index(&mv, idx, pos)
                })();
                if bool_scalar {
                    bool_ctx(r.and_then(|v| self.bool_term(v, pos))).map(SVal::T)
                } else {
                    r
                }
            }
            ExprKind::Slice(m, subs) => {
                let mv = self.inst(m)?;
                if subs.len() != mv.dims() {
                    return type_err(pos, "slice must give one subscript per dimension");
                }
                let mut idx = Vec::with_capacity(subs.len());
                for s in subs {
                    idx.push(match s {
                        Some(s) => Some(self.const_int(s)?),
                        None => None,
                    });
                }
                slice(&mv, &idx).ok_or(Stop::Undef)
            }
        }
    }

    fn scalar_domain(&mut self, d: &Domain) -> EvalResult<IntDomain> {
        match domain_value(d, &mut self.env) {
            Ok(DomainValue::Matrix { .. }) => type_err(d.pos, "expected a scalar domain"),
            Ok(s) => Ok(s.int_domain().expect("scalar")),
            Err(Stop::Err(Error::Instance { .. })) if !self.domain_free(d) => {
                type_err(d.pos, "domain must not contain decision variables")
            }
            Err(e) => Err(e),
        }
    }

    fn domain_free(&mut self, d: &Domain) -> bool {
        let mut kids = Vec::new();
        d.for_each_expr(&mut |c| kids.push(c));
        kids.into_iter().all(|c| self.decision_free(c))
    }

    fn comprehension(
        &mut self,
        body: &Expr,
        gens: &[Generator],
        conds: &[Expr],
        out: &mut Vec<SVal>,
    ) -> EvalResult<()> {
        let Some((g, rest)) = gens.split_first() else {
            for c in conds {
                if !self.decision_free(c) {
                    return type_err(c.pos, "comprehension conditions must not contain decision variables");
                }
                match eval::eval(c, &mut self.env) {
                    Ok(Value::Bool(true)) => {}
                    Ok(Value::Bool(false)) | Err(Stop::Undef) => return Ok(()),
                    Ok(_) => return type_err(c.pos, "comprehension condition must be boolean"),
                    Err(e) => return Err(e),
                }
            }
            out.push(self.inst(body)?);
            return Ok(());
        };
        let values = enumerate_domain(&g.domain, &mut self.env)?;
        let mut env = std::mem::take(&mut self.env);
        let r = for_each_binding(&g.vars, &values, &mut env, &mut |env| {
            std::mem::swap(&mut self.env, env);
            let r = self.comprehension(body, rest, conds, out);
            std::mem::swap(&mut self.env, env);
            r
        });
        self.env = env;
        r
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr, pos: Pos) -> EvalResult<Term> {
        use BinOp::*;
        match op {
            Add | Sub => {
                let x = self.int(a)?;
                let y = self.int(b)?;
                Ok(Term::sum(vec![(1, x), (if op == Add { 1 } else { -1 }, y)]))
            }
            Mul => Ok(Term::app(Op::Product, vec![self.int(a)?, self.int(b)?])),
            Div | Mod | Pow => {
                let o = match op {
                    Div => Op::Div,
                    Mod => Op::Mod,
                    _ => Op::Pow,
                };
                Ok(Term::app(o, vec![self.int(a)?, self.int(b)?]))
            }
            Eq | Neq | Lt | Leq | Gt | Geq => bool_ctx((|| {
                let x = self.int(a)?;
                let y = self.int(b)?;
                Ok(match op {
                    Eq => Term::eq(x, y),
                    Neq => Term::ne(x, y),
                    Lt => Term::lt(x, y),
                    Leq => Term::le(x, y),
                    Gt => Term::lt(y, x),
                    _ => Term::le(y, x),
                })
            })()),
            LexLt | LexLeq | LexGt | LexGeq => bool_ctx((|| {
                let mut x = self.int_list(a)?;
                let mut y = self.int_list(b)?;
                if matches!(op, LexGt | LexGeq) {
                    std::mem::swap(&mut x, &mut y);
                }
                let n = x.len();
                x.extend(y);
                let o = if matches!(op, LexLt | LexGt) { Op::LexLt(n) } else { Op::LexLe(n) };
                Ok(Term::app(o, x))
            })()),
            And | Or | Imp | Iff => {
                let x = self.boolean(a)?;
                let y = self.boolean(b)?;
                Ok(match op {
                    And => Term::and(vec![x, y]),
                    Or => Term::or(vec![x, y]),
                    Imp => Term::app(Op::Imp, vec![x, y]),
                    _ => Term::app(Op::Iff, vec![x, y]),
                })
            }
        }
        .map_err(|e| match e {
            Stop::Err(Error::Type { msg, pos: p }) if p == Pos::default() => {
                Stop::Err(Error::type_err(pos, msg))
            }
            e => e,
        })
    }

    fn call(&mut self, f: Func, args: &[Expr], pos: Pos) -> EvalResult<SVal> {
        let n_args = |n: usize| -> EvalResult<()> {
            if args.len() != n {
                return type_err(pos, format!("{} expects {n} argument(s)", f.name()));
            }
            Ok(())
        };
        let t = match f {
            Func::Min | Func::Max => {
                let xs = match args.len() {
                    1 => self.int_list(&args[0])?,
                    2 => {
                        let a = self.inst(&args[0])?;
                        let b = self.inst(&args[1])?;
                        if matches!(a, SVal::M(_)) || matches!(b, SVal::M(_)) {
                            return type_err(pos, "min/max take two scalars or one matrix");
                        }
                        vec![self.int_term(a, pos)?, self.int_term(b, pos)?]
                    }
                    _ => return type_err(pos, "min/max take two scalars or one matrix"),
                };
                if xs.is_empty() {
                    return Err(Stop::Undef);
                }
                Term::app(if f == Func::Min { Op::Min } else { Op::Max }, xs)
            }
            Func::Factorial | Func::Popcount => {
                n_args(1)?;
                let x = self.const_int(&args[0])?;
                Term::Int(if f == Func::Factorial {
                    eval::arith::factorial(x)
                        .map_err(|_| Stop::Err(Error::instance(pos, "integer overflow")))?
                        .ok_or(Stop::Undef)?
                } else {
                    eval::arith::popcount(x)
                })
            }
            Func::ToInt => {
                n_args(1)?;
                self.int(&args[0])?
            }
            Func::ToSet => return type_err(pos, "toSet may only appear on the right of 'in'"),
            Func::Flatten => {
                let (depth, m) = match args.len() {
                    1 => (None, self.inst(&args[0])?),
                    2 => (Some(self.const_int(&args[0])?), self.inst(&args[1])?),
                    _ => return type_err(pos, "flatten takes one or two arguments"),
                };
                let SVal::M(_) = &m else { return type_err(pos, "flatten expects a matrix") };
                let base = m.base(&self.vars);
                return match depth {
                    None => Ok(vector(m.flatten().into_iter().map(SVal::T).collect(), base)),
                    Some(0) => Ok(m),
                    Some(n) if n > 0 && (n as usize) < m.dims() => {
                        let mut out = Vec::new();
                        collect_depth(&m, n as usize + 1, &mut out);
                        Ok(vector(out, base))
                    }
                    Some(_) => type_err(pos, "flatten depth out of range"),
                };
            }
            Func::Sum | Func::Product => {
                n_args(1)?;
                let xs = self.int_list(&args[0])?;
                if f == Func::Sum {
                    Term::sum(xs.into_iter().map(|t| (1, t)).collect())
                } else if xs.is_empty() {
                    Term::Int(1)
                } else {
                    Term::app(Op::Product, xs)
                }
            }
            Func::And | Func::Or => {
                n_args(1)?;
                let xs = self.list(&args[0])?;
                let xs = xs.into_iter().map(|t| self.bool_term(SVal::T(t), pos)).collect::<EvalResult<Vec<_>>>()?;
                if f == Func::And {
                    Term::and(xs)
                } else {
                    Term::or(xs)
                }
            }
            Func::AllDiff => {
                n_args(1)?;
                bool_ctx(self.int_list(&args[0]).map(|xs| Term::app(Op::AllDiff, xs)))?
            }
            Func::AllDiffExcept => {
                n_args(2)?;
                bool_ctx((|| {
                    let xs = self.int_list(&args[0])?;
                    let k = self.const_int(&args[1])?;
                    Ok(Term::app(Op::AllDiffExcept(k), xs))
                })())?
            }
            Func::Gcc => {
                n_args(3)?;
                bool_ctx((|| {
                    let mut xs = self.int_list(&args[0])?;
                    let vals = self.const_ints(&args[1])?;
                    let counts = self.int_list(&args[2])?;
                    if vals.len() != counts.len() {
                        return type_err(pos, "gcc values and counts differ in length");
                    }
                    xs.extend(counts);
                    Ok(Term::app(Op::Gcc(vals), xs))
                })())?
            }
            Func::AtLeast | Func::AtMost => {
                n_args(3)?;
                bool_ctx((|| {
                    let xs = self.int_list(&args[0])?;
                    let counts = self.const_ints(&args[1])?;
                    let vals = self.const_ints(&args[2])?;
                    if vals.len() != counts.len() {
                        return type_err(pos, "values and counts differ in length");
                    }
                    let op = if f == Func::AtMost { Op::AtMost(counts, vals) } else { Op::AtLeast(counts, vals) };
                    Ok(Term::app(op, xs))
                })())?
            }
            Func::Table => {
                n_args(2)?;
                bool_ctx((|| {
                    let xs = self.int_list(&args[0])?;
                    if !self.decision_free(&args[1]) {
                        return type_err(args[1].pos, "table tuples must not contain decision variables");
                    }
                    let rows = eval::table_rows(&args[1], &mut self.env)?;
                    if rows.iter().any(|r| r.len() != xs.len()) {
                        return type_err(pos, "table tuple length differs from scope length");
                    }
                    Ok(Term::app(Op::Table(Rc::new(rows)), xs))
                })())?
            }
        };
        Ok(SVal::T(t))
    }

    /// Full or partial indexing with possibly non-constant subscripts.
    fn index(&self, m: &SVal, idx: Vec<Term>, pos: Pos) -> EvalResult<SVal> {
        // a partial entry makes the whole matrix partial, so full indexing
        // keeps every entry for the undefinedness pass to guard
        let strict = idx.len() == m.dims() && m.flatten().iter().any(has_partial);
        if idx.iter().all(Term::is_const) && !strict {
            let subs: Vec<Option<i64>> = idx.iter().map(|t| t.as_const()).collect();
            return slice(m, &subs).ok_or(Stop::Undef);
        }
        if idx.len() != m.dims() {
            return type_err(pos, "partial indexing needs constant subscripts");
        }
        // fix constant dimensions, keep the rest symbolic
        let doms = m.index_domains();
        let mut keep_dims = Vec::new();
        let mut keep_idx = Vec::new();
        for (d, t) in doms.iter().zip(&idx) {
            match t.as_const() {
                Some(c) if !d.contains(c) => return Err(Stop::Undef),
                Some(_) if !strict => {}
                _ => {
                    keep_dims.push(d.clone());
                    keep_idx.push(t.clone());
                }
            }
        }
        let mut elems = Vec::new();
        if strict {
            elems = m.flatten();
        } else {
            gather(m, &idx, &mut elems);
        }
        let bool_base = m.base(&self.vars) == BaseKind::Bool;
        let elems: Vec<Term> = if bool_base {
            elems
        } else {
            elems.into_iter().map(|t| self.int_term(SVal::T(t), pos)).collect::<EvalResult<_>>()?
        };
        let info = ElementInfo { dims: keep_dims, bool_base };
        let mut args = elems;
        args.extend(keep_idx);
        Ok(SVal::T(Term::app(Op::Element(Rc::new(info)), args)))
    }
}

fn has_partial(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| found |= matches!(s, Term::App(op, _) if op.is_partial()));
    found
}

/// Elements of `m` in row-major order over the non-constant subscripts,
/// with constant subscripts fixed.
fn gather(m: &SVal, idx: &[Term], out: &mut Vec<Term>) {
    let Some((first, rest)) = idx.split_first() else {
        if let SVal::T(t) = m {
            out.push(t.clone());
        }
        return;
    };
    let SVal::M(mm) = m else { return };
    match first.as_const() {
        Some(c) => {
            if let Some(p) = mm.index.position(c) {
                gather(&mm.elems[p], rest, out);
            }
        }
        None => {
            for e in &mm.elems {
                gather(e, rest, out);
            }
        }
    }
}

fn slice(v: &SVal, subs: &[Option<i64>]) -> Option<SVal> {
    let Some((first, rest)) = subs.split_first() else { return Some(v.clone()) };
    let SVal::M(m) = v else { return None };
    match first {
        Some(i) => {
            let p = m.index.position(*i)?;
            slice(&m.elems[p], rest)
        }
        None => {
            let elems = m.elems.iter().map(|e| slice(e, rest)).collect::<Option<Vec<_>>>()?;
            Some(vector(elems, m.base))
        }
    }
}

fn collect_depth(v: &SVal, depth: usize, out: &mut Vec<SVal>) {
    if depth == 0 {
        out.push(v.clone());
        return;
    }
    if let SVal::M(m) = v {
        for e in &m.elems {
            collect_depth(e, depth - 1, out);
        }
    }
}

fn element_name(name: &str, idx: &[i64]) -> String {
    let parts: Vec<String> = idx.iter().map(i64::to_string).collect();
    format!("{name}[{}]", parts.join(","))
}

fn declare_find(g: &mut Grounder, name: &str, dom: &DomainValue, pos: Pos) -> Result<FindDecl> {
    let finite = |d: &IntDomain| d.is_finite() && !d.is_empty();
    match dom {
        DomainValue::Bool | DomainValue::Int(_) => {
            let d = dom.int_domain().expect("scalar");
            if !d.is_finite() {
                return Err(Error::instance(pos, format!("decision variable '{name}' needs a finite domain")));
            }
            let v = g.vars.add(name.to_string(), d, *dom == DomainValue::Bool, VarKind::Find);
            g.dec.insert(name.to_string(), SVal::T(Term::Var(v)));
            Ok(FindDecl { name: name.to_string(), shape: FindShape::Scalar(v) })
        }
        DomainValue::Matrix { index, base } => {
            let bd = base
                .int_domain()
                .ok_or_else(|| Error::type_err(pos, "matrix of matrices is not a valid domain"))?;
            if !bd.is_finite() || index.iter().any(|d| !d.is_finite()) {
                return Err(Error::instance(pos, format!("decision variable '{name}' needs a finite domain")));
            }
            let is_bool = **base == DomainValue::Bool;
            let mut ids = Vec::new();
            fn build(
                g: &mut Grounder,
                name: &str,
                index: &[IntDomain],
                prefix: &mut Vec<i64>,
                bd: &IntDomain,
                is_bool: bool,
                base: BaseKind,
                ids: &mut Vec<VarId>,
            ) -> SVal {
                let Some((first, rest)) = index.split_first() else {
                    let v = g.vars.add(element_name(name, prefix), bd.clone(), is_bool, VarKind::Find);
                    ids.push(v);
                    return SVal::T(Term::Var(v));
                };
                let mut elems = Vec::new();
                for i in first.iter() {
                    prefix.push(i);
                    elems.push(build(g, name, rest, prefix, bd, is_bool, base, ids));
                    prefix.pop();
                }
                SVal::M(Rc::new(SMat { index: first.clone(), elems, base }))
            }
            let _ = finite;
            let sv = build(g, name, index, &mut Vec::new(), &bd, is_bool, base.base_kind(), &mut ids);
            g.dec.insert(name.to_string(), sv);
            Ok(FindDecl {
                name: name.to_string(),
                shape: FindShape::Matrix { index: index.clone(), base: base.base_kind(), vars: ids },
            })
        }
    }
}

/// Instantiates a model with parameter bindings into a ground model.
pub fn instantiate(model: &Model, params: &ParamBindings) -> Result<GroundModel> {
    let mut g = Grounder { env: Env::new(), dec: HashMap::new(), vars: VarTable::new(), memo: HashMap::new() };
    let mut finds = Vec::new();
    let mut warnings = Vec::new();
    let mut constraints: Vec<&Expr> = Vec::new();
    let mut objective: Option<(ObjectiveDir, &Expr)> = None;
    let mut branching: Option<&Expr> = None;
    let mut givens = HashSet::new();

    for s in &model.statements {
        match s {
            Statement::Given { names, domain, pos } => {
                let dv = eval::eval_domain(domain, &mut g.env)?;
                for n in names {
                    givens.insert(n.clone());
                    let Some((_, e)) = params.iter().find(|(p, _)| p == n) else {
                        return Err(Error::instance(*pos, format!("no value given for parameter '{n}'")));
                    };
                    let v = eval::eval_expr(e, &mut g.env)?
                        .ok_or_else(|| Error::instance(e.pos, format!("value of '{n}' is undefined")))?;
                    let v = conform(&v, &dv).ok_or_else(|| {
                        Error::instance(e.pos, format!("value {v} of '{n}' is not in its domain"))
                    })?;
                    g.env.bind_value(n, v);
                }
            }
            Statement::Letting { name, domain, value, pos } => {
                if !g.decision_free(value) {
                    return Err(Error::instance(*pos, format!("letting '{name}' refers to a decision variable")));
                }
                let v = eval::eval_expr(value, &mut g.env)?
                    .ok_or_else(|| Error::instance(*pos, format!("letting '{name}' is undefined")))?;
                let v = match domain {
                    Some(d) => {
                        let dv = eval::eval_domain(d, &mut g.env)?;
                        conform(&v, &dv).ok_or_else(|| {
                            Error::instance(*pos, format!("letting '{name}' is not in its domain"))
                        })?
                    }
                    None => v,
                };
                g.env.bind_value(name, v);
            }
            Statement::LettingDomain { name, domain, .. } => {
                let dv = eval::eval_domain(domain, &mut g.env)?;
                g.env.bind(name, Binding::Domain(dv));
            }
            Statement::Find { names, domain, pos } => {
                let dv = eval::eval_domain(domain, &mut g.env)?;
                for n in names {
                    finds.push(declare_find(&mut g, n, &dv, *pos)?);
                }
            }
            Statement::Where { conditions, pos } => {
                for c in conditions {
                    if !g.decision_free(c) {
                        return Err(Error::instance(c.pos, "where clause refers to a decision variable"));
                    }
                    match eval::eval_expr(c, &mut g.env)? {
                        Some(Value::Bool(true)) => {}
                        Some(Value::Bool(false)) | None => {
                            return Err(Error::instance(*pos, "where clause is false for these parameters"))
                        }
                        Some(_) => return Err(Error::type_err(c.pos, "where clause must be boolean")),
                    }
                }
            }
            Statement::Objective { dir, expr, .. } => objective = Some((*dir, expr)),
            Statement::BranchingOn { list, .. } => branching = Some(list),
            Statement::Heuristic { pos, .. } => {
                warnings.push(format!("{pos}: heuristic statement ignored"));
            }
            Statement::SuchThat { constraints: cs, .. } => constraints.extend(cs.iter()),
        }
    }
    for (n, e) in params {
        if !givens.contains(n) {
            return Err(Error::instance(e.pos, format!("'{n}' is not a parameter of the model")));
        }
    }

    let mut ground = Vec::with_capacity(constraints.len());
    let positions = constraints.iter().map(|c| c.pos).collect();
    for c in constraints {
        let t = finish(g.boolean(c), c.pos, "constraint")?;
        ground.push(t);
    }
    let objective = match objective {
        Some((dir, e)) => Some((dir, finish(g.int(e), e.pos, "objective")?)),
        None => None,
    };
    let mut branch_vars = Vec::new();
    if let Some(b) = branching {
        let terms = finish(g.list(b), b.pos, "branching list")?;
        let mut seen = HashSet::new();
        for t in terms {
            match t {
                Term::Var(v) => {
                    if seen.insert(v) {
                        branch_vars.push(v);
                    }
                }
                Term::Int(_) | Term::Bool(_) => {}
                _ => return Err(Error::type_err(b.pos, "branching on accepts decision variables only")),
            }
        }
    }
    Ok(GroundModel {
        vars: g.vars,
        finds,
        constraints: ground,
        positions,
        objective,
        branching: branch_vars,
        warnings,
        unsat: false,
    })
}
