//! Constant evaluation with relational semantics.
//!
//! Undefinedness is a value at this layer: partial operations yield
//! [`Stop::Undef`], which travels upwards until the nearest boolean
//! expression turns it into `false`. The same evaluator is the reference
//! semantics for the brute-force oracle in the tests.

pub mod arith;
pub mod domain;
pub mod value;

use std::collections::HashMap;

pub use domain::IntDomain;
pub use value::{reshape, BaseKind, DomainValue, MatrixValue, Value};

use crate::error::{Error, Pos, Result};
use crate::frontend::ast::*;

#[derive(Debug, Clone)]
pub enum Binding {
    Value(Value),
    Domain(DomainValue),
}

/// Scoped name bindings; inner bindings shadow outer ones until unbound.
#[derive(Debug, Clone, Default)]
pub struct Env {
    map: HashMap<String, Vec<Binding>>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn bind(&mut self, name: &str, b: Binding) {
        self.map.entry(name.to_string()).or_default().push(b);
    }

    pub fn bind_value(&mut self, name: &str, v: Value) {
        self.bind(name, Binding::Value(v));
    }

    pub fn unbind(&mut self, name: &str) {
        if let Some(stack) = self.map.get_mut(name) {
            stack.pop();
            if stack.is_empty() {
                self.map.remove(name);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.map.get(name).and_then(|s| s.last())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }
}

#[derive(Debug, Clone)]
pub enum Stop {
    Undef,
    Err(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Err(e)
    }
}

pub type EvalResult<T> = std::result::Result<T, Stop>;

fn overflow(pos: Pos) -> Stop {
    Stop::Err(Error::instance(pos, "integer overflow"))
}

fn type_err<T>(pos: Pos, msg: impl Into<String>) -> EvalResult<T> {
    Err(Stop::Err(Error::type_err(pos, msg)))
}

/// Converts undefinedness into `false`: every boolean node is a catch point.
fn bool_node(r: EvalResult<bool>) -> EvalResult<Value> {
    match r {
        Ok(b) => Ok(Value::Bool(b)),
        Err(Stop::Undef) => Ok(Value::Bool(false)),
        Err(e) => Err(e),
    }
}

fn lift(r: std::result::Result<Option<i64>, arith::Overflow>, pos: Pos) -> EvalResult<i64> {
    match r {
        Ok(Some(v)) => Ok(v),
        Ok(None) => Err(Stop::Undef),
        Err(_) => Err(overflow(pos)),
    }
}

fn checked(r: std::result::Result<i64, arith::Overflow>, pos: Pos) -> EvalResult<i64> {
    r.map_err(|_| overflow(pos))
}

/// Evaluates a decision-free expression; `Ok(None)` means undefined.
pub fn eval_expr(e: &Expr, env: &mut Env) -> Result<Option<Value>> {
    match eval(e, env) {
        Ok(v) => Ok(Some(v)),
        Err(Stop::Undef) => Ok(None),
        Err(Stop::Err(e)) => Err(e),
    }
}

/// Evaluates a domain expression to a constant domain. Undefined endpoints
/// make the enclosing statement undefined, which is an instance error.
pub fn eval_domain(d: &Domain, env: &mut Env) -> Result<DomainValue> {
    match domain_value(d, env) {
        Ok(v) => Ok(v),
        Err(Stop::Undef) => Err(Error::instance(d.pos, "domain has an undefined bound")),
        Err(Stop::Err(e)) => Err(e),
    }
}

/// Normalizes a scalar domain expression to sorted disjoint ranges.
pub fn normalize_domain(d: &Domain, env: &mut Env) -> Result<IntDomain> {
    match eval_domain(d, env)? {
        DomainValue::Matrix { .. } => Err(Error::type_err(d.pos, "expected a scalar domain")),
        s => Ok(s.int_domain().expect("scalar")),
    }
}

pub fn domain_value(d: &Domain, env: &mut Env) -> EvalResult<DomainValue> {
    match &d.kind {
        DomainKind::Bool => Ok(DomainValue::Bool),
        DomainKind::Matrix { index, base } => {
            let mut ix = Vec::with_capacity(index.len());
            for i in index {
                ix.push(scalar_domain(i, env)?);
            }
            Ok(DomainValue::Matrix { index: ix, base: Box::new(domain_value(base, env)?) })
        }
        DomainKind::Named(n) => match env.get(n) {
            Some(Binding::Domain(dv)) => Ok(dv.clone()),
            Some(Binding::Value(_)) => type_err(d.pos, format!("'{n}' is not a domain")),
            None => Err(Stop::Err(Error::instance(d.pos, format!("undefined domain '{n}'")))),
        },
        _ => Ok(DomainValue::Int(scalar_domain(d, env)?)),
    }
}

fn scalar_domain(d: &Domain, env: &mut Env) -> EvalResult<IntDomain> {
    match &d.kind {
        DomainKind::Bool => Ok(IntDomain::boolean()),
        DomainKind::Int(items) if items.is_empty() => Ok(IntDomain::unbounded()),
        DomainKind::Int(items) => {
            let mut ranges = Vec::with_capacity(items.len());
            for it in items {
                match it {
                    RangeItem::Single(e) => {
                        let v = eval_int(e, env)?;
                        ranges.push((v, v));
                    }
                    RangeItem::Range(a, b) => {
                        let lo = match a {
                            Some(a) => eval_int(a, env)?,
                            None => IntDomain::NEG_INF,
                        };
                        let hi = match b {
                            Some(b) => eval_int(b, env)?,
                            None => IntDomain::POS_INF,
                        };
                        ranges.push((lo, hi));
                    }
                }
            }
            Ok(IntDomain::from_ranges(ranges))
        }
        DomainKind::Op(op, a, b) => {
            let a = scalar_domain(a, env)?;
            let b = scalar_domain(b, env)?;
            Ok(match op {
                DomainOp::Union => a.union(&b),
                DomainOp::Intersect => a.intersect(&b),
                DomainOp::Minus => a.minus(&b),
            })
        }
        DomainKind::ToSet(e) => {
            let v = eval(e, env)?;
            to_set(&v).map_err(Stop::Err)
        }
        DomainKind::Named(_) | DomainKind::Matrix { .. } => match domain_value(d, env)? {
            DomainValue::Matrix { .. } => type_err(d.pos, "expected a scalar domain"),
            s => Ok(s.int_domain().expect("scalar")),
        },
    }
}

/// The set of elements of a one-dimensional constant matrix.
pub fn to_set(v: &Value) -> Result<IntDomain> {
    match v {
        Value::Matrix(m) => {
            let mut vals = Vec::with_capacity(m.elems.len());
            for e in &m.elems {
                match e.as_int() {
                    Some(x) => vals.push(x),
                    None => {
                        return Err(Error::type_err(Pos::default(), "toSet needs a one-dimensional matrix"))
                    }
                }
            }
            Ok(IntDomain::from_values(vals))
        }
        _ => Err(Error::type_err(Pos::default(), "toSet needs a matrix")),
    }
}

/// Indexes (`Some`) or slices (`None`) a matrix value. Slices are
/// re-indexed from 1; any subscript outside its index domain is undefined.
pub fn index_or_slice(m: &Value, subs: &[Option<i64>]) -> Result<Option<Value>> {
    let dims = m.dims();
    if subs.len() > dims || (subs.iter().any(Option::is_none) && subs.len() != dims) {
        return Err(Error::type_err(
            Pos::default(),
            format!("{} subscripts for a {}-dimensional matrix", subs.len(), dims),
        ));
    }
    Ok(subscript(m, subs))
}

fn subscript(v: &Value, subs: &[Option<i64>]) -> Option<Value> {
    let Some((first, rest)) = subs.split_first() else { return Some(v.clone()) };
    let m = v.as_matrix()?;
    match first {
        Some(i) => {
            let p = m.index.position(*i)?;
            subscript(&m.elems[p], rest)
        }
        None => {
            let mut elems = Vec::with_capacity(m.elems.len());
            for e in &m.elems {
                elems.push(subscript(e, rest)?);
            }
            Some(Value::vector(elems, m.base))
        }
    }
}

/// Picks `n` index values from a (possibly upward-open) index domain.
pub fn fit_index(dom: &IntDomain, n: usize, pos: Pos) -> Result<IntDomain> {
    if dom.is_finite() {
        if dom.size() != Some(n as u64) {
            return Err(Error::type_err(
                pos,
                format!("index domain {dom} does not have {n} values"),
            ));
        }
        return Ok(dom.clone());
    }
    if !dom.has_lower_bound() {
        return Err(Error::type_err(pos, "index domain needs a lower bound"));
    }
    let vals: Vec<i64> = dom.iter().take(n).collect();
    if vals.len() != n {
        return Err(Error::type_err(pos, format!("index domain {dom} does not have {n} values")));
    }
    Ok(IntDomain::from_values(vals))
}

/// Builds a matrix value from evaluated elements; mixed int/bool scalars
/// are stored as integers.
pub fn build_matrix(index: IntDomain, mut elems: Vec<Value>) -> Value {
    let base = if elems.is_empty() {
        BaseKind::Int
    } else if elems.iter().all(|e| matches!(e, Value::Bool(_))) {
        BaseKind::Bool
    } else if let Some(Value::Matrix(m)) = elems.first() {
        m.base
    } else {
        for e in elems.iter_mut() {
            if let Value::Bool(b) = e {
                *e = Value::Int(*b as i64);
            }
        }
        BaseKind::Int
    };
    Value::matrix(index, elems, base)
}

fn eval_int(e: &Expr, env: &mut Env) -> EvalResult<i64> {
    match eval(e, env)? {
        Value::Int(v) => Ok(v),
        Value::Bool(b) => Ok(b as i64),
        Value::Matrix(_) => type_err(e.pos, "expected an integer, found a matrix"),
    }
}

fn eval_bool(e: &Expr, env: &mut Env) -> EvalResult<bool> {
    match eval(e, env)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => type_err(e.pos, "expected a boolean, found an integer"),
        Value::Matrix(_) => type_err(e.pos, "expected a boolean, found a matrix"),
    }
}

fn eval_matrix(e: &Expr, env: &mut Env) -> EvalResult<std::rc::Rc<MatrixValue>> {
    match eval(e, env)? {
        Value::Matrix(m) => Ok(m),
        _ => type_err(e.pos, "expected a matrix"),
    }
}

fn int_list(e: &Expr, env: &mut Env) -> EvalResult<Vec<i64>> {
    let m = eval(e, env)?;
    if !matches!(m, Value::Matrix(_)) {
        return type_err(e.pos, "expected a matrix");
    }
    m.flatten()
        .iter()
        .map(|v| v.as_int().ok_or(()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .or_else(|_| type_err(e.pos, "expected a matrix of integers"))
}

fn bool_list(e: &Expr, env: &mut Env) -> EvalResult<Vec<bool>> {
    let m = eval(e, env)?;
    if !matches!(m, Value::Matrix(_)) {
        return type_err(e.pos, "expected a matrix");
    }
    m.flatten()
        .iter()
        .map(|v| v.as_bool().ok_or(()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .or_else(|_| type_err(e.pos, "expected a matrix of booleans"))
}

/// Binds each of `vars` to every value of `dom` (nested, first variable
/// outermost) and calls `f` for every combination.
pub fn for_each_binding(
    vars: &[String],
    values: &[Value],
    env: &mut Env,
    f: &mut dyn FnMut(&mut Env) -> EvalResult<()>,
) -> EvalResult<()> {
    let Some((first, rest)) = vars.split_first() else { return f(env) };
    for v in values {
        env.bind_value(first, v.clone());
        let r = for_each_binding(rest, values, env, f);
        env.unbind(first);
        r?;
    }
    Ok(())
}

pub fn enumerate_domain(d: &Domain, env: &mut Env) -> EvalResult<Vec<Value>> {
    let dv = domain_value(d, env)?;
    match dv.enumerate() {
        Some(v) => Ok(v),
        None => type_err(d.pos, "cannot enumerate an infinite or very large domain"),
    }
}

fn count_in(xs: &[i64], v: i64) -> i64 {
    xs.iter().filter(|&&x| x == v).count() as i64
}

pub fn eval(e: &Expr, env: &mut Env) -> EvalResult<Value> {
    let pos = e.pos;
    match &e.kind {
        ExprKind::Int(v) => Ok(Value::Int(*v)),
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Ident(n) => match env.get(n) {
            Some(Binding::Value(v)) => Ok(v.clone()),
            Some(Binding::Domain(_)) => type_err(pos, format!("domain '{n}' used as a value")),
            None => Err(Stop::Err(Error::instance(pos, format!("undefined identifier '{n}'")))),
        },
        ExprKind::Matrix { elems, index } => {
            let mut vals = Vec::with_capacity(elems.len());
            for x in elems {
                vals.push(eval(x, env)?);
            }
            let ix = match index {
                Some(d) => fit_index(&scalar_domain(d, env)?, vals.len(), d.pos)?,
                None => IntDomain::range(1, vals.len() as i64),
            };
            Ok(build_matrix(ix, vals))
        }
        ExprKind::Unary(op, a) => match op {
            UnOp::Neg => Ok(Value::Int(checked(arith::neg(eval_int(a, env)?), pos)?)),
            UnOp::Abs => Ok(Value::Int(checked(arith::abs(eval_int(a, env)?), pos)?)),
            UnOp::Not => bool_node(eval_bool(a, env).map(|b| !b)),
        },
        ExprKind::Binary(op, a, b) => eval_binary(*op, a, b, env, pos),
        ExprKind::In(a, d) => bool_node((|| {
            let x = eval_int(a, env)?;
            Ok(scalar_domain(d, env)?.contains(x))
        })()),
        ExprKind::Quant { kind, vars, domain, body } => {
            let values = enumerate_domain(domain, env)?;
            match kind {
                QuantKind::Sum => {
                    let mut total: i64 = 0;
                    for_each_binding(vars, &values, env, &mut |env| {
                        let v = eval_int(body, env)?;
                        total = checked(arith::add(total, v), pos)?;
                        Ok(())
                    })?;
                    Ok(Value::Int(total))
                }
                QuantKind::ForAll | QuantKind::Exists => {
                    let want = *kind == QuantKind::Exists;
                    let mut found = false;
                    let r = for_each_binding(vars, &values, env, &mut |env| {
                        if !found && eval_bool(body, env)? == want {
                            found = true;
                        }
                        Ok(())
                    });
                    bool_node(r.map(|_| if want { found } else { !found }))
                }
            }
        }
        ExprKind::Comprehension { body, generators, conditions, index } => {
            let mut out = Vec::new();
            comprehension(body, generators, conditions, env, &mut out)?;
            let ix = match index {
                Some(d) => fit_index(&scalar_domain(d, env)?, out.len(), d.pos)?,
                None => IntDomain::range(1, out.len() as i64),
            };
            Ok(build_matrix(ix, out))
        }
        ExprKind::Call(f, args) => eval_call(*f, args, env, pos),
        ExprKind::Index(m, subs) => {
            let mv = eval(m, env)?;
            let Value::Matrix(mm) = &mv else { return type_err(pos, "indexing a non-matrix") };
            let full = subs.len() == mv.dims();
            let r = (|| {
                let mut s = Vec::with_capacity(subs.len());
                for x in subs {
                    s.push(Some(eval_int(x, env)?));
                }
                match index_or_slice(&mv, &s)? {
                    Some(v) => Ok(v),
                    None => Err(Stop::Undef),
                }
            })();
            if full && mm.base == BaseKind::Bool {
                // a boolean-valued index is its own nearest boolean expression
                bool_node(r.and_then(|v| v.as_bool().ok_or(Stop::Undef)))
            } else {
                r
            }
        }
        ExprKind::Slice(m, subs) => {
            let mv = eval(m, env)?;
            let mut s = Vec::with_capacity(subs.len());
            for x in subs {
                s.push(match x {
                    Some(x) => Some(eval_int(x, env)?),
                    None => None,
                });
            }
            match index_or_slice(&mv, &s).map_err(|e| match e {
                Error::Type { msg, .. } => Error::type_err(pos, msg),
                other => other,
            })? {
                Some(v) => Ok(v),
                None => Err(Stop::Undef),
            }
        }
    }
}

fn comprehension(
    body: &Expr,
    gens: &[Generator],
    conds: &[Expr],
    env: &mut Env,
    out: &mut Vec<Value>,
) -> EvalResult<()> {
    let Some((g, rest)) = gens.split_first() else {
        for c in conds {
            if !eval_bool(c, env).or_else(|s| match s {
                Stop::Undef => Ok(false),
                e => Err(e),
            })? {
                return Ok(());
            }
        }
        out.push(eval(body, env)?);
        return Ok(());
    };
    let values = enumerate_domain(&g.domain, env)?;
    for_each_binding(&g.vars, &values, env, &mut |env| comprehension(body, rest, conds, env, out))
}

fn eval_binary(op: BinOp, a: &Expr, b: &Expr, env: &mut Env, pos: Pos) -> EvalResult<Value> {
    use BinOp::*;
    match op {
        Add | Sub | Mul | Div | Mod | Pow => {
            let x = eval_int(a, env)?;
            let y = eval_int(b, env)?;
            let v = match op {
                Add => checked(arith::add(x, y), pos)?,
                Sub => checked(arith::sub(x, y), pos)?,
                Mul => checked(arith::mul(x, y), pos)?,
                Div => lift(arith::div(x, y), pos)?,
                Mod => lift(arith::modulo(x, y), pos)?,
                _ => lift(arith::pow(x, y), pos)?,
            };
            Ok(Value::Int(v))
        }
        Eq | Neq | Lt | Leq | Gt | Geq => bool_node((|| {
            let x = eval_int(a, env)?;
            let y = eval_int(b, env)?;
            Ok(match op {
                Eq => x == y,
                Neq => x != y,
                Lt => x < y,
                Leq => x <= y,
                Gt => x > y,
                _ => x >= y,
            })
        })()),
        LexLt | LexLeq | LexGt | LexGeq => bool_node((|| {
            let x = int_list(a, env)?;
            let y = int_list(b, env)?;
            Ok(match op {
                LexLt => x < y,
                LexLeq => x <= y,
                LexGt => x > y,
                _ => x >= y,
            })
        })()),
        And | Or | Imp | Iff => bool_node((|| {
            let x = eval_bool(a, env)?;
            let y = eval_bool(b, env)?;
            Ok(match op {
                And => x && y,
                Or => x || y,
                Imp => !x || y,
                _ => x == y,
            })
        })()),
    }
}

fn expect_args(f: Func, args: &[Expr], n: usize, pos: Pos) -> EvalResult<()> {
    if args.len() != n {
        return type_err(pos, format!("{} expects {n} argument(s), got {}", f.name(), args.len()));
    }
    Ok(())
}

fn eval_call(f: Func, args: &[Expr], env: &mut Env, pos: Pos) -> EvalResult<Value> {
    match f {
        Func::Min | Func::Max => {
            let vals: Vec<i64> = match args.len() {
                1 => int_list(&args[0], env)?,
                2 => {
                    let x = eval(&args[0], env)?;
                    let y = eval(&args[1], env)?;
                    match (x.as_int(), y.as_int()) {
                        (Some(x), Some(y)) => vec![x, y],
                        _ => return type_err(pos, "min/max take two scalars or one matrix"),
                    }
                }
                _ => return type_err(pos, "min/max take two scalars or one matrix"),
            };
            let r = if f == Func::Min { vals.iter().min() } else { vals.iter().max() };
            r.map(|v| Value::Int(*v)).ok_or(Stop::Undef)
        }
        Func::Factorial => {
            expect_args(f, args, 1, pos)?;
            Ok(Value::Int(lift(arith::factorial(eval_int(&args[0], env)?), pos)?))
        }
        Func::Popcount => {
            expect_args(f, args, 1, pos)?;
            Ok(Value::Int(arith::popcount(eval_int(&args[0], env)?)))
        }
        Func::ToInt => {
            expect_args(f, args, 1, pos)?;
            Ok(Value::Int(eval_int(&args[0], env)?))
        }
        Func::ToSet => type_err(pos, "toSet may only appear on the right of 'in'"),
        Func::Flatten => match args.len() {
            1 => {
                let m = eval(&args[0], env)?;
                if !matches!(m, Value::Matrix(_)) {
                    return type_err(pos, "flatten expects a matrix");
                }
                let base = m.base_kind();
                Ok(Value::vector(m.flatten(), base))
            }
            2 => {
                let n = eval_int(&args[0], env)?;
                let m = eval(&args[1], env)?;
                if n < 0 || n as usize >= m.dims().max(1) {
                    return type_err(pos, "flatten depth out of range");
                }
                if n == 0 {
                    return Ok(m);
                }
                let base = m.base_kind();
                let mut out = Vec::new();
                collect_depth(&m, n as usize + 1, &mut out);
                Ok(Value::vector(out, base))
            }
            _ => type_err(pos, "flatten takes one or two arguments"),
        },
        Func::Sum | Func::Product => {
            expect_args(f, args, 1, pos)?;
            let xs = int_list(&args[0], env)?;
            let mut acc: i64 = if f == Func::Sum { 0 } else { 1 };
            for x in xs {
                acc = checked(if f == Func::Sum { arith::add(acc, x) } else { arith::mul(acc, x) }, pos)?;
            }
            Ok(Value::Int(acc))
        }
        Func::And | Func::Or => {
            expect_args(f, args, 1, pos)?;
            bool_node(bool_list(&args[0], env).map(|bs| {
                if f == Func::And {
                    bs.iter().all(|&b| b)
                } else {
                    bs.iter().any(|&b| b)
                }
            }))
        }
        Func::AllDiff => {
            expect_args(f, args, 1, pos)?;
            bool_node(int_list(&args[0], env).map(|xs| {
                let mut s = xs.clone();
                s.sort_unstable();
                s.windows(2).all(|w| w[0] != w[1])
            }))
        }
        Func::AllDiffExcept => {
            expect_args(f, args, 2, pos)?;
            bool_node((|| {
                let xs = int_list(&args[0], env)?;
                let k = eval_int(&args[1], env)?;
                let mut s: Vec<i64> = xs.into_iter().filter(|&x| x != k).collect();
                s.sort_unstable();
                Ok(s.windows(2).all(|w| w[0] != w[1]))
            })())
        }
        Func::Gcc | Func::AtLeast | Func::AtMost => {
            expect_args(f, args, 3, pos)?;
            bool_node((|| {
                let xs = int_list(&args[0], env)?;
                let (vals, counts) = if f == Func::Gcc {
                    (int_list(&args[1], env)?, int_list(&args[2], env)?)
                } else {
                    let c = int_list(&args[1], env)?;
                    (int_list(&args[2], env)?, c)
                };
                if vals.len() != counts.len() {
                    return type_err(pos, "value and count matrices differ in length");
                }
                Ok(vals.iter().zip(&counts).all(|(&v, &c)| {
                    let n = count_in(&xs, v);
                    match f {
                        Func::Gcc => n == c,
                        Func::AtLeast => n >= c,
                        _ => n <= c,
                    }
                }))
            })())
        }
        Func::Table => {
            expect_args(f, args, 2, pos)?;
            bool_node((|| {
                let xs = int_list(&args[0], env)?;
                let rows = table_rows(&args[1], env)?;
                for r in &rows {
                    if r.len() != xs.len() {
                        return type_err(pos, "table tuple length differs from scope length");
                    }
                }
                Ok(rows.iter().any(|r| *r == xs))
            })())
        }
    }
}

/// Rows of a two-dimensional constant matrix of tuples.
pub fn table_rows(e: &Expr, env: &mut Env) -> EvalResult<Vec<Vec<i64>>> {
    let m = eval_matrix(e, env)?;
    let mut rows = Vec::with_capacity(m.elems.len());
    for r in &m.elems {
        match r {
            Value::Matrix(_) => rows.push(
                r.flatten()
                    .iter()
                    .map(|v| v.as_int().ok_or(()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .or_else(|_| type_err(e.pos, "table tuples must be integers"))?,
            ),
            _ => return type_err(e.pos, "table tuples must be a two-dimensional matrix"),
        }
    }
    Ok(rows)
}

fn collect_depth(v: &Value, depth: usize, out: &mut Vec<Value>) {
    if depth == 0 {
        out.push(v.clone());
        return;
    }
    if let Value::Matrix(m) = v {
        for e in &m.elems {
            collect_depth(e, depth - 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::frontend::parser::{parse_domain, parse_expr};

    fn ev(src: &str) -> Option<Value> {
        eval_expr(&parse_expr(src).unwrap(), &mut Env::new()).unwrap()
    }

    fn ev_s(src: &str) -> String {
        ev(src).map_or("UNDEFINED".into(), |v| v.to_string())
    }

    fn n_env() -> Env {
        let mut env = Env::new();
        let n = ev("[[1,2,3],[1,2,3],[3,3,3]; int(-2..0)]").unwrap();
        env.bind_value("N", n);
        env
    }

    #[test]
    fn precedence_values() {
        assert_eq!(ev_s("-2**2**3"), "-256");
        assert_eq!(ev_s("2/3/4"), "0");
        assert_eq!(ev_s("1+2-3+true-(1<2)=0"), "true");
    }

    #[test]
    fn division_examples() {
        assert_eq!(ev_s("3/2"), "1");
        assert_eq!(ev_s("(-3)/2"), "-2");
        assert_eq!(ev_s("3/(-2)"), "-2");
        assert_eq!(ev_s("(-3)/(-2)"), "1");
        assert_eq!(ev_s("(-3)%2"), "1");
        assert_eq!(ev_s("3%(-2)"), "-1");
        assert_eq!(ev_s("5/0"), "UNDEFINED");
    }

    #[test]
    fn relational_semantics() {
        assert_eq!(ev_s("(1/0 = 2)"), "false");
        assert_eq!(ev_s("!(1/0 = 2)"), "true");
        assert_eq!(ev_s("(1/0 != 2)"), "false");
        assert_eq!(ev_s("!(1/0 != 2)"), "true");
        assert_eq!(ev_s("[true; int(1)][0] = false"), "true");
        assert_eq!(ev_s("[1; int(1)][0] = [1; int(1)][1]"), "false");
    }

    #[test]
    fn functions() {
        assert_eq!(ev_s("factorial(5)"), "120");
        assert_eq!(ev_s("factorial(-1)"), "UNDEFINED");
        assert_eq!(ev_s("popcount(-1)"), "64");
        assert_eq!(ev_s("min([])"), "UNDEFINED");
        assert_eq!(ev_s("sum([])"), "0");
        assert_eq!(ev_s("product([])"), "1");
        assert_eq!(ev_s("max(3, 7)"), "7");
        assert!(eval_expr(&parse_expr("min([1], 2)").unwrap(), &mut Env::new()).is_err());
        assert_eq!(ev_s("flatten([[[1,2],[3,4]],[[5,6],[7,8]]])"), "[1,2,3,4,5,6,7,8;int(1..8)]");
        assert_eq!(ev_s("flatten(1, [[[1,2],[3,4]],[[5,6],[7,8]]])"),
                   "[[1,2;int(1..2)],[3,4;int(1..2)],[5,6;int(1..2)],[7,8;int(1..2)];int(1..4)]");
        assert_eq!(ev_s("table([1,0,1], [[0,0,0],[0,1,1],[1,0,1]])"), "true");
        assert_eq!(ev_s("gcc([1,1,2], [1,2], [2,1])"), "true");
        assert_eq!(ev_s("atmost([1,1,2], [1], [1])"), "false");
        assert_eq!(ev_s("alldifferent_except([0,0,1], 0)"), "true");
        assert_eq!(ev_s("[1,2] <lex [1,2,0]"), "true");
        assert_eq!(ev_s("2 in toSet([2,4,6])"), "true");
    }

    #[test]
    fn comprehensions() {
        assert_eq!(ev_s("[ num**2 | num : int(1..5) ]"), "[1,4,9,16,25;int(1..5)]");
        assert_eq!(ev_s("[ i+j | i : int(1..3), j : int(1..3), i < j ; int(7..) ]"), "[3,4,5;int(7..9)]");
        assert_eq!(ev_s("sum i : int(1..10) . i"), "55");
        assert_eq!(
            ev_s("[ perm | perm : matrix indexed by [int(1..2)] of int(1..2), allDiff(perm) ]"),
            "[[1,2;int(1..2)],[2,1;int(1..2)];int(1..2)]"
        );
    }

    #[test]
    fn slicing() {
        let mut env = n_env();
        let s = |src: &str, env: &mut Env| {
            eval_expr(&parse_expr(src).unwrap(), env).unwrap().map_or("UNDEFINED".into(), |v| v.to_string())
        };
        assert_eq!(s("N[-2,..]", &mut env), "[1,2,3;int(1..3)]");
        assert_eq!(s("N[..,1]", &mut env), "[1,1,3;int(1..3)]");
        assert_eq!(s("N[1,1]", &mut env), "UNDEFINED");
    }

    #[test]
    fn domains() {
        let mut env = Env::new();
        let d = |src: &str, env: &mut Env| normalize_domain(&parse_domain(src).unwrap(), env).unwrap();
        assert_eq!(d("int(10, 1..5, 4..9)", &mut env), IntDomain::range(1, 10));
        assert_eq!(d("int(1..5) union int(3..8)", &mut env), IntDomain::range(1, 8));
        assert!(d("int(5..3)", &mut env).is_empty());
        assert_eq!(d("int(1..9) - int(4..6)", &mut env), IntDomain::from_ranges([(1, 3), (7, 9)]));
        assert_eq!(
            to_set(&ev("[3,1,3]").unwrap()).unwrap(),
            IntDomain::from_values([1, 3])
        );
        assert!(to_set(&ev("[]").unwrap()).unwrap().is_empty());
    }

    fn arb_int_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (-5i64..=5).prop_map(|v| format!("({v})")),
            (-3i64..=3, -1i64..=3).prop_map(|(b, e)| format!("(({b})**({e}))")),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "%"]), inner.clone())
                    .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
                inner.clone().prop_map(|a| format!("|{a}|")),
                prop::collection::vec(inner.clone(), 1..4).prop_map(|xs| format!("min([{}])", xs.join(", "))),
                (inner.clone(), inner).prop_map(|(a, b)| format!("max({a}, {b})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn constant_evaluation_is_total_and_deterministic(src in arb_int_expr()) {
            let e = parse_expr(&src).unwrap();
            let first = eval_expr(&e, &mut Env::new());
            prop_assert!(first.is_ok(), "{}: {:?}", src, first);
            prop_assert_eq!(first, eval_expr(&e, &mut Env::new()));
        }

        #[test]
        fn min_and_max_fold_in_any_order(xs in prop::collection::vec(-30i64..30, 1..7), seed in any::<u64>()) {
            let mut order = xs.clone();
            let k = seed as usize % order.len();
            order.rotate_left(k);
            order.reverse();
            let list = |v: &[i64]| v.iter().map(|x| format!("({x})")).collect::<Vec<_>>().join(",");
            let fold = |f: &str| order[1..].iter().fold(format!("({})", order[0]), |acc, x| format!("{f}({acc}, ({x}))"));
            prop_assert_eq!(ev(&format!("min([{}])", list(&xs))), ev(&fold("min")));
            prop_assert_eq!(ev(&format!("max([{}])", list(&xs))), ev(&fold("max")));
            prop_assert_eq!(ev(&format!("min([{}])", list(&xs))), Some(Value::Int(*xs.iter().min().unwrap())));
        }

        #[test]
        fn domain_syntax_membership_matches_naive(
            parts in prop::collection::vec(prop::collection::vec((-100i64..100, 0i64..20), 1..4), 1..4),
            ops in prop::collection::vec(prop::sample::select(vec!["union", "intersect", "-"]), 3),
        ) {
            // a left-to-right chain of union and minus; intersect binds tighter
            let text: Vec<String> = parts.iter().map(|rs| {
                let items: Vec<String> = rs.iter().map(|&(lo, w)| if w == 0 { lo.to_string() } else { format!("{lo}..{}", lo + w) }).collect();
                format!("int({})", items.join(", "))
            }).collect();
            let sets: Vec<Vec<i64>> = parts.iter().map(|rs| {
                let mut v: Vec<i64> = rs.iter().flat_map(|&(lo, w)| lo..=lo + w).collect();
                v.sort();
                v.dedup();
                v
            }).collect();
            let mut src = text[0].clone();
            for (k, t) in text.iter().enumerate().skip(1) {
                src = format!("{src} {} {t}", ops[k - 1]);
            }
            // evaluate with intersect first, then union and minus left to right
            let mut terms = vec![sets[0].clone()];
            let mut joins = Vec::new();
            for (k, s) in sets.iter().enumerate().skip(1) {
                if ops[k - 1] == "intersect" {
                    let last = terms.pop().unwrap();
                    terms.push(last.into_iter().filter(|x| s.contains(x)).collect());
                } else {
                    joins.push(ops[k - 1]);
                    terms.push(s.clone());
                }
            }
            let mut acc = terms[0].clone();
            for (op, t) in joins.iter().zip(&terms[1..]) {
                if *op == "union" {
                    acc.extend(t.iter().copied());
                    acc.sort();
                    acc.dedup();
                } else {
                    acc.retain(|x| !t.contains(x));
                }
            }
            let d = normalize_domain(&parse_domain(&src).unwrap(), &mut Env::new()).unwrap();
            for v in -101..=121 {
                prop_assert_eq!(d.contains(v), acc.contains(&v), "{} at {}", src, v);
            }
        }
    }
}
