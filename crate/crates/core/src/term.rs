//! Ground (instance-level) terms over decision variables.
//!
//! Booleans are integers restricted to `{0,1}`; a boolean variable is a
//! variable with domain `{0,1}` and the `is_bool` flag. Any term may be
//! read as an integer, and boolean-valued terms may also be read as truth
//! values.

use std::fmt::Write;
use std::rc::Rc;

use crate::eval::{arith, BaseKind, IntDomain};
use crate::frontend::ast::ObjectiveDir;

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementInfo {
    /// Index domain of every dimension; elements are stored row-major.
    pub dims: Vec<IntDomain>,
    pub bool_base: bool,
}

impl ElementInfo {
    pub fn len(&self) -> usize {
        self.dims.iter().map(|d| d.size().unwrap_or(0) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major offset of an index tuple, if every index is in range.
    pub fn offset(&self, idx: &[i64]) -> Option<usize> {
        let mut off = 0usize;
        for (d, &i) in self.dims.iter().zip(idx) {
            let p = d.position(i)?;
            off = off * d.size().unwrap_or(0) as usize + p;
        }
        Some(off)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// `Σ coefs[k] * args[k]`.
    Sum(Vec<i64>),
    Product,
    Div,
    Mod,
    Pow,
    SafeDiv,
    SafeMod,
    SafePow,
    Abs,
    Min,
    Max,
    /// Arguments: elements row-major, then one index per dimension.
    Element(Rc<ElementInfo>),
    /// Total element: out-of-range indices select the first element.
    SafeElement(Rc<ElementInfo>),
    /// Integer view of a boolean term.
    ToInt,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    AllDiff,
    AllDiffExcept(i64),
    /// Arguments: the scope, then one count term per value.
    Gcc(Vec<i64>),
    /// `atmost(scope, counts, values)` with constant counts and values.
    AtMost(Vec<i64>, Vec<i64>),
    AtLeast(Vec<i64>, Vec<i64>),
    Table(Rc<Vec<Vec<i64>>>),
    /// Arguments: the first vector of length `n`, then the second.
    LexLt(usize),
    LexLe(usize),
    InSet(IntDomain),
}

impl Op {
    pub fn is_bool(&self) -> bool {
        use Op::*;
        match self {
            Element(i) | SafeElement(i) => i.bool_base,
            Sum(_) | Product | Div | Mod | Pow | SafeDiv | SafeMod | SafePow | Abs | Min | Max
            | ToInt => false,
            _ => true,
        }
    }

    pub fn is_partial(&self) -> bool {
        matches!(self, Op::Div | Op::Mod | Op::Pow | Op::Element(_))
    }

    pub fn is_commutative(&self) -> bool {
        matches!(
            self,
            Op::Product | Op::Min | Op::Max | Op::And | Op::Or | Op::Iff | Op::Eq | Op::Ne | Op::AllDiff
        ) || matches!(self, Op::AllDiffExcept(_))
    }

    pub fn name(&self) -> String {
        use Op::*;
        match self {
            Sum(c) => format!("sum{c:?}"),
            Product => "product".into(),
            Div => "div".into(),
            Mod => "mod".into(),
            Pow => "pow".into(),
            SafeDiv => "safediv".into(),
            SafeMod => "safemod".into(),
            SafePow => "safepow".into(),
            Abs => "abs".into(),
            Min => "min".into(),
            Max => "max".into(),
            Element(_) => "element".into(),
            SafeElement(_) => "safeelement".into(),
            ToInt => "toInt".into(),
            Not => "not".into(),
            And => "and".into(),
            Or => "or".into(),
            Imp => "imp".into(),
            Iff => "iff".into(),
            Eq => "eq".into(),
            Ne => "ne".into(),
            Lt => "lt".into(),
            Le => "le".into(),
            AllDiff => "allDiff".into(),
            AllDiffExcept(k) => format!("alldifferent_except[{k}]"),
            Gcc(v) => format!("gcc{v:?}"),
            AtMost(c, v) => format!("atmost{c:?}{v:?}"),
            AtLeast(c, v) => format!("atleast{c:?}{v:?}"),
            Table(t) => format!("table[{} tuples]", t.len()),
            LexLt(_) => "lexlt".into(),
            LexLe(_) => "lexle".into(),
            InSet(d) => format!("in {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Bool(bool),
    Var(VarId),
    App(Op, Vec<Term>),
}

impl Term {
    pub fn app(op: Op, args: Vec<Term>) -> Term {
        Term::App(op, args)
    }

    pub fn not(t: Term) -> Term {
        Term::App(Op::Not, vec![t])
    }

    pub fn and(args: Vec<Term>) -> Term {
        Term::App(Op::And, args)
    }

    pub fn or(args: Vec<Term>) -> Term {
        Term::App(Op::Or, args)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::App(Op::Eq, vec![a, b])
    }

    pub fn ne(a: Term, b: Term) -> Term {
        Term::App(Op::Ne, vec![a, b])
    }

    pub fn le(a: Term, b: Term) -> Term {
        Term::App(Op::Le, vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Term {
        Term::App(Op::Lt, vec![a, b])
    }

    pub fn sum(terms: Vec<(i64, Term)>) -> Term {
        let (c, a): (Vec<i64>, Vec<Term>) = terms.into_iter().unzip();
        Term::App(Op::Sum(c), a)
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            Term::Int(v) => Some(*v),
            Term::Bool(b) => Some(*b as i64),
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Int(_) | Term::Bool(_))
    }

    pub fn is_bool(&self, vars: &VarTable) -> bool {
        match self {
            Term::Bool(_) => true,
            Term::Int(_) => false,
            Term::Var(v) => vars.get(*v).is_bool,
            Term::App(op, _) => op.is_bool(),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, a) => a,
            _ => &[],
        }
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.visit(f);
            }
        }
    }

    /// Rebuilds the term bottom-up, applying `f` to every node after its
    /// children have been rewritten.
    pub fn map_bottom_up(self, f: &mut dyn FnMut(Term) -> Term) -> Term {
        let t = match self {
            Term::App(op, args) => Term::App(op, args.into_iter().map(|a| a.map_bottom_up(f)).collect()),
            t => t,
        };
        f(t)
    }

    pub fn vars_into(&self, out: &mut Vec<VarId>) {
        self.visit(&mut |t| {
            if let Term::Var(v) = t {
                out.push(*v);
            }
        });
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn substitute(self, f: &dyn Fn(VarId) -> Option<Term>) -> Term {
        self.map_bottom_up(&mut |t| match t {
            Term::Var(v) => f(v).unwrap_or(Term::Var(v)),
            t => t,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Find,
    Aux,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarState {
    Active,
    /// Assigned by a top-level constraint.
    Fixed(i64),
    /// Unified with another variable.
    Alias(VarId),
    /// Appears in no constraint; reported at its domain minimum.
    Removed,
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub domain: IntDomain,
    pub is_bool: bool,
    pub kind: VarKind,
    pub state: VarState,
}

#[derive(Debug, Clone, Default)]
pub struct VarTable {
    vars: Vec<VarInfo>,
    aux_counter: usize,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable::default()
    }

    pub fn add(&mut self, name: String, domain: IntDomain, is_bool: bool, kind: VarKind) -> VarId {
        self.vars.push(VarInfo { name, domain, is_bool, kind, state: VarState::Active });
        self.vars.len() - 1
    }

    /// A fresh auxiliary variable named `aux<k>`.
    pub fn add_aux(&mut self, domain: IntDomain, is_bool: bool) -> VarId {
        let name = format!("aux{}", self.aux_counter);
        self.aux_counter += 1;
        self.add(name, domain, is_bool, VarKind::Aux)
    }

    pub fn get(&self, v: VarId) -> &VarInfo {
        &self.vars[v]
    }

    pub fn get_mut(&mut self, v: VarId) -> &mut VarInfo {
        &mut self.vars[v]
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &VarInfo)> {
        self.vars.iter().enumerate()
    }

    pub fn is_active(&self, v: VarId) -> bool {
        self.vars[v].state == VarState::Active
    }

    /// Follows alias chains to the representative variable.
    pub fn resolve(&self, mut v: VarId) -> VarId {
        while let VarState::Alias(w) = self.vars[v].state {
            v = w;
        }
        v
    }

    /// Value of `v` under an assignment of the active variables.
    pub fn value_of(&self, v: VarId, active: &dyn Fn(VarId) -> i64) -> i64 {
        match &self.vars[v].state {
            VarState::Active => active(v),
            VarState::Fixed(c) => *c,
            VarState::Alias(w) => self.value_of(*w, active),
            VarState::Removed => IntDomain::min_value(&self.vars[v].domain).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindShape {
    Scalar(VarId),
    Matrix { index: Vec<IntDomain>, base: BaseKind, vars: Vec<VarId> },
}

#[derive(Debug, Clone)]
pub struct FindDecl {
    pub name: String,
    pub shape: FindShape,
}

impl FindDecl {
    pub fn var_ids(&self) -> Vec<VarId> {
        match &self.shape {
            FindShape::Scalar(v) => vec![*v],
            FindShape::Matrix { vars, .. } => vars.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundModel {
    pub vars: VarTable,
    pub finds: Vec<FindDecl>,
    pub constraints: Vec<Term>,
    /// Source position of each constraint, while constraints still map
    /// one-to-one onto source expressions.
    pub positions: Vec<crate::error::Pos>,
    pub objective: Option<(ObjectiveDir, Term)>,
    /// Distinctness scope for enumeration when non-empty.
    pub branching: Vec<VarId>,
    pub warnings: Vec<String>,
    /// Set when a pass proves the model has no solutions.
    pub unsat: bool,
}

impl GroundModel {
    pub fn find_var_ids(&self) -> Vec<VarId> {
        self.finds.iter().flat_map(FindDecl::var_ids).collect()
    }
}

/// Marker for an undefined integer subterm during ground evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Undef;

fn b(x: bool) -> i64 {
    x as i64
}

fn ck(r: Result<i64, arith::Overflow>) -> Result<i64, Undef> {
    r.map_err(|_| Undef)
}

fn partial(r: arith::ArithResult) -> Result<i64, Undef> {
    match r {
        Ok(Some(v)) => Ok(v),
        _ => Err(Undef),
    }
}

/// Evaluates a ground term under a total assignment with relational
/// semantics: boolean nodes yield 0 when an integer subterm is undefined.
pub fn eval_term(t: &Term, a: &dyn Fn(VarId) -> i64) -> Result<i64, Undef> {
    match t {
        Term::Int(v) => Ok(*v),
        Term::Bool(x) => Ok(b(*x)),
        Term::Var(v) => Ok(a(*v)),
        Term::App(op, args) => {
            if op.is_bool() {
                Ok(eval_app(op, args, a).unwrap_or(0))
            } else {
                eval_app(op, args, a)
            }
        }
    }
}

fn eval_all(args: &[Term], a: &dyn Fn(VarId) -> i64) -> Result<Vec<i64>, Undef> {
    args.iter().map(|t| eval_term(t, a)).collect()
}

fn distinct(mut xs: Vec<i64>) -> bool {
    xs.sort_unstable();
    xs.windows(2).all(|w| w[0] != w[1])
}

fn eval_app(op: &Op, args: &[Term], a: &dyn Fn(VarId) -> i64) -> Result<i64, Undef> {
    use Op::*;
    let x = eval_all(args, a)?;
    Ok(match op {
        Sum(c) => {
            let mut acc: i64 = 0;
            for (k, v) in c.iter().zip(&x) {
                acc = ck(arith::add(acc, ck(arith::mul(*k, *v))?))?;
            }
            acc
        }
        Product => {
            let mut acc: i64 = 1;
            for v in &x {
                acc = ck(arith::mul(acc, *v))?;
            }
            acc
        }
        Div => partial(arith::div(x[0], x[1]))?,
        Mod => partial(arith::modulo(x[0], x[1]))?,
        Pow => partial(arith::pow(x[0], x[1]))?,
        SafeDiv => ck(arith::safe_div(x[0], x[1]))?,
        SafeMod => ck(arith::safe_mod(x[0], x[1]))?,
        SafePow => ck(arith::safe_pow(x[0], x[1]))?,
        Abs => ck(arith::abs(x[0]))?,
        Min => *x.iter().min().ok_or(Undef)?,
        Max => *x.iter().max().ok_or(Undef)?,
        Element(info) | SafeElement(info) => {
            let n = info.len();
            let off = info.offset(&x[n..]);
            match (off, op) {
                (Some(o), _) => x[o],
                (None, SafeElement(_)) if n > 0 => x[0],
                _ => return Err(Undef),
            }
        }
        ToInt => x[0],
        Not => b(x[0] == 0),
        And => b(x.iter().all(|&v| v != 0)),
        Or => b(x.iter().any(|&v| v != 0)),
        Imp => b(x[0] == 0 || x[1] != 0),
        Iff => b((x[0] != 0) == (x[1] != 0)),
        Eq => b(x[0] == x[1]),
        Ne => b(x[0] != x[1]),
        Lt => b(x[0] < x[1]),
        Le => b(x[0] <= x[1]),
        AllDiff => b(distinct(x)),
        AllDiffExcept(k) => b(distinct(x.into_iter().filter(|v| v != k).collect())),
        Gcc(vals) => {
            let n = x.len() - vals.len();
            b(vals
                .iter()
                .zip(&x[n..])
                .all(|(v, c)| x[..n].iter().filter(|&&y| y == *v).count() as i64 == *c))
        }
        AtMost(counts, vals) | AtLeast(counts, vals) => {
            let most = matches!(op, AtMost(..));
            b(vals.iter().zip(counts).all(|(v, c)| {
                let n = x.iter().filter(|&&y| y == *v).count() as i64;
                if most {
                    n <= *c
                } else {
                    n >= *c
                }
            }))
        }
        Table(rows) => b(rows.iter().any(|r| *r == x)),
        LexLt(n) => b(x[..*n] < x[*n..]),
        LexLe(n) => b(x[..*n] <= x[*n..]),
        InSet(d) => b(d.contains(x[0])),
    })
}

/// Prefix rendering for diagnostics and symbol files.
pub fn show(t: &Term, vars: &VarTable) -> String {
    let mut s = String::new();
    show_into(&mut s, t, vars);
    s
}

fn show_into(out: &mut String, t: &Term, vars: &VarTable) {
    match t {
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Bool(x) => {
            let _ = write!(out, "{x}");
        }
        Term::Var(v) => out.push_str(&vars.get(*v).name),
        Term::App(op, args) => {
            out.push_str(&op.name());
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                show_into(out, a, vars);
            }
            out.push(')');
        }
    }
}
