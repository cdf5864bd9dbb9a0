//! Flattening into the constraint language accepted by the SAT encoder.
//!
//! After flattening every top-level constraint is one of:
//! - a formula over `Not`/`And`/`Or`/`Iff` whose atoms are boolean
//!   variables, relations `= != < <=` between variables and constants,
//!   linear `Σ cᵢ·lᵢ (<= | =) k` with each leaf a variable or
//!   `toInt(formula)`, `in`-set tests on a variable, and tables;
//! - a definition `z = f(a, b)` (either argument order) for `f` among
//!   product, div, mod, pow and abs over variables and constants;
//! - a one-sided definition `f(a, b) <= z` or `z <= f(a, b)`.
//!
//! Min, max and element are decomposed here into formulas over their
//! operands.

use std::collections::HashMap;

use crate::term::*;

use super::bounds::{for_each_tuple, term_domain};
use super::decompose::decompose;

#[derive(Debug, Clone, Copy, Default)]
pub struct FlattenOptions {
    /// Share one auxiliary variable between identical subterms.
    pub cse: bool,
    /// Link auxiliaries by `<=`/`>=` instead of `=` in monotone positions.
    pub aux_non_functional: bool,
}

/// How an auxiliary variable is tied to the term it replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Link {
    Exact,
    /// `z >= f`
    Upper,
    /// `z <= f`
    Lower,
}

impl Link {
    fn flip(self) -> Link {
        match self {
            Link::Upper => Link::Lower,
            Link::Lower => Link::Upper,
            Link::Exact => Link::Exact,
        }
    }
}

/// Callers only request one-sided links where the using constraint is
/// monotone in `z`.
fn definition(z: Term, f: Term, link: Link) -> Term {
    match link {
        Link::Exact => Term::eq(z, f),
        Link::Upper => Term::le(f, z),
        Link::Lower => Term::le(z, f),
    }
}

fn rel(op: Op, a: Term, b: Term) -> Term {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Term::Bool(eval_term(&Term::App(op, vec![Term::Int(x), Term::Int(y)]), &|_| 0) == Ok(1));
    }
    Term::App(op, vec![a, b])
}

fn is_functional_app(t: &Term) -> bool {
    matches!(
        t,
        Term::App(Op::Product | Op::SafeDiv | Op::SafeMod | Op::SafePow | Op::Abs | Op::Min | Op::Max, _)
    ) || matches!(t, Term::App(Op::SafeElement(i), _) if !i.bool_base)
}

fn is_leaf(t: &Term) -> bool {
    matches!(t, Term::Var(_) | Term::Int(_) | Term::Bool(_))
}

struct Flattener<'a> {
    vars: &'a mut VarTable,
    opts: FlattenOptions,
    out: Vec<Term>,
    memo: HashMap<(Term, Link), Term>,
    defs: Vec<(VarId, Term)>,
}

impl Flattener<'_> {
    fn top(&mut self, c: Term) {
        match c {
            Term::Bool(true) => {}
            Term::App(Op::And, args) => args.into_iter().for_each(|a| self.top(a)),
            Term::App(Op::Eq, mut a) if a.iter().any(is_functional_app) && a.iter().any(is_leaf) => {
                let (f, z) = if is_leaf(&a[1]) { (a.swap_remove(0), a.pop().unwrap()) } else { (a.pop().unwrap(), a.swap_remove(0)) };
                let z = self.atom(z, Link::Exact);
                self.define_into(f, z, Link::Exact);
            }
            Term::App(Op::Le, mut a) if is_functional_app(&a[0]) && is_leaf(&a[1]) => {
                let z = self.atom(a.pop().unwrap(), Link::Exact);
                self.define_into(a.pop().unwrap(), z, Link::Upper);
            }
            Term::App(Op::Le, mut a) if is_leaf(&a[0]) && is_functional_app(&a[1]) => {
                let f = a.pop().unwrap();
                let z = self.atom(a.pop().unwrap(), Link::Exact);
                self.define_into(f, z, Link::Lower);
            }
            c => {
                let f = self.formula(c, true);
                if f != Term::Bool(true) {
                    self.out.push(f);
                }
            }
        }
    }

    /// Translates a boolean term into a flat formula.
    fn formula(&mut self, t: Term, top: bool) -> Term {
        match t {
            Term::Bool(_) | Term::Var(_) => t,
            Term::Int(v) => Term::Bool(v != 0),
            Term::App(op, args) => match op {
                Op::Not => Term::not(self.formula(args.into_iter().next().unwrap(), false)),
                Op::And | Op::Or | Op::Iff => {
                    Term::App(op, args.into_iter().map(|a| self.formula(a, false)).collect())
                }
                Op::Imp => {
                    let mut it = args.into_iter();
                    let a = self.formula(it.next().unwrap(), false);
                    let b = self.formula(it.next().unwrap(), false);
                    Term::or(vec![Term::not(a), b])
                }
                Op::Eq | Op::Ne | Op::Lt | Op::Le => {
                    let mut it = args.into_iter();
                    let a = it.next().unwrap();
                    let b = it.next().unwrap();
                    self.relation(op, a, b, top)
                }
                Op::InSet(d) => {
                    let x = self.atom(args.into_iter().next().unwrap(), Link::Exact);
                    match x.as_const() {
                        Some(v) => Term::Bool(d.contains(v)),
                        None => Term::App(Op::InSet(d), vec![x]),
                    }
                }
                Op::Table(rows) => {
                    let xs = args.into_iter().map(|a| self.atom(a, Link::Exact)).collect();
                    Term::App(Op::Table(rows), xs)
                }
                Op::AllDiff
                | Op::AllDiffExcept(_)
                | Op::Gcc(_)
                | Op::AtMost(..)
                | Op::AtLeast(..)
                | Op::LexLt(_)
                | Op::LexLe(_) => {
                    let d = decompose(Term::App(op, args), self.vars);
                    self.formula(d, top)
                }
                op => self.atom(Term::App(op, args), Link::Exact),
            },
        }
    }

    fn relation(&mut self, op: Op, a: Term, b: Term, top: bool) -> Term {
        let one_sided = self.opts.aux_non_functional && top && matches!(op, Op::Le | Op::Lt);
        if matches!(a, Term::App(Op::Sum(_), _)) || matches!(b, Term::App(Op::Sum(_), _)) {
            return self.linear(op, a, b, one_sided);
        }
        let (la, lb) = if one_sided { (Link::Upper, Link::Lower) } else { (Link::Exact, Link::Exact) };
        let x = self.atom(a, la);
        let y = self.atom(b, lb);
        rel(op, x, y)
    }

    fn linear(&mut self, op: Op, a: Term, b: Term, one_sided: bool) -> Term {
        let mut terms: Vec<(i64, Term)> = Vec::new();
        let mut k: i64 = 0;
        fn collect(c: i64, t: Term, terms: &mut Vec<(i64, Term)>, k: &mut i64) {
            match t {
                Term::Int(v) => *k -= c * v,
                Term::Bool(v) => *k -= c * v as i64,
                Term::App(Op::Sum(cs), args) => {
                    for (c2, a) in cs.into_iter().zip(args) {
                        collect(c * c2, a, terms, k);
                    }
                }
                t => terms.push((c, t)),
            }
        }
        collect(1, a, &mut terms, &mut k);
        collect(-1, b, &mut terms, &mut k);
        // Σ terms (op) k
        let op = match op {
            Op::Lt => {
                k -= 1;
                Op::Le
            }
            op => op,
        };
        let mut cs = Vec::with_capacity(terms.len());
        let mut leaves = Vec::with_capacity(terms.len());
        for (c, t) in terms {
            let link = match (one_sided, c > 0) {
                (false, _) => Link::Exact,
                (true, true) => Link::Upper,
                (true, false) => Link::Lower,
            };
            match self.sum_leaf(t, link) {
                Term::Int(v) => k -= c * v,
                l => {
                    cs.push(c);
                    leaves.push(l);
                }
            }
        }
        if leaves.is_empty() {
            return rel(op, Term::Int(0), Term::Int(k));
        }
        let s = Term::App(Op::Sum(cs), leaves);
        match op {
            Op::Ne => Term::not(Term::eq(s, Term::Int(k))),
            op => Term::App(op, vec![s, Term::Int(k)]),
        }
    }

    fn sum_leaf(&mut self, t: Term, link: Link) -> Term {
        match t {
            Term::App(Op::ToInt, mut a) => match self.formula(a.pop().unwrap(), false) {
                Term::Bool(v) => Term::Int(v as i64),
                v @ Term::Var(_) => v,
                f => Term::app(Op::ToInt, vec![f]),
            },
            t if t.is_bool(self.vars) && !matches!(t, Term::Var(_)) => self.sum_leaf(Term::app(Op::ToInt, vec![t]), link),
            t => self.atom(t, link),
        }
    }

    fn aux(&mut self, f: &Term, is_bool: bool) -> VarId {
        let dom = if is_bool { crate::eval::IntDomain::boolean() } else { term_domain(f, self.vars) };
        self.vars.add_aux(dom, is_bool)
    }

    /// Reduces a term to a variable or constant, defining auxiliaries.
    fn atom(&mut self, t: Term, link: Link) -> Term {
        match t {
            Term::Int(_) | Term::Var(_) => return t,
            Term::Bool(v) => return Term::Int(v as i64),
            _ => {}
        }
        let key = (t.clone(), link);
        if self.opts.cse {
            if let Some(z) = self.memo.get(&key) {
                return z.clone();
            }
        }
        let z = self.atom_fresh(t, link);
        if self.opts.cse {
            self.memo.insert(key, z.clone());
        }
        z
    }

    fn atom_fresh(&mut self, t: Term, link: Link) -> Term {
        let Term::App(op, args) = t else { unreachable!() };
        match op {
            Op::ToInt => self.reify(args.into_iter().next().unwrap()),
            Op::SafeElement(ref i) if i.bool_base => self.functional(op, args, link),
            ref op if op.is_bool() => self.reify(Term::App(op.clone(), args)),
            Op::Sum(cs) => {
                let (c, leaves): (Vec<i64>, Vec<Term>) = {
                    let mut k = 0;
                    let mut c = Vec::new();
                    let mut l = Vec::new();
                    for (ci, a) in cs.into_iter().zip(args) {
                        match self.sum_leaf(a, if ci > 0 { link } else { link.flip() }) {
                            Term::Int(v) => k += ci * v,
                            x => {
                                c.push(ci);
                                l.push(x);
                            }
                        }
                    }
                    if k != 0 {
                        c.push(k);
                        l.push(Term::Int(1));
                    }
                    (c, l)
                };
                let s = Term::App(Op::Sum(c.clone()), leaves.clone());
                if let [1] = c.as_slice() {
                    if let Term::Var(_) = leaves[0] {
                        return leaves[0].clone();
                    }
                }
                let z = self.aux(&s, false);
                self.defs.push((z, s));
                // Σ c·l + k (rel) z, with any constant kept as the last leaf
                let (mut c, mut leaves) = (c, leaves);
                let mut k = 0;
                if leaves.last() == Some(&Term::Int(1)) {
                    k = c.pop().unwrap();
                    leaves.pop();
                }
                c.push(-1);
                leaves.push(Term::Var(z));
                let sum = |c: Vec<i64>, l: Vec<Term>| Term::App(Op::Sum(c), l);
                let def = match link {
                    Link::Exact => Term::eq(sum(c, leaves), Term::Int(-k)),
                    Link::Upper => Term::le(sum(c, leaves), Term::Int(-k)),
                    Link::Lower => Term::le(sum(c.into_iter().map(|x| -x).collect(), leaves), Term::Int(k)),
                };
                self.out.push(def);
                Term::Var(z)
            }
            Op::Product => {
                let mut xs: Vec<Term> = args.into_iter().map(|a| self.atom(a, Link::Exact)).collect();
                let last = xs.pop().unwrap();
                let mut acc = match xs.len() {
                    0 => return last,
                    _ => xs.remove(0),
                };
                for x in xs {
                    acc = self.functional(Op::Product, vec![acc, x], Link::Exact);
                }
                self.functional(Op::Product, vec![acc, last], link)
            }
            op @ (Op::SafeDiv | Op::SafeMod | Op::SafePow | Op::Abs | Op::Min | Op::Max | Op::SafeElement(_)) => {
                let xs = args.into_iter().map(|a| self.atom(a, Link::Exact)).collect();
                self.functional(op, xs, link)
            }
            op => unreachable!("{} survives undefinedness removal", op.name()),
        }
    }

    /// A boolean auxiliary equivalent to a formula.
    fn reify(&mut self, f: Term) -> Term {
        match self.formula(f, false) {
            Term::Bool(v) => Term::Int(v as i64),
            v @ Term::Var(_) => v,
            f => {
                let z = self.vars.add_aux(crate::eval::IntDomain::boolean(), true);
                self.defs.push((z, f.clone()));
                self.out.push(Term::app(Op::Iff, vec![Term::Var(z), f]));
                Term::Var(z)
            }
        }
    }

    /// An auxiliary defined by an operator over atoms.
    fn functional(&mut self, op: Op, xs: Vec<Term>, link: Link) -> Term {
        let f = Term::App(op, xs);
        if f.args().iter().all(Term::is_const) {
            if let Ok(v) = eval_term(&f, &|_| 0) {
                return Term::Int(v);
            }
        }
        let is_bool = f.is_bool(self.vars);
        let z = self.aux(&f, is_bool);
        self.defs.push((z, f.clone()));
        self.define_into(f, Term::Var(z), link);
        Term::Var(z)
    }

    /// Emits `z (link) f` for a functional term whose arguments may still
    /// need flattening.
    fn define_into(&mut self, f: Term, z: Term, link: Link) {
        let Term::App(op, args) = f else { unreachable!() };
        let xs: Vec<Term> = match op {
            Op::Product if args.len() > 2 => {
                let p = self.atom(Term::App(Op::Product, args[..args.len() - 1].to_vec()), Link::Exact);
                let last = self.atom(args[args.len() - 1].clone(), Link::Exact);
                vec![p, last]
            }
            _ => args.into_iter().map(|a| self.atom(a, Link::Exact)).collect(),
        };
        match op {
            Op::Min | Op::Max => self.extremum(op == Op::Min, xs, z, link),
            Op::SafeElement(info) => self.element(&info, xs, z, link),
            Op::Product if xs.len() == 1 => self.out.push(definition(z, xs[0].clone(), link)),
            op => {
                let f = Term::App(op, xs);
                if f.args().iter().all(Term::is_const) {
                    if let Ok(v) = eval_term(&f, &|_| 0) {
                        let c = match link {
                            Link::Exact => rel(Op::Eq, z, Term::Int(v)),
                            Link::Upper => rel(Op::Le, Term::Int(v), z),
                            Link::Lower => rel(Op::Le, z, Term::Int(v)),
                        };
                        self.out.push(c);
                        return;
                    }
                }
                self.out.push(definition(z, f, link));
            }
        }
    }

    fn extremum(&mut self, is_min: bool, xs: Vec<Term>, z: Term, link: Link) {
        // with y the extremum: min ≤ each, max ≥ each, and equal to one
        let bound = |x: &Term| if is_min { rel(Op::Le, z.clone(), x.clone()) } else { rel(Op::Le, x.clone(), z.clone()) };
        let reach = |x: &Term| if is_min { rel(Op::Le, x.clone(), z.clone()) } else { rel(Op::Le, z.clone(), x.clone()) };
        let all: Vec<Term> = xs.iter().map(bound).collect();
        let some_eq: Vec<Term> = xs.iter().map(|x| rel(Op::Eq, x.clone(), z.clone())).collect();
        let some_reach: Vec<Term> = xs.iter().map(reach).collect();
        // z ≥ min ⇔ some x ≤ z; z ≤ min ⇔ every x ≥ z; dually for max
        let tight = if is_min { Link::Upper } else { Link::Lower };
        match link {
            Link::Exact => {
                self.push_formula(Term::or(some_eq));
                all.into_iter().for_each(|c| self.push_formula(c));
            }
            l if l == tight => self.push_formula(Term::or(some_reach)),
            _ => all.into_iter().for_each(|c| self.push_formula(c)),
        }
    }

    fn element(&mut self, info: &ElementInfo, xs: Vec<Term>, z: Term, link: Link) {
        let n = info.len();
        let (elems, idx) = xs.split_at(n);
        let doms: Vec<Vec<i64>> = idx
            .iter()
            .map(|i| match i {
                Term::Var(v) => self.vars.get(*v).domain.values(),
                c => vec![c.as_const().unwrap()],
            })
            .collect();
        let mut clauses = Vec::new();
        for_each_tuple(&doms, &mut |tuple| {
            let pos = info.offset(tuple).unwrap_or(0);
            let mut lits: Vec<Term> = idx
                .iter()
                .zip(tuple)
                .filter(|(i, _)| !i.is_const())
                .map(|(i, &v)| Term::ne(i.clone(), Term::Int(v)))
                .collect();
            let e = elems[pos].clone();
            lits.push(match link {
                Link::Exact => rel(Op::Eq, e, z.clone()),
                Link::Upper => rel(Op::Le, e, z.clone()),
                Link::Lower => rel(Op::Le, z.clone(), e),
            });
            clauses.push(Term::or(lits));
        });
        clauses.into_iter().for_each(|c| self.push_formula(c));
    }

    fn push_formula(&mut self, f: Term) {
        let f = fold(f);
        if f != Term::Bool(true) {
            self.out.push(f);
        }
    }
}

/// Removes constant operands from disjunctions and conjunctions.
fn fold(f: Term) -> Term {
    match f {
        Term::App(op @ (Op::Or | Op::And), args) => {
            let unit = op == Op::And;
            let mut xs = Vec::with_capacity(args.len());
            for a in args.into_iter().map(fold) {
                match a {
                    Term::Bool(v) if v == unit => {}
                    Term::Bool(v) => return Term::Bool(v),
                    a => xs.push(a),
                }
            }
            match xs.len() {
                0 => Term::Bool(unit),
                1 => xs.pop().unwrap(),
                _ => Term::App(op, xs),
            }
        }
        f => f,
    }
}

/// Flattens constraints and objective in place. Returns the functional
/// definition of every auxiliary, in introduction order, as a term over
/// earlier variables.
pub fn flatten_model(m: &mut GroundModel, opts: FlattenOptions) -> Vec<(VarId, Term)> {
    let cs = std::mem::take(&mut m.constraints);
    let mut f = Flattener { vars: &mut m.vars, opts, out: Vec::new(), memo: HashMap::new(), defs: Vec::new() };
    for c in cs {
        f.top(c);
    }
    if let Some((dir, obj)) = m.objective.take() {
        let o = f.atom(obj, Link::Exact);
        m.objective = Some((dir, o));
    }
    let (out, defs) = (f.out, f.defs);
    if out.contains(&Term::Bool(false)) {
        m.unsat = true;
        m.constraints = vec![Term::Bool(false)];
    } else {
        m.constraints = out;
    }
    defs
}

/// Whether a top-level constraint is in the flat language.
pub fn is_flat(c: &Term, vars: &VarTable) -> bool {
    let atom = |t: &Term| matches!(t, Term::Var(_) | Term::Int(_));
    match c {
        Term::Bool(false) => true,
        Term::App(Op::Eq, a) if a.iter().any(|x| matches!(x, Term::App(..))) => {
            let (f, z) = if atom(&a[0]) { (&a[1], &a[0]) } else { (&a[0], &a[1]) };
            atom(z) && is_definition(f) || is_formula(c, vars)
        }
        Term::App(Op::Le, a) if is_definition(&a[0]) => atom(&a[1]),
        Term::App(Op::Le, a) if is_definition(&a[1]) => atom(&a[0]),
        c => is_formula(c, vars),
    }
}

fn is_definition(f: &Term) -> bool {
    match f {
        Term::App(Op::Product | Op::SafeDiv | Op::SafeMod | Op::SafePow, a) => {
            a.len() == 2 && a.iter().all(|x| matches!(x, Term::Var(_) | Term::Int(_)))
        }
        Term::App(Op::Abs, a) => a.len() == 1 && matches!(a[0], Term::Var(_) | Term::Int(_)),
        _ => false,
    }
}

fn is_formula(f: &Term, vars: &VarTable) -> bool {
    let atom = |t: &Term| matches!(t, Term::Var(_) | Term::Int(_));
    match f {
        Term::Bool(_) => true,
        Term::Var(v) => vars.get(*v).is_bool,
        Term::App(Op::Not | Op::And | Op::Or | Op::Iff, a) => a.iter().all(|x| is_formula(x, vars)),
        Term::App(Op::Le | Op::Eq, a) if matches!(a[0], Term::App(Op::Sum(_), _)) => {
            matches!(a[1], Term::Int(_))
                && a[0].args().iter().all(|l| match l {
                    Term::Var(_) => true,
                    Term::App(Op::ToInt, f) => is_formula(&f[0], vars),
                    _ => false,
                })
        }
        Term::App(Op::Eq | Op::Ne | Op::Lt | Op::Le, a) => a.iter().all(atom),
        Term::App(Op::InSet(_), a) => matches!(a[0], Term::Var(_)),
        Term::App(Op::Table(_), a) => a.iter().all(atom),
        _ => false,
    }
}
