//! CNF encoding of flat models.
//!
//! Every active variable gets a [`VarEnc`]; literal kinds are chosen by
//! a planning pass (order literals for inequalities, linear sums and the
//! objective, direct literals otherwise). Missing literals are added on
//! demand with channelling clauses, which gives the same variable count.

pub mod amo;
pub mod cnf;
mod sum;
mod table;
pub mod varenc;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::frontend::ast::ObjectiveDir;
use crate::term::*;

pub use amo::AmoScheme;
pub use cnf::{Cnf, Lit, FALSE, TRUE};
pub use varenc::VarEnc;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SatOptions {
    pub amo: AmoScheme,
    /// Abort once this many clauses exist.
    pub clause_limit: Option<u64>,
}

/// A CNF together with the encodings needed to read solutions back.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub cnf: Cnf,
    /// Encoding of each active variable, indexed by `VarId`.
    pub vars: Vec<Option<VarEnc>>,
    pub objective: Option<(ObjectiveDir, Objective)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Var(VarId),
    Const(i64),
}

impl Encoding {
    /// Value of an active variable under a model.
    pub fn value(&self, v: VarId, model: &dyn Fn(Lit) -> bool) -> Result<i64> {
        match &self.vars[v] {
            Some(e) => e.decode(model).map_err(|m| Error::Internal(format!("variable {v}: {m}"))),
            None => Err(Error::Internal(format!("variable {v} has no encoding"))),
        }
    }

    pub fn objective_value(&self, model: &dyn Fn(Lit) -> bool) -> Result<Option<i64>> {
        match self.objective {
            None => Ok(None),
            Some((_, Objective::Const(c))) => Ok(Some(c)),
            Some((_, Objective::Var(v))) => self.value(v, model).map(Some),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    direct: bool,
    order: bool,
}

fn is_def_op(t: &Term) -> bool {
    matches!(t, Term::App(Op::Product | Op::SafeDiv | Op::SafeMod | Op::SafePow | Op::Abs, _))
}

/// The `(function, target, link)` of a top-level definition, where link
/// 0 is `z = f`, 1 is `f ≤ z` and −1 is `z ≤ f`.
fn as_definition(c: &Term) -> Option<(&Term, &Term, i8)> {
    match c {
        Term::App(Op::Eq, a) if is_def_op(&a[0]) => Some((&a[0], &a[1], 0)),
        Term::App(Op::Eq, a) if is_def_op(&a[1]) => Some((&a[1], &a[0], 0)),
        Term::App(Op::Le, a) if is_def_op(&a[0]) => Some((&a[0], &a[1], 1)),
        Term::App(Op::Le, a) if is_def_op(&a[1]) => Some((&a[1], &a[0], -1)),
        _ => None,
    }
}

fn plan(m: &GroundModel) -> Vec<Needs> {
    let mut needs = vec![Needs::default(); m.vars.len()];
    fn mark(t: &Term, needs: &mut [Needs], order: bool) {
        match t {
            Term::Var(v) if order => needs[*v].order = true,
            Term::Var(v) => needs[*v].direct = true,
            Term::App(Op::Le | Op::Eq, a) if matches!(a[0], Term::App(Op::Sum(_), _)) => {
                for l in a[0].args() {
                    mark(l, needs, true);
                }
            }
            Term::App(Op::Le | Op::Lt, a) => a.iter().for_each(|x| mark(x, needs, true)),
            Term::App(_, a) => a.iter().for_each(|x| mark(x, needs, false)),
            _ => {}
        }
    }
    for c in &m.constraints {
        match as_definition(c) {
            Some((f, z, link)) => {
                mark(f, &mut needs, false);
                mark(z, &mut needs, link != 0);
            }
            None => mark(c, &mut needs, false),
        }
    }
    if let Some((_, Term::Var(v))) = &m.objective {
        needs[*v].order = true;
    }
    needs
}

pub(crate) struct Encoder<'a> {
    vars: &'a VarTable,
    enc: Vec<Option<VarEnc>>,
    cnf: Cnf,
    cache: HashMap<Term, Lit>,
    opts: SatOptions,
    error: Option<Error>,
}

/// Encodes a flattened model.
pub fn encode(m: &GroundModel, opts: SatOptions) -> Result<Encoding> {
    let mut cnf = Cnf::new();
    cnf.set_limit(opts.clause_limit);
    let mut enc: Vec<Option<VarEnc>> = vec![None; m.vars.len()];
    if m.unsat {
        cnf.add(&[]);
        return Ok(Encoding { cnf, vars: enc, objective: None });
    }
    let needs = plan(m);
    for (v, info) in m.vars.iter() {
        if info.state != VarState::Active {
            continue;
        }
        if info.domain.is_empty() {
            cnf.add(&[]);
            continue;
        }
        let n = needs[v];
        let e = VarEnc::new(&mut cnf, &info.domain, n.direct || !n.order, n.order);
        annotate(&mut cnf, &info.name, &e);
        enc[v] = Some(e);
    }
    let mut e = Encoder { vars: &m.vars, enc, cnf, cache: HashMap::new(), opts, error: None };
    for c in &m.constraints {
        e.post(c)?;
        if let Some(err) = e.error.take() {
            return Err(err);
        }
        if e.cnf.exceeded() {
            return Err(Error::ClauseLimit(opts.clause_limit.unwrap_or(0)));
        }
    }
    let objective = match &m.objective {
        None => None,
        Some((dir, Term::Var(v))) if e.enc[*v].is_some() => Some((*dir, Objective::Var(*v))),
        Some((dir, Term::Var(v))) => Some((*dir, Objective::Const(m.vars.value_of(*v, &|_| 0)))),
        Some((dir, t)) => match t.as_const() {
            Some(c) => Some((*dir, Objective::Const(c))),
            None => return Err(Error::Internal("objective was not flattened".into())),
        },
    };
    if e.cnf.exceeded() {
        return Err(Error::ClauseLimit(opts.clause_limit.unwrap_or(0)));
    }
    Ok(Encoding { cnf: e.cnf, vars: e.enc, objective })
}

fn annotate(cnf: &mut Cnf, name: &str, e: &VarEnc) {
    match e {
        VarEnc::Const(_) => {}
        VarEnc::Two { hi, v, .. } => cnf.annotate(*v, format!("{name} = {hi}")),
        VarEnc::Int(i) => {
            if let Some(d) = &i.direct {
                for (l, a) in d.iter().zip(&i.dom) {
                    cnf.annotate(*l, format!("{name} = {a}"));
                }
            }
            if let Some(o) = &i.order {
                for (l, a) in o.iter().zip(&i.dom) {
                    cnf.annotate(*l, format!("{name} <= {a}"));
                }
            }
        }
    }
}

impl<'a> Encoder<'a> {
    fn enc(&self, v: VarId) -> &VarEnc {
        self.enc_ref(v)
    }

    fn enc_ref(&self, v: VarId) -> &VarEnc {
        self.enc[v].as_ref().unwrap_or_else(|| panic!("variable {} is not encoded", self.vars.get(v).name))
    }

    fn eq(&mut self, v: VarId, a: i64) -> Lit {
        let e = self.enc[v].as_mut().unwrap();
        e.eq_or_add(&mut self.cnf, a)
    }

    fn le(&mut self, v: VarId, a: i64) -> Lit {
        let e = self.enc[v].as_mut().unwrap();
        e.le_or_add(&mut self.cnf, a)
    }

    /// Values of a variable or constant operand.
    fn vals(&self, x: &Term) -> Vec<i64> {
        match x {
            Term::Var(v) => self.enc_ref(*v).values(),
            c => vec![c.as_const().expect("operand")],
        }
    }

    fn xeq(&mut self, x: &Term, a: i64) -> Lit {
        match x {
            Term::Var(v) => self.eq(*v, a),
            c => if c.as_const() == Some(a) { TRUE } else { FALSE },
        }
    }

    fn xle(&mut self, x: &Term, a: i64) -> Lit {
        match x {
            Term::Var(v) => self.le(*v, a),
            c => if c.as_const().unwrap() <= a { TRUE } else { FALSE },
        }
    }

    fn and_lit(&mut self, ls: &[Lit]) -> Lit {
        -self.or_lit(&ls.iter().map(|l| -l).collect::<Vec<_>>())
    }

    fn or_lit(&mut self, ls: &[Lit]) -> Lit {
        let mut xs: Vec<Lit> = Vec::with_capacity(ls.len());
        for &l in ls {
            if l == TRUE {
                return TRUE;
            }
            if l != FALSE && !xs.contains(&l) {
                xs.push(l);
            }
        }
        match xs.len() {
            0 => FALSE,
            1 => xs[0],
            _ => {
                let z = self.cnf.fresh();
                for &l in &xs {
                    self.cnf.imply(l, z);
                }
                let mut c = vec![-z];
                c.extend(&xs);
                self.cnf.add(&c);
                z
            }
        }
    }

    fn iff_lit(&mut self, a: Lit, b: Lit) -> Lit {
        match (a, b) {
            (TRUE, x) | (x, TRUE) => x,
            (FALSE, x) | (x, FALSE) => -x,
            (a, b) if a == b => TRUE,
            (a, b) if a == -b => FALSE,
            (a, b) => {
                let z = self.cnf.fresh();
                self.cnf.add(&[-z, -a, b]);
                self.cnf.add(&[-z, a, -b]);
                self.cnf.add(&[z, a, b]);
                self.cnf.add(&[z, -a, -b]);
                z
            }
        }
    }

    /// Exact CNF of a relation atom or its negation over operands.
    fn relation_cnf(&mut self, op: &Op, x: &Term, y: &Term, neg: bool) -> Vec<Vec<Lit>> {
        let (op, x, y) = match (op, neg) {
            (Op::Eq, true) => (Op::Ne, x, y),
            (Op::Ne, true) => (Op::Eq, x, y),
            (Op::Le, true) => (Op::Lt, y, x),
            (Op::Lt, true) => (Op::Le, y, x),
            (op, _) => (op.clone(), x, y),
        };
        let mut out = Vec::new();
        match op {
            Op::Eq => {
                for a in self.vals(x) {
                    out.push(vec![-self.xeq(x, a), self.xeq(y, a)]);
                }
                for b in self.vals(y) {
                    out.push(vec![-self.xeq(y, b), self.xeq(x, b)]);
                }
            }
            Op::Ne => {
                let ys = self.vals(y);
                for a in self.vals(x) {
                    if ys.binary_search(&a).is_ok() {
                        out.push(vec![-self.xeq(x, a), -self.xeq(y, a)]);
                    }
                }
            }
            Op::Le | Op::Lt => {
                // x ≤ y + k: x ≥ a → y ≥ a − k
                let k = if op == Op::Lt { -1 } else { 0 };
                for a in self.vals(x) {
                    out.push(vec![self.xle(x, a - 1), -self.xle(y, a - 1 - k)]);
                }
            }
            op => unreachable!("relation {}", op.name()),
        }
        out
    }

    fn inset_cnf(&mut self, d: &crate::eval::IntDomain, x: &Term, neg: bool) -> Vec<Vec<Lit>> {
        let mut out = Vec::new();
        for a in self.vals(x) {
            if d.contains(a) == neg {
                out.push(vec![-self.xeq(x, a)]);
            }
        }
        out
    }

    /// Exact CNF of an atom (negated with `neg`) when it has one over
    /// existing literals.
    fn atom_cnf(&mut self, t: &Term, neg: bool) -> Option<Vec<Vec<Lit>>> {
        match t {
            Term::App(op @ (Op::Eq | Op::Ne | Op::Lt | Op::Le), a)
                if !matches!(a[0], Term::App(..)) && !matches!(a[1], Term::App(..)) =>
            {
                Some(self.relation_cnf(op, &a[0], &a[1], neg))
            }
            Term::App(Op::InSet(d), a) => Some(self.inset_cnf(d, &a[0], neg)),
            _ => None,
        }
    }

    fn reify_cnf(&mut self, pos: Vec<Vec<Lit>>, neg: Vec<Vec<Lit>>) -> Lit {
        let trivial = |cs: &Vec<Vec<Lit>>| cs.iter().all(|c| c.contains(&TRUE));
        if trivial(&pos) {
            return TRUE;
        }
        if trivial(&neg) {
            return FALSE;
        }
        if pos.len() == 1 && neg.iter().all(|c| c.len() == 1) && neg.len() == pos[0].len() {
            // a single clause whose negation is the units of its literals
            let c: Vec<Lit> = pos[0].clone();
            return self.or_lit(&c);
        }
        let l = self.cnf.fresh();
        for mut c in pos {
            c.push(-l);
            self.cnf.add(&c);
        }
        for mut c in neg {
            c.push(l);
            self.cnf.add(&c);
        }
        l
    }

    /// A literal equivalent to a flat formula.
    fn lit(&mut self, t: &Term) -> Lit {
        match t {
            Term::Bool(b) => return if *b { TRUE } else { FALSE },
            Term::Var(v) => return self.eq(*v, 1),
            Term::App(Op::Not, a) => return -self.lit(&a[0]),
            _ => {}
        }
        if let Some(&l) = self.cache.get(t) {
            return l;
        }
        let l = self.lit_fresh(t);
        self.cache.insert(t.clone(), l);
        l
    }

    fn lit_fresh(&mut self, t: &Term) -> Lit {
        let Term::App(op, a) = t else { unreachable!() };
        match op {
            Op::And => {
                let ls: Vec<Lit> = a.iter().map(|x| self.lit(x)).collect();
                self.and_lit(&ls)
            }
            Op::Or => {
                let ls: Vec<Lit> = a.iter().map(|x| self.lit(x)).collect();
                self.or_lit(&ls)
            }
            Op::Iff => {
                let (x, y) = (self.lit(&a[0]), self.lit(&a[1]));
                self.iff_lit(x, y)
            }
            Op::Le | Op::Eq if matches!(a[0], Term::App(Op::Sum(_), _)) => {
                let Term::App(Op::Sum(cs), leaves) = &a[0] else { unreachable!() };
                let k = a[1].as_const().expect("linear bound");
                self.linear_lit(cs, leaves, k, *op == Op::Eq).unwrap_or_else(|e| {
                    self.fail(e);
                    FALSE
                })
            }
            Op::Table(rows) => self.table_lit(a, rows),
            _ => {
                let pos = self.atom_cnf(t, false).unwrap_or_else(|| panic!("not a flat atom: {}", show(t, self.vars)));
                let neg = self.atom_cnf(t, true).unwrap();
                self.reify_cnf(pos, neg)
            }
        }
    }

    /// Keeps the first error raised below a literal; `encode` reports it.
    fn fail(&mut self, e: Error) {
        self.error.get_or_insert(e);
    }

    /// Posts a top-level flat constraint.
    fn post(&mut self, c: &Term) -> Result<()> {
        if let Some((f, z, link)) = as_definition(c) {
            self.definition(f, z, link);
            return Ok(());
        }
        match c {
            Term::Bool(true) => {}
            Term::Bool(false) => self.cnf.add(&[]),
            Term::App(Op::And, a) => {
                for x in a {
                    self.post(x)?;
                }
            }
            Term::App(Op::Or, a) => {
                let ls: Vec<Lit> = a.iter().map(|x| self.lit(x)).collect();
                self.cnf.add(&ls);
            }
            Term::App(Op::Not, a) => self.post_not(&a[0])?,
            Term::App(Op::Iff, a) => {
                let (x, y) = (self.lit(&a[0]), self.lit(&a[1]));
                self.cnf.add(&[-x, y]);
                self.cnf.add(&[x, -y]);
            }
            Term::App(op @ (Op::Le | Op::Eq), a) if matches!(a[0], Term::App(Op::Sum(_), _)) => {
                let Term::App(Op::Sum(cs), leaves) = &a[0] else { unreachable!() };
                let k = a[1].as_const().expect("linear bound");
                self.post_linear(cs, leaves, k, *op == Op::Eq)?;
            }
            Term::App(Op::Table(rows), a) => self.post_table(a, rows),
            t => match self.atom_cnf(t, false) {
                Some(cs) => cs.iter().for_each(|c| self.cnf.add(c)),
                None => {
                    let l = self.lit(t);
                    self.cnf.unit(l);
                }
            },
        }
        Ok(())
    }

    fn post_not(&mut self, t: &Term) -> Result<()> {
        match t {
            Term::App(Op::Not, a) => self.post(&a[0]),
            Term::App(Op::Or, a) => {
                for x in a {
                    self.post_not(x)?;
                }
                Ok(())
            }
            Term::App(Op::And, a) => {
                let ls: Vec<Lit> = a.iter().map(|x| -self.lit(x)).collect();
                self.cnf.add(&ls);
                Ok(())
            }
            t => {
                match self.atom_cnf(t, true) {
                    Some(cs) => cs.iter().for_each(|c| self.cnf.add(c)),
                    None => {
                        let l = self.lit(t);
                        self.cnf.unit(-l);
                    }
                }
                Ok(())
            }
        }
    }

    /// `z = f(args)`, `f(args) ≤ z` or `z ≤ f(args)` for an arithmetic
    /// operator over operands.
    fn definition(&mut self, f: &Term, z: &Term, link: i8) {
        let Term::App(op, args) = f else { unreachable!() };
        let doms: Vec<Vec<i64>> = args.iter().map(|a| self.vals(a)).collect();
        let eval = |tuple: &[i64]| eval_term(&Term::App(op.clone(), tuple.iter().map(|&v| Term::Int(v)).collect()), &|_| 0).ok();
        if link == 0 && z.is_const() {
            // support encoding against a constant target
            let c = z.as_const().unwrap();
            let mut tuples = Vec::new();
            crate::transform::bounds::for_each_tuple(&doms, &mut |t| tuples.push(t.to_vec()));
            for (i, x) in args.iter().enumerate() {
                for &a in &doms[i] {
                    let mut clause = vec![-self.xeq(x, a)];
                    if args.len() == 2 {
                        let (j, y) = (1 - i, &args[1 - i]);
                        for t in tuples.iter().filter(|t| t[i] == a && eval(t) == Some(c)) {
                            clause.push(self.xeq(y, t[j]));
                        }
                    } else if eval(&[a]) == Some(c) {
                        continue;
                    }
                    self.cnf.add(&clause);
                }
            }
            return;
        }
        let mut tuples = Vec::new();
        crate::transform::bounds::for_each_tuple(&doms, &mut |t| tuples.push(t.to_vec()));
        for t in &tuples {
            let mut clause: Vec<Lit> = args.iter().zip(t).map(|(x, &a)| -self.xeq(x, a)).collect();
            if let Some(v) = eval(t) {
                clause.push(match link {
                    0 => self.xeq(z, v),
                    1 => -self.xle(z, v - 1),
                    _ => self.xle(z, v),
                });
            }
            self.cnf.add(&clause);
        }
        if link == 0 && *op == Op::Abs {
            // supports of each target value, for propagation towards x
            let x = &args[0];
            for b in self.vals(z) {
                let mut clause = vec![-self.xeq(z, b)];
                for &a in &doms[0] {
                    if a.checked_abs() == Some(b) {
                        clause.push(self.xeq(x, a));
                    }
                }
                self.cnf.add(&clause);
            }
        }
    }
}
