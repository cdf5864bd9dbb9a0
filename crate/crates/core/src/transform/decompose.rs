//! Decomposition of global constraints into linear sums over boolean
//! facts and lexicographic ordering into nested disjunctions.

use crate::term::*;

use super::bounds::term_domain;
use super::simplify::simplify_model;

fn count(xs: &[Term], v: i64) -> Term {
    Term::sum(xs.iter().map(|x| (1, Term::app(Op::ToInt, vec![Term::eq(x.clone(), Term::Int(v))]))).collect())
}

fn all_diff(xs: &[Term], except: Option<i64>, vars: &VarTable) -> Term {
    let mut vals = crate::eval::IntDomain::empty();
    for x in xs {
        vals = vals.union(&term_domain(x, vars));
    }
    let exact = except.is_none() && vals.size() == Some(xs.len() as u64);
    let mut out = Vec::new();
    for v in vals.iter() {
        if Some(v) == except {
            continue;
        }
        let s = count(xs, v);
        out.push(if exact { Term::eq(s, Term::Int(1)) } else { Term::le(s, Term::Int(1)) });
    }
    Term::and(out)
}

fn lex(a: &[Term], b: &[Term], strict: bool) -> Term {
    match (a.split_first(), b.split_first()) {
        (None, None) => Term::Bool(!strict),
        (None, Some(_)) => Term::Bool(true),
        (Some(_), None) => Term::Bool(false),
        (Some((x, a)), Some((y, b))) => Term::or(vec![
            Term::lt(x.clone(), y.clone()),
            Term::and(vec![Term::eq(x.clone(), y.clone()), lex(a, b, strict)]),
        ]),
    }
}

pub(crate) fn decompose(t: Term, vars: &VarTable) -> Term {
    let Term::App(op, args) = t else { return t };
    match op {
        Op::AllDiff => all_diff(&args, None, vars),
        Op::AllDiffExcept(k) => all_diff(&args, Some(k), vars),
        Op::Gcc(vals) => {
            let n = args.len() - vals.len();
            let (xs, counts) = args.split_at(n);
            Term::and(vals.iter().zip(counts).map(|(&v, c)| Term::eq(count(xs, v), c.clone())).collect())
        }
        Op::AtMost(counts, vals) => {
            Term::and(vals.iter().zip(&counts).map(|(&v, &c)| Term::le(count(&args, v), Term::Int(c))).collect())
        }
        Op::AtLeast(counts, vals) => {
            Term::and(vals.iter().zip(&counts).map(|(&v, &c)| Term::le(Term::Int(c), count(&args, v))).collect())
        }
        Op::LexLt(n) | Op::LexLe(n) => lex(&args[..n], &args[n..], matches!(op, Op::LexLt(_))),
        op => Term::App(op, args),
    }
}

/// Replaces every global constraint except `table` by its decomposition.
pub fn decompose_globals(m: &mut GroundModel) {
    let vars = &m.vars;
    let cs = std::mem::take(&mut m.constraints);
    m.constraints = cs.into_iter().map(|c| c.map_bottom_up(&mut |t| decompose(t, vars))).collect();
    simplify_model(m);
}
