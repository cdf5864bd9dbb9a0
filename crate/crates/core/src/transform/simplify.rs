//! Constant folding and normalisation. Every node is rebuilt through
//! [`mk`], so the output is in normal form whenever the children are:
//! commutative operands sorted, sums collected with at most one constant,
//! comparisons over sums in the form `Σ cᵢ·tᵢ ◦ k`, negations pushed into
//! connectives and comparisons.

use crate::eval::IntDomain;
use crate::term::*;

use super::bounds::interval;

/// Simplifies a term bottom-up.
pub fn simplify(t: Term, vars: &VarTable) -> Term {
    match t {
        Term::App(op, args) => {
            let args = args.into_iter().map(|a| simplify(a, vars)).collect();
            mk(op, args, vars)
        }
        t => t,
    }
}

/// Simplifies every constraint and the objective, splitting top-level
/// conjunctions. A constraint folding to false marks the model unsatisfiable.
pub fn simplify_model(m: &mut GroundModel) {
    let old = std::mem::take(&mut m.constraints);
    let mut out = Vec::with_capacity(old.len());
    fn push(t: Term, out: &mut Vec<Term>, unsat: &mut bool) {
        match t {
            Term::Bool(true) => {}
            Term::Bool(false) => *unsat = true,
            Term::App(Op::And, args) => args.into_iter().for_each(|a| push(a, out, unsat)),
            t => out.push(t),
        }
    }
    for c in old {
        push(simplify(c, &m.vars), &mut out, &mut m.unsat);
    }
    out.sort();
    out.dedup();
    if m.unsat {
        out = vec![Term::Bool(false)];
    }
    m.constraints = out;
    m.positions.clear();
    if let Some((_, obj)) = &mut m.objective {
        *obj = simplify(std::mem::replace(obj, Term::Int(0)), &m.vars);
    }
}

fn b(v: bool) -> Term {
    Term::Bool(v)
}

fn fold(op: &Op, args: &[Term]) -> Option<Term> {
    if !args.iter().all(Term::is_const) {
        return None;
    }
    let v = eval_term(&Term::App(op.clone(), args.to_vec()), &|_| 0).ok()?;
    Some(if op.is_bool() && !matches!(op, Op::SafeElement(_) | Op::Element(_)) {
        Term::Bool(v != 0)
    } else if matches!(op, Op::SafeElement(i) | Op::Element(i) if i.bool_base) {
        Term::Bool(v != 0)
    } else {
        Term::Int(v)
    })
}

/// `Σ coefs·args` as a merged list of non-constant terms and a constant.
fn linear(terms: impl IntoIterator<Item = (i64, Term)>) -> Option<(Vec<(i64, Term)>, i64)> {
    let mut acc: Vec<(i128, Term)> = Vec::new();
    let mut k: i128 = 0;
    fn go(c: i128, t: Term, acc: &mut Vec<(i128, Term)>, k: &mut i128) {
        match t {
            Term::Int(v) => *k += c * v as i128,
            Term::Bool(x) => *k += c * x as i128,
            Term::App(Op::Sum(cs), args) => {
                for (c2, a) in cs.into_iter().zip(args) {
                    go(c * c2 as i128, a, acc, k);
                }
            }
            t => acc.push((c, t)),
        }
    }
    for (c, t) in terms {
        go(c as i128, t, &mut acc, &mut k);
    }
    acc.sort_by(|a, b| a.1.cmp(&b.1));
    let mut merged: Vec<(i64, Term)> = Vec::with_capacity(acc.len());
    let mut cur: Option<(i128, Term)> = None;
    for (c, t) in acc {
        match &mut cur {
            Some((c0, t0)) if *t0 == t => *c0 += c,
            _ => {
                if let Some((c0, t0)) = cur.take() {
                    if c0 != 0 {
                        merged.push((i64::try_from(c0).ok()?, t0));
                    }
                }
                cur = Some((c, t));
            }
        }
    }
    if let Some((c0, t0)) = cur {
        if c0 != 0 {
            merged.push((i64::try_from(c0).ok()?, t0));
        }
    }
    Some((merged, i64::try_from(k).ok()?))
}

fn build_sum(terms: Vec<(i64, Term)>, k: i64) -> Term {
    if terms.is_empty() {
        return Term::Int(k);
    }
    if k == 0 && terms.len() == 1 && terms[0].0 == 1 {
        return terms.into_iter().next().unwrap().1;
    }
    let (mut c, mut a): (Vec<i64>, Vec<Term>) = terms.into_iter().unzip();
    if k != 0 {
        c.push(1);
        a.push(Term::Int(k));
    }
    Term::App(Op::Sum(c), a)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// The negation of a simplified boolean term, simplified.
pub fn negate(t: Term, vars: &VarTable) -> Term {
    mk(Op::Not, vec![t], vars)
}

fn is_bool_var(t: &Term, vars: &VarTable) -> bool {
    matches!(t, Term::Var(v) if vars.get(*v).is_bool)
}

/// The boolean behind a 0/1 integer view, if any.
fn as_bool_view(t: &Term, vars: &VarTable) -> Option<Term> {
    match t {
        Term::Var(_) if is_bool_var(t, vars) => Some(t.clone()),
        Term::App(Op::ToInt, a) => Some(a[0].clone()),
        _ => None,
    }
}

fn has_sum(t: &Term) -> bool {
    matches!(t, Term::App(Op::Sum(_), _))
}

/// Builds a comparison in normal form from simplified operands.
fn compare(op: Op, x: Term, y: Term, vars: &VarTable) -> Term {
    if let Some(t) = fold(&op, &[x.clone(), y.clone()]) {
        return t;
    }
    if x == y {
        return b(matches!(op, Op::Eq | Op::Le));
    }
    if matches!(op, Op::Eq | Op::Ne) {
        let eq = op == Op::Eq;
        for (p, q) in [(&x, &y), (&y, &x)] {
            if let (Some(f), Some(c)) = (as_bool_view(p, vars), q.as_const()) {
                return match c {
                    1 => if eq { f } else { negate(f, vars) },
                    0 => if eq { negate(f, vars) } else { f },
                    _ => b(!eq),
                };
            }
        }
        if let (Some(f), Some(g)) = (as_bool_view(&x, vars), as_bool_view(&y, vars)) {
            let iff = mk(Op::Iff, vec![f, g], vars);
            return if eq { iff } else { negate(iff, vars) };
        }
    }
    let (xl, xh) = interval(&x, vars);
    let (yl, yh) = interval(&y, vars);
    match op {
        Op::Le if xh <= yl => return b(true),
        Op::Le if xl > yh => return b(false),
        Op::Lt if xh < yl => return b(true),
        Op::Lt if xl >= yh => return b(false),
        Op::Eq if xh < yl || yh < xl => return b(false),
        Op::Ne if xh < yl || yh < xl => return b(true),
        _ => {}
    }
    for (p, q) in [(&x, &y), (&y, &x)] {
        if let (Term::Var(v), Some(c)) = (p, q.as_const()) {
            if matches!(op, Op::Eq | Op::Ne) && !vars.get(*v).domain.contains(c) {
                return b(op == Op::Ne);
            }
        }
    }
    if has_sum(&x) || has_sum(&y) {
        if let Some(t) = compare_linear(op.clone(), &x, &y, vars) {
            return t;
        }
    }
    match (op, x, y) {
        (Op::Lt, a, Term::Int(c)) => Term::le(a, Term::Int(c - 1)),
        (Op::Lt, Term::Int(c), a) => Term::le(Term::Int(c + 1), a),
        (op @ (Op::Eq | Op::Ne), a, c) => {
            let (p, q) = if a >= c { (a, c) } else { (c, a) };
            Term::App(op, vec![p, q])
        }
        (op, a, c) => Term::App(op, vec![a, c]),
    }
}

fn compare_linear(op: Op, x: &Term, y: &Term, vars: &VarTable) -> Option<Term> {
    let (mut terms, k0) = linear([(1, x.clone()), (-1, y.clone())])?;
    // Σ terms + k0 op 0
    let mut k = k0.checked_neg()?;
    let mut op = op;
    if op == Op::Lt {
        op = Op::Le;
        k = k.checked_sub(1)?;
    }
    if terms.is_empty() {
        return fold(&op, &[Term::Int(0), Term::Int(k)]);
    }
    let g = terms.iter().fold(0, |g, (c, _)| gcd(g, *c));
    if g > 1 {
        match op {
            Op::Le => k = k.div_euclid(g),
            _ if k % g != 0 => return Some(b(op == Op::Ne)),
            _ => k /= g,
        }
        terms.iter_mut().for_each(|(c, _)| *c /= g);
    }
    if matches!(op, Op::Eq | Op::Ne) && terms[0].0 < 0 {
        terms.iter_mut().for_each(|(c, _)| *c = -*c);
        k = -k;
    }
    let rel = |op: Op, a: Term, c: Term| Term::App(op, vec![a, c]);
    Some(match terms.as_slice() {
        [(1, t)] => {
            let t = t.clone();
            return Some(compare(op, t, Term::Int(k), vars));
        }
        [(-1, t)] if op == Op::Le => return Some(compare(Op::Le, Term::Int(-k), t.clone(), vars)),
        [(1, s), (-1, t)] | [(-1, t), (1, s)] if k == 0 && (op == Op::Le || op == Op::Eq || op == Op::Ne) => {
            if op == Op::Le {
                rel(Op::Le, s.clone(), t.clone())
            } else {
                return Some(compare(op, s.clone(), t.clone(), vars));
            }
        }
        _ => {
            let s = build_sum(terms, 0);
            let (lo, hi) = interval(&s, vars);
            match op {
                Op::Le if hi <= k => b(true),
                Op::Le if lo > k => b(false),
                Op::Eq if k < lo || k > hi => b(false),
                Op::Ne if k < lo || k > hi => b(true),
                _ => rel(op, s, Term::Int(k)),
            }
        }
    })
}

fn flatten_same(op: &Op, args: Vec<Term>) -> Vec<Term> {
    let mut out = Vec::with_capacity(args.len());
    for a in args {
        match a {
            Term::App(o, inner) if &o == op => out.extend(inner),
            a => out.push(a),
        }
    }
    out
}

fn junction(is_and: bool, args: Vec<Term>) -> Term {
    let op = if is_and { Op::And } else { Op::Or };
    let mut xs: Vec<Term> = Vec::new();
    for a in flatten_same(&op, args) {
        match a {
            Term::Bool(v) if v == is_and => {}
            Term::Bool(_) => return b(!is_and),
            a => xs.push(a),
        }
    }
    xs.sort();
    xs.dedup();
    for x in &xs {
        if let Term::App(Op::Not, inner) = x {
            if xs.binary_search(&inner[0]).is_ok() {
                return b(!is_and);
            }
        }
    }
    match xs.len() {
        0 => b(is_and),
        1 => xs.pop().unwrap(),
        _ => Term::App(op, xs),
    }
}

/// Builds a node from simplified children and normalises it.
pub fn mk(op: Op, mut args: Vec<Term>, vars: &VarTable) -> Term {
    match op {
        Op::Sum(c) => match linear(c.into_iter().zip(args.iter().cloned())) {
            Some((terms, k)) => build_sum(terms, k),
            None => Term::App(Op::Sum(vec![1; args.len()]), args),
        },
        Op::Product => {
            let mut k: i64 = 1;
            let mut rest = Vec::new();
            for a in flatten_same(&Op::Product, args) {
                match a.as_const() {
                    Some(v) => match k.checked_mul(v) {
                        Some(p) => k = p,
                        None => rest.push(Term::Int(v)),
                    },
                    None => rest.push(a),
                }
            }
            if k == 0 {
                return Term::Int(0);
            }
            rest.sort();
            let p = match rest.len() {
                0 => return Term::Int(k),
                1 => rest.pop().unwrap(),
                _ => Term::App(Op::Product, rest),
            };
            if k == 1 {
                p
            } else {
                mk(Op::Sum(vec![k]), vec![p], vars)
            }
        }
        Op::SafeDiv | Op::SafeMod | Op::SafePow | Op::Div | Op::Mod | Op::Pow => {
            if let Some(t) = fold(&op, &args) {
                return t;
            }
            let total = !op.is_partial();
            match (&op, args[1].as_const()) {
                (Op::SafeDiv | Op::Div, Some(1)) | (Op::SafePow | Op::Pow, Some(1)) => args.swap_remove(0),
                (Op::SafeDiv | Op::Div, Some(-1)) => mk(Op::Sum(vec![-1]), vec![args.swap_remove(0)], vars),
                (Op::SafeMod | Op::Mod, Some(1 | -1)) => Term::Int(0),
                (Op::SafeDiv | Op::SafeMod, Some(0)) if total => Term::Int(0),
                _ => Term::App(op, args),
            }
        }
        Op::Abs => {
            if let Some(t) = fold(&op, &args) {
                return t;
            }
            let (lo, hi) = interval(&args[0], vars);
            if lo >= 0 {
                return args.swap_remove(0);
            }
            if hi <= 0 {
                return mk(Op::Sum(vec![-1]), args, vars);
            }
            if matches!(&args[0], Term::App(Op::Abs, _)) {
                return args.swap_remove(0);
            }
            Term::App(Op::Abs, args)
        }
        Op::Min | Op::Max => {
            let is_min = op == Op::Min;
            let mut xs = Vec::new();
            let mut k: Option<i64> = None;
            for a in flatten_same(&op, args) {
                match a.as_const() {
                    Some(v) => k = Some(k.map_or(v, |k| if is_min { k.min(v) } else { k.max(v) })),
                    None => xs.push(a),
                }
            }
            if let Some(k) = k {
                // a constant dominated by some argument's bounds is redundant
                let dominated = xs.iter().any(|x| {
                    let (lo, hi) = interval(x, vars);
                    if is_min { hi <= k } else { lo >= k }
                });
                if !dominated {
                    xs.push(Term::Int(k));
                }
            }
            xs.sort();
            xs.dedup();
            if xs.len() == 1 {
                xs.pop().unwrap()
            } else {
                Term::App(op, xs)
            }
        }
        Op::Element(ref info) | Op::SafeElement(ref info) => {
            if let Some(t) = fold(&op, &args) {
                return t;
            }
            let n = info.len();
            let safe = matches!(op, Op::SafeElement(_));
            let idx = &args[n..];
            if idx.iter().all(Term::is_const) && safe {
                let pos: Vec<i64> = idx.iter().map(|t| t.as_const().unwrap()).collect();
                let at = info.offset(&pos).unwrap_or(0);
                return args.swap_remove(at);
            }
            if safe && n > 0 && args[..n].iter().all(|e| *e == args[0]) {
                return args.swap_remove(0);
            }
            Term::App(op, args)
        }
        Op::ToInt => match args.pop().unwrap() {
            Term::Bool(v) => Term::Int(v as i64),
            t @ Term::Var(_) => t,
            t => Term::App(Op::ToInt, vec![t]),
        },
        Op::Not => match args.pop().unwrap() {
            Term::Bool(v) => b(!v),
            Term::App(Op::Not, mut a) => a.pop().unwrap(),
            Term::App(Op::Eq, a) => mk(Op::Ne, a, vars),
            Term::App(Op::Ne, a) => mk(Op::Eq, a, vars),
            Term::App(Op::Lt, mut a) => {
                let y = a.pop().unwrap();
                let x = a.pop().unwrap();
                mk(Op::Le, vec![y, x], vars)
            }
            Term::App(Op::Le, mut a) => {
                let y = a.pop().unwrap();
                let x = a.pop().unwrap();
                mk(Op::Lt, vec![y, x], vars)
            }
            Term::App(Op::And, a) => {
                junction(false, a.into_iter().map(|x| negate(x, vars)).collect())
            }
            Term::App(Op::Or, a) => {
                junction(true, a.into_iter().map(|x| negate(x, vars)).collect())
            }
            Term::App(Op::Iff, mut a) => {
                let y = a.pop().unwrap();
                let x = a.pop().unwrap();
                mk(Op::Iff, vec![x, negate(y, vars)], vars)
            }
            Term::App(Op::InSet(d), a) => {
                mk(Op::InSet(IntDomain::unbounded().minus(&d)), a, vars)
            }
            t => Term::App(Op::Not, vec![t]),
        },
        Op::And => junction(true, args),
        Op::Or => junction(false, args),
        Op::Imp => {
            let y = args.pop().unwrap();
            let x = args.pop().unwrap();
            junction(false, vec![negate(x, vars), y])
        }
        Op::Iff => {
            let y = args.pop().unwrap();
            let x = args.pop().unwrap();
            match (x, y) {
                (Term::Bool(v), t) | (t, Term::Bool(v)) => {
                    if v {
                        t
                    } else {
                        negate(t, vars)
                    }
                }
                (x, y) if x == y => b(true),
                (x, y) => {
                    if negate(x.clone(), vars) == y {
                        return b(false);
                    }
                    // keep a negation, if any, on the second operand
                    let (x, y) = match (x, y) {
                        (Term::App(Op::Not, mut a), Term::App(Op::Not, mut c)) => {
                            (a.pop().unwrap(), c.pop().unwrap())
                        }
                        (x @ Term::App(Op::Not, _), y) => (y, x),
                        (x, y) => (x, y),
                    };
                    if matches!(y, Term::App(Op::Not, _)) {
                        Term::App(Op::Iff, vec![x, y])
                    } else if x <= y {
                        Term::App(Op::Iff, vec![x, y])
                    } else {
                        Term::App(Op::Iff, vec![y, x])
                    }
                }
            }
        }
        Op::Eq | Op::Ne | Op::Lt | Op::Le => {
            let y = args.pop().unwrap();
            let x = args.pop().unwrap();
            compare(op, x, y, vars)
        }
        Op::InSet(ref d) => {
            if let Some(t) = fold(&op, &args) {
                return t;
            }
            let dom = match &args[0] {
                Term::Var(v) => vars.get(*v).domain.clone(),
                t => {
                    let (lo, hi) = interval(t, vars);
                    IntDomain::range(lo, hi)
                }
            };
            if dom.minus(d).is_empty() {
                return b(true);
            }
            if dom.intersect(d).is_empty() {
                return b(false);
            }
            if let Term::Var(_) = &args[0] {
                // keep only the part of the set that meets the domain
                let d2 = d.intersect(&dom);
                if d2.size() == Some(1) {
                    return compare(Op::Eq, args.swap_remove(0), Term::Int(d2.min_value().unwrap()), vars);
                }
                return Term::App(Op::InSet(d2), args);
            }
            Term::App(op, args)
        }
        Op::AllDiff | Op::AllDiffExcept(_) => {
            if let Some(t) = fold(&op, &args) {
                return t;
            }
            let except = if let Op::AllDiffExcept(k) = op { Some(k) } else { None };
            let mut xs = args;
            xs.sort();
            for w in xs.windows(2) {
                if w[0] == w[1] && except.is_none() {
                    return b(false);
                }
                if w[0] == w[1] && w[0].is_const() && w[0].as_const() != except {
                    return b(false);
                }
            }
            if xs.len() <= 1 {
                return b(true);
            }
            Term::App(op, xs)
        }
        Op::Table(ref rows) => {
            let keep: Vec<Vec<i64>> = rows
                .iter()
                .filter(|r| {
                    r.iter().zip(&args).all(|(v, a)| match a {
                        Term::Var(x) => vars.get(*x).domain.contains(*v),
                        a => a.as_const().is_none_or(|c| c == *v),
                    })
                })
                .cloned()
                .collect();
            if keep.is_empty() {
                return b(false);
            }
            let cols: Vec<usize> = (0..args.len()).filter(|&i| !args[i].is_const()).collect();
            if cols.is_empty() {
                return b(true);
            }
            let mut proj: Vec<Vec<i64>> = keep.iter().map(|r| cols.iter().map(|&i| r[i]).collect()).collect();
            proj.sort();
            proj.dedup();
            let args: Vec<Term> = cols.iter().map(|&i| args[i].clone()).collect();
            if proj.len() as u64 == args_product(&args, vars) {
                return b(true);
            }
            Term::App(Op::Table(std::rc::Rc::new(proj)), args)
        }
        op => match fold(&op, &args) {
            Some(t) => t,
            None => Term::App(op, args),
        },
    }
}

fn args_product(args: &[Term], vars: &VarTable) -> u64 {
    let mut p: u64 = 1;
    for a in args {
        let s = match a {
            Term::Var(v) => vars.get(*v).domain.size().unwrap_or(u64::MAX),
            _ => u64::MAX,
        };
        p = p.saturating_mul(s);
    }
    p
}
