//! Common subexpression elimination. Repeated decision subexpressions are
//! replaced by one auxiliary variable defined by an equality (integers) or
//! an equivalence (booleans), so every auxiliary is functional.

use std::collections::{BTreeMap, HashMap};

use crate::term::*;

use super::bounds::term_domain;
use super::simplify::{negate, simplify};

fn has_var(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| found |= matches!(s, Term::Var(_)));
    found
}

/// Subterms that are already as cheap as a variable.
fn is_trivial(t: &Term) -> bool {
    match t {
        Term::App(Op::Not | Op::ToInt, a) => matches!(a[0], Term::Var(_)),
        Term::App(Op::Eq | Op::Ne | Op::Lt | Op::Le, a) => {
            a.iter().all(|x| matches!(x, Term::Var(_) | Term::Int(_) | Term::Bool(_)))
        }
        Term::App(Op::InSet(_), a) => matches!(a[0], Term::Var(_)),
        Term::App(..) => false,
        _ => true,
    }
}

/// Canonical key and polarity: with `active`, a boolean term and its
/// negation share one key.
fn key(t: &Term, active: bool, vars: &VarTable) -> (Term, bool) {
    if active && t.is_bool(vars) {
        let n = negate(t.clone(), vars);
        if n < *t {
            return (n, false);
        }
    }
    (t.clone(), true)
}

fn count(t: &Term, root: bool, active: bool, vars: &VarTable, counts: &mut HashMap<Term, usize>) {
    if let Term::App(_, args) = t {
        if !root && !is_trivial(t) && has_var(t) {
            *counts.entry(key(t, active, vars).0).or_default() += 1;
            if let (true, Term::App(Op::Not, a)) = (active, t) {
                // the operand shares this key
                for b in a[0].args() {
                    count(b, false, active, vars, counts);
                }
                return;
            }
        }
        for a in args {
            count(a, false, active, vars, counts);
        }
    }
}

fn replace(t: Term, root: bool, active: bool, vars: &VarTable, map: &HashMap<Term, VarId>) -> Term {
    if !root && matches!(t, Term::App(..)) {
        let (k, pos) = key(&t, active, vars);
        if let Some(&v) = map.get(&k) {
            return if pos { Term::Var(v) } else { Term::not(Term::Var(v)) };
        }
    }
    match t {
        Term::App(op, args) => {
            Term::App(op, args.into_iter().map(|a| replace(a, false, active, vars, map)).collect())
        }
        t => t,
    }
}

/// Replaces repeated subterms below the root of a definition body. A
/// negation shares its operand's key, so the operand stays expanded too.
fn expand_root(t: Term, active: bool, vars: &VarTable, map: &HashMap<Term, VarId>) -> Term {
    match t {
        Term::App(Op::Not, mut a) if active => Term::not(expand_root(a.pop().unwrap(), active, vars, map)),
        Term::App(op, args) => Term::App(op, args.into_iter().map(|a| replace(a, false, active, vars, map)).collect()),
        t => t,
    }
}

/// Identical CSE, or active CSE when `active` (negated boolean
/// subexpressions share the auxiliary of their complement).
pub fn eliminate_common(m: &mut GroundModel, active: bool) {
    for _ in 0..16 {
        let mut counts = HashMap::new();
        for c in &m.constraints {
            count(c, true, active, &m.vars, &mut counts);
        }
        if let Some((_, o)) = &m.objective {
            count(o, false, active, &m.vars, &mut counts);
        }
        let mut repeated: Vec<Term> = counts.into_iter().filter(|(_, n)| *n >= 2).map(|(t, _)| t).collect();
        if repeated.is_empty() {
            return;
        }
        repeated.sort();
        let mut map = HashMap::new();
        let mut defs = Vec::new();
        for t in repeated {
            let is_bool = t.is_bool(&m.vars);
            let dom = term_domain(&t, &m.vars);
            let v = m.vars.add_aux(dom, is_bool);
            map.insert(t.clone(), v);
            defs.push((v, t, is_bool));
        }
        let vars = &m.vars;
        let cs = std::mem::take(&mut m.constraints);
        let mut out: Vec<Term> = cs.into_iter().map(|c| replace(c, true, active, vars, &map)).collect();
        for (v, t, is_bool) in defs {
            let body = expand_root(t, active, vars, &map);
            let op = if is_bool { Op::Iff } else { Op::Eq };
            out.push(Term::App(op, vec![Term::Var(v), body]));
        }
        if let Some((_, o)) = &mut m.objective {
            *o = replace(std::mem::replace(o, Term::Int(0)), false, active, vars, &map);
        }
        m.constraints = out.into_iter().map(|c| simplify(c, vars)).collect();
    }
}

/// Operand view of an associative-commutative node.
fn ac_operands(t: &Term) -> Option<(u8, Vec<(i64, Term)>)> {
    match t {
        Term::App(Op::Sum(c), a) => Some((0, c.iter().copied().zip(a.iter().cloned()).filter(|(_, x)| !x.is_const()).collect())),
        Term::App(Op::Product, a) => Some((1, a.iter().map(|x| (1, x.clone())).collect())),
        Term::App(Op::And, a) => Some((2, a.iter().map(|x| (1, x.clone())).collect())),
        Term::App(Op::Or, a) => Some((3, a.iter().map(|x| (1, x.clone())).collect())),
        _ => None,
    }
}

const MAX_OPERANDS: usize = 64;

type PairKey = (u8, Term, i64, Term, i64);

/// Normalised pair key and the multiplier relating it to the operands.
fn pair_key(kind: u8, a: &(i64, Term), b: &(i64, Term), active: bool) -> Option<(PairKey, i64)> {
    let ((ca, ta), (cb, tb)) = if a.1 <= b.1 { (a, b) } else { (b, a) };
    if kind != 0 {
        return Some(((kind, ta.clone(), 1, tb.clone(), 1), 1));
    }
    let g = gcd(*ca, *cb);
    let mut m = g;
    if *ca < 0 {
        if !active {
            // plain AC-CSE only matches with a positive multiplier
            return Some(((kind, ta.clone(), ca / g, tb.clone(), cb / g), g));
        }
        m = -g;
    }
    Some(((kind, ta.clone(), ca / m, tb.clone(), cb / m), m))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1) as i64
}

fn collect_pairs(t: &Term, active: bool, counts: &mut BTreeMap<PairKey, usize>) {
    if let Some((kind, ops)) = ac_operands(t) {
        if ops.len() >= 2 && ops.len() <= MAX_OPERANDS {
            let mut seen = std::collections::BTreeSet::new();
            for i in 0..ops.len() {
                for j in i + 1..ops.len() {
                    if let Some((k, _)) = pair_key(kind, &ops[i], &ops[j], active) {
                        if seen.insert(k.clone()) {
                            *counts.entry(k).or_default() += 1;
                        }
                    }
                }
            }
        }
    }
    if let Term::App(_, args) = t {
        for a in args {
            collect_pairs(a, active, counts);
        }
    }
}

fn extract(t: Term, key: &PairKey, aux: VarId, active: bool) -> Term {
    let t = match t {
        Term::App(op, args) => Term::App(op, args.into_iter().map(|a| extract(a, key, aux, active)).collect()),
        t => t,
    };
    let Some((kind, ops)) = ac_operands(&t) else { return t };
    if kind != key.0 || ops.len() < 2 {
        return t;
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let Some((k, m)) = pair_key(kind, &ops[i], &ops[j], active) else { continue };
            if k != *key {
                continue;
            }
            let Term::App(op, args) = t else { unreachable!() };
            // remove exactly one occurrence of each operand of the pair
            let mut pending = vec![ops[i].clone(), ops[j].clone()];
            let mut take = |ck: i64, a: &Term| match pending.iter().position(|(pc, pt)| *pc == ck && pt == a) {
                Some(p) => {
                    pending.remove(p);
                    false
                }
                None => true,
            };
            return match op {
                Op::Sum(c) => {
                    let mut nc = Vec::new();
                    let mut na = Vec::new();
                    for (ck, a) in c.into_iter().zip(args) {
                        if take(ck, &a) {
                            nc.push(ck);
                            na.push(a);
                        }
                    }
                    nc.push(m);
                    na.push(Term::Var(aux));
                    Term::App(Op::Sum(nc), na)
                }
                op => {
                    let mut na: Vec<Term> = args.into_iter().filter(|a| take(1, a)).collect();
                    na.push(Term::Var(aux));
                    Term::App(op, na)
                }
            };
        }
    }
    t
}

/// AC-CSE: operand pairs shared by several sums, products, conjunctions
/// or disjunctions are extracted, most frequent first, until no pair
/// repeats. With `active`, sums also match under negation.
pub fn eliminate_ac(m: &mut GroundModel, active: bool) {
    let mut defs = Vec::new();
    for _ in 0..256 {
        let mut counts = BTreeMap::new();
        for c in &m.constraints {
            collect_pairs(c, active, &mut counts);
        }
        if let Some((_, o)) = &m.objective {
            collect_pairs(o, active, &mut counts);
        }
        let Some((key, _)) = counts
            .into_iter()
            .filter(|(_, n)| *n >= 2)
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        else {
            break;
        };
        let (kind, ta, ca, tb, cb) = key.clone();
        let body = match kind {
            0 => Term::sum(vec![(ca, ta), (cb, tb)]),
            1 => Term::app(Op::Product, vec![ta, tb]),
            2 => Term::and(vec![ta, tb]),
            _ => Term::or(vec![ta, tb]),
        };
        let is_bool = kind >= 2;
        let aux = m.vars.add_aux(term_domain(&body, &m.vars), is_bool);
        let cs = std::mem::take(&mut m.constraints);
        let out: Vec<Term> = cs.into_iter().map(|c| extract(c, &key, aux, active)).collect();
        if let Some((_, o)) = &mut m.objective {
            *o = extract(std::mem::replace(o, Term::Int(0)), &key, aux, active);
        }
        let def_op = if is_bool { Op::Iff } else { Op::Eq };
        defs.push(Term::App(def_op, vec![Term::Var(aux), body]));
        m.constraints = out;
    }
    m.constraints.extend(defs);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::IntDomain;

    fn model(n: usize, constraints: Vec<Term>) -> GroundModel {
        let mut vars = VarTable::new();
        for k in 0..n {
            vars.add(format!("v{k}"), IntDomain::range(0, 3), false, VarKind::Find);
        }
        GroundModel {
            vars,
            finds: Vec::new(),
            constraints,
            positions: Vec::new(),
            objective: None,
            branching: Vec::new(),
            warnings: Vec::new(),
            unsat: false,
        }
    }

    fn v(k: usize) -> Term {
        Term::Var(k)
    }

    #[test]
    fn identical_sums_share_an_auxiliary() {
        let xy = Term::sum(vec![(1, v(0)), (1, v(1))]);
        let c1 = Term::le(Term::app(Op::Product, vec![xy.clone(), v(2)]), Term::Int(5));
        let c2 = Term::ne(Term::app(Op::Abs, vec![xy.clone()]), v(3));
        let mut m = model(4, vec![c1, c2]);
        eliminate_common(&mut m, false);
        assert_eq!(m.vars.len(), 5);
        let mentions = m.constraints.iter().filter(|c| {
            let mut vs = Vec::new();
            c.vars_into(&mut vs);
            vs.contains(&4)
        });
        assert_eq!(mentions.count(), 3);
    }

    #[test]
    fn active_cse_shares_complements() {
        let lt = Term::lt(v(0), Term::sum(vec![(1, v(1)), (1, v(2))]));
        let ge = Term::le(Term::sum(vec![(1, v(1)), (1, v(2))]), v(0));
        let c1 = Term::or(vec![lt.clone(), Term::eq(v(3), Term::Int(1))]);
        let c2 = Term::or(vec![ge.clone(), Term::eq(v(3), Term::Int(2))]);
        let vars = model(4, vec![]).vars;
        let c1 = simplify(c1, &vars);
        let c2 = simplify(c2, &vars);
        let mut m = model(4, vec![c1, c2]);
        eliminate_common(&mut m, true);
        let bools = m.vars.iter().filter(|(_, i)| i.kind == VarKind::Aux && i.is_bool).count();
        assert_eq!(bools, 1);
    }

    /// Assignments of the first `n` variables extendable to a model.
    fn projected(m: &GroundModel, n: usize) -> usize {
        let doms: Vec<Vec<i64>> = m.vars.iter().map(|(_, i)| i.domain.values()).collect();
        let mut seen = std::collections::HashSet::new();
        super::super::bounds::for_each_tuple(&doms, &mut |a| {
            let ok = m.constraints.iter().all(|c| eval_term(c, &|v| a[v]) == Ok(1));
            if ok {
                seen.insert(a[..n].to_vec());
            }
        });
        seen.len()
    }

    #[test]
    fn negated_operand_is_not_a_repeat() {
        let t = Term::app(Op::Table(std::rc::Rc::new(vec![vec![0, 1], vec![2, 2]])), vec![v(0), v(1)]);
        let c = Term::or(vec![Term::not(t.clone()), Term::eq(v(2), Term::Int(1))]);
        let mut m = model(3, vec![c]);
        let before = projected(&m, 3);
        eliminate_common(&mut m, true);
        assert_eq!(m.vars.len(), 3);
        assert_eq!(projected(&m, 3), before);
    }

    #[test]
    fn repeat_under_both_polarities_keeps_its_definition() {
        let t = Term::app(Op::Table(std::rc::Rc::new(vec![vec![0, 1], vec![2, 2]])), vec![v(0), v(1)]);
        let c1 = Term::or(vec![Term::not(t.clone()), Term::eq(v(2), Term::Int(1))]);
        let c2 = Term::or(vec![t.clone(), Term::eq(v(2), Term::Int(3))]);
        let mut m = model(3, vec![c1, c2]);
        let before = projected(&m, 3);
        eliminate_common(&mut m, true);
        assert_eq!(m.vars.len(), 4);
        assert_eq!(projected(&m, 3), before);
    }

    #[test]
    fn repeated_operand_is_extracted_once() {
        let cube = Term::app(Op::Product, vec![v(0), v(0), v(0)]);
        let square = Term::app(Op::Product, vec![v(0), v(0)]);
        let c1 = Term::le(cube, v(1));
        let c2 = Term::le(v(2), square);
        let mut m = model(3, vec![c1, c2]);
        let before = projected(&m, 3);
        eliminate_ac(&mut m, true);
        assert_eq!(m.vars.len(), 4);
        assert_eq!(projected(&m, 3), before);
    }

    #[test]
    fn active_ac_extracts_shared_difference() {
        // x+y-z, w-x-y+z, 10-y+z: y-z is shared by all three
        let (x, y, z, w) = (v(0), v(1), v(2), v(3));
        let e1 = Term::sum(vec![(1, x.clone()), (1, y.clone()), (-1, z.clone())]);
        let e2 = Term::sum(vec![(1, w.clone()), (-1, x.clone()), (-1, y.clone()), (1, z.clone())]);
        let e3 = Term::sum(vec![(1, Term::Int(10)), (-1, y.clone()), (1, z.clone())]);
        let cs = vec![Term::le(e1, Term::Int(3)), Term::le(e2, Term::Int(3)), Term::le(e3, Term::Int(9))];
        let mut m = model(4, cs);
        eliminate_ac(&mut m, true);
        let def = m.constraints.iter().find(|c| matches!(c, Term::App(Op::Eq, a) if a[0] == Term::Var(4)));
        let Some(Term::App(_, a)) = def else { panic!("no definition: {:?}", m.constraints) };
        assert_eq!(a[1], Term::App(Op::Sum(vec![1, -1]), vec![y.clone(), z.clone()]));
        // y and z survive only inside the definition of y - z
        let mentioning: Vec<&Term> = m
            .constraints
            .iter()
            .filter(|c| {
                let mut vs = Vec::new();
                c.vars_into(&mut vs);
                vs.contains(&1) || vs.contains(&2)
            })
            .collect();
        assert_eq!(mentioning.len(), 1, "{:?}", m.constraints);
    }

    fn occurrences(m: &GroundModel, n: usize) -> HashMap<Term, usize> {
        let mut out = HashMap::new();
        for c in &m.constraints {
            c.visit(&mut |t| {
                let mut vs = Vec::new();
                t.vars_into(&mut vs);
                if matches!(t, Term::App(..)) && vs.iter().all(|&v| v < n) {
                    *out.entry(t.clone()).or_insert(0) += 1;
                }
            });
        }
        out
    }

    use proptest::prelude::*;

    fn arb_shared() -> impl Strategy<Value = Term> {
        let pool = vec![
            Term::sum(vec![(1, v(0)), (1, v(1))]),
            Term::app(Op::Product, vec![v(1), v(2)]),
            Term::app(Op::Abs, vec![Term::sum(vec![(1, v(0)), (-1, v(2))])]),
            Term::app(Op::Max, vec![v(0), v(2)]),
        ];
        let int = prop::sample::select(pool).prop_flat_map(|t| prop_oneof![Just(t), (0..3usize).prop_map(v)]);
        let atom = (int.clone(), int, 0..3).prop_map(|(a, b, k)| match k {
            0 => Term::eq(a, b),
            1 => Term::ne(a, b),
            _ => Term::le(a, b),
        });
        atom.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::or(vec![a, b])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::and(vec![a, b])),
            ]
        })
    }

    proptest! {
        // No expression over the original variables occurs more often
        // after elimination than before.
        #[test]
        fn elimination_never_adds_occurrences(cs in prop::collection::vec(arb_shared(), 1..5), active in any::<bool>()) {
            // the pipeline simplifies first, fixing each expression's form
            let mut m = model(3, Vec::new());
            m.constraints = cs.into_iter().map(|c| simplify(c, &m.vars)).collect();
            let before = occurrences(&m, 3);
            eliminate_common(&mut m, active);
            for (t, n) in occurrences(&m, 3) {
                let was = before.get(&t).copied().unwrap_or(0);
                prop_assert!(n <= was.max(1), "{:?}: {} > {}", t, n, was);
            }
        }
    }
}
