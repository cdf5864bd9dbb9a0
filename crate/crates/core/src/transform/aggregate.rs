//! Aggregation of primitive constraints into global constraints:
//! cliques of pairwise `!=`/`<` become `allDiff`, and matching
//! `atmost`/`atleast` pairs over one scope become `gcc`.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::term::*;

use super::simplify::simplify_model;

fn edge(c: &Term, vars: &VarTable) -> Option<(VarId, VarId, bool)> {
    match c {
        Term::App(op @ (Op::Ne | Op::Lt), a) => match (&a[0], &a[1]) {
            (Term::Var(x), Term::Var(y)) if x != y && !vars.get(*x).is_bool && !vars.get(*y).is_bool => {
                Some((*x.min(y), *x.max(y), *op == Op::Ne))
            }
            _ => None,
        },
        _ => None,
    }
}

fn cliques(m: &mut GroundModel) -> bool {
    let edges: Vec<Option<(VarId, VarId, bool)>> = m.constraints.iter().map(|c| edge(c, &m.vars)).collect();
    let mut adj: HashMap<VarId, BTreeSet<VarId>> = HashMap::new();
    let mut order: Vec<VarId> = Vec::new();
    for &(x, y, _) in edges.iter().flatten() {
        for (p, q) in [(x, y), (y, x)] {
            let e = adj.entry(p).or_default();
            if e.is_empty() {
                order.push(p);
            }
            e.insert(q);
        }
    }
    let mut covered: HashSet<(VarId, VarId)> = HashSet::new();
    let mut found = Vec::new();
    for &(x, y, ne) in edges.iter().flatten() {
        if !ne || covered.contains(&(x, y)) {
            continue;
        }
        let mut clique = vec![x, y];
        for &v in &order {
            if !clique.contains(&v) && clique.iter().all(|u| adj[&v].contains(u)) {
                clique.push(v);
            }
        }
        if clique.len() < 3 {
            continue;
        }
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                covered.insert((a.min(b), a.max(b)));
            }
        }
        found.push(clique);
    }
    if found.is_empty() {
        return false;
    }
    let cs = std::mem::take(&mut m.constraints);
    m.constraints = cs
        .into_iter()
        .zip(edges)
        .filter(|(_, e)| !matches!(e, Some((x, y, true)) if covered.contains(&(*x, *y))))
        .map(|(c, _)| c)
        .collect();
    for clique in found {
        m.constraints.push(Term::app(Op::AllDiff, clique.into_iter().map(Term::Var).collect()));
    }
    true
}

fn merge_counts(m: &mut GroundModel) -> bool {
    let mut used = vec![false; m.constraints.len()];
    let mut added = Vec::new();
    let mut replaced: HashMap<usize, Option<Term>> = HashMap::new();
    for i in 0..m.constraints.len() {
        let Term::App(Op::AtMost(mc, mv), xs) = &m.constraints[i] else { continue };
        let partner = (0..m.constraints.len()).find(|&j| {
            !used[j] && matches!(&m.constraints[j], Term::App(Op::AtLeast(..), ys) if ys == xs)
        });
        let Some(j) = partner else { continue };
        let Term::App(Op::AtLeast(lc, lv), _) = &m.constraints[j] else { unreachable!() };
        let mut gv = Vec::new();
        let mut gc = Vec::new();
        let mut rest_most = (Vec::new(), Vec::new());
        let mut lows: Vec<(i64, i64)> = lv.iter().copied().zip(lc.iter().copied()).collect();
        for (&v, &c) in mv.iter().zip(mc) {
            if let Some(k) = lows.iter().position(|&(w, d)| w == v && d == c) {
                lows.remove(k);
                gv.push(v);
                gc.push(c);
            } else {
                rest_most.0.push(c);
                rest_most.1.push(v);
            }
        }
        if gv.is_empty() {
            continue;
        }
        used[i] = true;
        used[j] = true;
        let rest = |op: Op, n: usize| if n == 0 { None } else { Some(Term::App(op, xs.clone())) };
        let n_most = rest_most.0.len();
        replaced.insert(i, rest(Op::AtMost(rest_most.0, rest_most.1), n_most));
        let (lv2, lc2): (Vec<i64>, Vec<i64>) = lows.into_iter().unzip();
        let n_least = lv2.len();
        replaced.insert(j, rest(Op::AtLeast(lc2, lv2), n_least));
        let mut args = xs.clone();
        args.extend(gc.into_iter().map(Term::Int));
        added.push(Term::App(Op::Gcc(gv), args));
    }
    if added.is_empty() {
        return false;
    }
    let cs = std::mem::take(&mut m.constraints);
    m.constraints = cs
        .into_iter()
        .enumerate()
        .filter_map(|(k, c)| match replaced.remove(&k) {
            Some(r) => r,
            None => Some(c),
        })
        .chain(added)
        .collect();
    true
}

/// Returns whether any constraint was aggregated.
pub fn aggregate(m: &mut GroundModel) -> bool {
    if m.unsat {
        return false;
    }
    let a = cliques(m);
    let b = merge_counts(m);
    if a || b {
        simplify_model(m);
    }
    a || b
}
