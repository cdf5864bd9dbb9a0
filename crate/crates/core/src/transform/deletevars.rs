//! Variable deletion: top-level assignments fix variables and top-level
//! equalities between variables unify them. Removed variables keep their
//! state in the table so solutions can be reconstructed.

use crate::eval::IntDomain;
use crate::term::*;

use super::simplify::simplify_model;

enum Found {
    Fix(VarId, i64),
    Unify(VarId, VarId),
}

fn detect(c: &Term, vars: &VarTable) -> Option<Found> {
    let bool_var = |t: &Term| matches!(t, Term::Var(v) if vars.get(*v).is_bool);
    match c {
        Term::Var(v) if bool_var(c) => Some(Found::Fix(*v, 1)),
        Term::App(Op::Not, a) if bool_var(&a[0]) => match a[0] {
            Term::Var(v) => Some(Found::Fix(v, 0)),
            _ => None,
        },
        Term::App(Op::Eq | Op::Iff, a) => match (&a[0], &a[1]) {
            (Term::Var(x), Term::Var(y)) if vars.get(*x).is_bool == vars.get(*y).is_bool => {
                Some(Found::Unify(*x, *y))
            }
            (Term::Var(x), c) | (c, Term::Var(x)) if c.is_const() => Some(Found::Fix(*x, c.as_const()?)),
            _ => None,
        },
        _ => None,
    }
}

fn fix(vars: &mut VarTable, v: VarId, c: i64) -> bool {
    let info = vars.get_mut(v);
    if !info.domain.contains(c) {
        info.domain = IntDomain::empty();
        return false;
    }
    info.domain = IntDomain::singleton(c);
    info.state = VarState::Fixed(c);
    true
}

/// Preference order for the representative of a unified pair: find
/// variables before auxiliaries, then by name.
fn rank(vars: &VarTable, v: VarId) -> (bool, &str) {
    let i = vars.get(v);
    (i.kind == VarKind::Aux, i.name.as_str())
}

/// Runs to a fixpoint. Returns whether any variable was deleted.
pub fn delete_vars(m: &mut GroundModel) -> bool {
    let mut any = false;
    loop {
        if m.unsat {
            return any;
        }
        let mut changed = false;
        // singleton domains are assignments too
        for v in 0..m.vars.len() {
            if m.vars.is_active(v) && m.vars.get(v).domain.size() == Some(1) {
                let c = m.vars.get(v).domain.min_value().unwrap();
                fix(&mut m.vars, v, c);
                changed = true;
            }
        }
        for c in &m.constraints {
            match detect(c, &m.vars) {
                Some(Found::Fix(v, val)) if m.vars.is_active(v) => {
                    if !fix(&mut m.vars, v, val) {
                        m.unsat = true;
                    }
                    changed = true;
                }
                Some(Found::Unify(x, y)) if m.vars.is_active(x) && m.vars.is_active(y) && x != y => {
                    let (keep, drop) = if rank(&m.vars, x) <= rank(&m.vars, y) { (x, y) } else { (y, x) };
                    let d = m.vars.get(keep).domain.intersect(&m.vars.get(drop).domain);
                    if d.is_empty() {
                        m.unsat = true;
                    }
                    m.vars.get_mut(keep).domain = d;
                    let di = m.vars.get_mut(drop);
                    di.state = VarState::Alias(keep);
                    changed = true;
                }
                _ => {}
            }
            if m.unsat {
                break;
            }
        }
        if m.unsat {
            m.constraints = vec![Term::Bool(false)];
            return true;
        }
        if !changed {
            return any;
        }
        any = true;
        substitute_deleted(m);
        simplify_model(m);
    }
}

/// Replaces fixed and aliased variables everywhere.
pub fn substitute_deleted(m: &mut GroundModel) {
    let vars = &m.vars;
    let sub = |v: VarId| -> Option<Term> {
        match vars.get(v).state {
            VarState::Active | VarState::Removed => None,
            VarState::Fixed(c) => Some(if vars.get(v).is_bool { Term::Bool(c != 0) } else { Term::Int(c) }),
            VarState::Alias(_) => {
                let r = vars.resolve(v);
                match vars.get(r).state {
                    VarState::Fixed(c) => {
                        Some(if vars.get(v).is_bool { Term::Bool(c != 0) } else { Term::Int(c) })
                    }
                    _ => Some(Term::Var(r)),
                }
            }
        }
    };
    let cs = std::mem::take(&mut m.constraints);
    m.constraints = cs.into_iter().map(|c| c.substitute(&sub)).collect();
    if let Some((_, o)) = &mut m.objective {
        *o = std::mem::replace(o, Term::Int(0)).substitute(&sub);
    }
}

/// Marks find variables that occur in no constraint, objective or
/// branching list as removed.
pub fn remove_redundant_vars(m: &mut GroundModel) {
    let mut used = vec![false; m.vars.len()];
    let mut mark = |t: &Term| {
        let mut vs = Vec::new();
        t.vars_into(&mut vs);
        for v in vs {
            used[v] = true;
        }
    };
    m.constraints.iter().for_each(&mut mark);
    if let Some((_, o)) = &m.objective {
        mark(o);
    }
    for &v in &m.branching {
        used[m.vars.resolve(v)] = true;
    }
    for (v, u) in used.into_iter().enumerate() {
        let info = m.vars.get_mut(v);
        if !u && info.kind == VarKind::Find && info.state == VarState::Active {
            info.state = VarState::Removed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(doms: &[IntDomain], constraints: Vec<Term>) -> GroundModel {
        let mut vars = VarTable::new();
        for (k, d) in doms.iter().enumerate() {
            vars.add(format!("v{k}"), d.clone(), false, VarKind::Find);
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

    #[test]
    fn assignment_is_substituted() {
        let d = IntDomain::range(1, 9);
        let mut m = model(&[d.clone(), d], vec![Term::eq(Term::Var(0), Term::Int(5)), Term::lt(Term::Var(0), Term::Var(1))]);
        simplify_model(&mut m);
        delete_vars(&mut m);
        assert_eq!(m.vars.get(0).state, VarState::Fixed(5));
        assert_eq!(m.constraints, vec![Term::le(Term::Int(6), Term::Var(1))]);
    }

    #[test]
    fn chains_unify() {
        let d = IntDomain::range(1, 3);
        let mut m = model(
            &[d.clone(), d.clone(), d],
            vec![Term::eq(Term::Var(0), Term::Var(1)), Term::eq(Term::Var(1), Term::Var(2))],
        );
        delete_vars(&mut m);
        assert_eq!(m.vars.resolve(1), 0);
        assert_eq!(m.vars.resolve(2), 0);
        assert!(m.constraints.is_empty());
    }

    #[test]
    fn disjoint_unification_is_unsatisfiable() {
        let mut m = model(
            &[IntDomain::range(1, 2), IntDomain::singleton(3)],
            vec![Term::eq(Term::Var(0), Term::Var(1))],
        );
        delete_vars(&mut m);
        assert!(m.unsat);
    }
}
