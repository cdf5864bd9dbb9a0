//! Removes partial functions. Each partial node contributes a guard (the
//! condition under which it is defined) to its nearest boolean ancestor,
//! then is replaced by a total version that agrees wherever it is defined.

use crate::term::*;

fn guard(op: &Op, args: &[Term]) -> Term {
    match op {
        Op::Div | Op::Mod => Term::ne(args[1].clone(), Term::Int(0)),
        Op::Pow => Term::and(vec![
            Term::or(vec![Term::ne(args[0].clone(), Term::Int(0)), Term::ne(args[1].clone(), Term::Int(0))]),
            Term::le(Term::Int(0), args[1].clone()),
        ]),
        Op::Element(info) => {
            let n = info.len();
            Term::and(
                info.dims
                    .iter()
                    .zip(&args[n..])
                    .map(|(d, i)| Term::app(Op::InSet(d.clone()), vec![i.clone()]))
                    .collect(),
            )
        }
        _ => unreachable!("not a partial operator"),
    }
}

fn total(op: Op) -> Op {
    match op {
        Op::Div => Op::SafeDiv,
        Op::Mod => Op::SafeMod,
        Op::Pow => Op::SafePow,
        Op::Element(i) => Op::SafeElement(i),
        op => op,
    }
}

fn is_ground(t: &Term) -> bool {
    let mut vars = Vec::new();
    t.vars_into(&mut vars);
    vars.is_empty()
}

struct Pass<'a> {
    vars: &'a VarTable,
    /// Guards that are not constant-true, for `-Wundef`.
    attached: Vec<Term>,
}

impl Pass<'_> {
    /// Rewrites a non-boolean term, returning the guards it needs.
    fn int(&mut self, t: Term, guards: &mut Vec<Term>) -> Term {
        let Term::App(op, args) = t else { return t };
        let args: Vec<Term> = args
            .into_iter()
            .map(|a| if a.is_bool(self.vars) { self.boolean(a) } else { self.int(a, guards) })
            .collect();
        if op.is_partial() {
            let g = guard(&op, &args);
            let trivially_true = is_ground(&g) && eval_term(&g, &|_| 0) == Ok(1);
            if !trivially_true {
                self.attached.push(g.clone());
                guards.push(g);
            }
            Term::App(total(op), args)
        } else {
            Term::App(op, args)
        }
    }

    /// Rewrites a boolean term; guards of its integer subterms are
    /// conjoined here.
    fn boolean(&mut self, t: Term) -> Term {
        let mut guards = Vec::new();
        let t = self.int(t, &mut guards);
        if guards.is_empty() {
            t
        } else {
            guards.push(t);
            Term::and(guards)
        }
    }
}

/// Applies the transform to every constraint and the objective.
/// Guards of the objective become top-level constraints. With `warn`,
/// a warning is recorded for every guard that is not constant-true.
pub fn remove_undefinedness(model: &mut GroundModel, warn: bool) {
    let mut pass = Pass { vars: &model.vars, attached: Vec::new() };
    let mut warnings = Vec::new();
    let constraints = std::mem::take(&mut model.constraints);
    let mut out = Vec::with_capacity(constraints.len());
    for (k, c) in constraints.into_iter().enumerate() {
        out.push(pass.boolean(c));
        for g in pass.attached.drain(..) {
            let at = model.positions.get(k).map_or_else(|| "constraint".to_string(), |p| p.to_string());
            warnings.push(format!("{at}: possibly undefined expression guarded by {}", show(&g, pass.vars)));
        }
    }
    if let Some((dir, obj)) = model.objective.take() {
        let mut guards = Vec::new();
        let obj = pass.int(obj, &mut guards);
        for g in pass.attached.drain(..) {
            warnings.push(format!("objective: possibly undefined expression guarded by {}", show(&g, pass.vars)));
        }
        out.extend(guards);
        model.objective = Some((dir, obj));
    }
    model.constraints = out;
    if warn {
        model.warnings.extend(warnings);
    }
}

/// True when no partial operator remains.
pub fn is_total(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |s| {
        if let Term::App(op, _) = s {
            ok &= !op.is_partial();
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::IntDomain;
    use proptest::prelude::*;
    use std::rc::Rc;

    fn table(n: usize, dom: IntDomain) -> VarTable {
        let mut t = VarTable::new();
        for k in 0..n {
            t.add(format!("v{k}"), dom.clone(), false, VarKind::Find);
        }
        t
    }

    fn model(vars: VarTable, c: Term) -> GroundModel {
        GroundModel {
            vars,
            finds: Vec::new(),
            constraints: vec![c],
            positions: Vec::new(),
            objective: None,
            branching: Vec::new(),
            warnings: Vec::new(),
            unsat: false,
        }
    }

    #[test]
    fn division_by_zero_falsifies_the_nearest_boolean() {
        // with y = 0: (x/y = z) is false, !(x/y = z) is true,
        // (x/y != z) is false, !(x/y != z) is true
        let vars = table(3, IntDomain::range(-2, 2));
        let div = Term::app(Op::Div, vec![Term::Var(0), Term::Var(1)]);
        let eq = Term::eq(div.clone(), Term::Var(2));
        let ne = Term::ne(div, Term::Var(2));
        for (c, want) in [(eq.clone(), 0), (Term::not(eq), 1), (ne.clone(), 0), (Term::not(ne), 1)] {
            let mut m = model(vars.clone(), c);
            remove_undefinedness(&mut m, false);
            assert!(is_total(&m.constraints[0]));
            assert_eq!(eval_term(&m.constraints[0], &|v| [1, 0, 0][v]), Ok(want));
        }
    }

    #[test]
    fn pow_guard_matches_definition() {
        let vars = table(2, IntDomain::range(-2, 2));
        let p = Term::app(Op::Pow, vec![Term::Var(0), Term::Var(1)]);
        let mut m = model(vars, Term::le(Term::Int(-100), p));
        remove_undefinedness(&mut m, true);
        assert_eq!(m.warnings.len(), 1);
        for x in -2..=2 {
            for y in -2..=2 {
                let defined = (x != 0 || y != 0) && y >= 0;
                let got = eval_term(&m.constraints[0], &|v| [x, y][v]).unwrap();
                assert_eq!(got == 1, defined, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn bool_element_is_its_own_boolean_ancestor() {
        // M[i] = M[1] over a bool matrix indexed by int(1): out of range M[i] is false
        let mut vars = VarTable::new();
        vars.add("M[1]".into(), IntDomain::boolean(), true, VarKind::Find);
        vars.add("i".into(), IntDomain::range(0, 1), false, VarKind::Find);
        let info = Rc::new(ElementInfo { dims: vec![IntDomain::range(1, 1)], bool_base: true });
        let el = Term::app(Op::Element(info), vec![Term::Var(0), Term::Var(1)]);
        let c = Term::eq(Term::app(Op::ToInt, vec![el]), Term::Var(0));
        let mut m = model(vars, c);
        remove_undefinedness(&mut m, false);
        let t = &m.constraints[0];
        assert!(matches!(t, Term::App(Op::Eq, _)));
        assert_eq!(eval_term(t, &|v| [0, 0][v]), Ok(1));
        assert_eq!(eval_term(t, &|v| [1, 0][v]), Ok(0));
        assert_eq!(eval_term(t, &|v| [1, 1][v]), Ok(1));
    }

    fn arb_term(depth: u32) -> BoxedStrategy<Term> {
        let leaf = prop_oneof![(-2i64..=2).prop_map(Term::Int), (0usize..3).prop_map(Term::Var)];
        leaf.prop_recursive(depth, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Div, vec![a, b])),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Mod, vec![a, b])),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Pow, vec![a, b])),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sum(vec![(1, a), (2, b)])),
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, i)| {
                    let info = Rc::new(ElementInfo { dims: vec![IntDomain::range(0, 1)], bool_base: false });
                    Term::app(Op::Element(info), vec![a, b, i])
                }),
            ]
        })
        .boxed()
    }

    fn arb_constraint() -> impl Strategy<Value = Term> {
        let atom = (arb_term(3), arb_term(3), 0..3).prop_map(|(a, b, k)| match k {
            0 => Term::eq(a, b),
            1 => Term::ne(a, b),
            _ => Term::le(a, b),
        });
        atom.prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::or(vec![a, b])),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Iff, vec![a, b])),
            ]
        })
    }

    proptest! {
        // The rewritten constraint agrees with relational evaluation of the
        // original on every assignment.
        #[test]
        fn transform_preserves_relational_semantics(c in arb_constraint()) {
            let vars = table(3, IntDomain::range(-2, 2));
            let mut m = model(vars, c.clone());
            remove_undefinedness(&mut m, false);
            prop_assert!(is_total(&m.constraints[0]));
            for x in -2..=2 {
                for y in -2..=2 {
                    for z in -2..=2 {
                        let a = |v: VarId| [x, y, z][v];
                        prop_assert_eq!(eval_term(&c, &a), eval_term(&m.constraints[0], &a));
                    }
                }
            }
        }
    }
}
