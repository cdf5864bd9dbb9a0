//! Domain filtering by propagation over top-level constraints: bounds
//! reasoning on binary relations and linear sums, value pruning on unary
//! sets, tables, `allDiff` and functional definitions.

use crate::eval::IntDomain;
use crate::term::*;

use super::bounds::{interval, term_domain};

const MAX_ROUNDS: usize = 50;

struct Filter<'a> {
    vars: &'a mut VarTable,
    extend: bool,
    changed: bool,
    empty: bool,
}

impl Filter<'_> {
    fn prunable(&self, v: VarId) -> bool {
        let i = self.vars.get(v);
        i.state == VarState::Active && (i.kind == VarKind::Find || self.extend)
    }

    fn restrict(&mut self, v: VarId, d: &IntDomain) {
        if !self.prunable(v) {
            return;
        }
        let old = &self.vars.get(v).domain;
        let new = old.intersect(d);
        if new.size() != old.size() {
            self.changed = true;
            self.empty |= new.is_empty();
            self.vars.get_mut(v).domain = new;
        }
    }

    fn remove(&mut self, v: VarId, c: i64) {
        let d = self.vars.get(v).domain.minus(&IntDomain::singleton(c));
        self.restrict(v, &d);
    }

    fn bound(&mut self, v: VarId, lo: i128, hi: i128) {
        let lo = lo.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        let hi = hi.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        if lo > hi {
            self.restrict(v, &IntDomain::empty());
        } else {
            self.restrict(v, &IntDomain::range(lo, hi));
        }
    }

    fn dom(&self, t: &Term) -> IntDomain {
        match t {
            Term::Var(v) => self.vars.get(*v).domain.clone(),
            Term::Int(c) => IntDomain::singleton(*c),
            Term::Bool(b) => IntDomain::singleton(*b as i64),
            t => term_domain(t, self.vars),
        }
    }

    fn relation(&mut self, op: &Op, x: &Term, y: &Term) {
        match op {
            Op::Le | Op::Lt => {
                let s = (*op == Op::Lt) as i128;
                let xl = interval(x, self.vars).0 as i128;
                let yh = interval(y, self.vars).1 as i128;
                if let Term::Var(v) = x {
                    self.bound(*v, i64::MIN as i128, yh - s);
                }
                if let Term::Var(v) = y {
                    self.bound(*v, xl + s, i64::MAX as i128);
                }
            }
            Op::Eq => {
                let (dx, dy) = (self.dom(x), self.dom(y));
                if let Term::Var(v) = x {
                    self.restrict(*v, &dy);
                }
                if let Term::Var(v) = y {
                    self.restrict(*v, &dx);
                }
            }
            Op::Ne => {
                for (p, q) in [(x, y), (y, x)] {
                    if let (Term::Var(v), Some(c)) = (p, q.as_const()) {
                        self.remove(*v, c);
                    }
                    if let (Term::Var(v), Term::Var(w)) = (p, q) {
                        let dw = &self.vars.get(*w).domain;
                        if dw.size() == Some(1) {
                            let c = dw.min_value().unwrap();
                            self.remove(*v, c);
                        }
                    }
                }
            }
            _ => {}
        }
    }

    /// `Σ coefs·terms (≤ | =) k`.
    fn linear(&mut self, coefs: &[i64], terms: &[Term], k: i64, eq: bool) {
        let bounds: Vec<(i128, i128)> = coefs
            .iter()
            .zip(terms)
            .map(|(&c, t)| {
                let (l, h) = interval(t, self.vars);
                let (a, b) = (c as i128 * l as i128, c as i128 * h as i128);
                (a.min(b), a.max(b))
            })
            .collect();
        let lo_sum: i128 = bounds.iter().map(|b| b.0).sum();
        let hi_sum: i128 = bounds.iter().map(|b| b.1).sum();
        for (i, (&c, t)) in coefs.iter().zip(terms).enumerate() {
            let Term::Var(v) = t else { continue };
            // c·t ≤ k − Σ_{j≠i} min, and with equality c·t ≥ k − Σ_{j≠i} max
            let up = k as i128 - (lo_sum - bounds[i].0);
            let down = if eq { Some(k as i128 - (hi_sum - bounds[i].1)) } else { None };
            let c = c as i128;
            let (mut lo, mut hi) = (i64::MIN as i128, i64::MAX as i128);
            if c > 0 {
                hi = up.div_euclid(c);
                if let Some(d) = down {
                    lo = -(-d).div_euclid(c);
                }
            } else if c < 0 {
                lo = -(up.div_euclid(-c));
                if let Some(d) = down {
                    hi = (-d).div_euclid(-c);
                }
            }
            self.bound(*v, lo, hi);
        }
    }

    fn table(&mut self, rows: &[Vec<i64>], args: &[Term]) {
        let doms: Vec<IntDomain> = args.iter().map(|a| self.dom(a)).collect();
        let live: Vec<&Vec<i64>> =
            rows.iter().filter(|r| r.iter().zip(&doms).all(|(v, d)| d.contains(*v))).collect();
        for (i, a) in args.iter().enumerate() {
            if let Term::Var(v) = a {
                self.restrict(*v, &IntDomain::from_values(live.iter().map(|r| r[i])));
            }
        }
    }

    fn all_diff(&mut self, args: &[Term], except: Option<i64>) {
        for (i, a) in args.iter().enumerate() {
            let d = self.dom(a);
            if d.size() != Some(1) {
                continue;
            }
            let c = d.min_value().unwrap();
            if Some(c) == except {
                continue;
            }
            for (j, b) in args.iter().enumerate() {
                if let (true, Term::Var(w)) = (i != j, b) {
                    self.remove(*w, c);
                }
            }
        }
    }

    fn constraint(&mut self, c: &Term) {
        match c {
            Term::Var(v) => self.restrict(*v, &IntDomain::singleton(1)),
            Term::App(Op::Not, a) => {
                if let Term::Var(v) = &a[0] {
                    self.restrict(*v, &IntDomain::singleton(0));
                }
            }
            Term::App(Op::And, a) => a.iter().for_each(|c| self.constraint(c)),
            Term::App(op @ (Op::Le | Op::Eq), a) if matches!(&a[0], Term::App(Op::Sum(_), _)) => {
                let (Term::App(Op::Sum(cs), ts), Some(k)) = (&a[0], a[1].as_const()) else {
                    return self.relation(op, &a[0], &a[1]);
                };
                self.linear(cs, ts, k, *op == Op::Eq);
            }
            Term::App(op @ (Op::Le | Op::Lt | Op::Eq | Op::Ne), a) => self.relation(op, &a[0], &a[1]),
            Term::App(Op::InSet(d), a) => {
                if let Term::Var(v) = &a[0] {
                    self.restrict(*v, d);
                }
            }
            Term::App(Op::Table(rows), a) => self.table(rows, a),
            Term::App(Op::AllDiff, a) => self.all_diff(a, None),
            Term::App(Op::AllDiffExcept(k), a) => self.all_diff(a, Some(*k)),
            _ => {}
        }
    }
}

/// Prunes domains of find variables (and auxiliaries with `extend`)
/// until no constraint removes a value. Returns whether any domain
/// shrank; an empty domain marks the model unsatisfiable.
pub fn filter_domains(m: &mut GroundModel, extend: bool) -> bool {
    if m.unsat {
        return false;
    }
    let mut f = Filter { vars: &mut m.vars, extend, changed: false, empty: false };
    let mut any = false;
    for _ in 0..MAX_ROUNDS {
        f.changed = false;
        for c in &m.constraints {
            f.constraint(c);
            if f.empty {
                break;
            }
        }
        any |= f.changed;
        if !f.changed || f.empty {
            break;
        }
    }
    if f.empty {
        m.unsat = true;
        m.constraints = vec![Term::Bool(false)];
    }
    any
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::simplify::simplify_model;
    use proptest::prelude::*;
    use std::rc::Rc;

    fn model(doms: &[IntDomain], constraints: Vec<Term>) -> GroundModel {
        let mut vars = VarTable::new();
        for (k, d) in doms.iter().enumerate() {
            vars.add(format!("x{k}"), d.clone(), false, VarKind::Find);
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
    fn strict_upper_bound() {
        let mut m = model(&[IntDomain::range(1, 10)], vec![Term::lt(Term::Var(0), Term::Int(4))]);
        simplify_model(&mut m);
        assert!(filter_domains(&mut m, false));
        assert_eq!(m.vars.get(0).domain, IntDomain::range(1, 3));
    }

    #[test]
    fn sum_bounds_match_interval_arithmetic() {
        let d = IntDomain::range(0, 10);
        let s = Term::sum(vec![(1, Term::Var(0)), (1, Term::Var(1))]);
        let mut m = model(&[d.clone(), d], vec![Term::eq(s, Term::Int(3))]);
        simplify_model(&mut m);
        filter_domains(&mut m, false);
        // x = 3 − y with y ∈ 0..10 gives x ≤ 3; x ≥ 0 already
        for v in 0..2 {
            assert_eq!(m.vars.get(v).domain, IntDomain::range(0, 3));
        }
    }

    #[test]
    fn unary_table_projects() {
        let rows = Rc::new(vec![vec![2], vec![4]]);
        let mut m = model(&[IntDomain::range(0, 9)], vec![Term::app(Op::Table(rows), vec![Term::Var(0)])]);
        filter_domains(&mut m, false);
        assert_eq!(m.vars.get(0).domain, IntDomain::from_values([2, 4]));
    }

    #[test]
    fn empty_domain_is_unsatisfiable() {
        let mut m = model(
            &[IntDomain::range(0, 3), IntDomain::range(0, 3)],
            vec![Term::lt(Term::Var(0), Term::Var(1)), Term::lt(Term::Var(1), Term::Var(0))],
        );
        filter_domains(&mut m, false);
        assert!(m.unsat);
    }

    fn arb_constraint() -> impl Strategy<Value = Term> {
        let v = || prop_oneof![(0usize..3).prop_map(Term::Var), (-2i64..=3).prop_map(Term::Int)];
        prop_oneof![
            (v(), v(), 0..4).prop_map(|(a, b, k)| match k {
                0 => Term::eq(a, b),
                1 => Term::ne(a, b),
                2 => Term::lt(a, b),
                _ => Term::le(a, b),
            }),
            (-2i64..=2, v(), -2i64..=2, v(), -3i64..=5, any::<bool>()).prop_map(|(c, a, d, b, k, eq)| {
                let s = Term::sum(vec![(c, a), (d, b)]);
                if eq { Term::eq(s, Term::Int(k)) } else { Term::le(s, Term::Int(k)) }
            }),
            (v(), v(), v()).prop_map(|(a, b, c)| Term::app(Op::AllDiff, vec![a, b, c])),
            (v(), v()).prop_map(|(a, b)| Term::eq(Term::app(Op::Product, vec![a, b]), Term::Var(2))),
        ]
    }

    proptest! {
        // every value used by some solution survives filtering
        #[test]
        fn filtering_keeps_supported_values(cs in proptest::collection::vec(arb_constraint(), 1..4)) {
            let d = IntDomain::range(-2, 3);
            let orig = model(&[d.clone(), d.clone(), d.clone()], cs);
            let mut m = orig.clone();
            simplify_model(&mut m);
            filter_domains(&mut m, true);
            for x in -2..=3 {
                for y in -2..=3 {
                    for z in -2..=3 {
                        let a = [x, y, z];
                        if orig.constraints.iter().all(|c| eval_term(c, &|v| a[v]) == Ok(1)) {
                            prop_assert!(!m.unsat);
                            for v in 0..3 {
                                prop_assert!(m.vars.get(v).domain.contains(a[v]));
                            }
                        }
                    }
                }
            }
        }
    }
}
