//! Table constraints: domain restriction for one column, the support
//! encoding for two and one variable per tuple otherwise.

use crate::term::{Term, VarId};

use super::cnf::{Lit, FALSE, TRUE};
use super::Encoder;

impl Encoder<'_> {
    /// Variable columns and the rows that agree with constant columns and
    /// current domains, projected onto the variable columns.
    fn live_rows(&self, args: &[Term], rows: &[Vec<i64>]) -> (Vec<VarId>, Vec<Vec<i64>>) {
        let vars: Vec<VarId> = args.iter().filter_map(|a| if let Term::Var(v) = a { Some(*v) } else { None }).collect();
        let vals: Vec<Vec<i64>> = vars.iter().map(|&v| self.enc_ref(v).values()).collect();
        let mut live: Vec<Vec<i64>> = rows
            .iter()
            .filter(|r| {
                let mut k = 0;
                r.iter().zip(args).all(|(x, a)| match a {
                    Term::Var(_) => {
                        k += 1;
                        vals[k - 1].binary_search(x).is_ok()
                    }
                    c => c.as_const() == Some(*x),
                })
            })
            .map(|r| r.iter().zip(args).filter(|(_, a)| matches!(a, Term::Var(_))).map(|(x, _)| *x).collect())
            .collect();
        live.sort();
        live.dedup();
        (vars, live)
    }

    pub(super) fn post_table(&mut self, args: &[Term], rows: &[Vec<i64>]) {
        let (vars, rows) = self.live_rows(args, rows);
        if rows.is_empty() {
            self.cnf.add(&[]);
            return;
        }
        match vars.len() {
            0 => {}
            1 => {
                for a in self.enc_ref(vars[0]).values() {
                    if !rows.iter().any(|r| r[0] == a) {
                        let l = self.eq(vars[0], a);
                        self.cnf.unit(-l);
                    }
                }
            }
            2 => {
                for (i, j) in [(0, 1), (1, 0)] {
                    for a in self.enc_ref(vars[i]).values() {
                        let mut c = vec![-self.eq(vars[i], a)];
                        for r in rows.iter().filter(|r| r[i] == a) {
                            c.push(self.eq(vars[j], r[j]));
                        }
                        self.cnf.add(&c);
                    }
                }
            }
            _ => {
                let ts = self.tuple_vars(&vars, &rows);
                self.cnf.add(&ts);
                for (i, &v) in vars.iter().enumerate() {
                    for a in self.enc_ref(v).values() {
                        let mut c = vec![-self.eq(v, a)];
                        c.extend(rows.iter().zip(&ts).filter(|(r, _)| r[i] == a).map(|(_, t)| *t));
                        self.cnf.add(&c);
                    }
                }
            }
        }
    }

    /// One SAT variable per tuple, each implying its assignments.
    fn tuple_vars(&mut self, vars: &[VarId], rows: &[Vec<i64>]) -> Vec<Lit> {
        let mut ts = Vec::with_capacity(rows.len());
        for r in rows {
            let t = self.cnf.fresh();
            for (&v, &a) in vars.iter().zip(r) {
                let l = self.eq(v, a);
                self.cnf.imply(t, l);
            }
            ts.push(t);
        }
        ts
    }

    pub(super) fn table_lit(&mut self, args: &[Term], rows: &[Vec<i64>]) -> Lit {
        let (vars, rows) = self.live_rows(args, rows);
        if rows.is_empty() {
            return FALSE;
        }
        if vars.is_empty() {
            return TRUE;
        }
        if vars.len() == 1 {
            let lits: Vec<Lit> = rows.iter().map(|r| self.eq(vars[0], r[0])).collect();
            return self.or_lit(&lits);
        }
        let g = self.cnf.fresh();
        let ts = self.tuple_vars(&vars, &rows);
        let mut alo = vec![-g];
        alo.extend(&ts);
        self.cnf.add(&alo);
        for r in &rows {
            let mut c = vec![g];
            for (&v, &a) in vars.iter().zip(r) {
                c.push(-self.eq(v, a));
            }
            self.cnf.add(&c);
        }
        g
    }
}
