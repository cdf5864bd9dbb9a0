//! Linear constraints: at-most-one detection, otherwise a balanced
//! binary tree of order-encoded partial sums.

use crate::error::{Error, Result};
use crate::term::{Op, Term, VarId};

use super::amo::{at_most_one, exactly_one};
use super::cnf::{Lit, FALSE, TRUE};
use super::varenc::VarEnc;
use super::Encoder;

/// Exact partial-sum domains are computed up to this many pairs.
const EXACT_PAIRS: usize = 1_000_000;
/// Largest order-encoded partial-sum domain.
const MAX_NODE_VALUES: i64 = 1 << 22;

/// A term of a sum with a known value set and order literals.
#[derive(Debug, Clone)]
pub(super) enum View {
    /// `c·x` for an integer variable with at least three values.
    Var { v: VarId, c: i64 },
    /// `c·[l]` with `c > 0`.
    Lit { l: Lit, c: i64 },
    /// A partial sum; `order[i] = [node ≤ dom[i]]`.
    Node { dom: Vec<i64>, order: Vec<Lit> },
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

impl Encoder<'_> {
    /// Views of `Σ cs·leaves` and the bound `k` after moving constant
    /// parts to the right-hand side.
    pub(super) fn views(&mut self, cs: &[i64], leaves: &[Term], mut k: i64) -> (Vec<View>, i64) {
        let mut out = Vec::new();
        for (&c, leaf) in cs.iter().zip(leaves) {
            if c == 0 {
                continue;
            }
            let (l, c) = match leaf {
                Term::Var(v) => match self.enc(*v) {
                    VarEnc::Const(x) => {
                        k -= c * x;
                        continue;
                    }
                    VarEnc::Two { lo, hi, v } => {
                        k -= c * lo;
                        (*v, c * (hi - lo))
                    }
                    VarEnc::Int(_) => {
                        out.push(View::Var { v: *v, c });
                        continue;
                    }
                },
                Term::App(Op::ToInt, f) => (self.lit(&f[0]), c),
                Term::Int(x) => {
                    k -= c * x;
                    continue;
                }
                t => unreachable!("sum leaf {t:?}"),
            };
            match l {
                TRUE => k -= c,
                FALSE => {}
                l if c > 0 => out.push(View::Lit { l, c }),
                // c·l = c − c·¬l
                l => {
                    k -= c;
                    out.push(View::Lit { l: -l, c: -c });
                }
            }
        }
        (out, k)
    }

    fn view_values(&self, w: &View) -> Vec<i64> {
        match w {
            View::Var { v, c } => {
                let mut vals: Vec<i64> = self.enc_ref(*v).values().iter().map(|a| a * c).collect();
                vals.sort_unstable();
                vals
            }
            View::Lit { c, .. } => vec![0, *c],
            View::Node { dom, .. } => dom.clone(),
        }
    }

    /// `[w ≤ b]`.
    fn view_le(&mut self, w: &View, b: i64) -> Lit {
        match w {
            View::Var { v, c } if *c > 0 => self.le(*v, floor_div(b, *c)),
            // c·x ≤ b ⇔ x ≥ ⌈b/c⌉
            View::Var { v, c } => {
                let m = -floor_div(b, -*c);
                -self.le(*v, m - 1)
            }
            View::Lit { l, c } => {
                if b < 0 {
                    FALSE
                } else if b >= *c {
                    TRUE
                } else {
                    -*l
                }
            }
            View::Node { dom, order } => {
                let k = dom.partition_point(|&d| d <= b);
                if k == 0 {
                    FALSE
                } else if k == dom.len() {
                    TRUE
                } else {
                    order[k - 1]
                }
            }
        }
    }

    fn node(&mut self, l: &View, r: &View) -> Result<View> {
        let (lv, rv) = (self.view_values(l), self.view_values(r));
        let dom: Vec<i64> = if lv.len().saturating_mul(rv.len()) <= EXACT_PAIRS {
            let mut d: Vec<i64> = lv.iter().flat_map(|a| rv.iter().map(move |b| a + b)).collect();
            d.sort_unstable();
            d.dedup();
            d
        } else {
            let (lo, hi) = (lv[0] + rv[0], lv[lv.len() - 1] + rv[rv.len() - 1]);
            if hi - lo >= MAX_NODE_VALUES {
                return Err(Error::Unsupported(format!("linear sum with {} possible values", hi - lo + 1)));
            }
            (lo..=hi).collect()
        };
        let order: Vec<Lit> = (1..dom.len()).map(|_| self.cnf.fresh()).collect();
        for w in order.windows(2) {
            self.cnf.imply(w[0], w[1]);
        }
        let n = View::Node { dom, order };
        for &a in &lv {
            for &b in &rv {
                // l ≥ a ∧ r ≥ b → n ≥ a+b, and l ≤ a ∧ r ≤ b → n ≤ a+b
                let c1 = [self.view_le(l, a - 1), self.view_le(r, b - 1), -self.view_le(&n, a + b - 1)];
                self.cnf.add(&c1);
                let c2 = [-self.view_le(l, a), -self.view_le(r, b), self.view_le(&n, a + b)];
                self.cnf.add(&c2);
            }
        }
        Ok(n)
    }

    fn tree(&mut self, ws: &[View]) -> Result<View> {
        if ws.len() == 1 {
            return Ok(ws[0].clone());
        }
        let (a, b) = ws.split_at(ws.len() / 2);
        let l = self.tree(a)?;
        let r = self.tree(b)?;
        self.node(&l, &r)
    }

    /// The two halves of a sum, the smaller-domain one first.
    fn halves(&mut self, ws: &[View]) -> Result<(View, View)> {
        let (a, b) = ws.split_at(ws.len() / 2);
        let l = self.tree(a)?;
        let r = self.tree(b)?;
        if self.view_values(&l).len() <= self.view_values(&r).len() {
            Ok((l, r))
        } else {
            Ok((r, l))
        }
    }

    fn unit_lits(ws: &[View]) -> Option<Vec<Lit>> {
        ws.iter().map(|w| if let View::Lit { l, c: 1 } = w { Some(*l) } else { None }).collect()
    }

    /// Posts `Σ ≤ k` (or `= k` with `eq`) as a top-level constraint.
    pub(super) fn post_linear(&mut self, cs: &[i64], leaves: &[Term], k: i64, eq: bool) -> Result<()> {
        let (ws, k) = self.views(cs, leaves, k);
        if ws.is_empty() {
            if k < 0 || (eq && k != 0) {
                self.cnf.add(&[]);
            }
            return Ok(());
        }
        if let (Some(lits), 1) = (Self::unit_lits(&ws), k) {
            if lits.len() > 1 {
                if eq {
                    exactly_one(&mut self.cnf, &lits, self.opts.amo);
                } else {
                    at_most_one(&mut self.cnf, &lits, self.opts.amo);
                }
                return Ok(());
            }
        }
        if ws.len() == 1 {
            let l = self.view_le(&ws[0], k);
            self.cnf.unit(l);
            if eq {
                let g = self.view_le(&ws[0], k - 1);
                self.cnf.unit(-g);
            }
            return Ok(());
        }
        let (l, r) = self.halves(&ws)?;
        for a in self.view_values(&l) {
            // l ≥ a → r ≤ k − a
            let c = [self.view_le(&l, a - 1), self.view_le(&r, k - a)];
            self.cnf.add(&c);
            if eq {
                // l ≤ a → r ≥ k − a
                let c = [-self.view_le(&l, a), -self.view_le(&r, k - a - 1)];
                self.cnf.add(&c);
            }
        }
        Ok(())
    }

    /// A literal equivalent to `Σ ≤ k` (or `= k` with `eq`).
    pub(super) fn linear_lit(&mut self, cs: &[i64], leaves: &[Term], k: i64, eq: bool) -> Result<Lit> {
        let (ws, k) = self.views(cs, leaves, k);
        if ws.is_empty() {
            let holds = if eq { k == 0 } else { k >= 0 };
            return Ok(if holds { TRUE } else { FALSE });
        }
        let n = self.tree(&ws)?;
        let le = self.view_le(&n, k);
        if !eq {
            return Ok(le);
        }
        let lt = self.view_le(&n, k - 1);
        Ok(self.and_lit(&[le, -lt]))
    }
}
