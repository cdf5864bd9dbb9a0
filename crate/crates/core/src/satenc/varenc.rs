//! SAT encodings of integer variables.
//!
//! A variable with domain `d₀ < … < dₙ₋₁` may carry direct literals
//! `[x = dᵢ]` and order literals `[x ≤ dᵢ]` for `i < n−1`. With both, the
//! ladder form shares the end points (`[x = d₀] = [x ≤ d₀]` and
//! `[x = dₙ₋₁] = ¬[x ≤ dₙ₋₂]`) so the encoding uses `2n − 3` SAT variables.

use crate::eval::IntDomain;

use super::amo::{at_most_one, AmoScheme};
use super::cnf::{Cnf, Lit, FALSE, TRUE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntEnc {
    pub dom: Vec<i64>,
    pub direct: Option<Vec<Lit>>,
    /// `order[i] = [x ≤ dom[i]]`, `n − 1` entries.
    pub order: Option<Vec<Lit>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarEnc {
    Const(i64),
    /// Two values; the SAT variable is true exactly at `hi`.
    Two { lo: i64, hi: i64, v: Lit },
    Int(IntEnc),
}

impl VarEnc {
    /// Encodes a domain of at least one value, providing at least the
    /// requested literals.
    pub fn new(cnf: &mut Cnf, dom: &IntDomain, direct: bool, order: bool) -> VarEnc {
        let vals = dom.values();
        match vals.len() {
            0 => panic!("empty domain reached the encoder"),
            1 => VarEnc::Const(vals[0]),
            2 => VarEnc::Two { lo: vals[0], hi: vals[1], v: cnf.fresh() },
            _ => {
                let mut e = IntEnc { dom: vals, direct: None, order: None };
                if order || !direct {
                    e.add_order(cnf);
                }
                if direct || !order {
                    e.add_direct(cnf);
                }
                VarEnc::Int(e)
            }
        }
    }

    pub fn values(&self) -> Vec<i64> {
        match self {
            VarEnc::Const(c) => vec![*c],
            VarEnc::Two { lo, hi, .. } => vec![*lo, *hi],
            VarEnc::Int(e) => e.dom.clone(),
        }
    }

    pub fn has_direct(&self) -> bool {
        !matches!(self, VarEnc::Int(IntEnc { direct: None, .. }))
    }

    /// `[x = a]`, creating direct literals if they are missing.
    pub fn eq_or_add(&mut self, cnf: &mut Cnf, a: i64) -> Lit {
        if let VarEnc::Int(e) = self {
            if e.direct.is_none() {
                e.add_direct(cnf);
            }
        }
        self.eq_lit(a).unwrap()
    }

    /// `[x ≤ a]`, creating order literals if they are missing.
    pub fn le_or_add(&mut self, cnf: &mut Cnf, a: i64) -> Lit {
        if let VarEnc::Int(e) = self {
            if e.order.is_none() {
                e.add_order(cnf);
            }
        }
        self.le_lit(a).unwrap()
    }

    /// `[x = a]` if the needed literals exist.
    pub fn eq_lit(&self, a: i64) -> Option<Lit> {
        match self {
            VarEnc::Const(c) => Some(if *c == a { TRUE } else { FALSE }),
            VarEnc::Two { lo, hi, v } => Some(if a == *hi {
                *v
            } else if a == *lo {
                -*v
            } else {
                FALSE
            }),
            VarEnc::Int(e) => {
                let Ok(i) = e.dom.binary_search(&a) else { return Some(FALSE) };
                e.direct.as_ref().map(|d| d[i])
            }
        }
    }

    /// `[x ≤ a]` if the needed literals exist. Values in a gap map to the
    /// literal of the next smaller domain value.
    pub fn le_lit(&self, a: i64) -> Option<Lit> {
        match self {
            VarEnc::Const(c) => Some(if *c <= a { TRUE } else { FALSE }),
            VarEnc::Two { lo, hi, v } => Some(if a < *lo {
                FALSE
            } else if a >= *hi {
                TRUE
            } else {
                -*v
            }),
            VarEnc::Int(e) => {
                let n = e.dom.len();
                // number of values ≤ a
                let k = e.dom.partition_point(|&d| d <= a);
                if k == 0 {
                    Some(FALSE)
                } else if k == n {
                    Some(TRUE)
                } else {
                    e.order.as_ref().map(|o| o[k - 1])
                }
            }
        }
    }

    /// Reads the value from a model given as a literal evaluator.
    pub fn decode(&self, val: &dyn Fn(Lit) -> bool) -> Result<i64, String> {
        match self {
            VarEnc::Const(c) => Ok(*c),
            VarEnc::Two { lo, hi, v } => Ok(if val(*v) { *hi } else { *lo }),
            VarEnc::Int(e) => {
                if let Some(d) = &e.direct {
                    let on: Vec<usize> = (0..d.len()).filter(|&i| val(d[i])).collect();
                    if on.len() != 1 {
                        return Err(format!("{} direct literals true", on.len()));
                    }
                    return Ok(e.dom[on[0]]);
                }
                let o = e.order.as_ref().unwrap();
                let i = o.iter().position(|&l| val(l)).unwrap_or(o.len());
                Ok(e.dom[i])
            }
        }
    }
}

impl IntEnc {
    fn add_order(&mut self, cnf: &mut Cnf) {
        let n = self.dom.len();
        let order: Vec<Lit> = match &self.direct {
            Some(d) => {
                let mut o = vec![d[0]];
                for _ in 1..n - 2 {
                    o.push(cnf.fresh());
                }
                o.push(-d[n - 1]);
                o
            }
            None => (0..n - 1).map(|_| cnf.fresh()).collect(),
        };
        for w in order.windows(2) {
            cnf.imply(w[0], w[1]);
        }
        let had_direct = self.direct.is_some();
        self.order = Some(order);
        if had_direct {
            self.channel(cnf);
        }
    }

    fn add_direct(&mut self, cnf: &mut Cnf) {
        let n = self.dom.len();
        match &self.order {
            Some(o) => {
                let mut d = vec![o[0]];
                for _ in 1..n - 1 {
                    d.push(cnf.fresh());
                }
                d.push(-o[n - 2]);
                self.direct = Some(d);
                self.channel(cnf);
            }
            None => {
                let d: Vec<Lit> = (0..n).map(|_| cnf.fresh()).collect();
                cnf.add(&d);
                at_most_one(cnf, &d, AmoScheme::Product);
                self.direct = Some(d);
            }
        }
    }

    /// `[x = dᵢ] ↔ [x ≤ dᵢ] ∧ ¬[x ≤ dᵢ₋₁]` for interior values.
    fn channel(&self, cnf: &mut Cnf) {
        let (d, o) = (self.direct.as_ref().unwrap(), self.order.as_ref().unwrap());
        for i in 1..self.dom.len() - 1 {
            cnf.add(&[-d[i], o[i]]);
            cnf.add(&[-d[i], -o[i - 1]]);
            cnf.add(&[d[i], -o[i], o[i - 1]]);
        }
    }
}
