//! Interval and value-set analysis of ground terms over variable domains.

use crate::eval::IntDomain;
use crate::term::*;

/// Combined domain sizes above this are bounded by intervals instead of
/// being enumerated.
const ENUM_LIMIT: u64 = 100_000;
/// Value sets of sums are tracked exactly up to this many values.
const SET_LIMIT: usize = 4096;

fn sat(v: i128) -> i64 {
    v.clamp(i64::MIN as i128 / 4, i64::MAX as i128 / 4) as i64
}

/// Lower and upper bound of a term; boolean terms range over `0..1`.
pub fn interval(t: &Term, vars: &VarTable) -> (i64, i64) {
    match t {
        Term::Int(v) => (*v, *v),
        Term::Bool(b) => (*b as i64, *b as i64),
        Term::Var(v) => {
            let d = &vars.get(*v).domain;
            (IntDomain::min_value(d).unwrap_or(0), IntDomain::max_value(d).unwrap_or(0))
        }
        Term::App(op, args) => {
            if op.is_bool() && !matches!(op, Op::Element(_) | Op::SafeElement(_)) {
                return (0, 1);
            }
            let iv: Vec<(i64, i64)> = args.iter().map(|a| interval(a, vars)).collect();
            match op {
                Op::Sum(c) => {
                    let (mut lo, mut hi) = (0i128, 0i128);
                    for (k, (l, h)) in c.iter().zip(&iv) {
                        let (a, b) = (*k as i128 * *l as i128, *k as i128 * *h as i128);
                        lo += a.min(b);
                        hi += a.max(b);
                    }
                    (sat(lo), sat(hi))
                }
                Op::Product => {
                    let (mut lo, mut hi) = (1i128, 1i128);
                    for (l, h) in &iv {
                        let c = [lo * *l as i128, lo * *h as i128, hi * *l as i128, hi * *h as i128];
                        lo = sat(*c.iter().min().unwrap()) as i128;
                        hi = sat(*c.iter().max().unwrap()) as i128;
                    }
                    (lo as i64, hi as i64)
                }
                Op::Div | Op::SafeDiv => {
                    let m = iv[0].0.unsigned_abs().max(iv[0].1.unsigned_abs()) as i64;
                    (-m, m)
                }
                Op::Mod | Op::SafeMod => {
                    let m = iv[1].0.unsigned_abs().max(iv[1].1.unsigned_abs()) as i64;
                    (-(m - 1).max(0), (m - 1).max(0))
                }
                Op::Pow | Op::SafePow => {
                    let base = iv[0].0.unsigned_abs().max(iv[0].1.unsigned_abs()) as i128;
                    let e = iv[1].1.clamp(0, 64) as u32;
                    let m = sat(base.checked_pow(e).unwrap_or(i128::MAX));
                    (-m.max(1), m.max(1))
                }
                Op::Abs => {
                    let (l, h) = iv[0];
                    let lo = if l <= 0 && h >= 0 { 0 } else { l.unsigned_abs().min(h.unsigned_abs()) as i64 };
                    (lo, l.unsigned_abs().max(h.unsigned_abs()) as i64)
                }
                Op::Min => (iv.iter().map(|x| x.0).min().unwrap_or(0), iv.iter().map(|x| x.1).min().unwrap_or(0)),
                Op::Max => (iv.iter().map(|x| x.0).max().unwrap_or(0), iv.iter().map(|x| x.1).max().unwrap_or(0)),
                Op::Element(info) | Op::SafeElement(info) => {
                    let n = info.len().max(1).min(iv.len());
                    let e = &iv[..n];
                    (e.iter().map(|x| x.0).min().unwrap_or(0), e.iter().map(|x| x.1).max().unwrap_or(0))
                }
                Op::ToInt => iv[0],
                _ => (0, 1),
            }
        }
    }
}

/// Domain of a term when its value is a single constant or variable.
fn leaf_domain(t: &Term, vars: &VarTable) -> Option<IntDomain> {
    match t {
        Term::Int(v) => Some(IntDomain::singleton(*v)),
        Term::Bool(b) => Some(IntDomain::singleton(*b as i64)),
        Term::Var(v) => Some(vars.get(*v).domain.clone()),
        _ => None,
    }
}

/// A superset of the values a term can take; exact for operators over
/// small argument domains.
pub fn term_domain(t: &Term, vars: &VarTable) -> IntDomain {
    if let Some(d) = leaf_domain(t, vars) {
        return d;
    }
    let Term::App(op, args) = t else { unreachable!() };
    if op.is_bool() && !matches!(op, Op::Element(_) | Op::SafeElement(_)) {
        return IntDomain::boolean();
    }
    match op {
        Op::Sum(c) => {
            let mut set: Vec<i64> = vec![0];
            for (k, a) in c.iter().zip(args) {
                let d = term_domain(a, vars);
                if d.size().is_none_or(|s| s as usize * set.len() > SET_LIMIT * 16) {
                    return interval_domain(t, vars);
                }
                let mut next: Vec<i64> = Vec::with_capacity(set.len() * d.size().unwrap_or(1) as usize);
                for s in &set {
                    for v in d.iter() {
                        next.push(s.saturating_add(k.saturating_mul(v)));
                    }
                }
                next.sort_unstable();
                next.dedup();
                if next.len() > SET_LIMIT {
                    return interval_domain(t, vars);
                }
                set = next;
            }
            IntDomain::from_values(set)
        }
        Op::ToInt => IntDomain::boolean(),
        Op::Element(info) | Op::SafeElement(info) => {
            let n = info.len();
            let mut d = IntDomain::empty();
            for a in &args[..n] {
                d = d.union(&term_domain(a, vars));
            }
            d
        }
        _ => {
            let doms: Vec<IntDomain> = args.iter().map(|a| term_domain(a, vars)).collect();
            let mut combos: u64 = 1;
            for d in &doms {
                combos = combos.saturating_mul(d.size().unwrap_or(u64::MAX));
            }
            if combos > ENUM_LIMIT {
                return interval_domain(t, vars);
            }
            let mut out = Vec::new();
            let vals: Vec<Vec<i64>> = doms.iter().map(IntDomain::values).collect();
            for_each_tuple(&vals, &mut |tuple| {
                let app = Term::App(op.clone(), tuple.iter().map(|&v| Term::Int(v)).collect());
                if let Ok(v) = eval_term(&app, &|_| 0) {
                    out.push(v);
                }
            });
            IntDomain::from_values(out)
        }
    }
}

fn interval_domain(t: &Term, vars: &VarTable) -> IntDomain {
    let (lo, hi) = interval(t, vars);
    IntDomain::range(lo, hi)
}

/// Calls `f` on every tuple of the cartesian product, last position fastest.
pub fn for_each_tuple(vals: &[Vec<i64>], f: &mut dyn FnMut(&[i64])) {
    if vals.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; vals.len()];
    let mut cur: Vec<i64> = vals.iter().map(|v| v[0]).collect();
    loop {
        f(&cur);
        let mut k = vals.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < vals[k].len() {
                cur[k] = vals[k][idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = vals[k][0];
        }
    }
}
