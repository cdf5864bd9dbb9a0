//! Random small models with an independent brute-force evaluator.
//!
//! Expressions are generated as trees, printed as Essence Prime text for
//! the compiler, and evaluated directly here under relational semantics:
//! an undefined integer makes its nearest enclosing boolean false.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub enum IExpr {
    Var(usize),
    Const(i64),
    Sum(Vec<(i64, IExpr)>),
    Mul(Box<IExpr>, Box<IExpr>),
    Div(Box<IExpr>, Box<IExpr>),
    Mod(Box<IExpr>, Box<IExpr>),
    Abs(Box<IExpr>),
    Min(Vec<IExpr>),
    Max(Vec<IExpr>),
    /// One-based index into a matrix literal.
    Elem(Vec<IExpr>, Box<IExpr>),
    ToInt(Box<BExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
}

#[derive(Debug, Clone)]
pub enum BExpr {
    Var(usize),
    Rel(Rel, IExpr, IExpr),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
    Imp(Box<BExpr>, Box<BExpr>),
    Iff(Box<BExpr>, Box<BExpr>),
    Not(Box<BExpr>),
    AllDiff(Vec<IExpr>),
    AtMost(Vec<IExpr>, i64, i64),
    AtLeast(Vec<IExpr>, i64, i64),
    Table(Vec<usize>, Vec<Vec<i64>>),
    Lex(bool, Vec<IExpr>, Vec<IExpr>),
}

#[derive(Debug, Clone)]
pub struct VarDecl {
    pub name: String,
    pub is_bool: bool,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<BExpr>,
    /// `(maximising, objective)`.
    pub objective: Option<(bool, IExpr)>,
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q }
}

pub fn ieval(e: &IExpr, a: &[i64]) -> Option<i64> {
    Some(match e {
        IExpr::Var(v) => a[*v],
        IExpr::Const(c) => *c,
        IExpr::Sum(ts) => {
            let mut s = 0;
            for (c, t) in ts {
                s += c * ieval(t, a)?;
            }
            s
        }
        IExpr::Mul(x, y) => ieval(x, a)? * ieval(y, a)?,
        IExpr::Div(x, y) => {
            let (x, y) = (ieval(x, a)?, ieval(y, a)?);
            if y == 0 {
                return None;
            }
            floor_div(x, y)
        }
        IExpr::Mod(x, y) => {
            let (x, y) = (ieval(x, a)?, ieval(y, a)?);
            if y == 0 {
                return None;
            }
            x - y * floor_div(x, y)
        }
        IExpr::Abs(x) => ieval(x, a)?.abs(),
        IExpr::Min(xs) => xs.iter().map(|x| ieval(x, a)).collect::<Option<Vec<_>>>()?.into_iter().min()?,
        IExpr::Max(xs) => xs.iter().map(|x| ieval(x, a)).collect::<Option<Vec<_>>>()?.into_iter().max()?,
        IExpr::Elem(xs, i) => {
            // a matrix with an undefined entry is itself undefined
            let xs = all(xs, a)?;
            let i = ieval(i, a)?;
            if i < 1 || i > xs.len() as i64 {
                return None;
            }
            xs[i as usize - 1]
        }
        IExpr::ToInt(b) => beval(b, a) as i64,
    })
}

fn all(xs: &[IExpr], a: &[i64]) -> Option<Vec<i64>> {
    xs.iter().map(|x| ieval(x, a)).collect()
}

pub fn beval(e: &BExpr, a: &[i64]) -> bool {
    match e {
        BExpr::Var(v) => a[*v] == 1,
        BExpr::Rel(r, x, y) => match (ieval(x, a), ieval(y, a)) {
            (Some(x), Some(y)) => match r {
                Rel::Eq => x == y,
                Rel::Ne => x != y,
                Rel::Lt => x < y,
                Rel::Le => x <= y,
            },
            _ => false,
        },
        BExpr::And(x, y) => beval(x, a) && beval(y, a),
        BExpr::Or(x, y) => beval(x, a) || beval(y, a),
        BExpr::Imp(x, y) => !beval(x, a) || beval(y, a),
        BExpr::Iff(x, y) => beval(x, a) == beval(y, a),
        BExpr::Not(x) => !beval(x, a),
        BExpr::AllDiff(xs) => match all(xs, a) {
            Some(vs) => (0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| vs[i] != vs[j])),
            None => false,
        },
        BExpr::AtMost(xs, c, v) => match all(xs, a) {
            Some(vs) => vs.iter().filter(|&&x| x == *v).count() as i64 <= *c,
            None => false,
        },
        BExpr::AtLeast(xs, c, v) => match all(xs, a) {
            Some(vs) => vs.iter().filter(|&&x| x == *v).count() as i64 >= *c,
            None => false,
        },
        BExpr::Table(vs, rows) => {
            let t: Vec<i64> = vs.iter().map(|&v| a[v]).collect();
            rows.contains(&t)
        }
        BExpr::Lex(strict, xs, ys) => match (all(xs, a), all(ys, a)) {
            (Some(x), Some(y)) => {
                if *strict {
                    x < y
                } else {
                    x <= y
                }
            }
            _ => false,
        },
    }
}

fn list(xs: &[IExpr], vars: &[VarDecl]) -> String {
    let items: Vec<String> = xs.iter().map(|x| ishow(x, vars)).collect();
    format!("[{}]", items.join(", "))
}

pub fn ishow(e: &IExpr, vars: &[VarDecl]) -> String {
    match e {
        IExpr::Var(v) if vars[*v].is_bool => format!("toInt({})", vars[*v].name),
        IExpr::Var(v) => vars[*v].name.clone(),
        IExpr::Const(c) if *c < 0 => format!("({c})"),
        IExpr::Const(c) => c.to_string(),
        IExpr::Sum(ts) => {
            let parts: Vec<String> = ts
                .iter()
                .map(|(c, t)| if *c < 0 { format!("({c})*{}", ishow(t, vars)) } else { format!("{c}*{}", ishow(t, vars)) })
                .collect();
            format!("({})", parts.join(" + "))
        }
        IExpr::Mul(x, y) => format!("({} * {})", ishow(x, vars), ishow(y, vars)),
        IExpr::Div(x, y) => format!("({} / {})", ishow(x, vars), ishow(y, vars)),
        IExpr::Mod(x, y) => format!("({} % {})", ishow(x, vars), ishow(y, vars)),
        IExpr::Abs(x) => format!("|{}|", ishow(x, vars)),
        IExpr::Min(xs) => format!("min({})", list(xs, vars)),
        IExpr::Max(xs) => format!("max({})", list(xs, vars)),
        IExpr::Elem(xs, i) => format!("{}[{}]", list(xs, vars), ishow(i, vars)),
        IExpr::ToInt(b) => format!("toInt({})", bshow(b, vars)),
    }
}

pub fn bshow(e: &BExpr, vars: &[VarDecl]) -> String {
    let bin = |op: &str, x: &BExpr, y: &BExpr| format!("({} {op} {})", bshow(x, vars), bshow(y, vars));
    match e {
        BExpr::Var(v) => vars[*v].name.clone(),
        BExpr::Rel(r, x, y) => {
            let op = match r {
                Rel::Eq => "=",
                Rel::Ne => "!=",
                Rel::Lt => "<",
                Rel::Le => "<=",
            };
            format!("({} {op} {})", ishow(x, vars), ishow(y, vars))
        }
        BExpr::And(x, y) => bin("/\\", x, y),
        BExpr::Or(x, y) => bin("\\/", x, y),
        BExpr::Imp(x, y) => bin("->", x, y),
        BExpr::Iff(x, y) => bin("<->", x, y),
        BExpr::Not(x) => format!("!{}", bshow(x, vars)),
        BExpr::AllDiff(xs) => format!("allDiff({})", list(xs, vars)),
        BExpr::AtMost(xs, c, v) => format!("atmost({}, [{c}], [{v}])", list(xs, vars)),
        BExpr::AtLeast(xs, c, v) => format!("atleast({}, [{c}], [{v}])", list(xs, vars)),
        BExpr::Table(vs, rows) => {
            let args: Vec<String> = vs.iter().map(|&v| vars[v].name.clone()).collect();
            let rows: Vec<String> =
                rows.iter().map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
            format!("table([{}], [{}])", args.join(", "), rows.join(", "))
        }
        BExpr::Lex(strict, xs, ys) => {
            format!("({} {} {})", list(xs, vars), if *strict { "<lex" } else { "<=lex" }, list(ys, vars))
        }
    }
}

fn domain_text(values: &[i64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("int({})", parts.join(", "))
}

impl Instance {
    pub fn to_eprime(&self) -> String {
        let mut s = String::from("language ESSENCE' 1.0\n");
        for v in &self.vars {
            let d = if v.is_bool { "bool".to_string() } else { domain_text(&v.values) };
            s.push_str(&format!("find {} : {d}\n", v.name));
        }
        if let Some((max, o)) = &self.objective {
            s.push_str(&format!("{} {}\n", if *max { "maximising" } else { "minimising" }, ishow(o, &self.vars)));
        }
        if !self.constraints.is_empty() {
            let cs: Vec<String> = self.constraints.iter().map(|c| bshow(c, &self.vars)).collect();
            s.push_str(&format!("such that\n    {}\n", cs.join(",\n    ")));
        }
        s
    }

    pub fn for_each_assignment(&self, f: &mut dyn FnMut(&[i64])) {
        fn go(vars: &[VarDecl], a: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
            if a.len() == vars.len() {
                return f(a);
            }
            for &x in &vars[a.len()].values {
                a.push(x);
                go(vars, a, f);
                a.pop();
            }
        }
        go(&self.vars, &mut Vec::new(), f)
    }

    pub fn satisfied(&self, a: &[i64]) -> bool {
        self.constraints.iter().all(|c| beval(c, a))
    }

    /// Number of satisfying assignments by enumeration.
    pub fn count(&self) -> u64 {
        let mut n = 0;
        self.for_each_assignment(&mut |a| n += self.satisfied(a) as u64);
        n
    }

    /// Best objective value over satisfying assignments where the
    /// objective is defined.
    pub fn optimum(&self) -> Option<i64> {
        let (max, o) = self.objective.as_ref()?;
        let mut best: Option<i64> = None;
        self.for_each_assignment(&mut |a| {
            if self.satisfied(a) {
                if let Some(v) = ieval(o, a) {
                    best = Some(match best {
                        None => v,
                        Some(b) if *max => b.max(v),
                        Some(b) => b.min(v),
                    });
                }
            }
        });
        best
    }
}

pub struct Gen<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub vars: Vec<VarDecl>,
}

impl Gen<'_> {
    pub fn new_vars(rng: &mut ChaCha8Rng) -> Vec<VarDecl> {
        let n = rng.gen_range(1..=4);
        (0..n)
            .map(|i| {
                if rng.gen_bool(0.2) {
                    VarDecl { name: format!("b{i}"), is_bool: true, values: vec![0, 1] }
                } else {
                    let size = rng.gen_range(1..=4);
                    let mut pool: Vec<i64> = (-3..=4).collect();
                    pool.shuffle(rng);
                    let mut values = pool[..size].to_vec();
                    values.sort();
                    VarDecl { name: format!("x{i}"), is_bool: false, values }
                }
            })
            .collect()
    }

    fn int_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| !self.vars[i].is_bool).collect()
    }

    fn bool_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.vars[i].is_bool).collect()
    }

    fn leaf(&mut self) -> IExpr {
        if self.rng.gen_bool(0.8) {
            IExpr::Var(self.rng.gen_range(0..self.vars.len()))
        } else {
            IExpr::Const(self.rng.gen_range(-2..=3))
        }
    }

    pub fn int(&mut self, depth: u32) -> IExpr {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.leaf();
        }
        let d = depth - 1;
        let b = |g: &mut Self| Box::new(g.int(d));
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let n = self.rng.gen_range(1..=3);
                IExpr::Sum((0..n).map(|_| (self.rng.gen_range(-3..=3), self.int(d))).collect())
            }
            2 => IExpr::Mul(b(self), b(self)),
            3 => IExpr::Div(b(self), b(self)),
            4 => IExpr::Mod(b(self), b(self)),
            5 => IExpr::Abs(b(self)),
            6 => {
                let n = self.rng.gen_range(1..=3);
                let xs = (0..n).map(|_| self.int(d)).collect();
                if self.rng.gen_bool(0.5) { IExpr::Min(xs) } else { IExpr::Max(xs) }
            }
            7 => {
                let n = self.rng.gen_range(1..=3);
                let xs = (0..n).map(|_| self.int(d)).collect();
                IExpr::Elem(xs, b(self))
            }
            _ => IExpr::ToInt(Box::new(self.boolean(d))),
        }
    }

    fn ints(&mut self, n: usize, depth: u32) -> Vec<IExpr> {
        (0..n).map(|_| self.int(depth)).collect()
    }

    fn relation(&mut self, depth: u32) -> BExpr {
        let r = *[Rel::Eq, Rel::Ne, Rel::Lt, Rel::Le].choose(self.rng).unwrap();
        BExpr::Rel(r, self.int(depth), self.int(depth))
    }

    pub fn boolean(&mut self, depth: u32) -> BExpr {
        let bools = self.bool_vars();
        if depth == 0 {
            if !bools.is_empty() && self.rng.gen_bool(0.3) {
                return BExpr::Var(*bools.choose(self.rng).unwrap());
            }
            return self.relation(0);
        }
        let d = depth - 1;
        let b = |g: &mut Self| Box::new(g.boolean(d));
        match self.rng.gen_range(0..13) {
            0 | 1 | 2 => self.relation(d.min(1) + 1),
            3 => BExpr::And(b(self), b(self)),
            4 => BExpr::Or(b(self), b(self)),
            5 => BExpr::Imp(b(self), b(self)),
            6 => BExpr::Iff(b(self), b(self)),
            7 => BExpr::Not(b(self)),
            8 => {
                let n = self.rng.gen_range(2..=4);
                BExpr::AllDiff(self.ints(n, d.min(1)))
            }
            9 => {
                let n = self.rng.gen_range(1..=4);
                let xs = self.ints(n, d.min(1));
                let (c, v) = (self.rng.gen_range(0..=2), self.rng.gen_range(-2..=3));
                if self.rng.gen_bool(0.5) { BExpr::AtMost(xs, c, v) } else { BExpr::AtLeast(xs, c, v) }
            }
            10 => {
                let n = self.rng.gen_range(1..=3);
                let strict = self.rng.gen_bool(0.5);
                BExpr::Lex(strict, self.ints(n, d.min(1)), self.ints(n, d.min(1)))
            }
            _ => self.table(),
        }
    }

    fn table(&mut self) -> BExpr {
        let ints = self.int_vars();
        if ints.is_empty() {
            return self.relation(1);
        }
        let arity = self.rng.gen_range(1..=3usize.min(ints.len()));
        let mut cols = ints.clone();
        cols.shuffle(self.rng);
        cols.truncate(arity);
        let nrows = self.rng.gen_range(0..=5);
        let rows = (0..nrows)
            .map(|_| {
                cols.iter()
                    .map(|&v| {
                        // mostly in-domain values, sometimes not
                        if self.rng.gen_bool(0.85) {
                            *self.vars[v].values.choose(self.rng).unwrap()
                        } else {
                            self.rng.gen_range(-4..=5)
                        }
                    })
                    .collect()
            })
            .collect();
        BExpr::Table(cols, rows)
    }

    pub fn instance(rng: &mut ChaCha8Rng, with_objective: bool) -> Instance {
        let vars = Gen::new_vars(rng);
        let mut g = Gen { rng, vars };
        let n = g.rng.gen_range(1..=3);
        let constraints = (0..n).map(|_| g.boolean(2)).collect();
        let objective = if with_objective {
            let max = g.rng.gen_bool(0.5);
            let o = g.int(1);
            Some((max, o))
        } else {
            None
        };
        Instance { vars: g.vars, constraints, objective }
    }
}
