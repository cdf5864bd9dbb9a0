//! Clause store and DIMACS output.

use std::io::{self, Write};

/// A signed SAT variable index.
pub type Lit = i32;

/// SAT variable 1 is fixed true by a unit clause.
pub const TRUE: Lit = 1;
pub const FALSE: Lit = -1;

#[derive(Debug, Clone)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    /// Meaning of selected SAT variables, written as comment lines.
    comments: Vec<(Lit, String)>,
    limit: Option<u64>,
    exceeded: bool,
}

impl Default for Cnf {
    fn default() -> Self {
        Cnf::new()
    }
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf { num_vars: 1, clauses: vec![vec![TRUE]], comments: Vec::new(), limit: None, exceeded: false }
    }

    /// Stops storing clauses once `n` clauses exist; see [`Cnf::exceeded`].
    pub fn set_limit(&mut self, n: Option<u64>) {
        self.limit = n;
    }

    pub fn exceeded(&self) -> bool {
        self.exceeded
    }

    pub fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn annotate(&mut self, l: Lit, what: String) {
        self.comments.push((l, what));
    }

    /// Adds a clause after removing constant and duplicate literals.
    /// Tautologies are dropped; an empty clause is stored as `[FALSE]`.
    pub fn add(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            if l == TRUE {
                return;
            }
            if l != FALSE {
                c.push(l);
            }
        }
        c.sort_unstable_by_key(|l| (l.abs(), *l));
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            return;
        }
        if c.is_empty() {
            c.push(FALSE);
        }
        if let Some(n) = self.limit {
            if self.clauses.len() as u64 >= n {
                self.exceeded = true;
                return;
            }
        }
        self.clauses.push(c);
    }

    pub fn unit(&mut self, l: Lit) {
        self.add(&[l]);
    }

    pub fn imply(&mut self, a: Lit, b: Lit) {
        self.add(&[-a, b]);
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(|c| c == &[FALSE])
    }

    pub fn write_dimacs(&self, w: &mut dyn Write) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        for (l, what) in &self.comments {
            writeln!(w, "c {l} {what}")?;
        }
        writeln!(w, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(w, "{l} ")?;
            }
            writeln!(w, "0")?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_counts_match_body() {
        let mut cnf = Cnf::new();
        let a = cnf.fresh();
        let b = cnf.fresh();
        cnf.add(&[a, -b, a]);
        cnf.add(&[a, -a]);
        cnf.add(&[FALSE, b]);
        let mut out = Vec::new();
        cnf.write_dimacs(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('c'));
        assert_eq!(lines.next(), Some("p cnf 3 3"));
        assert_eq!(lines.collect::<Vec<_>>(), vec!["1 0", "2 -3 0", "3 0"]);
    }

    #[test]
    fn limit_stops_storage() {
        let mut cnf = Cnf::new();
        cnf.set_limit(Some(2));
        let a = cnf.fresh();
        cnf.unit(a);
        cnf.unit(-a);
        assert!(cnf.exceeded());
        assert_eq!(cnf.num_clauses(), 2);
    }
}
