//! At-most-one encodings over SAT literals.

use super::cnf::{Cnf, Lit};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AmoScheme {
    /// Two-product encoding; pairwise at four literals or fewer.
    #[default]
    Product,
    /// Commander encoding with groups of three.
    Commander,
    /// Sequential ladder of prefix literals.
    Ladder,
    /// Binary tree of "some literal below is true" nodes.
    Tree,
}

fn pairwise(cnf: &mut Cnf, lits: &[Lit]) {
    for (i, &a) in lits.iter().enumerate() {
        for &b in &lits[i + 1..] {
            cnf.add(&[-a, -b]);
        }
    }
}

pub fn at_most_one(cnf: &mut Cnf, lits: &[Lit], scheme: AmoScheme) {
    match scheme {
        AmoScheme::Product => product(cnf, lits),
        AmoScheme::Commander => commander(cnf, lits),
        AmoScheme::Ladder => ladder(cnf, lits),
        AmoScheme::Tree => {
            if lits.len() > 1 {
                tree(cnf, lits);
            }
        }
    }
}

pub fn exactly_one(cnf: &mut Cnf, lits: &[Lit], scheme: AmoScheme) {
    cnf.add(lits);
    at_most_one(cnf, lits, scheme);
}

fn product(cnf: &mut Cnf, lits: &[Lit]) {
    let n = lits.len();
    if n <= 4 {
        return pairwise(cnf, lits);
    }
    let p = (n as f64).sqrt().ceil() as usize;
    let q = n.div_ceil(p);
    let rows: Vec<Lit> = (0..p).map(|_| cnf.fresh()).collect();
    let cols: Vec<Lit> = (0..q).map(|_| cnf.fresh()).collect();
    for (i, &x) in lits.iter().enumerate() {
        cnf.imply(x, rows[i / q]);
        cnf.imply(x, cols[i % q]);
    }
    product(cnf, &rows);
    product(cnf, &cols);
}

fn commander(cnf: &mut Cnf, lits: &[Lit]) {
    if lits.len() <= 3 {
        return pairwise(cnf, lits);
    }
    let mut commanders = Vec::new();
    for group in lits.chunks(3) {
        pairwise(cnf, group);
        let c = cnf.fresh();
        for &x in group {
            cnf.imply(x, c);
        }
        let mut clause = vec![-c];
        clause.extend_from_slice(group);
        cnf.add(&clause);
        commanders.push(c);
    }
    commander(cnf, &commanders);
}

fn ladder(cnf: &mut Cnf, lits: &[Lit]) {
    let n = lits.len();
    if n <= 1 {
        return;
    }
    // s[i] holds when some lits[j], j ≤ i, holds
    let s: Vec<Lit> = (0..n - 1).map(|_| cnf.fresh()).collect();
    for i in 0..n {
        if i < n - 1 {
            cnf.imply(lits[i], s[i]);
        }
        if i > 0 {
            cnf.add(&[-s[i - 1], -lits[i]]);
            if i < n - 1 {
                cnf.imply(s[i - 1], s[i]);
            }
        }
    }
}

/// Returns the node literal: some literal in the subtree holds.
fn tree(cnf: &mut Cnf, lits: &[Lit]) -> Lit {
    if lits.len() == 1 {
        return lits[0];
    }
    let (l, r) = lits.split_at(lits.len() / 2);
    let (a, b) = (tree(cnf, l), tree(cnf, r));
    cnf.add(&[-a, -b]);
    let o = cnf.fresh();
    cnf.imply(a, o);
    cnf.imply(b, o);
    cnf.add(&[-o, a, b]);
    o
}
