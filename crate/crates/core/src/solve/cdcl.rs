//! Conflict-driven clause-learning SAT solver.
//!
//! Two watched literals with blockers, first-UIP learning with local
//! minimisation, VSIDS branching with phase saving, Luby restarts and
//! activity-based deletion of learnt clauses. Clauses may be added
//! between calls and each call may carry assumptions, so enumeration
//! and optimisation keep learnt clauses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::satenc::{Cnf, Lit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub solves: u64,
}

/// Internal literal: `2·var + sign`, sign 1 for negative.
type Code = u32;

fn code(l: Lit) -> Code {
    let v = l.unsigned_abs() - 1;
    2 * v + (l < 0) as u32
}

fn lit_of(c: Code) -> Lit {
    let v = (c >> 1) as Lit + 1;
    if c & 1 == 1 { -v } else { v }
}

fn var(c: Code) -> usize {
    (c >> 1) as usize
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;
const RANDOM_FREQ: f64 = 0.01;
const RESTART_BASE: u64 = 100;

struct Clause {
    lits: Vec<Code>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Code,
}

/// Max-heap of variables keyed by activity.
#[derive(Default)]
struct Order {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

impl Order {
    const ABSENT: usize = usize::MAX;

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, Self::ABSENT);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != Self::ABSENT
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = i;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}

pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: Order,
    trail: Vec<Code>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    num_learnts: usize,
    max_learnts: f64,
    rng: ChaCha8Rng,
    stats: Stats,
}

impl Solver {
    pub fn new(seed: u64) -> Solver {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: Order::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            num_learnts: 0,
            max_learnts: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: Stats::default(),
        }
    }

    pub fn from_cnf(cnf: &Cnf, seed: u64) -> Solver {
        let mut s = Solver::new(seed);
        s.reserve(cnf.num_vars() as usize);
        for c in cnf.clauses() {
            if !s.add_clause(c) {
                break;
            }
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// Makes variables `1..=n` available.
    pub fn reserve(&mut self, n: usize) {
        while self.assign.len() < n {
            let v = self.assign.len();
            self.assign.push(UNDEF);
            self.level.push(0);
            self.reason.push(NO_REASON);
            self.phase.push(false);
            self.activity.push(0.0);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.order.grow(v + 1);
            self.order.insert(v, &self.activity);
        }
    }

    fn value(&self, c: Code) -> u8 {
        let a = self.assign[var(c)];
        if a == UNDEF { UNDEF } else { a ^ (c & 1) as u8 }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at the root. Returns false once the formula is known
    /// to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        if let Some(m) = lits.iter().map(|l| l.unsigned_abs() as usize).max() {
            self.reserve(m);
        }
        let mut cs: Vec<Code> = lits.iter().map(|&l| code(l)).collect();
        cs.sort_unstable();
        cs.dedup();
        if cs.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        if cs.iter().any(|&c| self.value(c) == 1) {
            return true;
        }
        cs.retain(|&c| self.value(c) == UNDEF);
        match cs.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(cs[0], NO_REASON);
                self.ok = self.propagate().is_none();
            }
            _ => {
                self.attach(cs, false);
            }
        }
        self.ok
    }

    fn attach(&mut self, lits: Vec<Code>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1] as usize].push(Watch { cref, blocker: lits[0] });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        cref
    }

    fn enqueue(&mut self, c: Code, reason: u32) {
        let v = var(c);
        self.assign[v] = (c & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(c);
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let nw = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != 0 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l as usize].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for k in (start..self.trail.len()).rev() {
            let c = self.trail[k];
            let v = var(c);
            self.phase[v] = c & 1 == 0;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = start;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis: the learnt clause (asserting literal
    /// first) and the level to return to.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Code>, u32) {
        let mut out: Vec<Code> = vec![0];
        let mut path = 0usize;
        let mut p: Option<Code> = None;
        let mut idx = self.trail.len();
        let cur = self.decision_level();
        loop {
            self.bump_clause(confl as usize);
            let skip = p.is_some() as usize;
            for k in skip..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let q = self.trail[idx];
            p = Some(q);
            self.seen[var(q)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[var(q)];
        }
        out[0] = p.unwrap() ^ 1;

        // drop literals implied by the rest of the clause
        let mut kept = vec![out[0]];
        for &q in &out[1..] {
            let r = self.reason[var(q)];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|&l| self.seen[var(l)] || self.level[var(l)] == 0);
            if !redundant {
                kept.push(q);
            }
        }
        for &q in &out {
            self.seen[var(q)] = false;
        }
        let mut out = kept;

        let bt = if out.len() == 1 {
            0
        } else {
            let mut m = 1;
            for k in 2..out.len() {
                if self.level[var(out[k])] > self.level[var(out[m])] {
                    m = k;
                }
            }
            out.swap(1, m);
            self.level[var(out[1])]
        };
        (out, bt)
    }

    fn locked(&self, cref: usize) -> bool {
        let c = &self.clauses[cref];
        let v = var(c.lits[0]);
        self.reason[v] == cref as u32 && self.value(c.lits[0]) == 1
    }

    fn reduce_learnts(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.clauses[i].learnt && !self.clauses[i].deleted && self.clauses[i].lits.len() > 2)
            .collect();
        learnts.sort_by(|&a, &b| self.clauses[a].activity.total_cmp(&self.clauses[b].activity));
        for &i in &learnts[..learnts.len() / 2] {
            if !self.locked(i) {
                self.clauses[i].deleted = true;
                self.clauses[i].lits = Vec::new();
                self.num_learnts -= 1;
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Code> {
        if !self.order.heap.is_empty() && self.rng.gen_bool(RANDOM_FREQ) {
            let v = self.order.heap[self.rng.gen_range(0..self.order.heap.len())];
            if self.assign[v] == UNDEF {
                return Some(2 * v as u32 + (!self.phase[v]) as u32);
            }
        }
        loop {
            let v = self.order.pop(&self.activity)?;
            if self.assign[v] == UNDEF {
                return Some(2 * v as u32 + (!self.phase[v]) as u32);
            }
        }
    }

    /// Solves under the given assumptions. On `Sat` the model can be read
    /// with [`Solver::model_value`].
    pub fn solve(&mut self, assumptions: &[Lit]) -> Status {
        self.stats.solves += 1;
        if !self.ok {
            return Status::Unsat;
        }
        if let Some(m) = assumptions.iter().map(|l| l.unsigned_abs() as usize).max() {
            self.reserve(m);
        }
        let assumptions: Vec<Code> = assumptions.iter().map(|&l| code(l)).collect();
        self.max_learnts = self.max_learnts.max(self.clauses.len() as f64 / 3.0).max(1000.0);
        let mut restart = 0u32;
        let status = loop {
            let budget = luby(restart) * RESTART_BASE;
            match self.search(budget, &assumptions) {
                Status::Unknown => {
                    restart += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                }
                s => break s,
            }
        };
        if status == Status::Sat {
            self.model = (0..self.num_vars()).map(|v| self.assign[v] == 1).collect();
        }
        self.cancel_until(0);
        status
    }

    fn search(&mut self, budget: u64, assumptions: &[Code]) -> Status {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Status::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                continue;
            }
            if conflicts >= budget {
                self.cancel_until(0);
                return Status::Unknown;
            }
            if self.num_learnts as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_learnts();
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let p = assumptions[self.decision_level() as usize];
                match self.value(p) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => {
                        self.cancel_until(0);
                        return Status::Unsat;
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => {
                        self.stats.decisions += 1;
                        p
                    }
                    None => return Status::Sat,
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }

    /// Truth value of a literal in the last model.
    pub fn model_value(&self, l: Lit) -> bool {
        let v = l.unsigned_abs() as usize - 1;
        let b = self.model.get(v).copied().unwrap_or(false);
        if l > 0 { b } else { !b }
    }

    /// The last model as DIMACS literals.
    pub fn model(&self) -> Vec<Lit> {
        (0..self.model.len()).map(|v| lit_of(2 * v as u32 + (!self.model[v]) as u32)).collect()
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, …
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    i = seq;
    1u64 << i
}
