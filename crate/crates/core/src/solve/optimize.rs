//! Optimisation by repeated satisfiability calls on the objective's
//! order literals.

use crate::error::Result;
use crate::frontend::ast::ObjectiveDir;
use crate::satenc::{Lit, Objective, VarEnc, FALSE, TRUE};

use super::{Session, Solution, Status};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Halve the interval of remaining objective values with assumptions.
    #[default]
    Bisect,
    /// Require a strictly better value after each solution.
    Linear,
    /// Try the best remaining value, removing it when unsatisfiable.
    Unsat,
}

/// Objective values ordered best first, with "at least as good as"
/// literals.
struct Ladder<'a> {
    enc: &'a VarEnc,
    dir: ObjectiveDir,
    vals: Vec<i64>,
}

impl Ladder<'_> {
    /// `[objective is at least as good as vals[i]]`.
    fn good(&self, i: usize) -> Lit {
        let a = self.vals[i];
        match self.dir {
            ObjectiveDir::Minimising => self.enc.le_lit(a).unwrap(),
            ObjectiveDir::Maximising => -self.enc.le_lit(a - 1).unwrap(),
        }
    }

    fn index(&self, v: i64) -> usize {
        self.vals.iter().position(|&x| x == v).expect("objective value in domain")
    }
}

impl Session<'_> {
    /// An optimal solution, or `None` if there is none.
    pub fn optimize(&mut self, strategy: Strategy) -> Result<Option<Solution>> {
        let enc = self.enc;
        let (dir, v) = match enc.objective {
            Some((dir, Objective::Var(v))) => (dir, v),
            _ => return self.solve_once(),
        };
        let venc = enc.vars[v].as_ref().expect("objective is encoded");
        let mut vals = venc.values();
        if dir == ObjectiveDir::Maximising {
            vals.reverse();
        }
        let ladder = Ladder { enc: venc, dir, vals };
        match strategy {
            Strategy::Bisect => self.bisect(&ladder),
            Strategy::Linear => self.linear(&ladder),
            Strategy::Unsat => self.unsat_first(&ladder),
        }
    }

    fn objective_index(&self, ladder: &Ladder, sol: &Solution) -> usize {
        ladder.index(sol.objective.expect("objective value"))
    }

    fn bisect(&mut self, ladder: &Ladder) -> Result<Option<Solution>> {
        let Some(mut best) = self.solve_once()? else { return Ok(None) };
        let (mut lo, mut hi) = (0, self.objective_index(ladder, &best));
        // invariant: best has index hi; nothing better than lo exists
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.call(&[ladder.good(mid)])? {
                Status::Sat => {
                    best = self.current()?;
                    hi = self.objective_index(ladder, &best);
                }
                Status::Unsat => lo = mid + 1,
                Status::Unknown => break,
            }
        }
        Ok(Some(best))
    }

    fn linear(&mut self, ladder: &Ladder) -> Result<Option<Solution>> {
        let Some(mut best) = self.solve_once()? else { return Ok(None) };
        loop {
            let k = self.objective_index(ladder, &best);
            if k == 0 {
                break;
            }
            let l = ladder.good(k - 1);
            if l == FALSE {
                break;
            }
            self.backend.add_clause(&[l]);
            match self.call(&[])? {
                Status::Sat => best = self.current()?,
                _ => break,
            }
        }
        Ok(Some(best))
    }

    fn unsat_first(&mut self, ladder: &Ladder) -> Result<Option<Solution>> {
        for i in 0..ladder.vals.len() {
            let l = ladder.good(i);
            let assume: Vec<Lit> = if l == TRUE { vec![] } else { vec![l] };
            match self.call(&assume)? {
                Status::Sat => return self.current().map(Some),
                Status::Unsat => self.backend.add_clause(&[-l]),
                Status::Unknown => return Ok(None),
            }
        }
        Ok(None)
    }
}
