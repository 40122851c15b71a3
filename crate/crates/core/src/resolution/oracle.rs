//! Saturation oracles for minimum refutation width and minimum depth at a
//! fixed width.

use super::ResolutionError;
use crate::cnf::{Clause, Cnf, Lit, Var};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Close the clause space under width-bounded weakening as well. This
    /// never changes the answer (a subclause derives subclauses of whatever
    /// its weakenings derive, at no greater depth) and is exponentially more
    /// expensive; it exists to test that claim.
    pub weakening: bool,
    /// Maximum number of distinct clauses held in the closure. The number of
    /// resolvents computed is capped at [`WORK_PER_CLAUSE`] times this.
    pub clause_budget: usize,
}

pub const WORK_PER_CLAUSE: usize = 64;

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { weakening: false, clause_budget: 4_000_000 }
    }
}

/// Level-synchronized closure of the width-≤w clause space.
struct Closure {
    w: usize,
    budget: usize,
    work: usize,
    clauses: Vec<Clause>,
    index: HashMap<Clause, usize>,
    /// Clause ids containing each literal, keyed by the DIMACS value.
    occurs: HashMap<i32, Vec<usize>>,
}

impl Closure {
    fn new(cnf: &Cnf, w: usize, budget: usize) -> Result<Self, ResolutionError> {
        let mut c = Closure { w, budget, work: 0, clauses: Vec::new(), index: HashMap::new(), occurs: HashMap::new() };
        for ax in &cnf.clauses {
            if ax.width() <= w {
                c.insert(ax.clone())?;
            }
        }
        Ok(c)
    }

    fn insert(&mut self, clause: Clause) -> Result<bool, ResolutionError> {
        if self.index.contains_key(&clause) {
            return Ok(false);
        }
        if self.clauses.len() >= self.budget {
            return Err(ResolutionError::ResourceBudgetExceeded(self.budget));
        }
        let id = self.clauses.len();
        for l in clause.lits() {
            self.occurs.entry(l.to_dimacs()).or_default().push(id);
        }
        self.index.insert(clause.clone(), id);
        self.clauses.push(clause);
        Ok(true)
    }

    fn has_empty(&self) -> bool {
        self.index.contains_key(&Clause::empty())
    }

    /// Adds everything derivable in one step from a clause in `lo..hi` and
    /// any clause below `hi`. Returns the new end.
    fn step(&mut self, lo: usize, hi: usize, num_vars: Var, weakening: bool) -> Result<usize, ResolutionError> {
        let mut fresh = Vec::new();
        let mut pending = HashSet::new();
        for a in lo..hi {
            if self.clauses.len() + fresh.len() > self.budget {
                return Err(ResolutionError::ResourceBudgetExceeded(self.budget));
            }
            let ca = &self.clauses[a];
            for &l in ca.lits() {
                let Some(partners) = self.occurs.get(&l.negate().to_dimacs()) else { continue };
                for &b in partners {
                    if b >= hi || (b >= lo && b < a) {
                        continue;
                    }
                    self.work += 1;
                    if self.work > self.budget.saturating_mul(WORK_PER_CLAUSE) {
                        return Err(ResolutionError::ResourceBudgetExceeded(self.budget));
                    }
                    let cb = &self.clauses[b];
                    let (p, n) = if l.is_positive() { (ca, cb) } else { (cb, ca) };
                    if let Some(r) = p.resolve(n, l.var()) {
                        if r.width() <= self.w && !self.index.contains_key(&r) && pending.insert(r.clone()) {
                            fresh.push(r);
                        }
                    }
                }
            }
            if weakening && ca.width() < self.w {
                for x in 1..=num_vars {
                    if ca.lit_of(x).is_none() {
                        for lit in [Lit::pos(x), Lit::neg(x)] {
                            let mut lits = ca.lits().to_vec();
                            lits.push(lit);
                            let c = Clause::new(lits).expect("fresh variable");
                            if !self.index.contains_key(&c) && pending.insert(c.clone()) {
                                fresh.push(c);
                            }
                        }
                    }
                }
            }
        }
        for r in fresh {
            self.insert(r)?;
        }
        Ok(self.clauses.len())
    }
}

/// Least `t ≤ cap` such that the level-`t` closure at width `w` contains the
/// empty clause; `None` if it does not appear by level `cap` or the closure
/// saturates first.
pub fn min_depth_at_width(
    cnf: &Cnf,
    w: usize,
    cap: usize,
    opts: &OracleOptions,
) -> Result<Option<usize>, ResolutionError> {
    let mut closure = Closure::new(cnf, w, opts.clause_budget)?;
    if closure.has_empty() {
        return Ok(Some(0));
    }
    let (mut lo, mut hi) = (0, closure.clauses.len());
    for t in 1..=cap {
        let end = closure.step(lo, hi, cnf.num_vars, opts.weakening)?;
        if closure.has_empty() {
            return Ok(Some(t));
        }
        if end == hi {
            return Ok(None);
        }
        (lo, hi) = (hi, end);
    }
    Ok(None)
}

/// Whether the width-`w` closure contains the empty clause.
pub fn refutable_in_width(cnf: &Cnf, w: usize, opts: &OracleOptions) -> Result<bool, ResolutionError> {
    Ok(min_depth_at_width(cnf, w, usize::MAX, opts)?.is_some())
}

/// Least `w ≤ cap` admitting a width-`w` refutation, or `None`.
pub fn min_refutation_width(
    cnf: &Cnf,
    cap: usize,
    opts: &OracleOptions,
) -> Result<Option<usize>, ResolutionError> {
    for w in 0..=cap {
        if refutable_in_width(cnf, w, opts)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
