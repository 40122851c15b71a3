//! Random restrictions of indexing lifts: each block keeps only the y-variable
//! its pointer selects.

use super::{BlockVariableMap, Gadget, LiftError, Lifted, VarRole};
use crate::cnf::{Assignment, Clause, Cnf, Lit, Var};
use crate::resolution::{ResolutionProof, StepKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt::Write;

/// Per block a pointer `j_i` and values for the y-variables it does not
/// select. `y[i][j_i - 1]` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub m: usize,
    pub pointers: Vec<usize>,
    pub y: Vec<Vec<Option<bool>>>,
}

fn sample_block(rng: &mut impl Rng, m: usize) -> (usize, Vec<Option<bool>>) {
    let j = rng.gen_range(1..=m);
    let y = (1..=m).map(|t| (t != j).then(|| rng.gen_bool(0.5))).collect();
    (j, y)
}

pub fn sample_restriction(n: usize, m: usize, seed: u64) -> Restriction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, n, m)
}

fn sample_with(rng: &mut impl Rng, n: usize, m: usize) -> Restriction {
    let (pointers, y) = (0..n).map(|_| sample_block(rng, m)).unzip();
    Restriction { m, pointers, y }
}

impl Restriction {
    pub fn num_blocks(&self) -> usize {
        self.pointers.len()
    }

    /// The value `ρ` gives a lifted variable; `None` only for the selected
    /// y-variable of each block and for variables outside the blocks.
    pub fn value(&self, map: &BlockVariableMap, v: Var) -> Option<bool> {
        match map.role(v)? {
            VarRole::X { block, index } => Some(self.pointers[block as usize - 1] == index),
            VarRole::Y { block, index } => self.y[block as usize - 1][index - 1],
            // e_s stands for the pointer lying beyond position s + 1.
            VarRole::Ext { block, index } => Some(self.pointers[block as usize - 1] >= index + 2),
            VarRole::Aux => None,
        }
    }

    pub fn assignment(&self, map: &BlockVariableMap) -> Assignment {
        Assignment::from_pairs((1..=map.num_vars()).filter_map(|v| self.value(map, v).map(|b| (v, b))))
    }

    /// The source variable a surviving lifted variable is renamed to.
    pub fn renamed(&self, map: &BlockVariableMap, v: Var) -> Option<Var> {
        match map.role(v)? {
            VarRole::Y { block, index } if self.pointers[block as usize - 1] == index => Some(block),
            _ => None,
        }
    }

    fn check_domain(&self, map: &BlockVariableMap) -> Result<(), LiftError> {
        if map.gadget != Gadget::Ind(self.m) {
            return Err(LiftError::VariableDomainMismatch(format!(
                "restriction for m = {} applied to a {:?} lift",
                self.m, map.gadget
            )));
        }
        if map.blocks as usize != self.num_blocks() {
            return Err(LiftError::VariableDomainMismatch(format!(
                "restriction has {} blocks, lift has {}",
                self.num_blocks(),
                map.blocks
            )));
        }
        Ok(())
    }

    /// `None` if `c` is satisfied, else the surviving literals renamed to
    /// source variables.
    fn restrict(&self, map: &BlockVariableMap, c: &Clause) -> Option<Clause> {
        let mut lits = Vec::new();
        for &l in c.lits() {
            match self.value(map, l.var()) {
                Some(b) if l.eval(b) => return None,
                Some(_) => {}
                None => lits.push(Lit::new(self.renamed(map, l.var()).expect("only selected y-variables survive"), l.is_positive())),
            }
        }
        Some(Clause::new(lits).expect("distinct blocks"))
    }
}

/// Restricted width of `c`, with satisfied clauses counting as width 0.
pub fn restricted_width(map: &BlockVariableMap, rho: &Restriction, c: &Clause) -> usize {
    rho.restrict(map, c).map_or(0, |r| r.width())
}

/// Surviving clauses of the lift, in order, over the source variables, and
/// per lifted clause its index among them.
fn restrict_clauses(lifted: &Lifted, rho: &Restriction) -> Result<(Cnf, Vec<Option<usize>>), LiftError> {
    rho.check_domain(&lifted.map)?;
    let mut clauses = Vec::new();
    let mut index = Vec::with_capacity(lifted.cnf.len());
    for c in &lifted.cnf.clauses {
        match rho.restrict(&lifted.map, c) {
            Some(r) => {
                index.push(Some(clauses.len()));
                clauses.push(r);
            }
            None => index.push(None),
        }
    }
    Ok((Cnf::new(lifted.map.blocks, clauses)?, index))
}

pub fn apply_restriction_to_cnf(lifted: &Lifted, rho: &Restriction) -> Result<Cnf, LiftError> {
    Ok(restrict_clauses(lifted, rho)?.0)
}

/// Restricts every step of a refutation of the lift. Satisfied clauses drop
/// out; a resolution on a fixed variable keeps its non-satisfied premise,
/// weakened where the restricted resolvent is larger. The result refutes
/// [`apply_restriction_to_cnf`] with no larger depth.
pub fn apply_restriction_to_proof(
    lifted: &Lifted,
    rho: &Restriction,
    proof: &ResolutionProof,
) -> Result<ResolutionProof, LiftError> {
    let (_, index) = restrict_clauses(lifted, rho)?;
    let map = &lifted.map;
    if let Some(v) = proof.steps.iter().flat_map(|s| s.clause.vars()).find(|&v| v > map.num_vars()) {
        return Err(LiftError::VariableDomainMismatch(format!("proof mentions variable {v} outside the lift")));
    }
    let mut out = ResolutionProof::default();
    let mut id: Vec<Option<usize>> = vec![None; proof.len()];
    let used = proof.used_steps();
    for (i, step) in proof.steps.iter().enumerate() {
        if !used[i] {
            continue;
        }
        let Some(target) = rho.restrict(map, &step.clause) else { continue };
        let keep = |out: &mut ResolutionProof, p: usize| {
            if out.clause(p) == &target {
                p
            } else {
                out.push(StepKind::Weaken(p), target.clone())
            }
        };
        let premise = |s: usize| id[s].ok_or_else(|| LiftError::Resolution(inconsistent(i)));
        id[i] = Some(match step.kind {
            StepKind::Axiom(j) => {
                let r = index.get(j).copied().flatten().ok_or_else(|| LiftError::Resolution(inconsistent(i)))?;
                out.push(StepKind::Axiom(r), target)
            }
            StepKind::Weaken(a) => {
                let p = premise(a)?;
                keep(&mut out, p)
            }
            StepKind::Resolve(a, b, x) => match rho.value(map, x) {
                Some(true) => {
                    let p = premise(b)?;
                    keep(&mut out, p)
                }
                Some(false) => {
                    let p = premise(a)?;
                    keep(&mut out, p)
                }
                None => {
                    let (pa, pb) = (premise(a)?, premise(b)?);
                    let z = rho.renamed(map, x).ok_or_else(|| LiftError::Resolution(inconsistent(i)))?;
                    out.push(StepKind::Resolve(pa, pb, z), target)
                }
            },
        });
    }
    Ok(out)
}

fn inconsistent(step: usize) -> crate::resolution::ResolutionError {
    crate::resolution::ResolutionError::UnsoundStep { step, reason: "premise satisfied by the restriction".into() }
}

/// One line per block: `block <i> ptr <j_i> y <bits>`, with `*` at the
/// pointer position.
pub fn export_restriction(rho: &Restriction) -> String {
    let mut s = String::new();
    for (i, (j, y)) in rho.pointers.iter().zip(&rho.y).enumerate() {
        let bits: String = y.iter().map(|b| b.map_or('*', |b| if b { '1' } else { '0' })).collect();
        writeln!(s, "block {} ptr {j} y {bits}", i + 1).unwrap();
    }
    s
}

pub fn import_restriction(text: &str) -> Result<Restriction, LiftError> {
    let bad = |line: usize, msg: &str| LiftError::VariableDomainMismatch(format!("restriction line {line}: {msg}"));
    let mut pointers = Vec::new();
    let mut ys = Vec::new();
    for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [b"block", i, b"ptr", j, b"y", bits] = parts.iter().map(|p| p.as_bytes()).collect::<Vec<_>>()[..] else {
            return Err(bad(k + 1, "expected `block <i> ptr <j> y <bits>`"));
        };
        let num = |x: &[u8]| std::str::from_utf8(x).ok().and_then(|x| x.parse::<usize>().ok());
        let (Some(i), Some(j)) = (num(i), num(j)) else { return Err(bad(k + 1, "bad number")) };
        if i != pointers.len() + 1 {
            return Err(bad(k + 1, "blocks must be listed in order"));
        }
        let y: Option<Vec<Option<bool>>> = bits
            .iter()
            .map(|c| match c {
                b'0' => Some(Some(false)),
                b'1' => Some(Some(true)),
                b'*' => Some(None),
                _ => None,
            })
            .collect();
        let y = y.ok_or_else(|| bad(k + 1, "bits must be 0, 1 or *"))?;
        let stars: Vec<usize> = (0..y.len()).filter(|&t| y[t].is_none()).map(|t| t + 1).collect();
        if stars != [j] {
            return Err(bad(k + 1, "exactly the pointer position must be `*`"));
        }
        if ys.first().is_some_and(|f: &Vec<Option<bool>>| f.len() != y.len()) {
            return Err(bad(k + 1, "blocks differ in size"));
        }
        pointers.push(j);
        ys.push(y);
    }
    let m = ys.first().map_or(1, |y| y.len());
    Ok(Restriction { m, pointers, y: ys })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRow {
    pub w: usize,
    pub empirical: f64,
    pub bound: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 95% Wilson score interval for `hits` successes in `n` trials.
fn wilson(hits: u64, n: u64) -> (f64, f64) {
    const Z: f64 = 1.96;
    let (n, p) = (n as f64, hits as f64 / n as f64);
    let denom = 1.0 + Z * Z / n;
    let centre = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

const CHUNK: u64 = 4096;

/// Empirical `Pr[width after ρ ≥ w]` for `w = 1..=` the number of y-blocks
/// `c` mentions, against `(2/(m+1))^w`. Trials run in chunks, each on its own
/// stream of the master seed, so the result does not depend on threading.
pub fn restriction_width_tail(map: &BlockVariableMap, c: &Clause, trials: u64, seed: u64) -> Vec<TailRow> {
    let m = map.size();
    let n = map.blocks as usize;
    let mut blocks: Vec<Var> =
        c.lits().iter().filter(|l| matches!(map.role(l.var()), Some(VarRole::Y { .. }))).filter_map(|l| map.block_of(l.var())).collect();
    blocks.dedup();
    let top = blocks.len();
    let chunks = trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut hist = vec![0u64; top + 1];
            for _ in 0..CHUNK.min(trials - k * CHUNK) {
                let rho = sample_with(&mut rng, n, m);
                hist[restricted_width(map, &rho, c).min(top)] += 1;
            }
            hist
        })
        .reduce(|| vec![0; top + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    (1..=top)
        .map(|w| {
            let hits: u64 = counts[w..].iter().sum();
            let (ci_low, ci_high) = wilson(hits, trials);
            TailRow { w, empirical: hits as f64 / trials as f64, bound: (2.0 / (m as f64 + 1.0)).powi(w as i32), ci_low, ci_high }
        })
        .collect()
}

/// Exact distribution of the restricted width of `c`: counts per width over
/// all `m · 2^(m-1)` choices of each mentioned block, and their total.
pub fn exact_width_distribution(map: &BlockVariableMap, c: &Clause) -> (Vec<u128>, u128) {
    let m = map.size();
    let mut by_block: HashMap<Var, Vec<Lit>> = HashMap::new();
    for &l in c.lits() {
        if let Some(b) = map.block_of(l.var()) {
            by_block.entry(b).or_default().push(l);
        }
    }
    // Per width, the number of joint choices leaving `c` unsatisfied; plus
    // the number satisfying it.
    let mut open = vec![1u128];
    let mut satisfied = 0u128;
    let mut total = 1u128;
    let mut blocks: Vec<_> = by_block.into_iter().collect();
    blocks.sort();
    for (b, lits) in blocks {
        let mut outcome = [0u128; 3];
        for j in 1..=m {
            for bits in 0..1u32 << (m - 1) {
                let mut y = Vec::with_capacity(m);
                let mut next = 0;
                for t in 1..=m {
                    if t == j {
                        y.push(None);
                    } else {
                        y.push(Some(bits >> next & 1 == 1));
                        next += 1;
                    }
                }
                let mut pointers = vec![1; map.blocks as usize];
                let mut ys = vec![vec![None; m]; map.blocks as usize];
                pointers[b as usize - 1] = j;
                ys[b as usize - 1] = y;
                let rho = Restriction { m, pointers, y: ys };
                let block_clause = Clause::new(lits.clone()).unwrap();
                match rho.restrict(map, &block_clause) {
                    None => outcome[2] += 1,
                    Some(r) => outcome[r.width()] += 1,
                }
            }
        }
        let per_block: u128 = outcome.iter().sum();
        let mut next = vec![0u128; open.len() + 1];
        for (w, &count) in open.iter().enumerate() {
            next[w] += count * outcome[0];
            next[w + 1] += count * outcome[1];
        }
        satisfied = satisfied * per_block + open.iter().sum::<u128>() * outcome[2];
        total *= per_block;
        open = next;
    }
    open[0] += satisfied;
    (open, total)
}
