//! Line-by-line simulation of a refutation of `F` as a refutation of its
//! XOR or indexing lift.

use super::{budget, ind_clause, ind_lift, pointer_clauses, pointer_tuples, xor_expand, xor_lift, LiftError, Lifted};
use crate::cnf::{Clause, Cnf, Lit, Var};
use crate::resolution::{check_refutation, ResolutionProof, StepKind};
use std::collections::{HashMap, HashSet};

/// Size constant `C` in `size ≤ C · s · m^(w+1)` for indexing simulations.
pub const IND_SIZE_CONSTANT: usize = 3;

fn axiom_index(cnf: &Cnf) -> HashMap<&Clause, usize> {
    let mut idx = HashMap::new();
    for (i, c) in cnf.clauses.iter().enumerate() {
        idx.entry(c).or_insert(i);
    }
    idx
}

fn missing(step: usize, c: &Clause) -> LiftError {
    LiftError::Resolution(crate::resolution::ResolutionError::UnsoundStep {
        step,
        reason: format!("simulation lost clause {c}"),
    })
}

/// Literals of `c` over the blocks of `vars`.
fn on_blocks(c: &Clause, lifted: &Lifted, vars: &HashSet<Var>) -> Clause {
    let lits: Vec<Lit> =
        c.lits().iter().copied().filter(|l| lifted.map.block_of(l.var()).is_some_and(|b| vars.contains(&b))).collect();
    Clause::new(lits).unwrap()
}

/// Simulates every used step of `proof` on `XOR_ℓ(F)`. A resolution on `z`
/// becomes, per clause of the lifted resolvent, a complete resolution tree
/// over the `ℓ` variables of `z`'s block.
pub fn simulate_xor_refutation(f: &Cnf, proof: &ResolutionProof, l: usize) -> Result<(Lifted, ResolutionProof), LiftError> {
    check_refutation(f, proof)?;
    let lifted = xor_lift(f, l)?;
    let used = proof.used_steps();
    let estimate: u128 = proof
        .steps
        .iter()
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|(s, _)| (1u128 << ((l - 1) * s.clause.width()).min(100)) << l)
        .sum();
    budget(estimate)?;
    let axioms = axiom_index(&lifted.cnf);
    let mut out = ResolutionProof::default();
    let mut derived: Vec<HashMap<Clause, usize>> = vec![HashMap::new(); proof.len()];
    for (i, step) in proof.steps.iter().enumerate() {
        if !used[i] {
            continue;
        }
        let mut here = HashMap::new();
        for e in xor_expand(&lifted.map, &step.clause) {
            let id = match step.kind {
                StepKind::Axiom(_) => {
                    let j = *axioms.get(&e).ok_or_else(|| missing(i, &e))?;
                    out.push(StepKind::Axiom(j), e.clone())
                }
                StepKind::Weaken(a) => {
                    let vars: HashSet<Var> = proof.clause(a).vars().collect();
                    let sub = on_blocks(&e, &lifted, &vars);
                    let p = *derived[a].get(&sub).ok_or_else(|| missing(i, &sub))?;
                    out.push(StepKind::Weaken(p), e.clone())
                }
                StepKind::Resolve(a, b, z) => {
                    let side = |s: usize| -> (HashSet<Var>, &HashMap<Clause, usize>) {
                        (proof.clause(s).vars().filter(|&v| v != z).collect(), &derived[s])
                    };
                    resolve_block(&lifted, &mut out, &e, z, side(a), side(b), &mut Vec::new()).map_err(|c| missing(i, &c))?
                }
            };
            here.insert(e, id);
        }
        derived[i] = here;
    }
    if let Some((j, _)) = derived.iter().enumerate().rev().find(|(j, _)| used[*j]) {
        debug_assert!(out.steps.last().is_some_and(|s| s.clause.is_empty()), "step {j}");
    }
    Ok((lifted, out))
}

/// Derives `e ∨ ¬β` where `β` is a prefix of an assignment to `z`'s block. At
/// full length the clause comes from the positive side (even `β`) or the
/// negative side (odd `β`); shorter prefixes resolve on the next variable.
fn resolve_block(
    lifted: &Lifted,
    out: &mut ResolutionProof,
    e: &Clause,
    z: Var,
    pos: (HashSet<Var>, &HashMap<Clause, usize>),
    neg: (HashSet<Var>, &HashMap<Clause, usize>),
    prefix: &mut Vec<bool>,
) -> Result<usize, Clause> {
    let l = lifted.map.size();
    let with_prefix = |base: &Clause, prefix: &[bool]| {
        let mut lits = base.lits().to_vec();
        lits.extend(prefix.iter().enumerate().map(|(j, &b)| Lit::new(lifted.map.y(z, j + 1), !b)));
        Clause::new(lits).unwrap()
    };
    if prefix.len() == l {
        let odd = prefix.iter().filter(|&&b| b).count() % 2 == 1;
        let (vars, map) = if odd { &neg } else { &pos };
        let c = with_prefix(&on_blocks(e, lifted, vars), prefix);
        return map.get(&c).copied().ok_or(c);
    }
    prefix.push(false);
    let zero = resolve_block(lifted, out, e, z, (pos.0.clone(), pos.1), (neg.0.clone(), neg.1), prefix)?;
    *prefix.last_mut().unwrap() = true;
    let one = resolve_block(lifted, out, e, z, (pos.0.clone(), pos.1), (neg.0.clone(), neg.1), prefix)?;
    prefix.pop();
    let pivot = lifted.map.y(z, prefix.len() + 1);
    Ok(out.push(StepKind::Resolve(zero, one, pivot), with_prefix(e, prefix)))
}

/// A simulated indexing refutation, with the step deriving `C_J` for every
/// used proof clause `C` and pointer tuple `J`.
#[derive(Clone, Debug)]
pub struct IndSimulation {
    pub lifted: Lifted,
    pub proof: ResolutionProof,
    pub invariant: Vec<HashMap<Vec<usize>, usize>>,
}

/// Simulates `proof` on `IND_m(F)`: derive each block's pointer clause, then
/// keep `C_J` for every proof clause `C` and `J ∈ [m]^|C|`.
pub fn simulate_ind_refutation(f: &Cnf, proof: &ResolutionProof, m: usize) -> Result<IndSimulation, LiftError> {
    check_refutation(f, proof)?;
    let lifted = ind_lift(f, m)?;
    let map = &lifted.map;
    let used = proof.used_steps();
    let estimate: u128 = proof
        .steps
        .iter()
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|(s, _)| (m as u128).saturating_pow(s.clause.width() as u32 + 1) * 2)
        .sum();
    budget(estimate)?;
    let axioms = axiom_index(&lifted.cnf);
    let mut out = ResolutionProof::default();
    let mut pointer = Vec::with_capacity(f.num_vars as usize);
    for b in 1..=f.num_vars {
        let chain = pointer_clauses(map, b);
        let ax = |c: &Clause| axioms[c];
        let last = chain.len() - 1;
        let mut cur = out.push(StepKind::Axiom(ax(&chain[last])), chain[last].clone());
        for s in (1..=last).rev() {
            let prev = out.push(StepKind::Axiom(ax(&chain[s - 1])), chain[s - 1].clone());
            let r = out.clause(prev).resolve(out.clause(cur), map.ext(b, s)).expect("chain clauses resolve");
            cur = out.push(StepKind::Resolve(prev, cur, map.ext(b, s)), r);
        }
        pointer.push(cur);
    }
    let mut invariant: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); proof.len()];
    for (i, step) in proof.steps.iter().enumerate() {
        if !used[i] {
            continue;
        }
        let c = &step.clause;
        let pos_of = |d: &Clause| -> HashMap<Var, usize> { d.vars().enumerate().map(|(p, v)| (v, p)).collect() };
        let here_pos = pos_of(c);
        let mut here = HashMap::new();
        for j in pointer_tuples(m, c.width()) {
            let target = ind_clause(map, c, &j);
            let id = match step.kind {
                StepKind::Axiom(_) => {
                    let a = *axioms.get(&target).ok_or_else(|| missing(i, &target))?;
                    out.push(StepKind::Axiom(a), target)
                }
                StepKind::Weaken(a) => {
                    let sub: Vec<usize> = proof.clause(a).vars().map(|v| j[here_pos[&v]]).collect();
                    out.push(StepKind::Weaken(invariant[a][&sub]), target)
                }
                StepKind::Resolve(a, b, z) => {
                    let tuple = |s: usize, jz: usize| -> Vec<usize> {
                        proof.clause(s).vars().map(|v| if v == z { jz } else { j[here_pos[&v]] }).collect()
                    };
                    let mut cur = pointer[z as usize - 1];
                    for jz in 1..=m {
                        let (pa, pb) = (invariant[a][&tuple(a, jz)], invariant[b][&tuple(b, jz)]);
                        let y = map.y(z, jz);
                        let r = out.clause(pa).resolve(out.clause(pb), y).ok_or_else(|| missing(i, &target))?;
                        let with_not_x = out.push(StepKind::Resolve(pa, pb, y), r);
                        let x = map.x(z, jz);
                        let r = out.clause(cur).resolve(out.clause(with_not_x), x).ok_or_else(|| missing(i, &target))?;
                        cur = out.push(StepKind::Resolve(cur, with_not_x, x), r);
                    }
                    if out.clause(cur) != &target {
                        return Err(missing(i, &target));
                    }
                    cur
                }
            };
            here.insert(j, id);
        }
        invariant[i] = here;
    }
    Ok(IndSimulation { lifted, proof: out, invariant })
}
