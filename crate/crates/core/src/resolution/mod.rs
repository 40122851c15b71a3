//! Resolution proofs: checking, trace files, decision DAGs, normalization,
//! exact small-instance oracles and the column-sweep refutation of τ(B).

mod dag;
mod normalize;
mod oracle;
mod sweep;

pub use dag::{
    decision_dag_to_resolution, project_dag, resolution_to_decision_dag, DagMetrics, DagNode,
    DagNodeKind, DecisionDag,
};
pub use normalize::eliminate_weakening;
pub use oracle::{min_depth_at_width, min_refutation_width, OracleOptions};
pub use sweep::{small_width_refutation, sweep_decision_dag, SWEEP_SIZE_CONSTANT};

use crate::cnf::{Clause, Cnf, Lit, Var};
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("unsound step {step}: {reason}")]
    UnsoundStep { step: usize, reason: String },
    #[error("last clause is not empty")]
    NotARefutation,
    #[error("invalid decision DAG at node {node}: {reason}")]
    InvalidDag { node: usize, reason: String },
    #[error("oracle budget exceeded (clause budget {0})")]
    ResourceBudgetExceeded(usize),
    #[error("trace parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    /// Index into the clause list of the refuted formula.
    Axiom(usize),
    /// `Resolve(a, b, x)`: clause `a` contains `x`, clause `b` contains `¬x`.
    Resolve(usize, usize, Var),
    Weaken(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub clause: Clause,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResolutionProof {
    pub steps: Vec<Step>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofMetrics {
    pub size: usize,
    pub width: usize,
    pub depth: usize,
}

impl ResolutionProof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, kind: StepKind, clause: Clause) -> usize {
        self.steps.push(Step { kind, clause });
        self.steps.len() - 1
    }

    pub fn clause(&self, id: usize) -> &Clause {
        &self.steps[id].clause
    }

    pub fn has_weakening(&self) -> bool {
        self.steps.iter().any(|s| matches!(s.kind, StepKind::Weaken(_)))
    }

    /// Step ids reachable from the last step.
    pub fn used_steps(&self) -> Vec<bool> {
        let mut used = vec![false; self.steps.len()];
        if let Some(last) = self.steps.len().checked_sub(1) {
            used[last] = true;
        }
        for i in (0..self.steps.len()).rev() {
            if !used[i] {
                continue;
            }
            match self.steps[i].kind {
                StepKind::Axiom(_) => {}
                StepKind::Resolve(a, b, _) => {
                    used[a] = true;
                    used[b] = true;
                }
                StepKind::Weaken(a) => used[a] = true,
            }
        }
        used
    }
}

fn unsound(step: usize, reason: impl Into<String>) -> ResolutionError {
    ResolutionError::UnsoundStep { step, reason: reason.into() }
}

/// Checks every step and returns metrics; the last clause may be nonempty.
pub fn check_derivation(cnf: &Cnf, proof: &ResolutionProof) -> Result<ProofMetrics, ResolutionError> {
    let mut depth = vec![0usize; proof.steps.len()];
    let mut width = 0;
    for (i, step) in proof.steps.iter().enumerate() {
        let c = &step.clause;
        if c.max_var() > cnf.num_vars {
            return Err(unsound(i, format!("variable {} out of range", c.max_var())));
        }
        width = width.max(c.width());
        match step.kind {
            StepKind::Axiom(j) => {
                let ax = cnf.clauses.get(j).ok_or_else(|| unsound(i, format!("no axiom {j}")))?;
                if ax != c {
                    return Err(unsound(i, format!("clause differs from axiom {j}")));
                }
            }
            StepKind::Resolve(a, b, x) => {
                if a >= i || b >= i {
                    return Err(unsound(i, "premise does not precede its use"));
                }
                let (ca, cb) = (proof.clause(a), proof.clause(b));
                if !ca.contains(Lit::pos(x)) {
                    return Err(unsound(i, format!("first premise lacks {x}")));
                }
                if !cb.contains(Lit::neg(x)) {
                    return Err(unsound(i, format!("second premise lacks -{x}")));
                }
                let r = ca
                    .resolve(cb, x)
                    .ok_or_else(|| unsound(i, "resolvent is tautological"))?;
                if &r != c {
                    return Err(unsound(i, format!("resolvent is {r}, step states {c}")));
                }
                depth[i] = 1 + depth[a].max(depth[b]);
            }
            StepKind::Weaken(a) => {
                if a >= i {
                    return Err(unsound(i, "premise does not precede its use"));
                }
                if !proof.clause(a).is_subset_of(c) {
                    return Err(unsound(i, "weakening drops a literal"));
                }
                depth[i] = 1 + depth[a];
            }
        }
    }
    Ok(ProofMetrics {
        size: proof.steps.len(),
        width,
        depth: depth.iter().copied().max().unwrap_or(0),
    })
}

pub fn check_refutation(cnf: &Cnf, proof: &ResolutionProof) -> Result<ProofMetrics, ResolutionError> {
    let metrics = check_derivation(cnf, proof)?;
    match proof.steps.last() {
        Some(s) if s.clause.is_empty() => Ok(metrics),
        _ => Err(ResolutionError::NotARefutation),
    }
}

fn write_lits(out: &mut String, c: &Clause) {
    for l in c.lits() {
        write!(out, " {l}").unwrap();
    }
    out.push_str(" 0\n");
}

/// Line-based trace: `p res <nvars> <nsteps>` then `a`, `r` and `w` lines with
/// 1-based step and clause indices.
pub fn export_trace(num_vars: u32, proof: &ResolutionProof) -> String {
    let mut out = format!("p res {} {}\n", num_vars, proof.steps.len());
    for step in &proof.steps {
        match step.kind {
            StepKind::Axiom(j) => write!(out, "a {}", j + 1).unwrap(),
            StepKind::Resolve(a, b, x) => write!(out, "r {} {} {}", a + 1, b + 1, x).unwrap(),
            StepKind::Weaken(a) => write!(out, "w {}", a + 1).unwrap(),
        }
        write_lits(&mut out, &step.clause);
    }
    out
}

pub fn import_trace(text: &str) -> Result<(u32, ResolutionProof), ResolutionError> {
    let err = |line: usize, msg: &str| ResolutionError::ParseError { line, msg: msg.into() };
    let mut header = None;
    let mut proof = ResolutionProof::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            continue;
        }
        let num = |s: &str| s.parse::<i64>().map_err(|_| err(line_no, &format!("bad number {s:?}")));
        if toks[0] == "p" {
            if toks.len() != 4 || toks[1] != "res" || header.is_some() {
                return Err(err(line_no, "bad header"));
            }
            header = Some((num(toks[2])? as u32, num(toks[3])? as usize));
            continue;
        }
        if header.is_none() {
            return Err(err(line_no, "step before header"));
        }
        let fixed = match toks[0] {
            "a" | "w" => 2,
            "r" => 4,
            _ => return Err(err(line_no, "unknown step tag")),
        };
        if toks.len() < fixed + 1 || *toks.last().unwrap() != "0" {
            return Err(err(line_no, "truncated step"));
        }
        let id = |s: &str| -> Result<usize, ResolutionError> {
            let v = num(s)?;
            if v < 1 {
                return Err(err(line_no, "ids are 1-based"));
            }
            Ok(v as usize - 1)
        };
        let kind = match toks[0] {
            "a" => StepKind::Axiom(id(toks[1])?),
            "w" => StepKind::Weaken(id(toks[1])?),
            _ => {
                let x = num(toks[3])?;
                if x < 1 {
                    return Err(err(line_no, "bad pivot"));
                }
                StepKind::Resolve(id(toks[1])?, id(toks[2])?, x as Var)
            }
        };
        let mut lits = Vec::new();
        for t in &toks[fixed..toks.len() - 1] {
            let v = num(t)?;
            if v == 0 || v.unsigned_abs() > i32::MAX as u64 {
                return Err(err(line_no, "bad literal"));
            }
            lits.push(Lit::from_dimacs(v as i32).unwrap());
        }
        let clause = Clause::new(lits).map_err(|e| err(line_no, &e.to_string()))?;
        proof.steps.push(Step { kind, clause });
    }
    let (nv, ns) = header.ok_or_else(|| err(0, "missing header"))?;
    if ns != proof.steps.len() {
        return Err(err(0, &format!("header announces {ns} steps, found {}", proof.steps.len())));
    }
    Ok((nv, proof))
}
