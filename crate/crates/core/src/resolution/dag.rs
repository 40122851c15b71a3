use super::{check_refutation, ResolutionError, ResolutionProof, StepKind};
use crate::cnf::{Assignment, Cnf, Lit, Var};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DagNodeKind {
    Query { var: Var, zero: usize, one: usize },
    Leaf { clause: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DagNode {
    pub rho: Assignment,
    pub kind: DagNodeKind,
}

/// A decision DAG solving the falsified-clause search problem of a CNF.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionDag {
    pub nodes: Vec<DagNode>,
    pub root: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagMetrics {
    pub size: usize,
    pub width: usize,
    pub depth: usize,
}

fn invalid(node: usize, reason: impl Into<String>) -> ResolutionError {
    ResolutionError::InvalidDag { node, reason: reason.into() }
}

impl DecisionDag {
    pub fn children(&self, v: usize) -> Option<(usize, usize)> {
        match self.nodes[v].kind {
            DagNodeKind::Query { zero, one, .. } => Some((zero, one)),
            DagNodeKind::Leaf { .. } => None,
        }
    }

    /// Nodes reachable from the root, children before parents; the root is last.
    pub fn topological_order(&self) -> Result<Vec<usize>, ResolutionError> {
        let n = self.nodes.len();
        if self.root >= n {
            return Err(invalid(self.root, "root out of range"));
        }
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut order = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                state[v] = 2;
                order.push(v);
                continue;
            }
            match state[v] {
                2 => continue,
                1 => return Err(invalid(v, "cycle")),
                _ => {}
            }
            state[v] = 1;
            stack.push((v, true));
            if let Some((a, b)) = self.children(v) {
                for c in [b, a] {
                    if c >= n {
                        return Err(invalid(v, format!("child {c} out of range")));
                    }
                    match state[c] {
                        1 => return Err(invalid(c, "cycle")),
                        0 => stack.push((c, false)),
                        _ => {}
                    }
                }
            }
        }
        Ok(order)
    }

    /// Checks the labelling rules on all reachable nodes and returns metrics.
    pub fn validate(&self, cnf: &Cnf) -> Result<DagMetrics, ResolutionError> {
        let order = self.topological_order()?;
        if !self.nodes[self.root].rho.is_empty() {
            return Err(invalid(self.root, "root assignment is not empty"));
        }
        let mut height = vec![0usize; self.nodes.len()];
        let mut width = 0;
        for &v in &order {
            let node = &self.nodes[v];
            width = width.max(node.rho.len());
            match node.kind {
                DagNodeKind::Leaf { clause } => {
                    let c = cnf.clauses.get(clause).ok_or_else(|| invalid(v, "no such clause"))?;
                    if !c.is_falsified_by(&node.rho) {
                        return Err(invalid(v, format!("assignment does not falsify clause {clause}")));
                    }
                }
                DagNodeKind::Query { var, zero, one } => {
                    if var == 0 || var > cnf.num_vars {
                        return Err(invalid(v, format!("query variable {var} out of range")));
                    }
                    if node.rho.get(var).is_some() {
                        return Err(invalid(v, format!("queries assigned variable {var}")));
                    }
                    for (c, b) in [(zero, false), (one, true)] {
                        let ok = self.nodes[c].rho.pairs().iter().all(|&(y, val)| {
                            if y == var {
                                val == b
                            } else {
                                node.rho.get(y) == Some(val)
                            }
                        });
                        if !ok {
                            return Err(invalid(c, format!("assignment not implied by parent {v}")));
                        }
                    }
                    height[v] = 1 + height[zero].max(height[one]);
                }
            }
        }
        Ok(DagMetrics { size: order.len(), width, depth: height[self.root] })
    }
}

/// One node per non-weakening step; weakenings are contracted into their premise.
pub fn resolution_to_decision_dag(
    proof: &ResolutionProof,
    cnf: &Cnf,
) -> Result<DecisionDag, ResolutionError> {
    check_refutation(cnf, proof)?;
    let mut node_of = vec![usize::MAX; proof.len()];
    let mut nodes = Vec::new();
    for (i, step) in proof.steps.iter().enumerate() {
        let kind = match step.kind {
            StepKind::Weaken(a) => {
                node_of[i] = node_of[a];
                continue;
            }
            StepKind::Axiom(j) => DagNodeKind::Leaf { clause: j },
            StepKind::Resolve(a, b, x) => DagNodeKind::Query { var: x, zero: node_of[a], one: node_of[b] },
        };
        node_of[i] = nodes.len();
        nodes.push(DagNode { rho: step.clause.falsifying_assignment(), kind });
    }
    Ok(DecisionDag { nodes, root: node_of[proof.len() - 1] })
}

/// One step per reachable node, plus a weakening wherever the derived clause
/// is narrower than the node's clause.
pub fn decision_dag_to_resolution(
    dag: &DecisionDag,
    cnf: &Cnf,
) -> Result<ResolutionProof, ResolutionError> {
    dag.validate(cnf)?;
    let order = dag.topological_order()?;
    let mut step_of = vec![usize::MAX; dag.nodes.len()];
    let mut proof = ResolutionProof::default();
    for &v in &order {
        let node = &dag.nodes[v];
        let target = node.rho.to_clause();
        let id = match node.kind {
            DagNodeKind::Leaf { clause } => proof.push(StepKind::Axiom(clause), cnf.clauses[clause].clone()),
            DagNodeKind::Query { var, zero, one } => {
                let (sz, so) = (step_of[zero], step_of[one]);
                if !proof.clause(sz).contains(Lit::pos(var)) {
                    sz
                } else if !proof.clause(so).contains(Lit::neg(var)) {
                    so
                } else {
                    let r = proof
                        .clause(sz)
                        .resolve(proof.clause(so), var)
                        .expect("children agree off the query variable");
                    proof.push(StepKind::Resolve(sz, so, var), r)
                }
            }
        };
        step_of[v] = if *proof.clause(id) == target { id } else { proof.push(StepKind::Weaken(id), target) };
    }
    Ok(proof)
}

/// Renames the variables and leaf clauses of a DAG. A query whose renamed
/// variable is already fixed by its node is bypassed in favour of the
/// matching child.
pub fn project_dag(
    dag: &DecisionDag,
    var_map: impl Fn(Var) -> Var,
    leaf_map: impl Fn(usize) -> Option<usize>,
) -> Result<DecisionDag, ResolutionError> {
    let order = dag.topological_order()?;
    let mut new_id = vec![usize::MAX; dag.nodes.len()];
    let mut nodes = Vec::new();
    let mut interned: HashMap<DagNode, usize> = HashMap::new();
    for &v in &order {
        let node = &dag.nodes[v];
        let mut rho = Assignment::new();
        for &(x, b) in node.rho.pairs() {
            let y = var_map(x);
            match rho.get(y) {
                Some(old) if old != b => return Err(invalid(v, format!("projection clashes on {y}"))),
                _ => rho.set(y, b),
            }
        }
        let kind = match node.kind {
            DagNodeKind::Leaf { clause } => DagNodeKind::Leaf {
                clause: leaf_map(clause).ok_or_else(|| invalid(v, format!("no image for clause {clause}")))?,
            },
            DagNodeKind::Query { var, zero, one } => {
                let y = var_map(var);
                match rho.get(y) {
                    Some(b) => {
                        new_id[v] = new_id[if b { one } else { zero }];
                        continue;
                    }
                    None => DagNodeKind::Query { var: y, zero: new_id[zero], one: new_id[one] },
                }
            }
        };
        let projected = DagNode { rho, kind };
        new_id[v] = *interned.entry(projected.clone()).or_insert_with(|| {
            nodes.push(projected);
            nodes.len() - 1
        });
    }
    Ok(DecisionDag { nodes, root: new_id[dag.root] })
}
