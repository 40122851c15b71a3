//! Decision trees for `Search(F) ∘ XOR`: leaf relabelling, leaf checking and
//! the top-down extraction of a narrow, shallow tree for `Search(F)`.

use super::{Lifted, LiftError, VarRole};
use crate::cnf::{Assignment, Clause, Var};
use crate::resolution::{DagMetrics, DagNode, DagNodeKind, DecisionDag};
use std::collections::HashMap;

/// Relabels each leaf of a tree solving `Search(XOR_ℓ(F))` with the source
/// clause its lifted clause expands.
pub fn relabel_leaves(dag: &DecisionDag, lifted: &Lifted) -> Result<DecisionDag, LiftError> {
    let mut out = dag.clone();
    for (v, node) in out.nodes.iter_mut().enumerate() {
        if let DagNodeKind::Leaf { clause } = &mut node.kind {
            *clause = lifted
                .origin
                .get(*clause)
                .copied()
                .flatten()
                .ok_or_else(|| LiftError::InvalidTree(format!("leaf {v} has no source clause")))?;
        }
    }
    Ok(out)
}

/// Checks that `dag` solves `Search(F) ∘ XOR_ℓ`: at every leaf labelled `C`,
/// all extensions of the leaf's assignment XOR to an assignment falsifying
/// `C`. Equivalently the assignment falsifies a clause of `XOR_ℓ(C)`.
pub fn check_composed_leaves(dag: &DecisionDag, lifted: &Lifted) -> Result<DagMetrics, LiftError> {
    let map = &lifted.map;
    let mut index: HashMap<&Clause, usize> = HashMap::new();
    for (i, c) in lifted.cnf.clauses.iter().enumerate() {
        index.entry(c).or_insert(i);
    }
    let mut down = dag.clone();
    for v in dag.topological_order()? {
        let node = &dag.nodes[v];
        let DagNodeKind::Leaf { clause } = node.kind else { continue };
        let source = lifted.origin.iter().position(|&o| o == Some(clause));
        let Some(first) = source else {
            return Err(LiftError::InvalidTree(format!("leaf {v}: unknown source clause {clause}")));
        };
        let blocks: Vec<Var> = lifted.cnf.clauses[first].vars().filter_map(|y| map.block_of(y)).collect();
        let lits = node.rho.pairs().iter().filter(|(y, _)| map.block_of(*y).is_some_and(|b| blocks.contains(&b)));
        let e = Assignment::from_pairs(lits.copied()).to_clause();
        match index.get(&e) {
            Some(&j) if lifted.origin[j] == Some(clause) => down.nodes[v].kind = DagNodeKind::Leaf { clause: j },
            _ => return Err(LiftError::InvalidTree(format!("leaf {v} does not fix clause {clause} falsified"))),
        }
    }
    Ok(down.validate(&lifted.cnf)?)
}

/// Copies every shared node of a decision DAG once per path reaching it.
pub fn unfold_to_tree(dag: &DecisionDag, max_nodes: usize) -> Result<DecisionDag, LiftError> {
    let order = dag.topological_order()?;
    let mut size = vec![0u128; dag.nodes.len()];
    for &v in &order {
        size[v] = dag.children(v).map_or(1, |(a, b)| size[a].saturating_add(size[b]).saturating_add(1));
    }
    if size[dag.root] > max_nodes as u128 {
        return Err(LiftError::TreeTooLarge { nodes: size[dag.root], limit: max_nodes });
    }
    fn copy(dag: &DecisionDag, v: usize, out: &mut Vec<DagNode>) -> usize {
        let node = &dag.nodes[v];
        let kind = match node.kind {
            DagNodeKind::Leaf { clause } => DagNodeKind::Leaf { clause },
            DagNodeKind::Query { var, zero, one } => {
                let zero = copy(dag, zero, out);
                let one = copy(dag, one, out);
                DagNodeKind::Query { var, zero, one }
            }
        };
        out.push(DagNode { rho: node.rho.clone(), kind });
        out.len() - 1
    }
    let mut nodes = Vec::with_capacity(size[dag.root] as usize);
    let root = copy(dag, dag.root, &mut nodes);
    Ok(DecisionDag { nodes, root })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionCase {
    Halving,
    Forced,
    Query,
    Leaf,
}

/// One visited node of the input tree with the bookkeeping assignment `σ_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionStep {
    pub node: usize,
    pub case: ExtractionCase,
    pub sigma: Assignment,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub tree: DecisionDag,
    pub steps: Vec<ExtractionStep>,
    /// Metrics of the input tree.
    pub input: DagMetrics,
}

struct Walk<'a> {
    dag: &'a DecisionDag,
    lifted: &'a Lifted,
    subtree: Vec<usize>,
    out: Vec<DagNode>,
    steps: Vec<ExtractionStep>,
}

impl Walk<'_> {
    /// `(block, index)` of a queried y-variable.
    fn query(&self, v: usize, var: Var) -> Result<(Var, usize), LiftError> {
        match self.lifted.map.role(var) {
            Some(VarRole::Y { block, index }) => Ok((block, index)),
            _ => Err(LiftError::InvalidTree(format!("node {v} queries {var}, not a y-variable"))),
        }
    }

    fn free(&self, rho: &Assignment, block: Var) -> usize {
        (1..=self.lifted.map.size()).filter(|&j| rho.get(self.lifted.map.y(block, j)).is_none()).count()
    }

    /// XOR of the fixed entries of `block` other than `skip`.
    fn parity(&self, rho: &Assignment, block: Var, skip: usize) -> bool {
        (1..=self.lifted.map.size())
            .filter(|&j| j != skip)
            .fold(false, |acc, j| acc ^ rho.get(self.lifted.map.y(block, j)).unwrap_or(false))
    }

    /// `σ_{v'}`: entries survive while their block has at most one free
    /// variable under `ρ_{v'}`; a query case also records its answer.
    fn next_sigma(&self, sigma: &Assignment, child: usize, answer: Option<(Var, bool)>) -> Assignment {
        let rho = &self.dag.nodes[child].rho;
        let mut next: Assignment =
            Assignment::from_pairs(sigma.pairs().iter().copied().filter(|&(i, _)| self.free(rho, i) <= 1));
        if let Some((i, b)) = answer {
            if self.free(rho, i) <= 1 {
                next.set(i, b);
            }
        }
        next
    }

    fn push(&mut self, node: DagNode) -> usize {
        self.out.push(node);
        self.out.len() - 1
    }

    fn walk(&mut self, mut v: usize, mut sigma: Assignment) -> Result<usize, LiftError> {
        loop {
            let node = &self.dag.nodes[v];
            let (var, zero, one) = match node.kind {
                DagNodeKind::Leaf { clause } => {
                    self.steps.push(ExtractionStep { node: v, case: ExtractionCase::Leaf, sigma: sigma.clone() });
                    return Ok(self.push(DagNode { rho: sigma, kind: DagNodeKind::Leaf { clause } }));
                }
                DagNodeKind::Query { var, zero, one } => (var, zero, one),
            };
            let (i, j) = self.query(v, var)?;
            let rho = &node.rho;
            let (case, child) = if self.free(rho, i) >= 2 {
                (ExtractionCase::Halving, if self.subtree[one] < self.subtree[zero] { one } else { zero })
            } else if let Some(target) = sigma.get(i) {
                let b = target ^ self.parity(rho, i, j);
                (ExtractionCase::Forced, if b { one } else { zero })
            } else {
                self.steps.push(ExtractionStep { node: v, case: ExtractionCase::Query, sigma: sigma.clone() });
                let parity = self.parity(rho, i, j);
                let mut kids = [0; 2];
                for answer in [false, true] {
                    let child = if answer ^ parity { one } else { zero };
                    let next = self.next_sigma(&sigma, child, Some((i, answer)));
                    kids[answer as usize] = self.walk(child, next)?;
                }
                let kind = DagNodeKind::Query { var: i, zero: kids[0], one: kids[1] };
                return Ok(self.push(DagNode { rho: sigma, kind }));
            };
            self.steps.push(ExtractionStep { node: v, case, sigma: sigma.clone() });
            sigma = self.next_sigma(&sigma, child, None);
            v = child;
        }
    }
}

/// Turns a decision tree solving `Search(F) ∘ XOR_ℓ` (leaves labelled with
/// source clause indices, see [`relabel_leaves`]) into one solving
/// `Search(F)`. Walks the input top-down: while a queried block has two or
/// more free variables, follow the smaller subtree; otherwise either the
/// bookkeeping assignment forces the answer or the source variable is queried.
pub fn extract_decision_tree(dag: &DecisionDag, lifted: &Lifted) -> Result<Extraction, LiftError> {
    if lifted.map.size() < 2 || !matches!(lifted.map.gadget, super::Gadget::Xor(_)) {
        return Err(LiftError::InvalidTree("extraction needs an XOR lift with ℓ ≥ 2".into()));
    }
    let input = check_composed_leaves(dag, lifted)?;
    let order = dag.topological_order()?;
    let mut parents = vec![0usize; dag.nodes.len()];
    let mut subtree = vec![0usize; dag.nodes.len()];
    for &v in &order {
        subtree[v] = 1;
        if let Some((a, b)) = dag.children(v) {
            parents[a] += 1;
            parents[b] += 1;
            subtree[v] += subtree[a] + subtree[b];
        }
    }
    if let Some(v) = order.iter().find(|&&v| parents[v] > 1 || dag.children(v).is_some_and(|(a, b)| a == b)) {
        return Err(LiftError::InvalidTree(format!("node {v} is shared, input is not a tree")));
    }
    let mut walk = Walk { dag, lifted, subtree, out: Vec::new(), steps: Vec::new() };
    let root = walk.walk(dag.root, Assignment::new())?;
    Ok(Extraction { tree: DecisionDag { nodes: walk.out, root }, steps: walk.steps, input })
}
