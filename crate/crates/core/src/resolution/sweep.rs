//! The column-sweep refutation of the compressed cylinder Tseitin formula.
//!
//! The sweep absorbs vertices in column-major order. Its state is an
//! assignment to the edges leaving the absorbed set whose parity equals the
//! absorbed charge; absorbing a vertex queries its edges to unabsorbed
//! vertices and enters a leaf if the vertex's constraint fails. The DAG is
//! built over the uncompressed graph and then projected onto edge classes.

use super::{decision_dag_to_resolution, project_dag, DagNode, DagNodeKind, DecisionDag, ResolutionError, ResolutionProof};
use crate::cnf::{Assignment, Clause, Cnf, Var};
use crate::graph::{Cylinder, EdgeId, Graph, GraphCompression, Vertex};
use crate::tseitin::{build_tseitin, TseitinInstance};
use std::collections::{HashMap, VecDeque};

/// Frozen constant `C` in the size bound `C·(L+r)·2^k·k`.
pub const SWEEP_SIZE_CONSTANT: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Inner { t: usize, s: usize, rho: Assignment },
    Leaf(usize),
}

struct Sweep<'a> {
    graph: &'a Graph,
    charge: &'a [bool],
    order: &'a [Vertex],
    /// Edges of `order[t]` to earlier and to later vertices.
    known: Vec<Vec<EdgeId>>,
    fresh: Vec<Vec<EdgeId>>,
    clause_index: HashMap<Clause, usize>,
}

fn var(e: EdgeId) -> Var {
    e as Var + 1
}

impl Sweep<'_> {
    /// The parity constraint of `v` under `rho`, which assigns all its edges.
    fn violated(&self, v: Vertex, rho: &Assignment) -> bool {
        let parity = self.graph.incident(v).iter().filter(|&&e| rho.get(var(e)).expect("edge assigned")).count() % 2;
        (parity == 1) != self.charge[v]
    }

    fn leaf(&self, v: Vertex, rho: &Assignment) -> Key {
        let own = Assignment::from_pairs(self.graph.incident(v).iter().map(|&e| (var(e), rho.get(var(e)).unwrap())));
        Key::Leaf(self.clause_index[&own.to_clause()])
    }

    /// State after vertex `order[t]` has all its edges assigned in `rho`.
    fn after_vertex(&self, mut t: usize, mut rho: Assignment) -> Key {
        loop {
            let v = self.order[t];
            if self.violated(v, &rho) {
                return self.leaf(v, &rho);
            }
            for &e in &self.known[t] {
                rho.unset(var(e));
            }
            t += 1;
            assert!(t < self.order.len(), "the last vertex is always violated");
            if !self.fresh[t].is_empty() {
                return Key::Inner { t, s: 0, rho };
            }
        }
    }

    fn start(&self) -> Key {
        if self.fresh[0].is_empty() {
            self.after_vertex(0, Assignment::new())
        } else {
            Key::Inner { t: 0, s: 0, rho: Assignment::new() }
        }
    }

    fn children(&self, t: usize, s: usize, rho: &Assignment) -> (Var, [Key; 2]) {
        let e = self.fresh[t][s];
        let child = |b: bool| {
            let mut r = rho.clone();
            r.set(var(e), b);
            if s + 1 < self.fresh[t].len() {
                Key::Inner { t, s: s + 1, rho: r }
            } else {
                self.after_vertex(t, r)
            }
        };
        (var(e), [child(false), child(true)])
    }
}

/// Sweep DAG for the Tseitin formula `tseitin` of `(graph, charge)` (as built
/// by [`build_tseitin`]), absorbing vertices in `order`.
pub fn sweep_decision_dag(graph: &Graph, charge: &[bool], order: &[Vertex], tseitin: &Cnf) -> DecisionDag {
    let n = graph.num_vertices();
    assert_eq!(order.len(), n);
    let mut pos = vec![usize::MAX; n];
    for (t, &v) in order.iter().enumerate() {
        pos[v] = t;
    }
    let split = |t: usize, later: bool| -> Vec<EdgeId> {
        let v = order[t];
        graph.incident(v).iter().copied().filter(|&e| (pos[graph.other_end(e, v)] > t) == later).collect()
    };
    let sweep = Sweep {
        graph,
        charge,
        order,
        known: (0..n).map(|t| split(t, false)).collect(),
        fresh: (0..n).map(|t| split(t, true)).collect(),
        clause_index: tseitin.clauses.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect(),
    };

    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut nodes: Vec<DagNode> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: Key, nodes: &mut Vec<DagNode>, queue: &mut VecDeque<Key>| -> usize {
        if let Some(&id) = ids.get(&key) {
            return id;
        }
        let (rho, kind) = match &key {
            Key::Inner { rho, .. } => (rho.clone(), DagNodeKind::Leaf { clause: usize::MAX }),
            Key::Leaf(c) => (tseitin.clauses[*c].falsifying_assignment(), DagNodeKind::Leaf { clause: *c }),
        };
        let id = nodes.len();
        nodes.push(DagNode { rho, kind });
        ids.insert(key.clone(), id);
        if matches!(key, Key::Inner { .. }) {
            queue.push_back(key);
        }
        id
    };
    let root = intern(sweep.start(), &mut nodes, &mut queue);
    while let Some(key) = queue.pop_front() {
        let Key::Inner { t, s, rho } = &key else { unreachable!() };
        let (x, [k0, k1]) = sweep.children(*t, *s, rho);
        let zero = intern(k0, &mut nodes, &mut queue);
        let one = intern(k1, &mut nodes, &mut queue);
        let me = intern(key, &mut nodes, &mut queue);
        nodes[me].kind = DagNodeKind::Query { var: x, zero, one };
    }
    DecisionDag { nodes, root }
}

fn column_major(cyl: &Cylinder) -> Vec<Vertex> {
    (1..=cyl.width).flat_map(|col| (1..=cyl.k).map(move |row| (row, col))).map(|(r, c)| cyl.vertex(r, c)).collect()
}

/// Width-(k+3) refutation of the compressed Tseitin formula `cnf` of `cyl`
/// under `comp` (as built by `cylinder_tseitin`).
pub fn small_width_refutation(
    cyl: &Cylinder,
    comp: &GraphCompression,
    cnf: &Cnf,
) -> Result<ResolutionProof, ResolutionError> {
    let inst = TseitinInstance::cylinder(cyl);
    let full = build_tseitin(&inst).expect("cylinder degrees are at most 4");
    let dag = sweep_decision_dag(cyl.graph(), &inst.charge, &column_major(cyl), &full);
    let class_var = |x: Var| comp.edge_class(x as usize - 1) as Var + 1;
    let index: HashMap<&Clause, usize> = cnf.clauses.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let projected = project_dag(&dag, class_var, |o| {
        let lits = full.clauses[o].lits().iter().map(|l| crate::cnf::Lit::new(class_var(l.var()), l.is_positive()));
        Clause::new(lits.collect()).ok().and_then(|c| index.get(&c).copied())
    })?;
    decision_dag_to_resolution(&projected, cnf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cylinder_compression;
    use crate::resolution::{check_refutation, eliminate_weakening, resolution_to_decision_dag};
    use crate::tseitin::cylinder_tseitin;

    fn run(k: usize, moduli: Vec<usize>, l: usize, r: usize) {
        let cyl = Cylinder::new(k, 1, moduli, l, r).unwrap();
        let comp = cylinder_compression(&cyl);
        let cnf = cylinder_tseitin(&cyl, &comp);
        let proof = small_width_refutation(&cyl, &comp, &cnf).unwrap();
        let m = check_refutation(&cnf, &proof).unwrap();
        assert!(m.width <= k + 3, "width {}", m.width);
        assert!(m.depth < m.size);
        assert!(m.size <= SWEEP_SIZE_CONSTANT * (l + r) * (1 << k) * k, "size {}", m.size);
        let clean = eliminate_weakening(&proof);
        let cm = check_refutation(&cnf, &clean).unwrap();
        assert!(cm.width <= m.width && cm.size <= m.size);
        let dag = resolution_to_decision_dag(&clean, &cnf).unwrap();
        assert_eq!(dag.validate(&cnf).unwrap().width, cm.width);
        let back = decision_dag_to_resolution(&dag, &cnf).unwrap();
        assert_eq!(check_refutation(&cnf, &back).unwrap().width, cm.width);
        assert_eq!(back.len(), clean.len());
    }

    #[test]
    fn toy_k2() {
        run(2, vec![6, 15], 30, 3);
    }

    #[test]
    fn toy_k3() {
        run(3, vec![48, 120, 80], 240, 5);
    }

    #[test]
    fn uncompressed_sweep_is_valid() {
        let cyl = Cylinder::new(3, 1, vec![3, 4, 5], 60, 2).unwrap();
        let inst = TseitinInstance::cylinder(&cyl);
        let full = build_tseitin(&inst).unwrap();
        let dag = sweep_decision_dag(cyl.graph(), &inst.charge, &column_major(&cyl), &full);
        let m = dag.validate(&full).unwrap();
        assert!(m.width <= 6);
    }
}
