use super::{Cylinder, EdgeId, Graph, GraphError, Part, Vertex};
use num_integer::Integer;
use std::collections::HashMap;

/// Vertex and edge equivalences over a base graph, with dense class ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCompression {
    vertex_class: Vec<usize>,
    edge_class: Vec<usize>,
    vertex_members: Vec<Vec<Vertex>>,
    edge_members: Vec<Vec<EdgeId>>,
}

/// Renumbers labels densely by first occurrence.
fn densify<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|key| {
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

fn members(labels: &[usize]) -> Vec<Vec<usize>> {
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); count];
    for (x, &l) in labels.iter().enumerate() {
        out[l].push(x);
    }
    out
}

impl GraphCompression {
    fn from_labels(vertex_labels: Vec<usize>, edge_labels: Vec<usize>) -> Self {
        let vertex_class = densify(vertex_labels);
        let edge_class = densify(edge_labels);
        let vertex_members = members(&vertex_class);
        let edge_members = members(&edge_class);
        GraphCompression { vertex_class, edge_class, vertex_members, edge_members }
    }

    pub fn identity(graph: &Graph) -> Self {
        Self::from_labels((0..graph.num_vertices()).collect(), (0..graph.num_edges()).collect())
    }

    pub fn vertex_class(&self, v: Vertex) -> usize {
        self.vertex_class[v]
    }

    pub fn edge_class(&self, e: EdgeId) -> usize {
        self.edge_class[e]
    }

    pub fn vertex_classes(&self) -> &[usize] {
        &self.vertex_class
    }

    pub fn edge_classes(&self) -> &[usize] {
        &self.edge_class
    }

    pub fn vertex_class_members(&self, class: usize) -> &[Vertex] {
        &self.vertex_members[class]
    }

    pub fn edge_class_members(&self, class: usize) -> &[EdgeId] {
        &self.edge_members[class]
    }

    /// All vertices equivalent to `v`, including `v`.
    pub fn class_of(&self, v: Vertex) -> &[Vertex] {
        &self.vertex_members[self.vertex_class[v]]
    }

    pub fn num_vertex_classes(&self) -> usize {
        self.vertex_members.len()
    }

    pub fn num_edge_classes(&self) -> usize {
        self.edge_members.len()
    }

    pub fn equivalent(&self, u: Vertex, v: Vertex) -> bool {
        self.vertex_class[u] == self.vertex_class[v]
    }

    pub fn is_singleton_vertex(&self, v: Vertex) -> bool {
        self.class_of(v).len() == 1
    }

    pub fn is_singleton_edge(&self, e: EdgeId) -> bool {
        self.edge_members[self.edge_class[e]].len() == 1
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Compression induced by a vertex partition given as one label per vertex.
pub fn induce_compression(
    graph: &Graph,
    vertex_labels: &[usize],
) -> Result<GraphCompression, GraphError> {
    let n = graph.num_vertices();
    if vertex_labels.len() != n {
        return Err(GraphError::Malformed(format!(
            "{} labels for {n} vertices",
            vertex_labels.len()
        )));
    }
    for &(u, v) in graph.edges() {
        if vertex_labels[u] == vertex_labels[v] {
            return Err(GraphError::IncompatiblePartition(u, v));
        }
    }
    let mut rep: HashMap<usize, Vertex> = HashMap::new();
    let mut uf = UnionFind::new(graph.num_edges());
    for v in 0..n {
        let r = *rep.entry(vertex_labels[v]).or_insert(v);
        if graph.degree(r) != graph.degree(v) {
            return Err(GraphError::IncompatiblePartition(r, v));
        }
        for (&a, &b) in graph.incident(r).iter().zip(graph.incident(v)) {
            uf.union(a, b);
        }
    }
    let edge_roots: Vec<usize> = (0..graph.num_edges()).map(|e| uf.find(e)).collect();
    Ok(GraphCompression::from_labels(vertex_labels.to_vec(), edge_roots))
}

#[derive(Hash, PartialEq, Eq)]
enum VertexKey {
    Single(Vertex),
    Periodic(usize, usize),
}

#[derive(Hash, PartialEq, Eq)]
enum EdgeKey {
    Single(EdgeId),
    Horizontal(usize, usize),
    Vertical(usize, usize),
}

/// Closed-form compression of a cylinder: middle vertices of row `i` are
/// equivalent modulo `m_i`; edge classes follow from the row moduli and the
/// gcds of adjacent rows.
pub fn cylinder_compression(cyl: &Cylinder) -> GraphCompression {
    let g = cyl.graph();
    let r = cyl.ear;
    let l = cyl.middle;
    let vertex_keys = (0..g.num_vertices()).map(|v| {
        let (row, col) = cyl.coords(v);
        match cyl.part_of_col(col) {
            Part::Middle => VertexKey::Periodic(row, (col - r - 1) % cyl.moduli[row - 1]),
            _ => VertexKey::Single(v),
        }
    });
    let vertex_labels = densify(vertex_keys);
    let edge_keys = (0..g.num_edges()).map(|e| {
        let (a, b) = g.endpoints(e);
        let (ra, ca) = cyl.coords(a);
        let (rb, cb) = cyl.coords(b);
        if ra == rb {
            let x = ca.min(cb);
            let m = cyl.moduli[ra - 1];
            // With m_i = L no middle vertex links the two boundary edges.
            if x >= r && x <= r + l && !(m == l && x == r + l) {
                EdgeKey::Horizontal(ra, x % m)
            } else {
                EdgeKey::Single(e)
            }
        } else {
            // Index of the upper row of the pair: rows i and i+1 (k and 1 wrap).
            let upper = if cyl.k == 2 {
                1
            } else if (ra % cyl.k) + 1 == rb {
                ra
            } else {
                rb
            };
            let lower = upper % cyl.k + 1;
            if cyl.part_of_col(ca) == Part::Middle {
                let gcd = cyl.moduli[upper - 1].gcd(&cyl.moduli[lower - 1]);
                EdgeKey::Vertical(upper, ca % gcd)
            } else {
                EdgeKey::Single(e)
            }
        }
    });
    GraphCompression::from_labels(vertex_labels, densify(edge_keys))
}

pub fn class_counts(compression: &GraphCompression) -> (usize, usize) {
    (compression.num_vertex_classes(), compression.num_edge_classes())
}

fn adjacent_gcds(moduli: &[usize]) -> Vec<usize> {
    let k = moduli.len();
    if k == 2 {
        return vec![moduli[0].gcd(&moduli[1])];
    }
    (0..k).map(|i| moduli[i].gcd(&moduli[(i + 1) % k])).collect()
}

/// `2kr + Σ m_i`.
pub fn stated_vertex_class_count(k: usize, moduli: &[usize], ear: usize) -> usize {
    2 * k * ear + moduli.iter().sum::<usize>()
}

/// `(8r-2)k + Σ (m_i + gcd(m_i, m_{i+1}))` with cyclic indices.
pub fn stated_edge_class_count(k: usize, moduli: &[usize], ear: usize) -> usize {
    let gsum: usize = (0..k).map(|i| moduli[i].gcd(&moduli[(i + 1) % k])).sum();
    (8 * ear - 2) * k + moduli.iter().sum::<usize>() + gsum
}

/// Edge classes counted row by row: each row has `2(r-1) + m_i` horizontal
/// classes, one more when `m_i = L`, and each adjacent row pair has
/// `2r + gcd` vertical classes (a single pair when `k = 2`).
pub fn direct_edge_class_count(k: usize, moduli: &[usize], middle: usize, ear: usize) -> usize {
    let horizontal: usize = moduli.iter().map(|&m| 2 * (ear - 1) + m + (m == middle) as usize).sum();
    let vertical: usize = adjacent_gcds(moduli).iter().map(|g| 2 * ear + g).sum();
    debug_assert_eq!(moduli.len(), k);
    horizontal + vertical
}
