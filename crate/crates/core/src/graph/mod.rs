//! Graphs with ordered adjacency, cylinder graphs, parameters and compressions.

mod compression;
mod cylinder;
pub mod io;
mod params;

pub use compression::{
    class_counts, cylinder_compression, direct_edge_class_count, induce_compression,
    stated_edge_class_count, stated_vertex_class_count, GraphCompression,
};
pub use cylinder::{build_cylinder, Cylinder, Part};
pub use params::{
    derive_parameters, derive_parameters_with_bases, make_explicit_parameters,
    select_coprime_bases, verify_parameter_properties, BigParams, CompressionParams, ParamInt,
    ParamMode, Params, PropertyReport, Verdict,
};

use std::collections::HashMap;
use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("not enough primes in [{n}, {}]: need {k}", 2 * .n)]
    NotEnoughCoprimes { n: u64, k: usize },
    #[error("parameter out of range: {0}")]
    InvalidRange(String),
    #[error("modulus {modulus} does not divide middle length {middle}")]
    NonDivisorModulus { modulus: String, middle: String },
    #[error("arithmetic overflow while deriving parameters")]
    Overflow,
    #[error("parameters too large to build explicitly: {0}")]
    TooLarge(String),
    #[error("incompatible partition: vertices {0} and {1}")]
    IncompatiblePartition(Vertex, Vertex),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// Simple undirected graph whose neighbor lists carry a fixed order.
///
/// Edge ids are assigned by first occurrence when scanning vertices in index
/// order and each vertex's neighbors in list order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    inc: Vec<Vec<EdgeId>>,
    edges: Vec<(Vertex, Vertex)>,
    lookup: HashMap<(Vertex, Vertex), EdgeId>,
}

impl Graph {
    pub fn from_adjacency(adj: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        let n = adj.len();
        let mut edges = Vec::new();
        let mut lookup = HashMap::new();
        let mut inc = Vec::with_capacity(n);
        for (v, nbrs) in adj.iter().enumerate() {
            let mut row = Vec::with_capacity(nbrs.len());
            for &u in nbrs {
                if u >= n {
                    return Err(GraphError::Malformed(format!("vertex {u} out of range")));
                }
                if u == v {
                    return Err(GraphError::Malformed(format!("loop at {v}")));
                }
                let key = (v.min(u), v.max(u));
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                if row.contains(&id) {
                    return Err(GraphError::Malformed(format!("parallel edge {v}-{u}")));
                }
                row.push(id);
            }
            inc.push(row);
        }
        for &(a, b) in &edges {
            if !adj[a].contains(&b) || !adj[b].contains(&a) {
                return Err(GraphError::Malformed(format!("asymmetric edge {a}-{b}")));
            }
        }
        Ok(Graph { adj, inc, edges, lookup })
    }

    /// Builds a graph from an edge list; neighbor order follows list order.
    pub fn from_edges(n: usize, list: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in list {
            if u >= n || v >= n {
                return Err(GraphError::Malformed(format!("edge {u}-{v} out of range")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Graph::from_adjacency(adj)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.inc[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.lookup.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Position of `u` in the neighbor list of `v`.
    pub fn position(&self, v: Vertex, u: Vertex) -> Option<usize> {
        self.adj[v].iter().position(|&w| w == u)
    }

    pub fn adjacency(&self) -> &[Vec<Vertex>] {
        &self.adj
    }
}
