//! k-dimensional Weisfeiler–Leman refinement on vertex-colored graphs, and
//! the CFI and compressed CFI constructions over ordered base graphs.

mod cfi;
mod refine;

pub use cfi::{build_cfi, compress_cfi, make_charge_functions, Cfi, CfiFunction};
pub use refine::{
    wl_distinguish, wl_distinguish_report, wl_refine, Distinguish, JointReport, WlColoring, TUPLE_LIMIT,
};

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WlError {
    #[error("{tuples} tuples exceed the limit of {limit}")]
    BudgetExceeded { tuples: u128, limit: u128 },
    #[error("vertex {vertex} has degree {degree}; at most 20 is supported")]
    DegreeTooLarge { vertex: usize, degree: usize },
    #[error("charge function differs on equivalent edges {0} and {1}")]
    NotCompressible(usize, usize),
    #[error("partition is not order consistent at vertices {0} and {1}")]
    OrderInconsistent(usize, usize),
    #[error("not a simple graph: {0}")]
    NotSimple(String),
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A simple graph with vertex colors renumbered densely (order preserving).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    adj: Vec<Vec<usize>>,
    colors: Vec<u32>,
    matrix: Vec<bool>,
}

impl ColoredGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], colors: Vec<u32>) -> Result<Self, WlError> {
        if colors.len() != n {
            return Err(WlError::NotSimple(format!("{} colors for {n} vertices", colors.len())));
        }
        let mut adj = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(WlError::NotSimple(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(WlError::NotSimple(format!("loop at {u}")));
            }
            if matrix[u * n + v] {
                return Err(WlError::NotSimple(format!("repeated edge ({u},{v})")));
            }
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let distinct: Vec<u32> = colors.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let colors = colors.iter().map(|c| distinct.binary_search(c).unwrap() as u32).collect();
        Ok(ColoredGraph { adj, colors, matrix })
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.num_vertices() + v]
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_vertices()).flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect()
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.num_vertices();
        let edges: Vec<(usize, usize)> = self.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
        let mut colors = vec![0; n];
        for v in 0..n {
            colors[perm[v]] = self.colors[v];
        }
        ColoredGraph::new(n, &edges, colors).expect("a permutation keeps the graph simple")
    }
}

/// `cgraph <n> <m>`, then `v <id> <color>` and `e <u> <v>` lines.
pub fn export_colored_graph(g: &ColoredGraph) -> String {
    let mut out = format!("cgraph {} {}\n", g.num_vertices(), g.num_edges());
    for v in 0..g.num_vertices() {
        writeln!(out, "v {v} {}", g.color(v)).unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

pub fn import_colored_graph(text: &str) -> Result<ColoredGraph, WlError> {
    let mut header = None;
    let mut colors = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: &str| WlError::Parse { line: line_no, msg: msg.to_string() };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        let nums: Vec<usize> = parts[1..].iter().map(|p| p.parse()).collect::<Result<_, _>>().map_err(|_| err("bad number"))?;
        match (parts[0], nums.as_slice()) {
            ("cgraph", &[n, m]) if header.is_none() => {
                header = Some((n, m));
                colors = vec![None; n];
            }
            ("v", &[v, c]) => {
                let slot = colors.get_mut(v).ok_or_else(|| err("vertex out of range"))?;
                *slot = Some(u32::try_from(c).map_err(|_| err("color too large"))?);
            }
            ("e", &[u, v]) => edges.push((u, v)),
            _ => return Err(err("unexpected line")),
        }
    }
    let (n, m) = header.ok_or(WlError::Parse { line: 1, msg: "missing header".into() })?;
    if edges.len() != m {
        return Err(WlError::Parse { line: 1, msg: format!("header says {m} edges, found {}", edges.len()) });
    }
    let colors: Vec<u32> = colors
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or(WlError::Parse { line: 1, msg: format!("vertex {v} has no color") }))
        .collect::<Result<_, _>>()?;
    debug_assert_eq!(colors.len(), n);
    ColoredGraph::new(n, &edges, colors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_are_renumbered_densely() {
        let g = ColoredGraph::new(3, &[(0, 1)], vec![7, 3, 7]).unwrap();
        assert_eq!(g.colors(), &[1, 0, 1]);
        assert!(ColoredGraph::new(2, &[(0, 0)], vec![0, 0]).is_err());
        assert!(ColoredGraph::new(2, &[(0, 1), (1, 0)], vec![0, 0]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let g = ColoredGraph::new(4, &[(0, 1), (1, 2), (2, 3)], vec![0, 1, 1, 0]).unwrap();
        let text = export_colored_graph(&g);
        assert!(text.starts_with("cgraph 4 3\n"));
        assert_eq!(import_colored_graph(&text).unwrap(), g);
        assert!(import_colored_graph("cgraph 2 1\nv 0 0\nv 1 0\n").is_err());
    }
}
