//! Plain-text exports of cylinders and compressions.
//!
//! Vertex ids in files are 1-based (row-major), matching the DIMACS habit.

use super::{Cylinder, Graph, GraphCompression, GraphError};
use std::fmt::Write;

/// Header `graph <k> <width>` followed by one `u v` line per edge.
pub fn export_cylinder(cyl: &Cylinder) -> String {
    let mut out = format!("graph {} {}\n", cyl.k, cyl.width);
    write_edges(&mut out, cyl.graph());
    out
}

fn write_edges(out: &mut String, g: &Graph) {
    for &(a, b) in g.edges() {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
}

/// Two sections: `vertex-classes <n>` with `v class` lines, then
/// `edge-classes <m>` with `u v class` lines.
pub fn export_compression(graph: &Graph, comp: &GraphCompression) -> String {
    let mut out = format!("vertex-classes {}\n", comp.num_vertex_classes());
    for v in 0..graph.num_vertices() {
        writeln!(out, "{} {}", v + 1, comp.vertex_class(v)).unwrap();
    }
    writeln!(out, "edge-classes {}", comp.num_edge_classes()).unwrap();
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        writeln!(out, "{} {} {}", a + 1, b + 1, comp.edge_class(e)).unwrap();
    }
    out
}

/// Parses the format written by [`export_cylinder`] into `(k, width, edges)`.
pub fn import_cylinder_edges(text: &str) -> Result<(usize, usize, Vec<(usize, usize)>), GraphError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| GraphError::Malformed("empty input".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "graph" {
        return Err(GraphError::Malformed(format!("bad header {header:?}")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| GraphError::Malformed(format!("bad number {s:?}")));
    let (k, width) = (num(parts[1])?, num(parts[2])?);
    let mut edges = Vec::new();
    for line in lines {
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 2 {
            return Err(GraphError::Malformed(format!("bad edge line {line:?}")));
        }
        let (a, b) = (num(p[0])?, num(p[1])?);
        if a == 0 || b == 0 {
            return Err(GraphError::Malformed("vertex ids are 1-based".into()));
        }
        edges.push((a - 1, b - 1));
    }
    Ok((k, width, edges))
}
