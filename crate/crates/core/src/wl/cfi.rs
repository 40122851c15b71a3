//! CFI graphs over ordered base graphs and their quotients by a vertex
//! equivalence.

use super::{ColoredGraph, WlError};
use crate::graph::{Cylinder, EdgeId, Graph, GraphCompression, Vertex};
use std::collections::{BTreeSet, HashMap};

const MAX_DEGREE: usize = 20;

/// One bit per base edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfiFunction {
    pub values: Vec<bool>,
}

impl CfiFunction {
    pub fn zero(base: &Graph) -> Self {
        CfiFunction { values: vec![false; base.num_edges()] }
    }

    pub fn support(&self) -> Vec<EdgeId> {
        (0..self.values.len()).filter(|&e| self.values[e]).collect()
    }

    /// Equal values on any two edges joining the same pair of vertex classes.
    /// Returns the first offending pair of edges.
    pub fn check_compressible(&self, base: &Graph, comp: &GraphCompression) -> Result<(), WlError> {
        let mut seen: HashMap<(usize, usize), EdgeId> = HashMap::new();
        for (e, &(u, v)) in base.edges().iter().enumerate() {
            let (cu, cv) = (comp.vertex_class(u), comp.vertex_class(v));
            let rep = *seen.entry((cu.min(cv), cu.max(cv))).or_insert(e);
            if self.values[rep] != self.values[e] {
                return Err(WlError::NotCompressible(rep, e));
            }
        }
        Ok(())
    }

    pub fn is_compressible(&self, base: &Graph, comp: &GraphCompression) -> bool {
        self.check_compressible(base, comp).is_ok()
    }
}

/// `CFI(G, f)` together with the map back to `(base vertex, vector)`.
#[derive(Clone, Debug)]
pub struct Cfi {
    pub base: Graph,
    pub f: CfiFunction,
    pub graph: ColoredGraph,
    offsets: Vec<usize>,
}

/// Number of even-weight vectors of length `d`.
fn group_size(d: usize) -> usize {
    1 << d.saturating_sub(1)
}

/// The `r`-th even-weight vector of length `d`: the low `d - 1` bits are `r`
/// and the last bit restores even parity.
fn even_vector(d: usize, r: usize) -> u32 {
    if d == 0 {
        return 0;
    }
    let r = r as u32;
    r | ((r.count_ones() & 1) << (d - 1))
}

fn check_degrees(base: &Graph) -> Result<(), WlError> {
    match (0..base.num_vertices()).find(|&v| base.degree(v) > MAX_DEGREE) {
        Some(vertex) => Err(WlError::DegreeTooLarge { vertex, degree: base.degree(vertex) }),
        None => Ok(()),
    }
}

impl Cfi {
    /// Vertex id of `(v, ā)` where `ā` is the `r`-th even vector.
    pub fn vertex(&self, v: Vertex, r: usize) -> usize {
        self.offsets[v] + r
    }

    /// `(v, ā)` for a CFI vertex id, with `ā` as a bit mask over positions.
    pub fn owner(&self, id: usize) -> (Vertex, u32) {
        let v = self.offsets.partition_point(|&o| o <= id) - 1;
        (v, even_vector(self.base.degree(v), id - self.offsets[v]))
    }
}

pub fn build_cfi(base: &Graph, f: &CfiFunction) -> Result<Cfi, WlError> {
    check_degrees(base)?;
    let n = base.num_vertices();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut total = 0;
    for v in 0..n {
        offsets.push(total);
        total += group_size(base.degree(v));
    }
    offsets.push(total);
    let colors: Vec<u32> = (0..n).flat_map(|v| std::iter::repeat_n(v as u32, group_size(base.degree(v)))).collect();
    let mut edges = Vec::new();
    for (e, &(u, v)) in base.edges().iter().enumerate() {
        // u is the i-th neighbour of v and v the j-th neighbour of u.
        let i = base.position(v, u).unwrap();
        let j = base.position(u, v).unwrap();
        let (du, dv) = (base.degree(u), base.degree(v));
        for ra in 0..group_size(du) {
            let a = (even_vector(du, ra) >> i) & 1;
            for rb in 0..group_size(dv) {
                let b = (even_vector(dv, rb) >> j) & 1;
                if (a ^ b == 1) == f.values[e] {
                    edges.push((offsets[u] + ra, offsets[v] + rb));
                }
            }
        }
    }
    let graph = ColoredGraph::new(total, &edges, colors)?;
    Ok(Cfi { base: base.clone(), f: f.clone(), graph, offsets })
}

/// Equivalent vertices must be non-adjacent with equal degree, and edges
/// joining the same two classes must sit at the same neighbour positions.
fn check_order_consistent(base: &Graph, comp: &GraphCompression) -> Result<(), WlError> {
    let mut rep: HashMap<usize, Vertex> = HashMap::new();
    for v in 0..base.num_vertices() {
        let r = *rep.entry(comp.vertex_class(v)).or_insert(v);
        if base.degree(r) != base.degree(v) {
            return Err(WlError::OrderInconsistent(r, v));
        }
    }
    let mut slots: HashMap<(usize, usize), (Vertex, usize)> = HashMap::new();
    for v in 0..base.num_vertices() {
        for (p, &u) in base.neighbors(v).iter().enumerate() {
            let key = (comp.vertex_class(v), comp.vertex_class(u));
            if key.0 == key.1 {
                return Err(WlError::NotSimple(format!("equivalent vertices {v} and {u} are adjacent")));
            }
            let (w, q) = *slots.entry(key).or_insert((v, p));
            if q != p {
                return Err(WlError::OrderInconsistent(w, v));
            }
        }
    }
    Ok(())
}

/// The quotient identifying `(u, ā)` with `(v, ā)` whenever `u ≡ v`. The
/// colour of a class is the least base vertex of `u`'s class.
pub fn compress_cfi(cfi: &Cfi, comp: &GraphCompression) -> Result<ColoredGraph, WlError> {
    let base = &cfi.base;
    check_order_consistent(base, comp)?;
    cfi.f.check_compressible(base, comp)?;
    let classes = comp.num_vertex_classes();
    let mut offsets = Vec::with_capacity(classes);
    let mut colors = Vec::new();
    for c in 0..classes {
        let members = comp.vertex_class_members(c);
        let d = base.degree(members[0]);
        offsets.push(colors.len());
        colors.extend(std::iter::repeat_n(members[0] as u32, group_size(d)));
    }
    let mut edges = BTreeSet::new();
    for &(x, y) in cfi.graph.edges().iter() {
        let ((u, a), (v, b)) = (cfi.owner(x), cfi.owner(y));
        let (cu, cv) = (comp.vertex_class(u), comp.vertex_class(v));
        let low = |d: usize, m: u32| (m & ((1u32 << d.saturating_sub(1)) - 1)) as usize;
        let p = offsets[cu] + low(base.degree(u), a);
        let q = offsets[cv] + low(base.degree(v), b);
        edges.insert((p.min(q), p.max(q)));
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    ColoredGraph::new(colors.len(), &edges, colors)
}

/// `f ≡ 0` and `g` equal to 1 only on the edge from `(1,1)` to `(1,2)`.
pub fn make_charge_functions(cyl: &Cylinder) -> (CfiFunction, CfiFunction) {
    let base = cyl.graph();
    let f = CfiFunction::zero(base);
    let mut g = f.clone();
    let e = base.edge_between(cyl.vertex(1, 1), cyl.vertex(1, 2)).expect("width is at least 2");
    g.values[e] = true;
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cylinder_compression;
    use crate::wl::{wl_distinguish, Distinguish};

    fn toy2() -> Cylinder {
        Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap()
    }

    #[test]
    fn single_edge() {
        let base = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let cfi = build_cfi(&base, &CfiFunction::zero(&base)).unwrap();
        assert_eq!((cfi.graph.num_vertices(), cfi.graph.num_edges()), (2, 1));
        let twisted = build_cfi(&base, &CfiFunction { values: vec![true] }).unwrap();
        assert_eq!(twisted.graph.num_edges(), 0);
    }

    #[test]
    fn degree_four_gives_eight_copies() {
        let base = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let cfi = build_cfi(&base, &CfiFunction::zero(&base)).unwrap();
        assert_eq!(cfi.graph.colors().iter().filter(|&&c| c == 0).count(), 8);
        for id in 0..cfi.graph.num_vertices() {
            let (v, a) = cfi.owner(id);
            assert_eq!(a.count_ones() % 2, 0);
            assert_eq!(cfi.graph.color(id), v as u32);
        }
    }

    #[test]
    fn degree_limit() {
        let edges: Vec<(usize, usize)> = (1..=21).map(|v| (0, v)).collect();
        let base = Graph::from_edges(22, &edges).unwrap();
        assert_eq!(
            build_cfi(&base, &CfiFunction::zero(&base)).unwrap_err(),
            WlError::DegreeTooLarge { vertex: 0, degree: 21 }
        );
    }

    #[test]
    fn counts_on_the_toy_cylinder() {
        let cyl = toy2();
        let base = cyl.graph();
        let comp = cylinder_compression(&cyl);
        let (f, g) = make_charge_functions(&cyl);
        assert!(f.is_compressible(base, &comp) && g.is_compressible(base, &comp));
        assert_eq!(g.support().len(), 1);
        let (cf, cg) = (build_cfi(base, &f).unwrap(), build_cfi(base, &g).unwrap());
        let expected: usize = (0..base.num_vertices()).map(|v| group_size(base.degree(v))).sum();
        assert_eq!(cf.graph.num_vertices(), expected);
        assert_eq!((cf.graph.num_vertices(), cf.graph.num_edges()), (cg.graph.num_vertices(), cg.graph.num_edges()));
        let qf = compress_cfi(&cf, &comp).unwrap();
        let expected: usize =
            (0..comp.num_vertex_classes()).map(|c| group_size(base.degree(comp.vertex_class_members(c)[0]))).sum();
        assert_eq!(qf.num_vertices(), expected);
        assert_eq!(qf.num_edges(), compress_cfi(&cg, &comp).unwrap().num_edges());
    }

    #[test]
    fn identity_partition_keeps_the_graph() {
        let cyl = Cylinder::new(2, 1, vec![2, 2], 4, 2).unwrap();
        let (_, g) = make_charge_functions(&cyl);
        let cfi = build_cfi(cyl.graph(), &g).unwrap();
        let q = compress_cfi(&cfi, &GraphCompression::identity(cyl.graph())).unwrap();
        assert_eq!(q, cfi.graph);
    }

    #[test]
    fn non_constant_function_is_rejected() {
        let cyl = toy2();
        let base = cyl.graph();
        let comp = cylinder_compression(&cyl);
        let mut f = CfiFunction::zero(base);
        let e = base.edge_between(cyl.vertex(1, 10), cyl.vertex(1, 11)).unwrap();
        f.values[e] = true;
        let cfi = build_cfi(base, &f).unwrap();
        assert!(matches!(compress_cfi(&cfi, &comp), Err(WlError::NotCompressible(_, _))));
    }

    #[test]
    fn twisted_pair_needs_more_than_colour_refinement() {
        let cyl = Cylinder::new(2, 1, vec![2, 2], 4, 2).unwrap();
        let (f, g) = make_charge_functions(&cyl);
        let (a, b) = (build_cfi(cyl.graph(), &f).unwrap(), build_cfi(cyl.graph(), &g).unwrap());
        assert!(matches!(wl_distinguish(&a.graph, &b.graph, 1, 100).unwrap(), Distinguish::NotDistinguished { .. }));
        assert!(matches!(wl_distinguish(&a.graph, &b.graph, 2, 100).unwrap(), Distinguish::At(_)));
    }
}
