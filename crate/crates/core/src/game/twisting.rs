//! The edge-robber variant: the robber sits on an edge and moves by a
//! compressible twisting. Vertex-robber moves between singleton-class
//! vertices translate into twistings move by move.

use super::{Board, CompressibleMove, GameError, Transcript};
use crate::graph::{EdgeId, Graph, GraphCompression, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A set of arcs `(u, v)` over edges of the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twisting {
    pub arcs: BTreeSet<(Vertex, Vertex)>,
}

impl Twisting {
    /// Edges carrying exactly one of their two arcs.
    pub fn twisted_edges(&self, graph: &Graph) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self
            .arcs
            .iter()
            .filter(|&&(u, v)| !self.arcs.contains(&(v, u)))
            .filter_map(|&(u, v)| graph.edge_between(u, v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistViolation {
    NotAnEdge { arc: (Vertex, Vertex) },
    OddOutDegree { vertex: Vertex },
    /// `arc` is in the twisting but the arc at the same neighbor position of
    /// the equivalent vertex is not.
    NotCompressible { arc: (Vertex, Vertex), missing: (Vertex, Vertex) },
    WrongTwisted { expected: Vec<EdgeId>, found: Vec<EdgeId> },
    CopNotFixed { vertex: Vertex, cop: Vertex },
}

impl std::fmt::Display for TwistViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks that `t` is a compressible twisting that twists exactly `from` and
/// `to` and fixes every vertex equivalent to a cop.
pub fn validate_twisting(
    graph: &Graph,
    comp: &GraphCompression,
    cops: &[Vertex],
    from: EdgeId,
    to: EdgeId,
    t: &Twisting,
) -> Result<(), TwistViolation> {
    let mut out = vec![0usize; graph.num_vertices()];
    for &(u, v) in &t.arcs {
        if u >= graph.num_vertices() || graph.position(u, v).is_none() {
            return Err(TwistViolation::NotAnEdge { arc: (u, v) });
        }
        out[u] += 1;
    }
    if let Some(vertex) = (0..graph.num_vertices()).find(|&v| out[v] % 2 == 1) {
        return Err(TwistViolation::OddOutDegree { vertex });
    }
    for &(u, v) in &t.arcs {
        let p = graph.position(u, v).unwrap();
        for &u2 in comp.class_of(u) {
            let missing = (u2, graph.neighbors(u2)[p]);
            if !t.arcs.contains(&missing) {
                return Err(TwistViolation::NotCompressible { arc: (u, v), missing });
            }
        }
    }
    let mut expected = vec![from, to];
    expected.sort_unstable();
    expected.dedup();
    let found = t.twisted_edges(graph);
    if found != expected {
        return Err(TwistViolation::WrongTwisted { expected, found });
    }
    for &(u, _) in &t.arcs {
        if let Some(&cop) = cops.iter().find(|&&c| comp.equivalent(c, u)) {
            return Err(TwistViolation::CopNotFixed { vertex: u, cop });
        }
    }
    Ok(())
}

/// Singleton-class edges at `v`, in adjacency order.
fn singleton_edges(graph: &Graph, comp: &GraphCompression, v: Vertex) -> Vec<EdgeId> {
    graph.incident(v).iter().copied().filter(|&e| comp.is_singleton_edge(e)).collect()
}

/// The twisting for a vertex-robber move `mv` from `w1` to `w2` when the edge
/// robber sits on `e1` (incident to `w1`). Returns the twisting and the edge
/// the edge robber moves to: the first singleton-class edge at `w2`, or the
/// second if the first is `{w1, w2}`.
pub fn vr_move_to_twisting(board: &Board, mv: &CompressibleMove, e1: EdgeId) -> Result<(Twisting, EdgeId), GameError> {
    let graph = board.graph();
    let comp = &board.comp;
    let (w1, w2) = (mv.from, mv.to);
    let bad = |msg: String| GameError::Transcript(msg);
    let (a, b) = graph.endpoints(e1);
    if a != w1 && b != w1 {
        return Err(bad(format!("edge {e1} is not at the robber's vertex")));
    }
    if !comp.is_singleton_vertex(w1) || !comp.is_singleton_vertex(w2) {
        return Err(bad("move between non-singleton classes".into()));
    }
    let ends = singleton_edges(graph, comp, w2);
    if ends.len() < 2 {
        return Err(bad(format!("{} has fewer than two singleton-class edges", board.cyl.label(w2))));
    }
    let f2 = if graph.edge_between(w1, w2) == Some(ends[0]) { ends[1] } else { ends[0] };
    let in_m: BTreeSet<EdgeId> = mv.edges.iter().copied().collect();
    let mut arcs = BTreeSet::new();
    for &e in &mv.edges {
        let (u, v) = graph.endpoints(e);
        if !((u == w1 && e == e1) || (u == w2 && e == f2)) {
            arcs.insert((u, v));
        }
        if !((v == w1 && e == e1) || (v == w2 && e == f2)) {
            arcs.insert((v, u));
        }
    }
    if !in_m.contains(&e1) {
        arcs.insert((w1, graph.other_end(e1, w1)));
    }
    if !in_m.contains(&f2) {
        arcs.insert((w2, graph.other_end(f2, w2)));
    }
    Ok((Twisting { arcs }, f2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRound {
    pub round: usize,
    pub twisting: Twisting,
    /// Edge robber position after the move.
    pub robber_edge: EdgeId,
    pub cop_positions: Vec<(usize, usize)>,
}

/// Translates a vertex-robber transcript into an edge-robber one, checking
/// every twisting against the cops on the board during the move and that the
/// edge robber is never caught.
pub fn translate_to_edge_game(transcript: &Transcript) -> Result<Vec<EdgeRound>, GameError> {
    let board = transcript.board.build()?;
    let cyl = &board.cyl;
    let graph = board.graph();
    let comp = &board.comp;
    let bad = |msg: String| GameError::Transcript(msg);
    let vertex = |(r, c): (usize, usize)| cyl.vertex(r, c);
    let mut robber = vertex(transcript.start);
    let mut edge = *singleton_edges(graph, comp, robber)
        .first()
        .ok_or_else(|| bad("start vertex has no singleton-class edge".into()))?;
    let mut cops: Vec<Vertex> = Vec::new();
    let mut out = Vec::new();
    for rec in &transcript.rounds {
        if let Some(p) = rec.lifted {
            let i = cops.iter().position(|&c| c == vertex(p)).ok_or_else(|| bad(format!("no cop at {p:?}")))?;
            cops.remove(i);
        }
        let to = vertex(rec.robber);
        if rec.move_edges.is_empty() {
            break;
        }
        let mv = CompressibleMove::new(rec.move_edges.clone(), robber, to);
        let (t, next) = vr_move_to_twisting(&board, &mv, edge)?;
        validate_twisting(graph, comp, &cops, edge, next, &t)
            .map_err(|v| bad(format!("round {}: {v}", rec.round)))?;
        cops = rec.cop_positions.iter().map(|&p| vertex(p)).collect();
        let (a, b) = graph.endpoints(next);
        let guarded = |x: Vertex| cops.iter().any(|&c| comp.equivalent(c, x));
        if guarded(a) && guarded(b) {
            return Err(bad(format!("edge robber caught in round {}", rec.round)));
        }
        out.push(EdgeRound { round: rec.round, twisting: t, robber_edge: next, cop_positions: rec.cop_positions.clone() });
        robber = to;
        edge = next;
    }
    Ok(out)
}
