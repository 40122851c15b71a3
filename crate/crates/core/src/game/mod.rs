//! The compressed cop-robber game on cylinder compressions: move validation,
//! separators and virtual cordons, the match engine, robber and cop
//! strategies, and the edge-robber variant played with twistings.

mod cops;
mod cordon;
mod engine;
mod robber;
mod separation;
mod twisting;

pub use cops::{ChaserCops, LockstepCops, RandomCops, RefutationCops};
pub use cordon::{
    diam, find_virtual_cordon, horizontal_distance, is_critical, is_separating, is_virtual_cordon,
    minimal_virtual_cordons, query_cordons, separates, unique_rows, CordonQuery,
};
pub use engine::{
    replay, run_match, BoardSpec, CopController, CopTurn, RobberController, RoundRecord, Side,
    Transcript, Verdict, View,
};
pub use robber::{guaranteed_rounds, AuditFailure, PaperRobber, RandomRobber, RobberCase};
pub use separation::{Board, PeriodicPath, RowSetMode, DEFAULT_SEARCH_BUDGET};
pub use twisting::{
    translate_to_edge_game, validate_twisting, vr_move_to_twisting, EdgeRound, Twisting,
    TwistViolation,
};

use crate::graph::{EdgeId, Graph, GraphCompression, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("search budget of {0} exceeded")]
    SearchBudgetExceeded(usize),
    #[error("robber strategy stuck in round {0}")]
    StrategyStuck(usize),
    #[error("invariant broken in round {round}: {reason}")]
    InvariantBroken { round: usize, reason: String },
    #[error("bad transcript: {0}")]
    Transcript(String),
    #[error("bad controller setup: {0}")]
    Setup(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    AwaitingSignal,
    AwaitingMove,
    AwaitingLanding,
}

/// Cop positions form a multiset; occupancy is always judged on classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub num_cops: usize,
    pub cop_positions: Vec<Vertex>,
    pub robber: Vertex,
    pub round: usize,
    pub phase: Phase,
}

impl GameState {
    pub fn new(num_cops: usize, robber: Vertex) -> Self {
        GameState { num_cops, cop_positions: Vec::new(), robber, round: 1, phase: Phase::AwaitingSignal }
    }

    pub fn lifted(&self) -> usize {
        self.num_cops - self.cop_positions.len()
    }

    pub fn robber_caught(&self, comp: &GraphCompression) -> bool {
        self.cop_positions.iter().any(|&c| comp.equivalent(c, self.robber))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompressibleMove {
    /// Sorted, without repetition.
    pub edges: Vec<EdgeId>,
    pub from: Vertex,
    pub to: Vertex,
}

impl CompressibleMove {
    pub fn new(mut edges: Vec<EdgeId>, from: Vertex, to: Vertex) -> Self {
        edges.sort_unstable();
        edges.dedup();
        CompressibleMove { edges, from, to }
    }

    /// The edges of a vertex sequence.
    pub fn along(graph: &Graph, path: &[Vertex]) -> Self {
        let edges = path
            .windows(2)
            .map(|p| graph.edge_between(p[0], p[1]).expect("consecutive path vertices are adjacent"))
            .collect();
        CompressibleMove::new(edges, path[0], *path.last().unwrap())
    }

    /// Edge set symmetric difference; endpoints given explicitly.
    pub fn xor(&self, other: &[EdgeId], from: Vertex, to: Vertex) -> Self {
        let a: HashSet<EdgeId> = self.edges.iter().copied().collect();
        let b: HashSet<EdgeId> = other.iter().copied().collect();
        CompressibleMove::new(a.symmetric_difference(&b).copied().collect(), from, to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    WrongStart { expected: Vertex, found: Vertex },
    UnknownEdge(EdgeId),
    NotAMove,
    /// G2a: `edge` is in M but its equivalent `missing` is not.
    NotClosed { edge: EdgeId, missing: EdgeId },
    /// G2b: `vertex` of V(M) is equivalent to the cop at `cop`.
    TouchesCop { vertex: Vertex, cop: Vertex },
    /// G2c: the M-degree parity of `vertex` is wrong.
    Parity { vertex: Vertex },
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::NotClosed { .. } => "G2a",
            Violation::TouchesCop { .. } => "G2b",
            Violation::Parity { .. } | Violation::NotAMove => "G2c",
            Violation::WrongStart { .. } | Violation::UnknownEdge(_) => "G2",
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {:?}", self.rule(), self)
    }
}

/// Checks G2a–G2c for a move against the cop positions left after G1. The
/// robber must move (`from != to`) and both endpoints carry odd degree.
pub fn validate_compressible_move(
    graph: &Graph,
    comp: &GraphCompression,
    cops: &[Vertex],
    mv: &CompressibleMove,
) -> Result<(), Violation> {
    let m = graph.num_edges();
    if mv.from == mv.to {
        return Err(Violation::NotAMove);
    }
    let mut inside = vec![false; m];
    for &e in &mv.edges {
        if e >= m {
            return Err(Violation::UnknownEdge(e));
        }
        inside[e] = true;
    }
    for &e in &mv.edges {
        if let Some(&missing) = comp.edge_class_members(comp.edge_class(e)).iter().find(|&&f| !inside[f]) {
            return Err(Violation::NotClosed { edge: e, missing });
        }
    }
    let mut degree = vec![0usize; graph.num_vertices()];
    for &e in &mv.edges {
        let (a, b) = graph.endpoints(e);
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut touched: Vec<Vertex> = (0..graph.num_vertices()).filter(|&v| degree[v] > 0).collect();
    touched.sort_unstable();
    for &u in &touched {
        if let Some(&cop) = cops.iter().find(|&&c| comp.equivalent(c, u)) {
            return Err(Violation::TouchesCop { vertex: u, cop });
        }
    }
    for &u in &touched {
        let end = comp.equivalent(u, mv.from) || comp.equivalent(u, mv.to);
        if (degree[u] % 2 == 1) != end {
            return Err(Violation::Parity { vertex: u });
        }
    }
    for w in [mv.from, mv.to] {
        if degree[w].is_multiple_of(2) {
            return Err(Violation::Parity { vertex: w });
        }
    }
    Ok(())
}

/// [`validate_compressible_move`] plus the check that the move starts at the robber.
pub fn validate_move_in_state(
    graph: &Graph,
    comp: &GraphCompression,
    state: &GameState,
    mv: &CompressibleMove,
) -> Result<(), Violation> {
    if mv.from != state.robber {
        return Err(Violation::WrongStart { expected: state.robber, found: mv.from });
    }
    validate_compressible_move(graph, comp, &state.cop_positions, mv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cylinder_compression, Cylinder};

    fn toy() -> Cylinder {
        Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap()
    }

    #[test]
    fn simple_path_is_legal_uncompressed() {
        let cyl = toy();
        let id = GraphCompression::identity(cyl.graph());
        let path: Vec<Vertex> = (10..=14).map(|c| cyl.vertex(1, c)).collect();
        let mv = CompressibleMove::along(cyl.graph(), &path);
        assert_eq!(validate_compressible_move(cyl.graph(), &id, &[cyl.vertex(2, 12)], &mv), Ok(()));
        assert!(matches!(
            validate_compressible_move(cyl.graph(), &id, &[cyl.vertex(1, 12)], &mv),
            Err(Violation::TouchesCop { .. })
        ));
    }

    #[test]
    fn open_middle_path_is_not_closed() {
        let cyl = toy();
        let comp = cylinder_compression(&cyl);
        let path: Vec<Vertex> = (10..=14).map(|c| cyl.vertex(1, c)).collect();
        let mv = CompressibleMove::along(cyl.graph(), &path);
        let err = validate_compressible_move(cyl.graph(), &comp, &[], &mv).unwrap_err();
        assert_eq!(err.rule(), "G2a");
    }

    #[test]
    fn equivalent_cop_blocks() {
        let cyl = toy();
        let comp = cylinder_compression(&cyl);
        // Row 1 straight across: every horizontal class is fully used.
        let path: Vec<Vertex> = (1..=cyl.width).map(|c| cyl.vertex(1, c)).collect();
        let mv = CompressibleMove::along(cyl.graph(), &path);
        assert_eq!(validate_compressible_move(cyl.graph(), &comp, &[], &mv), Ok(()));
        let cop = cyl.vertex(1, 4 + 6);
        let err = validate_compressible_move(cyl.graph(), &comp, &[cop], &mv).unwrap_err();
        assert_eq!(err.rule(), "G2b");
    }

    #[test]
    fn parity_and_standing_still() {
        let cyl = toy();
        let id = GraphCompression::identity(cyl.graph());
        let a = cyl.vertex(1, 1);
        let b = cyl.vertex(1, 2);
        let e = cyl.graph().edge_between(a, b).unwrap();
        assert_eq!(validate_compressible_move(cyl.graph(), &id, &[], &CompressibleMove::new(vec![e], a, a)), Err(Violation::NotAMove));
        let c = cyl.vertex(1, 3);
        assert!(matches!(
            validate_compressible_move(cyl.graph(), &id, &[], &CompressibleMove::new(vec![e], a, c)),
            Err(Violation::Parity { .. })
        ));
    }
}
