//! The three-case robber strategy against at most `k + c` cops, and a
//! random robber drawing from ear-local and special moves.

use super::cordon::{horizontal_distance, is_critical, minimal_virtual_cordons};
use super::{Board, CompressibleMove, GameError, RobberController, View};
use crate::graph::{Part, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// `⌊(L − 2r) / (8(k + c))⌋`, the number of rounds the strategy guarantees.
pub fn guaranteed_rounds(board: &Board) -> usize {
    let cyl = &board.cyl;
    cyl.middle.saturating_sub(2 * cyl.ear) / (8 * board.robber_bound())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RobberCase {
    /// `W⁺` not critical.
    NotCritical,
    /// `W⁺` critical, `W⁻` not; `switched` when the robber changed sides.
    NewlyCritical { switched: bool },
    /// `W⁻` critical.
    AlreadyCritical,
    /// More than `k + c` cops on the board after the landing, or a search
    /// ran over budget: the robber keeps to its part.
    Unguarded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditFailure {
    pub round: usize,
    pub invariant: String,
    pub detail: String,
}

/// Class-level occupancy of `cops`.
fn blocked_by(board: &Board, cops: &[Vertex]) -> Vec<bool> {
    let mut blocked = vec![false; board.graph().num_vertices()];
    for &c in cops {
        for &u in board.comp.class_of(c) {
            blocked[u] = true;
        }
    }
    blocked
}

fn distinct_plus(cops: &[Vertex], extra: Vertex) -> Vec<Vertex> {
    let mut w = cops.to_vec();
    w.push(extra);
    w.sort_unstable();
    w.dedup();
    w
}

/// Whether column `col` holds none of `w`.
fn column_free(board: &Board, w: &[Vertex], col: usize) -> bool {
    w.iter().all(|&v| board.cyl.col(v) != col)
}

/// BFS inside the columns of `part` avoiding `blocked`; parent pointers and
/// the visit order (nearest first, ties by vertex id).
fn part_bfs(board: &Board, from: Vertex, part: Part, blocked: &[bool]) -> (Vec<usize>, Vec<Vertex>) {
    let (lo, hi) = board.cyl.part_columns(part);
    let mask = vec![true; board.k() + 1];
    let n = board.graph().num_vertices();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([from]);
    parent[from] = from;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for u in board.strip_neighbors(v, &mask, lo, hi) {
            if !blocked[u] && parent[u] == usize::MAX {
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }
    (parent, order)
}

fn path_to(parent: &[usize], to: Vertex) -> Vec<Vertex> {
    let mut path = vec![to];
    let mut x = to;
    while parent[x] != x {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    path
}

/// A move inside the robber's part: up one row if the column stays free of
/// `W⁺`, else the nearest vertex on a `W⁺`-free column, else the nearest
/// vertex not equivalent to the signal, else any move at all.
fn local_move(board: &Board, from: Vertex, cops: &[Vertex], signal: Vertex) -> Option<CompressibleMove> {
    let cyl = &board.cyl;
    let part = cyl.part(from);
    let blocked = blocked_by(board, cops);
    let plus = distinct_plus(cops, signal);
    let up = cyl.up(from);
    if column_free(board, &plus, cyl.col(from)) && !blocked[up] {
        return Some(CompressibleMove::along(board.graph(), &[from, up]));
    }
    let (parent, order) = part_bfs(board, from, part, &blocked);
    let reached = &order[1..];
    let pick = reached
        .iter()
        .find(|&&z| column_free(board, &plus, cyl.col(z)))
        .or_else(|| reached.iter().find(|&&z| !board.comp.equivalent(z, signal)))
        .or_else(|| reached.first())?;
    Some(CompressibleMove::along(board.graph(), &path_to(&parent, *pick)))
}

/// Column-`col` vertices from `from` to `to` going up or down the cycle.
fn column_walk(board: &Board, from: Vertex, to: Vertex, up: bool) -> Vec<Vertex> {
    let cyl = &board.cyl;
    let mut walk = vec![from];
    let mut v = from;
    while v != to {
        v = if up { cyl.up(v) } else { cyl.down(v) };
        walk.push(v);
    }
    walk
}

/// A special move from the robber's ear to a `W⁺`-free column of the other
/// ear: a truncated I-periodic path avoiding `W⁻_{≡I}`, joined to the robber
/// along its own column (as an edge-set symmetric difference).
fn special_moves(board: &Board, from: Vertex, cops: &[Vertex], signal: Vertex, all: bool) -> Result<Vec<CompressibleMove>, GameError> {
    let cyl = &board.cyl;
    let here = cyl.part(from);
    let there = if here == Part::Left { Part::Right } else { Part::Left };
    let plus = distinct_plus(cops, signal);
    let (lo, hi) = cyl.part_columns(there);
    let targets: Vec<usize> = (lo..=hi).filter(|&c| column_free(board, &plus, c)).collect();
    let a = cyl.col(from);
    let mut out = Vec::new();
    for rows in board.row_sets(board.cyl.c + 1) {
        let Some(path) = board.find_i_periodic_path(cops, &rows)? else { continue };
        for &t in &targets {
            let (lo_col, hi_col) = if here == Part::Left { (a, t) } else { (t, a) };
            let Some(trunc) = path.truncation(cyl, lo_col, hi_col) else { continue };
            let (join, end) = if here == Part::Left {
                (trunc[0], *trunc.last().unwrap())
            } else {
                (*trunc.last().unwrap(), trunc[0])
            };
            let base = CompressibleMove::along(board.graph(), &trunc);
            for up in [true, false] {
                let walk = column_walk(board, from, join, up);
                let seg = if walk.len() > 1 { CompressibleMove::along(board.graph(), &walk).edges } else { Vec::new() };
                let mv = base.xor(&seg, from, end);
                if super::validate_compressible_move(board.graph(), &board.comp, cops, &mv).is_ok() {
                    out.push(mv);
                    if !all {
                        return Ok(out);
                    }
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// The three-case strategy, with audits of invariants I1 and I2 during the
/// guaranteed rounds.
#[derive(Clone, Debug, Default)]
pub struct PaperRobber {
    pub cases: Vec<RobberCase>,
    pub audits: Vec<AuditFailure>,
    /// Rounds audited; defaults to [`guaranteed_rounds`] on start.
    pub audit_rounds: Option<usize>,
}

impl PaperRobber {
    pub fn new() -> Self {
        Self::default()
    }

    fn audit(&mut self, view: &View) -> Result<(), GameError> {
        let board = view.board;
        let cyl = &board.cyl;
        let t = view.round;
        if t > self.audit_rounds.unwrap_or(0) || view.cops.len() > board.robber_bound() {
            return Ok(());
        }
        let part = cyl.part(view.robber);
        let col = cyl.col(view.robber);
        if part == Part::Middle || !column_free(board, view.cops, col) {
            self.audits.push(AuditFailure {
                round: t,
                invariant: "I1".into(),
                detail: format!("robber at {} with cops {:?}", cyl.label(view.robber), view.cops),
            });
        }
        if is_critical(board, view.cops)? {
            let bound = (cyl.middle / 2) as i64 - (4 * board.robber_bound() * t) as i64;
            for s in minimal_virtual_cordons(board, view.cops)? {
                let d = horizontal_distance(cyl, cyl.part_columns(part), &s) as i64;
                if d < bound {
                    self.audits.push(AuditFailure {
                        round: t,
                        invariant: "I2".into(),
                        detail: format!("cordon {:?} at distance {d} < {bound}", s),
                    });
                }
            }
        }
        Ok(())
    }

    fn choose(&mut self, view: &View, signal: Vertex) -> Result<(RobberCase, Option<CompressibleMove>), GameError> {
        let board = view.board;
        let cyl = &board.cyl;
        let cops = view.cops;
        let from = view.robber;
        let plus = distinct_plus(cops, signal);
        let local = || local_move(board, from, cops, signal);
        if plus.len() > board.robber_bound() {
            return Ok((RobberCase::Unguarded, local()));
        }
        if !is_critical(board, &plus)? {
            return Ok((RobberCase::NotCritical, local()));
        }
        if is_critical(board, cops)? {
            return Ok((RobberCase::AlreadyCritical, local()));
        }
        // Span of all minimal virtual cordons of W⁺; keep to the ear farther from it.
        let cordons: Vec<Vertex> = minimal_virtual_cordons(board, &plus)?.into_iter().flatten().collect();
        let here = cyl.part(from);
        let there = if here == Part::Left { Part::Right } else { Part::Left };
        let d_here = horizontal_distance(cyl, cyl.part_columns(here), &cordons);
        let d_there = horizontal_distance(cyl, cyl.part_columns(there), &cordons);
        if d_there > d_here {
            if let Some(mv) = special_moves(board, from, cops, signal, false)?.into_iter().next() {
                return Ok((RobberCase::NewlyCritical { switched: true }, Some(mv)));
            }
        }
        Ok((RobberCase::NewlyCritical { switched: false }, local()))
    }
}

impl RobberController for PaperRobber {
    fn name(&self) -> String {
        "paper".into()
    }

    fn start(&mut self, board: &Board) -> Vertex {
        self.audit_rounds.get_or_insert(guaranteed_rounds(board));
        board.cyl.vertex(1, 1)
    }

    fn respond(&mut self, view: &View) -> Result<Option<CompressibleMove>, GameError> {
        let signal = view.signal.expect("robber moves after the signal");
        self.audit(view)?;
        let (case, mv) = match self.choose(view, signal) {
            Ok(found) => found,
            Err(GameError::SearchBudgetExceeded(_)) => {
                (RobberCase::Unguarded, local_move(view.board, view.robber, view.cops, signal))
            }
            Err(e) => return Err(e),
        };
        self.cases.push(case);
        Ok(mv)
    }
}

/// Uniform choice among ear-local moves to every reachable ear vertex and
/// the special moves to each free column of the other ear.
#[derive(Clone, Debug)]
pub struct RandomRobber {
    rng: ChaCha8Rng,
    seed: u64,
}

impl RandomRobber {
    pub fn new(seed: u64) -> Self {
        RandomRobber { rng: ChaCha8Rng::seed_from_u64(seed), seed }
    }
}

impl RobberController for RandomRobber {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn start(&mut self, board: &Board) -> Vertex {
        board.cyl.vertex(1, 1)
    }

    fn respond(&mut self, view: &View) -> Result<Option<CompressibleMove>, GameError> {
        let board = view.board;
        let signal = view.signal.expect("robber moves after the signal");
        let blocked = blocked_by(board, view.cops);
        let part = board.cyl.part(view.robber);
        let (parent, order) = part_bfs(board, view.robber, part, &blocked);
        let mut options: Vec<CompressibleMove> =
            order[1..].iter().map(|&z| CompressibleMove::along(board.graph(), &path_to(&parent, z))).collect();
        // Special moves are only worth the search with few cops on the board.
        if self.rng.gen_bool(0.5) && view.cops.len() <= board.robber_bound() {
            match special_moves(board, view.robber, view.cops, signal, true) {
                Ok(more) => options.extend(more),
                Err(GameError::SearchBudgetExceeded(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(options.choose(&mut self.rng).cloned())
    }
}
