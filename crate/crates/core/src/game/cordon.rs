//! Vertex separators, virtual cordons and critical cop sets.
//!
//! Minimal separators of the cylinder span at most `|S| - 1` columns, so a
//! minimal virtual cordon of `W` lives in a window of `|W|` consecutive
//! columns; inside a window, separating the window's end columns is the same
//! as separating the whole graph. Windows are anchored on the class members
//! of a unique row of `W`.

use super::{Board, GameError};
use crate::graph::{Cylinder, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ops::ControlFlow;

/// Whether `s` separates column 1 from the last column.
pub fn separates(board: &Board, s: &[Vertex]) -> bool {
    let mut blocked = vec![false; board.graph().num_vertices()];
    for &v in s {
        blocked[v] = true;
    }
    !window_connected(board, &blocked, 1, board.cyl.width)
}

fn window_connected(board: &Board, blocked: &[bool], lo: usize, hi: usize) -> bool {
    let all_rows: Vec<usize> = (1..=board.k()).collect();
    board.strip_path(&all_rows, blocked, lo, hi).is_some()
}

/// `a`-separating: I-separating for every admissible row set of size at most `a`.
pub fn is_separating(board: &Board, w: &[Vertex], a: usize) -> Result<bool, GameError> {
    for rows in board.row_sets(a) {
        if !board.is_i_separating(w, &rows)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows on which `W` has at most one vertex.
pub fn unique_rows(board: &Board, w: &[Vertex]) -> Vec<usize> {
    let counts = row_counts(board, w);
    (1..=board.k()).filter(|&i| counts[i] <= 1).collect()
}

fn distinct(w: &[Vertex]) -> Vec<Vertex> {
    let mut d = w.to_vec();
    d.sort_unstable();
    d.dedup();
    d
}

fn row_counts(board: &Board, w: &[Vertex]) -> Vec<usize> {
    let mut counts = vec![0; board.k() + 1];
    for v in distinct(w) {
        counts[board.cyl.row(v)] += 1;
    }
    counts
}

/// Difference of the largest and smallest occupied columns.
pub fn diam(cyl: &Cylinder, s: &[Vertex]) -> usize {
    let cols = s.iter().map(|&v| cyl.col(v));
    match (cols.clone().min(), cols.max()) {
        (Some(a), Some(b)) => b - a,
        _ => 0,
    }
}

/// Least column distance between `s` and the inclusive column range `cols`.
pub fn horizontal_distance(cyl: &Cylinder, cols: (usize, usize), s: &[Vertex]) -> usize {
    s.iter()
        .map(|&v| {
            let c = cyl.col(v);
            if c < cols.0 {
                cols.0 - c
            } else {
                c.saturating_sub(cols.1)
            }
        })
        .min()
        .unwrap_or(usize::MAX)
}

/// A separator with `|S_i| ≤ |W_i|` on every row and `S_j ⊆ (W_j)_≡` on the
/// unique rows of `W`.
pub fn is_virtual_cordon(board: &Board, w: &[Vertex], s: &[Vertex]) -> bool {
    let wc = row_counts(board, w);
    let sc = row_counts(board, s);
    let w = distinct(w);
    for i in 1..=board.k() {
        if sc[i] > wc[i] {
            return false;
        }
        if wc[i] <= 1 {
            let ok = s
                .iter()
                .filter(|&&v| board.cyl.row(v) == i)
                .all(|&v| w.iter().any(|&x| board.cyl.row(x) == i && board.comp.equivalent(x, v)));
            if !ok {
                return false;
            }
        }
    }
    separates(board, s)
}

fn enumerate(
    board: &Board,
    w: &[Vertex],
    mut visit: impl FnMut(Vec<Vertex>) -> ControlFlow<()>,
) -> Result<(), GameError> {
    let cyl = &board.cyl;
    let k = cyl.k;
    let w = distinct(w);
    let counts = row_counts(board, &w);
    if w.is_empty() || (1..=k).any(|i| counts[i] == 0) {
        return Ok(());
    }
    let span = w.len();
    // Candidates on each unique row: the class of its single vertex.
    let mut class_cands: Vec<Vec<Vertex>> = vec![Vec::new(); k + 1];
    for &x in &w {
        let i = cyl.row(x);
        if counts[i] == 1 {
            let mut c: Vec<Vertex> = board.comp.class_of(x).to_vec();
            c.sort_unstable();
            class_cands[i] = c;
        }
    }
    let mut windows = BTreeSet::new();
    let pivot = (1..=k).filter(|&i| counts[i] == 1).min_by_key(|&i| class_cands[i].len());
    match pivot {
        Some(p) => {
            for &x in &class_cands[p] {
                let c = cyl.col(x);
                for lo in c.saturating_sub(span - 1).max(1)..=c {
                    windows.insert(lo);
                }
            }
        }
        None => windows.extend(1..=cyl.width),
    }
    let mut budget = board.search_budget;
    let mut seen = BTreeSet::new();
    let n = board.graph().num_vertices();
    let mut blocked = vec![false; n];
    for lo in windows {
        let hi = (lo + span - 1).min(cyl.width);
        let mut options: Vec<Vec<Vec<Vertex>>> = Vec::with_capacity(k);
        for i in 1..=k {
            let opts: Vec<Vec<Vertex>> = if counts[i] == 1 {
                class_cands[i].iter().filter(|&&v| (lo..=hi).contains(&cyl.col(v))).map(|&v| vec![v]).collect()
            } else {
                let cells: Vec<Vertex> = (lo..=hi).map(|c| cyl.vertex(i, c)).collect();
                subsets_up_to(&cells, counts[i])
            };
            if opts.is_empty() {
                break;
            }
            options.push(opts);
        }
        if options.len() < k {
            continue;
        }
        let mut idx = vec![0usize; k];
        loop {
            if budget == 0 {
                return Err(GameError::SearchBudgetExceeded(board.search_budget));
            }
            budget -= 1;
            let s: Vec<Vertex> = (0..k).flat_map(|i| options[i][idx[i]].iter().copied()).collect();
            for &v in &s {
                blocked[v] = true;
            }
            let minimal = !window_connected(board, &blocked, lo, hi)
                && s.iter().all(|&v| {
                    blocked[v] = false;
                    let open = window_connected(board, &blocked, lo, hi);
                    blocked[v] = true;
                    open
                });
            for &v in &s {
                blocked[v] = false;
            }
            if minimal {
                let mut sorted = s;
                sorted.sort_unstable();
                if seen.insert(sorted.clone()) && visit(sorted).is_break() {
                    return Ok(());
                }
            }
            // Odometer over the per-row options.
            let mut r = 0;
            while r < k {
                idx[r] += 1;
                if idx[r] < options[r].len() {
                    break;
                }
                idx[r] = 0;
                r += 1;
            }
            if r == k {
                break;
            }
        }
    }
    Ok(())
}

fn subsets_up_to(cells: &[Vertex], max: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let n = cells.len();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize <= max {
            out.push((0..n).filter(|&j| mask >> j & 1 == 1).map(|j| cells[j]).collect());
        }
    }
    out
}

/// All minimal virtual cordons of `W`, sorted.
pub fn minimal_virtual_cordons(board: &Board, w: &[Vertex]) -> Result<Vec<Vec<Vertex>>, GameError> {
    let mut out = Vec::new();
    enumerate(board, w, |s| {
        out.push(s);
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

pub fn find_virtual_cordon(board: &Board, w: &[Vertex]) -> Result<Option<Vec<Vertex>>, GameError> {
    let mut found = None;
    enumerate(board, w, |s| {
        found = Some(s);
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// `(c+1)`-separating and admitting a virtual cordon.
pub fn is_critical(board: &Board, w: &[Vertex]) -> Result<bool, GameError> {
    Ok(is_separating(board, w, board.cyl.c + 1)? && find_virtual_cordon(board, w)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CordonQuery {
    /// `(I, W is I-separating)` for every row set of size at most `c + 1`.
    pub separating: Vec<(Vec<usize>, bool)>,
    pub witness: Option<Vec<Vertex>>,
    pub minimal: Vec<Vec<Vertex>>,
    pub critical: bool,
}

pub fn query_cordons(board: &Board, w: &[Vertex]) -> Result<CordonQuery, GameError> {
    let mut separating = Vec::new();
    for rows in board.row_sets(board.cyl.c + 1) {
        let s = board.is_i_separating(w, &rows)?;
        separating.push((rows, s));
    }
    let minimal = minimal_virtual_cordons(board, w)?;
    let witness = minimal.first().cloned();
    let critical = separating.iter().all(|(_, s)| *s) && witness.is_some();
    Ok(CordonQuery { separating, witness, minimal, critical })
}

/// Vertices reachable from column 1 avoiding `s`; used by tests as an
/// independent separator check on the whole graph.
#[cfg(test)]
pub(crate) fn reachable_from_left(board: &Board, s: &[Vertex]) -> Vec<bool> {
    use std::collections::VecDeque;
    let g = board.graph();
    let mut blocked = vec![false; g.num_vertices()];
    for &v in s {
        blocked[v] = true;
    }
    let mut seen = vec![false; g.num_vertices()];
    let mut queue: VecDeque<Vertex> = (1..=board.k()).map(|r| board.cyl.vertex(r, 1)).filter(|&v| !blocked[v]).collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if !blocked[u] && !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}
