//! Row sets, periodic closures `W_{≡I}`, I-separation and I-periodic paths.

use super::GameError;
use crate::graph::{cylinder_compression, Cylinder, Graph, GraphCompression, Vertex};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Node budget for exhaustive searches (one-period patterns, cordon windows).
pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;

/// Which row sets `I` the a-separating condition ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSetMode {
    /// Cyclic row intervals.
    #[default]
    Intervals,
    /// All nonempty row subsets.
    AllSubsets,
}

/// A cylinder with its compression and the search settings of the game.
#[derive(Clone, Debug)]
pub struct Board {
    pub cyl: Cylinder,
    pub comp: GraphCompression,
    /// Whether `comp` is the closed-form cylinder compression; the identity
    /// compression has no periodic structure.
    pub compressed: bool,
    pub mode: RowSetMode,
    pub search_budget: usize,
}

/// A one-period pattern from `(row, b)` to `(row, b + period)`, or, on an
/// uncompressed board, a whole path from column 1 to the last column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPath {
    pub rows: Vec<usize>,
    pub period: Option<usize>,
    /// `(row, col)` coordinates.
    pub pattern: Vec<(usize, usize)>,
}

impl Board {
    pub fn compressed(cyl: Cylinder) -> Self {
        let comp = cylinder_compression(&cyl);
        Board { cyl, comp, compressed: true, mode: RowSetMode::Intervals, search_budget: DEFAULT_SEARCH_BUDGET }
    }

    pub fn uncompressed(cyl: Cylinder) -> Self {
        let comp = GraphCompression::identity(cyl.graph());
        Board { cyl, comp, compressed: false, mode: RowSetMode::Intervals, search_budget: DEFAULT_SEARCH_BUDGET }
    }

    pub fn with_mode(mut self, mode: RowSetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn graph(&self) -> &Graph {
        self.cyl.graph()
    }

    pub fn k(&self) -> usize {
        self.cyl.k
    }

    /// `k + c`, the cop count the robber strategy is built against.
    pub fn robber_bound(&self) -> usize {
        self.cyl.k + self.cyl.c
    }

    /// `g_I`; the full width on an uncompressed board.
    pub fn period(&self, rows: &[usize]) -> usize {
        if !self.compressed {
            return self.cyl.width;
        }
        rows.iter().fold(0usize, |g, &i| g.gcd(&self.cyl.moduli[i - 1]))
    }

    /// Row sets of size `1..=max_size`, each sorted, in size-then-lexicographic order.
    pub fn row_sets(&self, max_size: usize) -> Vec<Vec<usize>> {
        let k = self.cyl.k;
        let mut out: Vec<Vec<usize>> = Vec::new();
        match self.mode {
            RowSetMode::Intervals => {
                for s in 1..=max_size.min(k) {
                    let mut level: Vec<Vec<usize>> = (1..=k)
                        .map(|start| {
                            let mut rows: Vec<usize> = (0..s).map(|d| (start - 1 + d) % k + 1).collect();
                            rows.sort_unstable();
                            rows
                        })
                        .collect();
                    level.sort();
                    level.dedup();
                    out.extend(level);
                }
            }
            RowSetMode::AllSubsets => {
                for s in 1..=max_size.min(k) {
                    let mut level: Vec<Vec<usize>> = (1u32..(1 << k))
                        .filter(|m| m.count_ones() as usize == s)
                        .map(|m| (1..=k).filter(|&i| m >> (i - 1) & 1 == 1).collect())
                        .collect();
                    level.sort();
                    out.extend(level);
                }
            }
        }
        out
    }

    pub(crate) fn row_mask(&self, rows: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.cyl.k + 1];
        for &i in rows {
            mask[i] = true;
        }
        mask
    }

    /// Distinct vertices of `w` on rows `rows`.
    pub fn restrict(&self, w: &[Vertex], rows: &[usize]) -> Vec<Vertex> {
        let mask = self.row_mask(rows);
        let mut out: Vec<Vertex> = w.iter().copied().filter(|&v| mask[self.cyl.row(v)]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Indicator of `W_{≡I}`: the `g_I`-periodic copies of `W_I` along each row.
    pub fn periodic_closure(&self, w: &[Vertex], rows: &[usize]) -> Vec<bool> {
        let g = self.period(rows);
        let mut blocked = vec![false; self.graph().num_vertices()];
        for v in self.restrict(w, rows) {
            let (row, col) = self.cyl.coords(v);
            let first = (col - 1) % g + 1;
            for c in (first..=self.cyl.width).step_by(g) {
                blocked[self.cyl.vertex(row, c)] = true;
            }
        }
        blocked
    }

    /// Neighbors of `v` inside rows `mask` and columns `[lo, hi]`, sorted.
    pub(crate) fn strip_neighbors(&self, v: Vertex, mask: &[bool], lo: usize, hi: usize) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .graph()
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| {
                let (r, c) = self.cyl.coords(u);
                mask[r] && c >= lo && c <= hi
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Shortest path in `rows × [lo, hi]` avoiding `blocked`, from column `lo`
    /// to column `hi`; sources and neighbors are tried in (row, col) order.
    pub(crate) fn strip_path(&self, rows: &[usize], blocked: &[bool], lo: usize, hi: usize) -> Option<Vec<Vertex>> {
        let mask = self.row_mask(rows);
        let n = self.graph().num_vertices();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut sorted_rows = rows.to_vec();
        sorted_rows.sort_unstable();
        for &r in &sorted_rows {
            let v = self.cyl.vertex(r, lo);
            if !blocked[v] {
                parent[v] = v;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            if self.cyl.col(v) == hi {
                let mut path = vec![v];
                let mut x = v;
                while parent[x] != x {
                    x = parent[x];
                    path.push(x);
                }
                path.reverse();
                return Some(path);
            }
            for u in self.strip_neighbors(v, &mask, lo, hi) {
                if !blocked[u] && parent[u] == usize::MAX {
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// Whether no I-periodic path from column 1 to the last column avoids
    /// `W_{≡I}`. With `|W_I| < g_I` this is a separator check on the strip;
    /// otherwise one-period patterns are searched exhaustively.
    pub fn is_i_separating(&self, w: &[Vertex], rows: &[usize]) -> Result<bool, GameError> {
        let g = self.period(rows);
        if !self.compressed || self.restrict(w, rows).len() < g {
            let blocked = self.periodic_closure(w, rows);
            return Ok(self.strip_path(rows, &blocked, 1, self.cyl.width).is_none());
        }
        Ok(self.search_pattern(w, rows)?.is_none())
    }

    /// An I-periodic path avoiding `W_{≡I}`, or `None` when `W` is I-separating.
    pub fn find_i_periodic_path(&self, w: &[Vertex], rows: &[usize]) -> Result<Option<PeriodicPath>, GameError> {
        let blocked = self.periodic_closure(w, rows);
        if !self.compressed {
            let path = self.strip_path(rows, &blocked, 1, self.cyl.width);
            return Ok(path.map(|p| PeriodicPath {
                rows: rows.to_vec(),
                period: None,
                pattern: p.iter().map(|&v| self.cyl.coords(v)).collect(),
            }));
        }
        let g = self.period(rows);
        if self.restrict(w, rows).len() < g {
            if let Some(found) = self.good_period_pattern(rows, &blocked, g) {
                return Ok(found);
            }
        }
        self.search_pattern(w, rows)
    }

    /// Pattern built on the lowest free column `b`: a separator BFS across
    /// `[b, b+g]`, cut at its last visit to column `b`, then a vertical walk
    /// inside `I` on column `b+g` back to the starting row. `None` when the
    /// construction does not apply (the good period does not fit, or `I` is
    /// not a row segment); `Some(None)` when the period is separated.
    fn good_period_pattern(&self, rows: &[usize], blocked: &[bool], g: usize) -> Option<Option<PeriodicPath>> {
        let free = |c: usize| rows.iter().all(|&r| !blocked[self.cyl.vertex(r, c)]);
        let b = (1..=self.cyl.width).find(|&c| free(c))?;
        if b + g > self.cyl.width {
            return None;
        }
        let Some(path) = self.strip_path(rows, blocked, b, b + g) else {
            return Some(None);
        };
        let cut = path.iter().rposition(|&v| self.cyl.col(v) == b).unwrap();
        let mut pattern: Vec<(usize, usize)> = path[cut..].iter().map(|&v| self.cyl.coords(v)).collect();
        let start_row = pattern[0].0;
        let end_row = pattern.last().unwrap().0;
        let walk = self.vertical_walk(rows, end_row, start_row)?;
        pattern.extend(walk.into_iter().skip(1).map(|r| (r, b + g)));
        Some(Some(PeriodicPath { rows: rows.to_vec(), period: Some(g), pattern }))
    }

    /// Rows visited walking from `from` to `to` along the column cycle without
    /// leaving `rows`; the shorter admissible direction wins, up first on ties.
    pub(crate) fn vertical_walk(&self, rows: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
        let k = self.cyl.k;
        let mask = self.row_mask(rows);
        let step = |r: usize, up: bool| if up { if r == 1 { k } else { r - 1 } } else if r == k { 1 } else { r + 1 };
        let mut best: Option<Vec<usize>> = None;
        let dirs: &[bool] = if k == 2 { &[true] } else { &[true, false] };
        for &up in dirs {
            let mut walk = vec![from];
            let mut r = from;
            let mut ok = true;
            while r != to {
                r = step(r, up);
                if !mask[r] {
                    ok = false;
                    break;
                }
                walk.push(r);
            }
            if ok && best.as_ref().is_none_or(|b| walk.len() < b.len()) {
                best = Some(walk);
            }
        }
        best
    }

    /// Exhaustive search for a one-period pattern avoiding `W_{≡I}`: a simple
    /// path in `I × [b, b+g]` from `(r, b)` to `(r, b+g)` whose rows on column
    /// `b` and on column `b+g` meet only in `r`, so that its periodic
    /// extension stays simple.
    pub fn search_pattern(&self, w: &[Vertex], rows: &[usize]) -> Result<Option<PeriodicPath>, GameError> {
        let g = self.period(rows);
        let blocked = self.periodic_closure(w, rows);
        let mask = self.row_mask(rows);
        let mut sorted_rows = rows.to_vec();
        sorted_rows.sort_unstable();
        let mut budget = self.search_budget;
        for b in 1..=g {
            if b + g > self.cyl.width {
                break;
            }
            for &r in &sorted_rows {
                let start = self.cyl.vertex(r, b);
                let target = self.cyl.vertex(r, b + g);
                if blocked[start] || blocked[target] {
                    continue;
                }
                let mut search = PatternSearch {
                    board: self,
                    mask: &mask,
                    blocked: &blocked,
                    lo: b,
                    hi: b + g,
                    target,
                    on_path: vec![false; self.graph().num_vertices()],
                    path: vec![start],
                    budget: &mut budget,
                };
                search.on_path[start] = true;
                if search.dfs(start)? {
                    let pattern = search.path.iter().map(|&v| self.cyl.coords(v)).collect();
                    return Ok(Some(PeriodicPath { rows: rows.to_vec(), period: Some(g), pattern }));
                }
            }
        }
        Ok(None)
    }
}

struct PatternSearch<'a> {
    board: &'a Board,
    mask: &'a [bool],
    blocked: &'a [bool],
    lo: usize,
    hi: usize,
    target: Vertex,
    on_path: Vec<bool>,
    path: Vec<Vertex>,
    budget: &'a mut usize,
}

impl PatternSearch<'_> {
    fn junction_ok(&self) -> bool {
        let cyl = &self.board.cyl;
        let row = cyl.row(self.target);
        let left: Vec<usize> = self.path.iter().filter(|&&v| cyl.col(v) == self.lo).map(|&v| cyl.row(v)).collect();
        let right: Vec<usize> = self.path.iter().filter(|&&v| cyl.col(v) == self.hi).map(|&v| cyl.row(v)).collect();
        left.iter().all(|r| *r == row || !right.contains(r))
    }

    fn dfs(&mut self, v: Vertex) -> Result<bool, GameError> {
        if *self.budget == 0 {
            return Err(GameError::SearchBudgetExceeded(self.board.search_budget));
        }
        *self.budget -= 1;
        if v == self.target {
            return Ok(self.junction_ok());
        }
        for u in self.board.strip_neighbors(v, self.mask, self.lo, self.hi) {
            if self.blocked[u] || self.on_path[u] {
                continue;
            }
            self.on_path[u] = true;
            self.path.push(u);
            if self.dfs(u)? {
                return Ok(true);
            }
            self.path.pop();
            self.on_path[u] = false;
        }
        Ok(false)
    }
}

impl PeriodicPath {
    /// The periodic extension as `(row, col)` with possibly out-of-range
    /// columns, covering at least `[1, width]`.
    fn unrolled(&self, width: usize) -> Vec<(usize, i64)> {
        let Some(g) = self.period else {
            return self.pattern.iter().map(|&(r, c)| (r, c as i64)).collect();
        };
        let g = g as i64;
        let b = self.pattern[0].1 as i64;
        let mut j = -((b - 1 + g - 1) / g) - 1;
        let mut out: Vec<(usize, i64)> = Vec::new();
        while b + j * g <= width as i64 + g {
            for (idx, &(r, c)) in self.pattern.iter().enumerate() {
                if idx == 0 && !out.is_empty() {
                    continue;
                }
                out.push((r, c as i64 + j * g));
            }
            j += 1;
        }
        out
    }

    /// The subpath from the first visit of column `a` to the last visit of
    /// column `b` (`a < b`), as vertices. When that subpath leaves the board,
    /// falls back to the subpath from the last visit of a column `≤ a` to the
    /// next visit of a column `≥ b`. Either cut is a compressible move only if
    /// the dropped ends carry no compressed edges; callers validate.
    pub fn truncation(&self, cyl: &Cylinder, a: usize, b: usize) -> Option<Vec<Vertex>> {
        let seq = self.unrolled(cyl.width);
        let (a, b) = (a as i64, b as i64);
        let to_vertices = |part: &[(usize, i64)]| -> Option<Vec<Vertex>> {
            part.iter().map(|&(r, c)| (c >= 1 && c <= cyl.width as i64).then(|| cyl.vertex(r, c as usize))).collect()
        };
        let first = seq.iter().position(|&(_, c)| c == a)?;
        let last = seq.iter().rposition(|&(_, c)| c == b)?;
        if first <= last {
            if let Some(path) = to_vertices(&seq[first..=last]) {
                return Some(path);
            }
        }
        let from = seq.iter().rposition(|&(_, c)| c <= a)?;
        let to = from + seq[from..].iter().position(|&(_, c)| c >= b)?;
        to_vertices(&seq[from..=to])
    }

    /// The truncation spanning the whole graph.
    pub fn full(&self, cyl: &Cylinder) -> Option<Vec<Vertex>> {
        self.truncation(cyl, 1, cyl.width)
    }
}
