//! Cop controllers: lockstep marching, refutation walking, random and chaser.

use super::{Board, CompressibleMove, CopController, CopTurn, GameError, View};
use crate::cnf::{Cnf, Var};
use crate::graph::Vertex;
use crate::resolution::{check_refutation, eliminate_weakening, ResolutionProof, StepKind};
use crate::tseitin::TseitinInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// A position of `cops` whose multiplicity exceeds its multiplicity in `keep`.
fn surplus(cops: &[Vertex], keep: &[Vertex]) -> Option<Vertex> {
    let mut left: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &v in keep {
        *left.entry(v).or_default() += 1;
    }
    cops.iter().copied().find(|v| match left.get_mut(v) {
        Some(n) if *n > 0 => {
            *n -= 1;
            false
        }
        _ => true,
    })
}

/// `k + 1` cops: fill the middle column, then shift the full column one step
/// toward the robber by a staircase, so that a vertex separator stays on the
/// board while a cop is in the air.
#[derive(Clone, Debug)]
pub struct LockstepCops {
    k: usize,
    width: usize,
    /// Column currently held (building: the middle column).
    col: usize,
    /// Next row to place.
    row: usize,
    building: bool,
    dir: isize,
}

impl LockstepCops {
    pub fn new(board: &Board) -> Self {
        let cyl = &board.cyl;
        LockstepCops { k: cyl.k, width: cyl.width, col: cyl.width.div_ceil(2), row: 1, building: true, dir: 0 }
    }

    fn keep(&self, board: &Board, target: usize) -> Vec<Vertex> {
        let cyl = &board.cyl;
        (1..=self.k).map(|i| if i < self.row { cyl.vertex(i, target) } else { cyl.vertex(i, self.col) }).collect()
    }
}

impl CopController for LockstepCops {
    fn name(&self) -> String {
        "lockstep".into()
    }

    fn num_cops(&self) -> usize {
        self.k + 1
    }

    fn turn(&mut self, view: &View) -> Result<CopTurn, GameError> {
        let cyl = &view.board.cyl;
        if self.building {
            let signal = cyl.vertex(self.row, self.col);
            self.row += 1;
            if self.row > self.k {
                self.building = false;
                self.row = 1;
            }
            let lift = (view.lifted() == 0).then(|| view.cops[0]);
            return Ok(CopTurn { lift, signal });
        }
        if self.row == 1 {
            self.dir = (cyl.col(view.robber) as isize - self.col as isize).signum();
        }
        let target = self.col as isize + self.dir;
        if self.dir == 0 || target < 1 || target > self.width as isize {
            let keep = self.keep(view.board, self.col);
            let lift = (view.lifted() == 0).then(|| surplus(view.cops, &keep).unwrap_or(view.cops[0]));
            return Ok(CopTurn { lift, signal: view.robber });
        }
        let target = target as usize;
        let keep = self.keep(view.board, target);
        let lift = (view.lifted() == 0).then(|| surplus(view.cops, &keep).unwrap_or(view.cops[0]));
        let signal = cyl.vertex(self.row, target);
        self.row += 1;
        if self.row > self.k {
            self.col = target;
            self.row = 1;
        }
        Ok(CopTurn { lift, signal })
    }
}

/// Walks a weakening-free refutation of the board's Tseitin formula from the
/// empty clause to an axiom. Each query signals an endpoint of the pivot's
/// edges; the cop landing there guards the variable while it stays in the
/// current clause. The total assignment `alpha` tracks the robber: it
/// falsifies exactly the parity constraint of the robber's class.
///
/// In strict mode any broken invariant is an error. Otherwise (too few cops)
/// the cops drop guards as needed and restart at the root once the current
/// clause is no longer falsified.
#[derive(Clone, Debug)]
pub struct RefutationCops {
    proof: ResolutionProof,
    num_cops: usize,
    strict: bool,
    charge: Vec<bool>,
    node: usize,
    alpha: Vec<bool>,
    guards: BTreeMap<Var, Vertex>,
    pending: Option<(Var, Vertex)>,
    pub width: usize,
    pub depth: usize,
    pub restarts: usize,
}

impl RefutationCops {
    pub fn new(board: &Board, cnf: &Cnf, proof: &ResolutionProof, num_cops: usize, strict: bool) -> Result<Self, GameError> {
        if cnf.num_vars as usize != board.comp.num_edge_classes() {
            return Err(GameError::Setup(format!(
                "formula has {} variables, board has {} edge classes",
                cnf.num_vars,
                board.comp.num_edge_classes()
            )));
        }
        let proof = eliminate_weakening(proof);
        let metrics = check_refutation(cnf, &proof).map_err(|e| GameError::Setup(e.to_string()))?;
        if strict && num_cops < metrics.width + 1 {
            return Err(GameError::Setup(format!("width {} needs {} cops, got {num_cops}", metrics.width, metrics.width + 1)));
        }
        Ok(RefutationCops {
            node: proof.len() - 1,
            charge: TseitinInstance::cylinder(&board.cyl).charge,
            alpha: vec![false; cnf.num_vars as usize + 1],
            guards: BTreeMap::new(),
            pending: None,
            width: metrics.width,
            depth: metrics.depth,
            restarts: 0,
            proof,
            num_cops,
            strict,
        })
    }

    fn root(&self) -> usize {
        self.proof.len() - 1
    }

    fn falsified(&self, v: usize) -> bool {
        self.proof.clause(v).lits().iter().all(|l| self.alpha[l.var() as usize] != l.is_positive())
    }

    /// Vertices whose parity constraint `alpha` violates.
    fn violated(&self, board: &Board) -> Vec<Vertex> {
        let g = board.graph();
        (0..g.num_vertices())
            .filter(|&v| {
                let sum = g.incident(v).iter().filter(|&&e| self.alpha[board.comp.edge_class(e) + 1]).count();
                (sum % 2 == 1) != self.charge[v]
            })
            .collect()
    }

    fn broken(&self, round: usize, reason: String) -> GameError {
        GameError::InvariantBroken { round, reason }
    }

    fn signal_for(board: &Board, x: Var) -> Vertex {
        let comp = &board.comp;
        comp.edge_class_members(x as usize - 1)
            .iter()
            .map(|&e| {
                let (a, b) = board.graph().endpoints(e);
                a.min(b)
            })
            .min()
            .expect("edge classes are non-empty")
    }
}

impl CopController for RefutationCops {
    fn name(&self) -> String {
        if self.strict { "refutation".into() } else { "refutation-budgeted".into() }
    }

    fn num_cops(&self) -> usize {
        self.num_cops
    }

    fn turn(&mut self, view: &View) -> Result<CopTurn, GameError> {
        let board = view.board;
        let mut robber_class = board.comp.class_of(view.robber).to_vec();
        robber_class.sort_unstable();
        let violated = self.violated(board);
        if violated != robber_class {
            return Err(self.broken(view.round, format!("assignment violates {violated:?}, robber class is {robber_class:?}")));
        }
        if !self.falsified(self.node) {
            if self.strict {
                return Err(self.broken(view.round, "current clause is satisfied".into()));
            }
            self.node = self.root();
            self.guards.clear();
            self.restarts += 1;
        }
        let lift = if view.lifted() == 0 {
            loop {
                let keep: Vec<Vertex> = {
                    let mut k: Vec<Vertex> = self.guards.values().copied().collect();
                    k.sort_unstable();
                    k.dedup();
                    k
                };
                if let Some(p) = surplus(view.cops, &keep) {
                    break Some(p);
                }
                if self.strict {
                    return Err(self.broken(view.round, "every cop guards a variable".into()));
                }
                let (&x, _) = self.guards.iter().next().expect("more cops than guards when none are kept");
                self.guards.remove(&x);
            }
        } else {
            None
        };
        match self.proof.steps[self.node].kind {
            StepKind::Resolve(_, _, x) => {
                let signal = Self::signal_for(board, x);
                self.pending = Some((x, signal));
                Ok(CopTurn { lift, signal })
            }
            _ => {
                self.pending = None;
                Ok(CopTurn { lift, signal: view.robber })
            }
        }
    }

    fn observe(&mut self, view: &View, mv: &CompressibleMove) -> Result<(), GameError> {
        let comp = &view.board.comp;
        let mut classes: Vec<usize> = mv.edges.iter().map(|&e| comp.edge_class(e)).collect();
        classes.sort_unstable();
        classes.dedup();
        for c in classes {
            self.alpha[c + 1] ^= true;
        }
        if let Some((x, signal)) = self.pending.take() {
            let StepKind::Resolve(a, b, _) = self.proof.steps[self.node].kind else { unreachable!() };
            self.node = if self.alpha[x as usize] { b } else { a };
            self.guards.insert(x, signal);
            let clause = self.proof.clause(self.node);
            self.guards.retain(|&y, _| clause.lit_of(y).is_some());
        }
        Ok(())
    }
}

/// Lifts a uniformly random cop when required and signals a uniformly
/// random vertex.
#[derive(Clone, Debug)]
pub struct RandomCops {
    num_cops: usize,
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomCops {
    pub fn new(num_cops: usize, seed: u64) -> Self {
        RandomCops { num_cops, seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl CopController for RandomCops {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn num_cops(&self) -> usize {
        self.num_cops
    }

    fn turn(&mut self, view: &View) -> Result<CopTurn, GameError> {
        let lift = (view.lifted() == 0).then(|| view.cops[self.rng.gen_range(0..view.cops.len())]);
        let signal = self.rng.gen_range(0..view.board.graph().num_vertices());
        Ok(CopTurn { lift, signal })
    }
}

/// Signals the robber's vertex and lifts the cop farthest from it by column.
#[derive(Clone, Debug)]
pub struct ChaserCops {
    num_cops: usize,
}

impl ChaserCops {
    pub fn new(num_cops: usize) -> Self {
        ChaserCops { num_cops }
    }
}

impl CopController for ChaserCops {
    fn name(&self) -> String {
        "chaser".into()
    }

    fn num_cops(&self) -> usize {
        self.num_cops
    }

    fn turn(&mut self, view: &View) -> Result<CopTurn, GameError> {
        let cyl = &view.board.cyl;
        let rc = cyl.col(view.robber);
        let lift = (view.lifted() == 0)
            .then(|| *view.cops.iter().max_by_key(|&&v| (cyl.col(v).abs_diff(rc), v)).expect("a cop is on the board"));
        Ok(CopTurn { lift, signal: view.robber })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{run_match, PaperRobber, RandomRobber};
    use crate::graph::{cylinder_compression, Cylinder, GraphCompression};
    use crate::resolution::small_width_refutation;
    use crate::tseitin::cylinder_tseitin;

    #[test]
    fn surplus_respects_multiplicity() {
        assert_eq!(surplus(&[1, 1, 2], &[1, 2]), Some(1));
        assert_eq!(surplus(&[1, 2], &[1, 2]), None);
        assert_eq!(surplus(&[3, 1], &[1]), Some(3));
    }

    #[test]
    fn lockstep_wins_uncompressed() {
        let cyl = Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap();
        let board = Board::uncompressed(cyl);
        let bound = 3 * board.cyl.width;
        for seed in 0..20 {
            let t = run_match(&board, &mut LockstepCops::new(&board), &mut RandomRobber::new(seed), bound);
            assert!(t.verdict.cops_win(), "seed {seed}: {:?}", t.verdict);
        }
    }

    #[test]
    fn refutation_cops_win_within_depth() {
        let cyl = Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap();
        let comp = cylinder_compression(&cyl);
        let cnf = cylinder_tseitin(&cyl, &comp);
        let proof = small_width_refutation(&cyl, &comp, &cnf).unwrap();
        let board = Board::compressed(cyl);
        let mut cops = RefutationCops::new(&board, &cnf, &proof, 0, false).unwrap();
        let n = cops.width + 1;
        cops.num_cops = n;
        let depth = cops.depth;
        let t = run_match(&board, &mut cops, &mut PaperRobber::new(), depth + 1);
        assert!(t.verdict.cops_win(), "{:?}", t.verdict);
        assert_eq!(cops.restarts, 0);
    }

    #[test]
    fn strict_mode_rejects_too_few_cops() {
        let cyl = Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap();
        let id = GraphCompression::identity(cyl.graph());
        let cnf = cylinder_tseitin(&cyl, &id);
        let proof = small_width_refutation(&cyl, &id, &cnf).unwrap();
        let board = Board::uncompressed(cyl);
        assert!(matches!(RefutationCops::new(&board, &cnf, &proof, 2, true), Err(GameError::Setup(_))));
    }
}
