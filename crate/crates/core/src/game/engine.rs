//! The G1 → G2 → G3 round loop, transcripts and replay.

use super::{validate_compressible_move, Board, CompressibleMove, GameError, GameState, Phase, RowSetMode};
use crate::graph::{Cylinder, EdgeId, Vertex};
use serde::{Deserialize, Serialize};

/// What a controller sees. `cops` is the position multiset (after G1 once a
/// signal is present); `signal` is set during G2.
pub struct View<'a> {
    pub board: &'a Board,
    pub round: usize,
    pub num_cops: usize,
    pub cops: &'a [Vertex],
    pub signal: Option<Vertex>,
    pub robber: Vertex,
}

impl View<'_> {
    pub fn lifted(&self) -> usize {
        self.num_cops - self.cops.len()
    }
}

/// The cop side's G1 decision: a position to lift (required exactly when no
/// cop is lifted) and the signaled vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopTurn {
    pub lift: Option<Vertex>,
    pub signal: Vertex,
}

pub trait CopController {
    fn name(&self) -> String;
    fn num_cops(&self) -> usize;
    fn turn(&mut self, view: &View) -> Result<CopTurn, GameError>;
    /// Called after the robber's move and before the landing.
    fn observe(&mut self, _view: &View, _mv: &CompressibleMove) -> Result<(), GameError> {
        Ok(())
    }
}

pub trait RobberController {
    fn name(&self) -> String;
    fn start(&mut self, board: &Board) -> Vertex;
    /// `None` when the robber has no move.
    fn respond(&mut self, view: &View) -> Result<Option<CompressibleMove>, GameError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Cops,
    Robber,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A cop landed in the robber's class in this round.
    Capture { round: usize },
    /// The robber had no compressible move in this round.
    RobberStuck { round: usize },
    Survived { rounds: usize },
    Illegal { side: Side, round: usize, reason: String },
    ControllerError { side: Side, round: usize, reason: String },
}

impl Verdict {
    pub fn cops_win(&self) -> bool {
        matches!(
            self,
            Verdict::Capture { .. }
                | Verdict::RobberStuck { .. }
                | Verdict::Illegal { side: Side::Robber, .. }
                | Verdict::ControllerError { side: Side::Robber, .. }
        )
    }

    /// Rounds completed without the cops winning.
    pub fn survived_rounds(&self) -> usize {
        match self {
            Verdict::Survived { rounds } => *rounds,
            Verdict::Capture { round }
            | Verdict::RobberStuck { round }
            | Verdict::Illegal { round, .. }
            | Verdict::ControllerError { round, .. } => round - 1,
        }
    }

    /// The round in which the cops won, if they did.
    pub fn winning_round(&self) -> Option<usize> {
        self.cops_win().then(|| self.survived_rounds() + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub lifted: Option<(usize, usize)>,
    pub signal: (usize, usize),
    /// Sorted positions after the landing.
    pub cop_positions: Vec<(usize, usize)>,
    /// Robber position after the move.
    pub robber: (usize, usize),
    pub move_edges: Vec<EdgeId>,
}

/// Enough to rebuild the board of a transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardSpec {
    pub k: usize,
    pub c: usize,
    pub moduli: Vec<usize>,
    pub middle: usize,
    pub ear: usize,
    pub compressed: bool,
    pub mode: RowSetMode,
}

impl BoardSpec {
    pub fn of(board: &Board) -> Self {
        let cyl = &board.cyl;
        BoardSpec {
            k: cyl.k,
            c: cyl.c,
            moduli: cyl.moduli.clone(),
            middle: cyl.middle,
            ear: cyl.ear,
            compressed: board.compressed,
            mode: board.mode,
        }
    }

    pub fn build(&self) -> Result<Board, GameError> {
        let cyl = Cylinder::new(self.k, self.c, self.moduli.clone(), self.middle, self.ear)
            .map_err(|e| GameError::Transcript(e.to_string()))?;
        let board = if self.compressed { Board::compressed(cyl) } else { Board::uncompressed(cyl) };
        Ok(board.with_mode(self.mode))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub board: BoardSpec,
    pub num_cops: usize,
    pub cops: String,
    pub robber_strategy: String,
    pub start: (usize, usize),
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
}

pub fn run_match(
    board: &Board,
    cops: &mut dyn CopController,
    robber: &mut dyn RobberController,
    max_rounds: usize,
) -> Transcript {
    let cyl = &board.cyl;
    let coords = |v: Vertex| cyl.coords(v);
    let num_cops = cops.num_cops();
    let start = robber.start(board);
    let mut state = GameState::new(num_cops, start);
    let mut rounds = Vec::new();
    let verdict = 'game: loop {
        let round = state.round;
        if round > max_rounds {
            break Verdict::Survived { rounds: max_rounds };
        }
        state.phase = Phase::AwaitingSignal;
        let view = View { board, round, num_cops, cops: &state.cop_positions, signal: None, robber: state.robber };
        let turn = match cops.turn(&view) {
            Ok(t) => t,
            Err(e) => break Verdict::ControllerError { side: Side::Cops, round, reason: e.to_string() },
        };
        let illegal = |reason: String| Verdict::Illegal { side: Side::Cops, round, reason };
        match (state.lifted(), turn.lift) {
            (0, None) => break illegal("no cop is lifted and none was picked up".into()),
            (0, Some(p)) => match state.cop_positions.iter().position(|&x| x == p) {
                Some(i) => {
                    state.cop_positions.remove(i);
                }
                None => break illegal(format!("no cop at {:?}", coords(p))),
            },
            (_, Some(_)) => break illegal("lifted a cop while one is already lifted".into()),
            (_, None) => {}
        }
        if turn.signal >= board.graph().num_vertices() {
            break illegal(format!("signal {} is not a vertex", turn.signal));
        }
        state.phase = Phase::AwaitingMove;
        let view = View {
            board,
            round,
            num_cops,
            cops: &state.cop_positions,
            signal: Some(turn.signal),
            robber: state.robber,
        };
        let mv = match robber.respond(&view) {
            Ok(Some(mv)) => mv,
            Ok(None) => {
                rounds.push(record(board, round, &turn, &state.cop_positions, state.robber, &[]));
                break Verdict::RobberStuck { round };
            }
            Err(e) => break Verdict::ControllerError { side: Side::Robber, round, reason: e.to_string() },
        };
        if mv.from != state.robber {
            break Verdict::Illegal { side: Side::Robber, round, reason: "move does not start at the robber".into() };
        }
        if let Err(v) = validate_compressible_move(board.graph(), &board.comp, &state.cop_positions, &mv) {
            break Verdict::Illegal { side: Side::Robber, round, reason: v.to_string() };
        }
        if let Err(e) = cops.observe(&view, &mv) {
            break 'game Verdict::ControllerError { side: Side::Cops, round, reason: e.to_string() };
        }
        state.phase = Phase::AwaitingLanding;
        state.robber = mv.to;
        state.cop_positions.push(turn.signal);
        state.cop_positions.sort_unstable();
        rounds.push(record(board, round, &turn, &state.cop_positions, state.robber, &mv.edges));
        if board.comp.equivalent(turn.signal, state.robber) {
            break Verdict::Capture { round };
        }
        state.round += 1;
    };
    Transcript {
        board: BoardSpec::of(board),
        num_cops,
        cops: cops.name(),
        robber_strategy: robber.name(),
        start: coords(start),
        rounds,
        verdict,
    }
}

fn record(board: &Board, round: usize, turn: &CopTurn, cops: &[Vertex], robber: Vertex, edges: &[EdgeId]) -> RoundRecord {
    let cyl = &board.cyl;
    RoundRecord {
        round,
        lifted: turn.lift.map(|v| cyl.coords(v)),
        signal: cyl.coords(turn.signal),
        cop_positions: cops.iter().map(|&v| cyl.coords(v)).collect(),
        robber: cyl.coords(robber),
        move_edges: edges.to_vec(),
    }
}

/// Replays the recorded rounds through the referee and returns the verdict
/// they imply. Controller errors and a claimed stuck robber are taken from
/// the transcript as recorded.
pub fn replay(transcript: &Transcript) -> Result<Verdict, GameError> {
    let board = transcript.board.build()?;
    let cyl = &board.cyl;
    let bad = |msg: String| GameError::Transcript(msg);
    let vertex = |(r, c): (usize, usize)| -> Result<Vertex, GameError> {
        if (1..=cyl.k).contains(&r) && (1..=cyl.width).contains(&c) {
            Ok(cyl.vertex(r, c))
        } else {
            Err(bad(format!("({r},{c}) is off the board")))
        }
    };
    let mut cops: Vec<Vertex> = Vec::new();
    let mut robber = vertex(transcript.start)?;
    for (idx, rec) in transcript.rounds.iter().enumerate() {
        let round = idx + 1;
        if rec.round != round {
            return Err(bad(format!("round {} recorded at position {round}", rec.round)));
        }
        let illegal = |side: Side, reason: String| Ok(Verdict::Illegal { side, round, reason });
        let lifted = transcript.num_cops - cops.len();
        match (lifted, rec.lifted) {
            (0, Some(p)) => {
                let p = vertex(p)?;
                match cops.iter().position(|&x| x == p) {
                    Some(i) => {
                        cops.remove(i);
                    }
                    None => return illegal(Side::Cops, "lift from an empty vertex".into()),
                }
            }
            (0, None) => return illegal(Side::Cops, "no cop is lifted and none was picked up".into()),
            (_, Some(_)) => return illegal(Side::Cops, "lifted a cop while one is already lifted".into()),
            (_, None) => {}
        }
        let signal = vertex(rec.signal)?;
        let last = idx + 1 == transcript.rounds.len();
        if rec.move_edges.is_empty() && last && matches!(transcript.verdict, Verdict::RobberStuck { .. }) {
            return Ok(Verdict::RobberStuck { round });
        }
        let to = vertex(rec.robber)?;
        let mv = CompressibleMove::new(rec.move_edges.clone(), robber, to);
        if let Err(v) = validate_compressible_move(board.graph(), &board.comp, &cops, &mv) {
            return illegal(Side::Robber, v.to_string());
        }
        robber = to;
        cops.push(signal);
        cops.sort_unstable();
        let listed: Result<Vec<Vertex>, GameError> = rec.cop_positions.iter().map(|&p| vertex(p)).collect();
        if listed? != cops {
            return Err(bad(format!("cop positions in round {round} do not match the replay")));
        }
        if board.comp.equivalent(signal, robber) {
            return Ok(Verdict::Capture { round });
        }
    }
    match &transcript.verdict {
        v @ (Verdict::ControllerError { .. } | Verdict::Illegal { .. }) => Ok(v.clone()),
        _ => Ok(Verdict::Survived { rounds: transcript.rounds.len() }),
    }
}
