//! Ehrenfeucht-Fraïssé games for FO, MSO, FO(TC¹) and FO(LFP¹) on finite
//! frames with parameters.
//!
//! A [`GameState`] walks through the sub-phases of one round at a time, so
//! the same machinery drives both the exhaustive [`Solver`] and interactive
//! play. A round is one complete Spoiler/Duplicator exchange; the winning
//! condition is checked whenever a round completes.

mod moves;
mod solver;

pub use moves::Move;
pub use solver::{n_equivalent, optimal_move, winner, Solver, DEFAULT_BUDGET};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::structure::{frame_to_json, ElemSet, Frame};
use crate::syntax::LogicId;

/// Largest frame on which games with set moves are solved.
pub const MAX_SET_GAME_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid game configuration: {0}")]
    Config(String),
    #[error("the game is over")]
    Finished,
    #[error("illegal move: {0}")]
    Illegal(String),
    #[error("cannot parse move `{0}`")]
    Parse(String),
    #[error("search budget of {0} positions exceeded")]
    Budget(usize),
    #[error("search time limit of {0:?} exceeded")]
    Timeout(std::time::Duration),
    #[error("no legal move")]
    NoMove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Spoiler,
    Duplicator,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Spoiler => Player::Duplicator,
            Player::Duplicator => Player::Spoiler,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Spoiler => "spoiler",
            Player::Duplicator => "duplicator",
        })
    }
}

/// A frame together with its initial element and set parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFrame {
    pub frame: Frame,
    pub elems: Vec<usize>,
    pub sets: Vec<ElemSet>,
}

impl ParamFrame {
    pub fn new(frame: Frame) -> Self {
        ParamFrame {
            frame,
            elems: Vec::new(),
            sets: Vec::new(),
        }
    }

    pub fn with_elems(mut self, elems: &[usize]) -> Self {
        self.elems = elems.to_vec();
        self
    }

    pub fn with_sets(mut self, sets: &[ElemSet]) -> Self {
        self.sets = sets.to_vec();
        self
    }
}

impl From<Frame> for ParamFrame {
    fn from(frame: Frame) -> Self {
        ParamFrame::new(frame)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub logic: LogicId,
    pub rounds: usize,
    pub left: ParamFrame,
    pub right: ParamFrame,
}

impl GameConfig {
    pub fn new(
        logic: LogicId,
        rounds: usize,
        left: impl Into<ParamFrame>,
        right: impl Into<ParamFrame>,
    ) -> Result<Self, GameError> {
        let cfg = GameConfig {
            logic,
            rounds,
            left: left.into(),
            right: right.into(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn side(&self, side: Side) -> &ParamFrame {
        match side {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    pub fn frame(&self, side: Side) -> &Frame {
        &self.side(side).frame
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: String| Err(GameError::Config(m));
        if self.left.frame.vocab() != self.right.frame.vocab() {
            return bad("the two frames have different vocabularies".into());
        }
        if self.left.elems.len() != self.right.elems.len() {
            return bad("element parameter lists differ in length".into());
        }
        if self.left.sets.len() != self.right.sets.len() {
            return bad("set parameter lists differ in length".into());
        }
        if !self.left.sets.is_empty() && matches!(self.logic, LogicId::Fo | LogicId::Fotc1) {
            return bad(format!("{} games take element parameters only", self.logic));
        }
        for side in [Side::L, Side::R] {
            let p = self.side(side);
            let n = p.frame.size();
            if let Some(&e) = p.elems.iter().find(|&&e| e >= n) {
                return bad(format!("parameter {e} out of range on side {side}"));
            }
            if let Some(s) = p
                .sets
                .iter()
                .find(|s| !s.is_subset(p.frame.domain()) || !p.frame.is_admissible(**s))
            {
                return bad(format!(
                    "set parameter {s} on side {side} is not admissible"
                ));
            }
            if self.logic.has_set_moves() && n > MAX_SET_GAME_SIZE {
                return bad(format!(
                    "{} games are limited to frames of size {MAX_SET_GAME_SIZE}, side {side} has {n}",
                    self.logic
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let side = |p: &ParamFrame| json!({"frame": frame_to_json(&p.frame), "elems": p.elems, "sets": p.sets});
        json!({
            "logic": self.logic,
            "rounds": self.rounds,
            "left": side(&self.left),
            "right": side(&self.right),
        })
    }
}

/// Where the current round stands. `side` fields name the frame Spoiler
/// picked in; the pebble indices `i`, `j` of a TC move index
/// [`GameState::elem_pebbles`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Phase {
    AwaitSpoiler,
    PointReply {
        side: Side,
        elem: usize,
    },
    SetReply {
        side: Side,
        set: ElemSet,
    },
    TcSetReply {
        side: Side,
        i: usize,
        j: usize,
        set: ElemSet,
    },
    /// Spoiler picks a pair in `reply`, on the other side.
    TcSpoilerPair {
        side: Side,
        i: usize,
        j: usize,
        set: ElemSet,
        reply: ElemSet,
    },
    TcDupPair {
        side: Side,
        i: usize,
        j: usize,
        set: ElemSet,
        reply: ElemSet,
        pair: (usize, usize),
    },
    /// Spoiler chose `set` in the right frame.
    LfpReply {
        set: ElemSet,
    },
    LfpSpoilerPoint {
        set: ElemSet,
        reply: ElemSet,
    },
    LfpDupPoint {
        set: ElemSet,
        reply: ElemSet,
        elem: usize,
    },
    /// Spoiler chose `set` in the left frame.
    GfpReply {
        set: ElemSet,
    },
    GfpSpoilerPoint {
        set: ElemSet,
        reply: ElemSet,
    },
    GfpDupPoint {
        set: ElemSet,
        reply: ElemSet,
        elem: usize,
    },
}

impl Phase {
    pub fn mover(&self) -> Player {
        match self {
            Phase::AwaitSpoiler
            | Phase::TcSpoilerPair { .. }
            | Phase::LfpSpoilerPoint { .. }
            | Phase::GfpSpoilerPoint { .. } => Player::Spoiler,
            _ => Player::Duplicator,
        }
    }

    /// What the mover has to do, in the notation of the game rules.
    pub fn describe(&self) -> String {
        let m = |s: Side| if s == Side::L { ("a", "A") } else { ("b", "B") };
        match self {
            Phase::AwaitSpoiler => "Spoiler chooses a move".into(),
            Phase::PointReply { side, .. } => format!("pick {}_{{s+1}}", m(side.other()).0),
            Phase::SetReply { side, .. } => format!("pick {} admissible", m(side.other()).1),
            Phase::TcSetReply { side, .. } => {
                let (e, s) = m(side.other());
                format!("pick {s} with {e}_i ∈ {s} and {e}_j ∉ {s}")
            }
            Phase::TcSpoilerPair { side, .. } => {
                let (e, s) = m(side.other());
                format!("pick {e}_{{s+1}} ∈ {s}, {e}_{{s+2}} ∉ {s}")
            }
            Phase::TcDupPair { side, .. } => {
                let (e, s) = m(*side);
                format!("pick {e}_{{s+1}} ∈ {s}, {e}_{{s+2}} ∉ {s}")
            }
            Phase::LfpReply { .. } => "pick A_{r+1} ∈ A_M \\ {dom(M)}".into(),
            Phase::LfpSpoilerPoint { .. } => "pick a_{s+1} ∉ A_{r+1}".into(),
            Phase::LfpDupPoint { .. } => "pick b_{s+1} ∉ B_{r+1}".into(),
            Phase::GfpReply { .. } => "pick B_{r+1} ∈ A_N \\ {dom(N)} with B_{r+1} ≠ ∅".into(),
            Phase::GfpSpoilerPoint { .. } => "pick b_{s+1} ∈ B_{r+1}".into(),
            Phase::GfpDupPoint { .. } => "pick a_{s+1} ∈ A_{r+1}".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    config: Arc<GameConfig>,
    pub rounds_left: usize,
    /// Pairs (left element, right element), parameters first.
    pub elem_pebbles: Vec<(usize, usize)>,
    pub set_pebbles: Vec<(ElemSet, ElemSet)>,
    pub phase: Phase,
}

impl GameState {
    pub fn new(config: impl Into<Arc<GameConfig>>) -> Self {
        let config = config.into();
        let elem_pebbles = config
            .left
            .elems
            .iter()
            .copied()
            .zip(config.right.elems.iter().copied())
            .collect();
        let set_pebbles = config
            .left
            .sets
            .iter()
            .copied()
            .zip(config.right.sets.iter().copied())
            .collect();
        GameState {
            rounds_left: config.rounds,
            config,
            elem_pebbles,
            set_pebbles,
            phase: Phase::AwaitSpoiler,
        }
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn config_arc(&self) -> &Arc<GameConfig> {
        &self.config
    }

    pub fn logic(&self) -> LogicId {
        self.config.logic
    }

    pub fn mover(&self) -> Player {
        self.phase.mover()
    }

    pub fn elems(&self, side: Side) -> Vec<usize> {
        self.elem_pebbles
            .iter()
            .map(|&(a, b)| if side == Side::L { a } else { b })
            .collect()
    }

    pub fn sets(&self, side: Side) -> Vec<ElemSet> {
        self.set_pebbles
            .iter()
            .map(|&(a, b)| if side == Side::L { a } else { b })
            .collect()
    }

    /// Partial isomorphism on the element pebbles; set pebbles must agree
    /// on membership both ways, or one way (left to right) for FO(LFP¹).
    pub fn winning_condition(&self) -> bool {
        let l = atomic_type(
            self.config.frame(Side::L),
            &self.elems(Side::L),
            &self.sets(Side::L),
        );
        let r = atomic_type(
            self.config.frame(Side::R),
            &self.elems(Side::R),
            &self.sets(Side::R),
        );
        if l.base != r.base {
            return false;
        }
        if self.config.logic == LogicId::Folfp1 {
            l.membership_implies(&r)
        } else {
            l.membership == r.membership
        }
    }

    /// The winner if the game is decided in this state.
    pub fn outcome(&self) -> Option<Player> {
        if self.phase == Phase::AwaitSpoiler {
            if !self.winning_condition() {
                return Some(Player::Spoiler);
            }
            if self.rounds_left == 0 {
                return Some(Player::Duplicator);
            }
            return None;
        }
        if self.legal_moves().is_empty() {
            return Some(self.mover().other());
        }
        None
    }

    pub fn is_finished(&self) -> bool {
        self.outcome().is_some()
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        if self.phase == Phase::AwaitSpoiler && (self.rounds_left == 0 || !self.winning_condition())
        {
            return Vec::new();
        }
        let mut out: Vec<Move> = moves::candidates(self)
            .into_iter()
            .filter(|m| moves::check(self, m).is_ok())
            .collect();
        out.sort_by_cached_key(|m| m.to_string());
        out
    }

    pub fn check_move(&self, m: &Move) -> Result<(), GameError> {
        if self.phase == Phase::AwaitSpoiler && self.outcome().is_some() {
            return Err(GameError::Finished);
        }
        moves::check(self, m).map_err(GameError::Illegal)
    }

    pub fn apply_move(&self, m: &Move) -> Result<GameState, GameError> {
        self.check_move(m)?;
        Ok(moves::apply(self, m))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config.to_json(),
            "rounds_left": self.rounds_left,
            "elem_pebbles": self.elem_pebbles,
            "set_pebbles": self.set_pebbles,
            "phase": self.phase,
        })
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).expect("state serializes");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}

pub(crate) struct AtomicType {
    /// Relations and equalities among element pebbles.
    pub base: Vec<u64>,
    /// Bit `i * sets + j` says element pebble `i` lies in set pebble `j`.
    pub membership: Vec<u64>,
}

impl AtomicType {
    pub fn membership_implies(&self, other: &AtomicType) -> bool {
        self.membership
            .iter()
            .zip(&other.membership)
            .all(|(a, b)| a & !b == 0)
    }
}

#[derive(Default)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if b {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }
}

pub(crate) fn atomic_type(frame: &Frame, elems: &[usize], sets: &[ElemSet]) -> AtomicType {
    let s = elems.len();
    let mut base = Bits::default();
    let mut tuple = Vec::new();
    for (idx, sym) in frame.vocab().symbols().iter().enumerate() {
        let rel = frame.relation_at(idx);
        let total = s.pow(sym.arity as u32);
        for code in 0..total {
            tuple.clear();
            let mut c = code;
            for _ in 0..sym.arity {
                tuple.push(elems[c % s]);
                c /= s;
            }
            base.push(rel.contains(&tuple));
        }
    }
    for i in 0..s {
        for j in i + 1..s {
            base.push(elems[i] == elems[j]);
        }
    }
    let mut membership = Bits::default();
    for &e in elems {
        for set in sets {
            membership.push(set.contains(e));
        }
    }
    AtomicType {
        base: base.words,
        membership: membership.words,
    }
}
