use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GameError, GameState, Phase, Side};
use crate::structure::ElemSet;
use crate::syntax::LogicId;

/// One pick by either player. Replies reuse the constructors: Duplicator
/// answers a point with `Point`, a set or TC set with `Set`, a fixpoint set
/// with the same `Lfp`/`Gfp` tag, and a TC pair with `TcPair`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Move {
    Point {
        side: Side,
        elem: usize,
    },
    Set {
        side: Side,
        set: ElemSet,
    },
    TcInit {
        side: Side,
        i: usize,
        j: usize,
        set: ElemSet,
    },
    TcPair(usize, usize),
    Lfp(ElemSet),
    Gfp(ElemSet),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Point { side, elem } => write!(f, "pt {side} {elem}"),
            Move::Set { side, set } => write!(f, "set {side} {set}"),
            Move::TcInit { side, i, j, set } => write!(f, "tc {side} i={i} j={j} {set}"),
            Move::TcPair(a, b) => write!(f, "tcpair {a} {b}"),
            Move::Lfp(set) => write!(f, "lfp {set}"),
            Move::Gfp(set) => write!(f, "gfp {set}"),
        }
    }
}

impl FromStr for Move {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Move, GameError> {
        let err = || GameError::Parse(s.to_string());
        let text = s.trim();
        let (head, rest) = text.split_once(char::is_whitespace).ok_or_else(err)?;
        let rest = rest.trim();
        let side = |t: &str| match t {
            "L" | "l" => Ok(Side::L),
            "R" | "r" => Ok(Side::R),
            _ => Err(err()),
        };
        let num = |t: &str| t.parse::<usize>().map_err(|_| err());
        let set = |t: &str| {
            let t = t.trim();
            if !(t.starts_with('{') && t.ends_with('}')) {
                return Err(err());
            }
            ElemSet::parse(t).map_err(|_| err())
        };
        match head {
            "pt" => {
                let (sd, e) = rest.split_once(char::is_whitespace).ok_or_else(err)?;
                Ok(Move::Point {
                    side: side(sd)?,
                    elem: num(e.trim())?,
                })
            }
            "set" => {
                let (sd, st) = rest.split_once(char::is_whitespace).ok_or_else(err)?;
                Ok(Move::Set {
                    side: side(sd)?,
                    set: set(st)?,
                })
            }
            "tc" => {
                let mut parts = rest.splitn(4, char::is_whitespace);
                let sd = side(parts.next().ok_or_else(err)?)?;
                let i = parts
                    .next()
                    .and_then(|p| p.strip_prefix("i="))
                    .ok_or_else(err)?;
                let j = parts
                    .next()
                    .and_then(|p| p.strip_prefix("j="))
                    .ok_or_else(err)?;
                let st = parts.next().ok_or_else(err)?;
                Ok(Move::TcInit {
                    side: sd,
                    i: num(i)?,
                    j: num(j)?,
                    set: set(st)?,
                })
            }
            "tcpair" => {
                let (a, b) = rest.split_once(char::is_whitespace).ok_or_else(err)?;
                Ok(Move::TcPair(num(a)?, num(b.trim())?))
            }
            "lfp" => Ok(Move::Lfp(set(rest)?)),
            "gfp" => Ok(Move::Gfp(set(rest)?)),
            _ => Err(err()),
        }
    }
}

impl From<Move> for String {
    fn from(m: Move) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Move {
    type Error = GameError;

    fn try_from(s: String) -> Result<Move, GameError> {
        s.parse()
    }
}

/// Element, set and structure letters used in rule texts.
fn letters(side: Side) -> (&'static str, &'static str, &'static str) {
    match side {
        Side::L => ("a", "A", "M"),
        Side::R => ("b", "B", "N"),
    }
}

fn family(s: &GameState, side: Side) -> Vec<ElemSet> {
    s.config().frame(side).admissible_sets().collect()
}

fn size(s: &GameState, side: Side) -> usize {
    s.config().frame(side).size()
}

pub(super) fn candidates(s: &GameState) -> Vec<Move> {
    let points = |side: Side| (0..size(s, side)).map(move |elem| Move::Point { side, elem });
    let pairs = |side: Side| {
        let n = size(s, side);
        (0..n).flat_map(move |a| (0..n).map(move |b| Move::TcPair(a, b)))
    };
    let mut out = Vec::new();
    match &s.phase {
        Phase::AwaitSpoiler => {
            for side in [Side::L, Side::R] {
                out.extend(points(side));
                let fam = family(s, side);
                match s.logic() {
                    LogicId::Mso => out.extend(fam.iter().map(|&set| Move::Set { side, set })),
                    LogicId::Fotc1 => {
                        let k = s.elem_pebbles.len();
                        for i in 0..k {
                            for j in 0..k {
                                out.extend(fam.iter().map(|&set| Move::TcInit { side, i, j, set }));
                            }
                        }
                    }
                    LogicId::Folfp1 => match side {
                        Side::L => out.extend(fam.iter().map(|&set| Move::Gfp(set))),
                        Side::R => out.extend(fam.iter().map(|&set| Move::Lfp(set))),
                    },
                    LogicId::Fo => {}
                }
            }
        }
        Phase::PointReply { side, .. } => out.extend(points(side.other())),
        Phase::SetReply { side, .. } | Phase::TcSetReply { side, .. } => {
            let o = side.other();
            out.extend(
                family(s, o)
                    .into_iter()
                    .map(|set| Move::Set { side: o, set }),
            );
        }
        Phase::TcSpoilerPair { side, .. } => out.extend(pairs(side.other())),
        Phase::TcDupPair { side, .. } => out.extend(pairs(*side)),
        Phase::LfpReply { .. } => out.extend(family(s, Side::L).into_iter().map(Move::Lfp)),
        Phase::GfpReply { .. } => out.extend(family(s, Side::R).into_iter().map(Move::Gfp)),
        Phase::LfpSpoilerPoint { .. } | Phase::GfpDupPoint { .. } => out.extend(points(Side::L)),
        Phase::LfpDupPoint { .. } | Phase::GfpSpoilerPoint { .. } => out.extend(points(Side::R)),
    }
    out
}

/// `Ok` when `m` is legal in `s`, otherwise the violated rule.
pub(super) fn check(s: &GameState, m: &Move) -> Result<(), String> {
    let in_domain = |side: Side, e: usize| -> Result<(), String> {
        let n = size(s, side);
        if e < n {
            Ok(())
        } else {
            Err(format!("element {e} is not in dom({})", letters(side).2))
        }
    };
    let admissible = |side: Side, set: ElemSet| -> Result<(), String> {
        let f = s.config().frame(side);
        let (_, big, st) = letters(side);
        if set.is_subset(f.domain()) && f.is_admissible(set) {
            Ok(())
        } else {
            Err(format!("{big} ∈ 𝔸_{st}: {set} is not an admissible subset"))
        }
    };
    let not_full = |side: Side, set: ElemSet| -> Result<(), String> {
        let (_, big, st) = letters(side);
        if set == s.config().frame(side).domain() {
            Err(format!("{big}_{{r+1}} ∈ 𝔸_{st} \\ {{dom({st})}}"))
        } else {
            Ok(())
        }
    };
    let side_of = |m: &Move| match m {
        Move::Point { side, .. } | Move::Set { side, .. } | Move::TcInit { side, .. } => {
            Some(*side)
        }
        _ => None,
    };
    let expect_side = |want: Side| -> Result<(), String> {
        if side_of(m) == Some(want) {
            Ok(())
        } else {
            Err(format!("this pick must be made in {}", letters(want).2))
        }
    };
    let wrong_kind = || {
        Err(format!(
            "expected a move of the form: {}",
            s.phase.describe()
        ))
    };

    match (&s.phase, m) {
        (Phase::AwaitSpoiler, Move::Point { side, elem }) => in_domain(*side, *elem),
        (Phase::AwaitSpoiler, Move::Set { side, set }) => {
            if s.logic() != LogicId::Mso {
                return Err(format!(
                    "set moves belong to the MSO game, not {}",
                    s.logic()
                ));
            }
            admissible(*side, *set)
        }
        (Phase::AwaitSpoiler, Move::TcInit { side, i, j, set }) => {
            if s.logic() != LogicId::Fotc1 {
                return Err(format!(
                    "TC moves belong to the FO(TC¹) game, not {}",
                    s.logic()
                ));
            }
            let k = s.elem_pebbles.len();
            if k < 2 {
                return Err(
                    "a TC move can only be played once there are two pebbles on the board".into(),
                );
            }
            if *i >= k || *j >= k {
                return Err(format!("pebble index out of range: there are {k} pebbles"));
            }
            admissible(*side, *set)?;
            let elems = s.elems(*side);
            let (e, big, _) = letters(*side);
            if set.contains(elems[*i]) && !set.contains(elems[*j]) {
                Ok(())
            } else {
                Err(format!("{e}_i ∈ {big} and {e}_j ∉ {big}"))
            }
        }
        (Phase::AwaitSpoiler, Move::Lfp(set)) => {
            if s.logic() != LogicId::Folfp1 {
                return Err(format!(
                    "LFP moves belong to the FO(LFP¹) game, not {}",
                    s.logic()
                ));
            }
            admissible(Side::R, *set)?;
            not_full(Side::R, *set)?;
            if s.elems(Side::R).iter().any(|&b| !set.contains(b)) {
                Ok(())
            } else {
                Err("some pebble b_i ∉ B_{r+1}".into())
            }
        }
        (Phase::AwaitSpoiler, Move::Gfp(set)) => {
            if s.logic() != LogicId::Folfp1 {
                return Err(format!(
                    "GFP moves belong to the FO(LFP¹) game, not {}",
                    s.logic()
                ));
            }
            admissible(Side::L, *set)?;
            not_full(Side::L, *set)?;
            if s.elems(Side::L).iter().any(|&a| set.contains(a)) {
                Ok(())
            } else {
                Err("some pebble a_i ∈ A_{r+1}".into())
            }
        }
        (Phase::AwaitSpoiler, Move::TcPair(..)) => wrong_kind(),
        (Phase::PointReply { side, .. }, Move::Point { elem, .. }) => {
            expect_side(side.other())?;
            in_domain(side.other(), *elem)
        }
        (Phase::SetReply { side, .. }, Move::Set { set, .. }) => {
            expect_side(side.other())?;
            admissible(side.other(), *set)
        }
        (Phase::TcSetReply { side, i, j, .. }, Move::Set { set, .. }) => {
            let o = side.other();
            expect_side(o)?;
            admissible(o, *set)?;
            let elems = s.elems(o);
            let (e, big, _) = letters(o);
            if set.contains(elems[*i]) && !set.contains(elems[*j]) {
                Ok(())
            } else {
                Err(format!("{e}_i ∈ {big} and {e}_j ∉ {big}"))
            }
        }
        (Phase::TcSpoilerPair { side, reply, .. }, Move::TcPair(x, y)) => {
            pair_check(s, side.other(), *reply, *x, *y)
        }
        (Phase::TcDupPair { side, set, .. }, Move::TcPair(x, y)) => {
            pair_check(s, *side, *set, *x, *y)
        }
        (Phase::LfpReply { .. }, Move::Lfp(set)) => {
            admissible(Side::L, *set)?;
            not_full(Side::L, *set)
        }
        (Phase::GfpReply { .. }, Move::Gfp(set)) => {
            admissible(Side::R, *set)?;
            not_full(Side::R, *set)?;
            if set.is_empty() {
                Err("B_{r+1} ≠ ∅".into())
            } else {
                Ok(())
            }
        }
        (Phase::LfpSpoilerPoint { reply, .. }, Move::Point { elem, .. }) => {
            expect_side(Side::L)?;
            in_domain(Side::L, *elem)?;
            if reply.contains(*elem) {
                Err("a_{s+1} ∉ A_{r+1}".into())
            } else {
                Ok(())
            }
        }
        (Phase::LfpDupPoint { set, .. }, Move::Point { elem, .. }) => {
            expect_side(Side::R)?;
            in_domain(Side::R, *elem)?;
            if set.contains(*elem) {
                Err("b_{s+1} ∉ B_{r+1}".into())
            } else {
                Ok(())
            }
        }
        (Phase::GfpSpoilerPoint { reply, .. }, Move::Point { elem, .. }) => {
            expect_side(Side::R)?;
            if reply.contains(*elem) {
                Ok(())
            } else {
                Err("b_{s+1} ∈ B_{r+1}".into())
            }
        }
        (Phase::GfpDupPoint { set, .. }, Move::Point { elem, .. }) => {
            expect_side(Side::L)?;
            if set.contains(*elem) {
                Ok(())
            } else {
                Err("a_{s+1} ∈ A_{r+1}".into())
            }
        }
        _ => wrong_kind(),
    }
}

fn pair_check(s: &GameState, side: Side, set: ElemSet, x: usize, y: usize) -> Result<(), String> {
    let n = size(s, side);
    let (e, big, st) = letters(side);
    if x >= n || y >= n {
        return Err(format!("elements must lie in dom({st})"));
    }
    if set.contains(x) && !set.contains(y) {
        Ok(())
    } else {
        Err(format!("{e}_{{s+1}} ∈ {big}, {e}_{{s+2}} ∉ {big}"))
    }
}

/// The successor state of a legal move.
pub(super) fn apply(s: &GameState, m: &Move) -> GameState {
    let mut t = s.clone();
    let finish = |t: &mut GameState| {
        t.rounds_left -= 1;
        t.phase = Phase::AwaitSpoiler;
    };
    match (&s.phase, m) {
        (Phase::AwaitSpoiler, Move::Point { side, elem }) => {
            t.phase = Phase::PointReply {
                side: *side,
                elem: *elem,
            };
        }
        (Phase::AwaitSpoiler, Move::Set { side, set }) => {
            t.phase = Phase::SetReply {
                side: *side,
                set: *set,
            };
        }
        (Phase::AwaitSpoiler, Move::TcInit { side, i, j, set }) => {
            t.phase = Phase::TcSetReply {
                side: *side,
                i: *i,
                j: *j,
                set: *set,
            };
        }
        (Phase::AwaitSpoiler, Move::Lfp(set)) => t.phase = Phase::LfpReply { set: *set },
        (Phase::AwaitSpoiler, Move::Gfp(set)) => t.phase = Phase::GfpReply { set: *set },
        (Phase::PointReply { side, elem }, Move::Point { elem: reply, .. }) => {
            t.elem_pebbles.push(oriented(*side, *elem, *reply));
            finish(&mut t);
        }
        (Phase::SetReply { side, set }, Move::Set { set: reply, .. }) => {
            t.set_pebbles.push(oriented(*side, *set, *reply));
            finish(&mut t);
        }
        (Phase::TcSetReply { side, i, j, set }, Move::Set { set: reply, .. }) => {
            t.phase = Phase::TcSpoilerPair {
                side: *side,
                i: *i,
                j: *j,
                set: *set,
                reply: *reply,
            };
        }
        (
            Phase::TcSpoilerPair {
                side,
                i,
                j,
                set,
                reply,
            },
            Move::TcPair(x, y),
        ) => {
            t.phase = Phase::TcDupPair {
                side: *side,
                i: *i,
                j: *j,
                set: *set,
                reply: *reply,
                pair: (*x, *y),
            };
        }
        (Phase::TcDupPair { side, pair, .. }, Move::TcPair(x, y)) => {
            // Duplicator's pair lies on `side`, Spoiler's on the other one.
            t.elem_pebbles.push(oriented(*side, *x, pair.0));
            t.elem_pebbles.push(oriented(*side, *y, pair.1));
            finish(&mut t);
        }
        (Phase::LfpReply { set }, Move::Lfp(reply)) => {
            t.phase = Phase::LfpSpoilerPoint {
                set: *set,
                reply: *reply,
            };
        }
        (Phase::LfpSpoilerPoint { set, reply }, Move::Point { elem, .. }) => {
            t.phase = Phase::LfpDupPoint {
                set: *set,
                reply: *reply,
                elem: *elem,
            };
        }
        (Phase::LfpDupPoint { set, reply, elem }, Move::Point { elem: b, .. }) => {
            t.set_pebbles.push((*reply, *set));
            t.elem_pebbles.push((*elem, *b));
            finish(&mut t);
        }
        (Phase::GfpReply { set }, Move::Gfp(reply)) => {
            t.phase = Phase::GfpSpoilerPoint {
                set: *set,
                reply: *reply,
            };
        }
        (Phase::GfpSpoilerPoint { set, reply }, Move::Point { elem, .. }) => {
            t.phase = Phase::GfpDupPoint {
                set: *set,
                reply: *reply,
                elem: *elem,
            };
        }
        (Phase::GfpDupPoint { set, reply, elem }, Move::Point { elem: a, .. }) => {
            t.set_pebbles.push((*set, *reply));
            t.elem_pebbles.push((*a, *elem));
            finish(&mut t);
        }
        _ => unreachable!("move checked against phase"),
    }
    t
}

/// Orders a pick on `side` and its counterpart as (left, right).
fn oriented<T>(side: Side, here: T, there: T) -> (T, T) {
    match side {
        Side::L => (here, there),
        Side::R => (there, here),
    }
}
