//! Exact game values by back-and-forth descriptors.
//!
//! The level-`k` descriptor of a position on one side records its atomic
//! type and, for each kind of move, the descriptors reachable in one round.
//! Descriptors are interned, so for FO, MSO and FO(TC¹) Duplicator wins the
//! `k`-round game exactly when both sides get the same id. For a TC move the
//! relevant data per pebble pair `(i, j)` is the set of `⊆`-minimal profiles
//! `{ desc(a, a') : a ∈ A, a' ∉ A }` over the separating sets `A`.
//!
//! The FO(LFP¹) winning condition is one-way, so there a relation `W` on
//! (left id, right id) is computed instead, again over minimal profiles.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::{atomic_type, GameConfig, GameError, GameState, Move, ParamFrame, Phase, Player, Side};
use crate::structure::{ElemSet, Frame};
use crate::syntax::LogicId;

/// Positions a solver may describe before giving up.
pub const DEFAULT_BUDGET: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Pos {
    elems: Vec<usize>,
    sets: Vec<ElemSet>,
}

impl Pos {
    fn of(s: &GameState, side: Side) -> Pos {
        Pos {
            elems: s.elems(side),
            sets: s.sets(side),
        }
    }

    fn with_elem(&self, e: usize) -> Pos {
        let mut p = self.clone();
        p.elems.push(e);
        p
    }

    fn with_pair(&self, a: usize, b: usize) -> Pos {
        let mut p = self.with_elem(a);
        p.elems.push(b);
        p
    }

    fn with_set(&self, s: ElemSet) -> Pos {
        let mut p = self.clone();
        p.sets.push(s);
        p
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Desc {
    level: usize,
    /// Set only in the fixpoint game, where the two sides play different
    /// roles in `lfp` and `gfp`.
    side: Option<Side>,
    base: u32,
    membership: Vec<u64>,
    points: Vec<u32>,
    sets: Vec<u32>,
    tc: Vec<Vec<Vec<u32>>>,
    /// Left: Duplicator's LFP answers. Right: Spoiler's LFP sets.
    lfp: Vec<Vec<u32>>,
    /// Left: Spoiler's GFP sets. Right: Duplicator's GFP answers.
    gfp: Vec<Vec<u32>>,
}

type Key = (Side, Pos, usize);

pub struct Solver {
    cfg: Arc<GameConfig>,
    families: [Vec<ElemSet>; 2],
    atoms: HashMap<Vec<u64>, u32>,
    ids: HashMap<Arc<Desc>, u32>,
    descs: Vec<Arc<Desc>>,
    memo: HashMap<Key, u32>,
    pair_tables: HashMap<Key, Arc<Vec<u32>>>,
    tc_profiles: HashMap<(Key, ElemSet), Arc<Vec<u32>>>,
    w: HashMap<(u32, u32), bool>,
    budget: usize,
    work: usize,
    deadline: Option<(Instant, Duration)>,
}

impl Solver {
    pub fn new(cfg: Arc<GameConfig>) -> Self {
        Solver::with_budget(cfg, DEFAULT_BUDGET)
    }

    pub fn with_budget(cfg: Arc<GameConfig>, budget: usize) -> Self {
        let fam = |p: &ParamFrame| -> Vec<ElemSet> {
            if p.frame.size() > super::MAX_SET_GAME_SIZE {
                Vec::new()
            } else {
                p.frame.admissible_sets().collect()
            }
        };
        Solver {
            families: [fam(&cfg.left), fam(&cfg.right)],
            cfg,
            atoms: HashMap::new(),
            ids: HashMap::new(),
            descs: Vec::new(),
            memo: HashMap::new(),
            pair_tables: HashMap::new(),
            tc_profiles: HashMap::new(),
            w: HashMap::new(),
            budget,
            work: 0,
            deadline: None,
        }
    }

    /// Makes searches fail with [`GameError::Timeout`] once `limit` has
    /// passed from now; `None` lifts the limit.
    pub fn set_time_limit(&mut self, limit: Option<Duration>) {
        self.deadline = limit.map(|l| (Instant::now() + l, l));
    }

    pub fn config(&self) -> &Arc<GameConfig> {
        &self.cfg
    }

    /// Positions described so far.
    pub fn work(&self) -> usize {
        self.work
    }

    fn logic(&self) -> LogicId {
        self.cfg.logic
    }

    fn frame(&self, side: Side) -> &Frame {
        self.cfg.frame(side)
    }

    fn family(&self, side: Side) -> Vec<ElemSet> {
        self.families[side.index()].clone()
    }

    fn intern(&mut self, d: Desc) -> u32 {
        if let Some(&id) = self.ids.get(&d) {
            return id;
        }
        let id = self.descs.len() as u32;
        let d = Arc::new(d);
        self.descs.push(d.clone());
        self.ids.insert(d, id);
        id
    }

    fn desc(&mut self, side: Side, pos: &Pos, k: usize) -> Result<u32, GameError> {
        self.work += 1;
        if self.work > self.budget {
            return Err(GameError::Budget(self.budget));
        }
        if let Some((at, limit)) = self.deadline {
            if self.work.is_multiple_of(1024) && Instant::now() > at {
                return Err(GameError::Timeout(limit));
            }
        }
        // Leaves are cheaper to recompute than to look up.
        if k == 0 {
            return Ok(self.leaf(side, pos));
        }
        let key = (side, pos.clone(), k);
        if let Some(&id) = self.memo.get(&key) {
            self.work -= 1;
            return Ok(id);
        }
        let mut d = self.atomic_desc(side, pos, k);
        let n = self.frame(side).size();
        for e in 0..n {
            d.points.push(self.desc(side, &pos.with_elem(e), k - 1)?);
        }
        normalize(&mut d.points);
        match self.logic() {
            LogicId::Fo => {}
            LogicId::Mso => {
                for a in self.family(side) {
                    d.sets.push(self.desc(side, &pos.with_set(a), k - 1)?);
                }
                normalize(&mut d.sets);
            }
            LogicId::Fotc1 => {
                let s = pos.elems.len();
                if s >= 2 {
                    let fam = self.family(side);
                    let mut profiles = Vec::with_capacity(fam.len());
                    for &a in &fam {
                        profiles.push(self.tc_profile(side, pos, k - 1, a)?);
                    }
                    for i in 0..s {
                        for j in 0..s {
                            if i == j {
                                continue;
                            }
                            let (ei, ej) = (pos.elems[i], pos.elems[j]);
                            let sep: Vec<Vec<u32>> = fam
                                .iter()
                                .zip(&profiles)
                                .filter(|(a, _)| a.contains(ei) && !a.contains(ej))
                                .map(|(_, p)| p.to_vec())
                                .collect();
                            d.tc.push(minimal(sep));
                        }
                    }
                }
            }
            LogicId::Folfp1 => {
                let dom = self.frame(side).domain();
                for a in self.family(side) {
                    if a == dom {
                        continue;
                    }
                    let has_out = pos.elems.iter().any(|&e| !a.contains(e));
                    let has_in = pos.elems.iter().any(|&e| a.contains(e));
                    let (take_lfp, take_gfp) = match side {
                        Side::L => (true, has_in),
                        Side::R => (has_out, !a.is_empty()),
                    };
                    if take_lfp {
                        d.lfp.push(self.fix_profile(side, pos, k - 1, a, false)?);
                    }
                    if take_gfp {
                        d.gfp.push(self.fix_profile(side, pos, k - 1, a, true)?);
                    }
                }
                d.lfp = minimal(std::mem::take(&mut d.lfp));
                d.gfp = minimal(std::mem::take(&mut d.gfp));
            }
        }
        let id = self.intern(d);
        self.memo.insert(key, id);
        Ok(id)
    }

    fn atomic_desc(&mut self, side: Side, pos: &Pos, k: usize) -> Desc {
        let lfp = self.logic() == LogicId::Folfp1;
        let at = atomic_type(self.frame(side), &pos.elems, &pos.sets);
        let mut atom_key = vec![pos.elems.len() as u64, pos.sets.len() as u64];
        atom_key.extend(&at.base);
        if !lfp {
            atom_key.extend(&at.membership);
        }
        let next = self.atoms.len() as u32;
        let base = *self.atoms.entry(atom_key).or_insert(next);
        Desc {
            level: k,
            side: lfp.then_some(side),
            base,
            membership: if lfp { at.membership } else { Vec::new() },
            points: Vec::new(),
            sets: Vec::new(),
            tc: Vec::new(),
            lfp: Vec::new(),
            gfp: Vec::new(),
        }
    }

    fn leaf(&mut self, side: Side, pos: &Pos) -> u32 {
        let d = self.atomic_desc(side, pos, 0);
        self.intern(d)
    }

    /// Level-`k` descriptors of `pos` extended by each pair, row-major.
    fn pair_table(&mut self, side: Side, pos: &Pos, k: usize) -> Result<Arc<Vec<u32>>, GameError> {
        let key = (side, pos.clone(), k);
        if let Some(t) = self.pair_tables.get(&key) {
            return Ok(t.clone());
        }
        let n = self.frame(side).size();
        let mut t = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                t.push(self.desc(side, &pos.with_pair(a, b), k)?);
            }
        }
        let t = Arc::new(t);
        self.pair_tables.insert(key, t.clone());
        Ok(t)
    }

    fn tc_profile(
        &mut self,
        side: Side,
        pos: &Pos,
        k: usize,
        set: ElemSet,
    ) -> Result<Arc<Vec<u32>>, GameError> {
        let key = ((side, pos.clone(), k), set);
        if let Some(p) = self.tc_profiles.get(&key) {
            return Ok(p.clone());
        }
        let table = self.pair_table(side, pos, k)?;
        let n = self.frame(side).size();
        let mut p = Vec::new();
        for a in set.iter() {
            for b in 0..n {
                if !set.contains(b) {
                    p.push(table[a * n + b]);
                }
            }
        }
        normalize(&mut p);
        let p = Arc::new(p);
        self.tc_profiles.insert(key, p.clone());
        Ok(p)
    }

    /// Descriptors after adding `set` and one element inside it (`inside`)
    /// or outside it.
    fn fix_profile(
        &mut self,
        side: Side,
        pos: &Pos,
        k: usize,
        set: ElemSet,
        inside: bool,
    ) -> Result<Vec<u32>, GameError> {
        let with = pos.with_set(set);
        let n = self.frame(side).size();
        let mut p = Vec::new();
        for e in 0..n {
            if set.contains(e) == inside {
                p.push(self.desc(side, &with.with_elem(e), k)?);
            }
        }
        normalize(&mut p);
        Ok(p)
    }

    /// Whether Duplicator wins from left descriptor `p` against right `q`.
    fn wins(&mut self, p: u32, q: u32) -> bool {
        if self.logic() != LogicId::Folfp1 {
            return p == q;
        }
        if let Some(&b) = self.w.get(&(p, q)) {
            return b;
        }
        let dp = self.descs[p as usize].clone();
        let dq = self.descs[q as usize].clone();
        let atomic = dp.base == dq.base
            && dp
                .membership
                .iter()
                .zip(&dq.membership)
                .all(|(a, b)| a & !b == 0);
        let r = atomic
            && (dp.level == 0
                || (self.forth(&dp.points, &dq.points)
                    && self.back(&dp.points, &dq.points)
                    && dq
                        .lfp
                        .iter()
                        .all(|lb| dp.lfp.iter().any(|la| self.forth(la, lb)))
                    && dp
                        .gfp
                        .iter()
                        .all(|ga| dq.gfp.iter().any(|gb| self.back(ga, gb)))));
        self.w.insert((p, q), r);
        r
    }

    /// Every left descriptor has a winning right partner.
    fn forth(&mut self, xs: &[u32], ys: &[u32]) -> bool {
        xs.iter().all(|&x| ys.iter().any(|&y| self.wins(x, y)))
    }

    /// Every right descriptor has a winning left partner.
    fn back(&mut self, xs: &[u32], ys: &[u32]) -> bool {
        ys.iter().all(|&y| xs.iter().any(|&x| self.wins(x, y)))
    }

    fn wins_from(&mut self, side: Side, here: u32, there: u32) -> bool {
        match side {
            Side::L => self.wins(here, there),
            Side::R => self.wins(there, here),
        }
    }

    /// The player who wins from `s` under optimal play.
    pub fn value(&mut self, s: &GameState) -> Result<Player, GameError> {
        debug_assert!(**s.config_arc() == *self.cfg, "state from another game");
        let dup = |b: bool| {
            if b {
                Player::Duplicator
            } else {
                Player::Spoiler
            }
        };
        let k = s.rounds_left;
        let pl = Pos::of(s, Side::L);
        let pr = Pos::of(s, Side::R);
        let pos = |side: Side| if side == Side::L { &pl } else { &pr };
        if s.phase == Phase::AwaitSpoiler {
            // Copying Spoiler's picks wins on identical frames.
            if self.cfg.left.frame == self.cfg.right.frame
                && s.elem_pebbles.iter().all(|(a, b)| a == b)
                && s.set_pebbles.iter().all(|(a, b)| a == b)
            {
                return Ok(Player::Duplicator);
            }
            let l = self.desc(Side::L, &pl, k)?;
            let r = self.desc(Side::R, &pr, k)?;
            return Ok(dup(self.wins(l, r)));
        }
        let k = k - 1;
        let res = match s.phase.clone() {
            Phase::AwaitSpoiler => unreachable!(),
            Phase::PointReply { side, elem } => {
                let here = self.desc(side, &pos(side).with_elem(elem), k)?;
                let o = side.other();
                let mut ok = false;
                for e in 0..self.frame(o).size() {
                    let there = self.desc(o, &pos(o).with_elem(e), k)?;
                    if self.wins_from(side, here, there) {
                        ok = true;
                        break;
                    }
                }
                ok
            }
            Phase::SetReply { side, set } => {
                let here = self.desc(side, &pos(side).with_set(set), k)?;
                let o = side.other();
                let mut ok = false;
                for b in self.family(o) {
                    let there = self.desc(o, &pos(o).with_set(b), k)?;
                    if self.wins_from(side, here, there) {
                        ok = true;
                        break;
                    }
                }
                ok
            }
            Phase::TcSetReply { side, i, j, set } => {
                let mine = self.tc_profile(side, pos(side), k, set)?;
                let o = side.other();
                let (bi, bj) = (pos(o).elems[i], pos(o).elems[j]);
                let mut ok = false;
                for b in self.family(o) {
                    if b.contains(bi) && !b.contains(bj) {
                        let theirs = self.tc_profile(o, pos(o), k, b)?;
                        if is_subset(&theirs, &mine) {
                            ok = true;
                            break;
                        }
                    }
                }
                ok
            }
            Phase::TcSpoilerPair {
                side, set, reply, ..
            } => {
                let mine = self.tc_profile(side, pos(side), k, set)?;
                let theirs = self.tc_profile(side.other(), pos(side.other()), k, reply)?;
                is_subset(&theirs, &mine)
            }
            Phase::TcDupPair {
                side, set, pair, ..
            } => {
                let o = side.other();
                let target = self.desc(o, &pos(o).with_pair(pair.0, pair.1), k)?;
                let mine = self.tc_profile(side, pos(side), k, set)?;
                mine.contains(&target)
            }
            Phase::LfpReply { set } => {
                let dom = self.frame(Side::L).domain();
                let theirs = self.fix_profile(Side::R, &pr, k, set, false)?;
                let mut ok = false;
                for a in self.family(Side::L) {
                    if a != dom {
                        let mine = self.fix_profile(Side::L, &pl, k, a, false)?;
                        if self.forth(&mine, &theirs) {
                            ok = true;
                            break;
                        }
                    }
                }
                ok
            }
            Phase::LfpSpoilerPoint { set, reply } => {
                let l = self.fix_profile(Side::L, &pl, k, reply, false)?;
                let r = self.fix_profile(Side::R, &pr, k, set, false)?;
                self.forth(&l, &r)
            }
            Phase::LfpDupPoint { set, reply, elem } => {
                let x = self.desc(Side::L, &pl.with_set(reply).with_elem(elem), k)?;
                let r = self.fix_profile(Side::R, &pr, k, set, false)?;
                self.forth(&[x], &r)
            }
            Phase::GfpReply { set } => {
                let dom = self.frame(Side::R).domain();
                let mine = self.fix_profile(Side::L, &pl, k, set, true)?;
                let mut ok = false;
                for b in self.family(Side::R) {
                    if b != dom && !b.is_empty() {
                        let theirs = self.fix_profile(Side::R, &pr, k, b, true)?;
                        if self.back(&mine, &theirs) {
                            ok = true;
                            break;
                        }
                    }
                }
                ok
            }
            Phase::GfpSpoilerPoint { set, reply } => {
                let l = self.fix_profile(Side::L, &pl, k, set, true)?;
                let r = self.fix_profile(Side::R, &pr, k, reply, true)?;
                self.back(&l, &r)
            }
            Phase::GfpDupPoint { set, reply, elem } => {
                let y = self.desc(Side::R, &pr.with_set(reply).with_elem(elem), k)?;
                let l = self.fix_profile(Side::L, &pl, k, set, true)?;
                self.back(&l, &[y])
            }
        };
        Ok(dup(res))
    }

    /// A move keeping the mover's game value, or the least legal move if
    /// every move loses. Ties go to the least encoding.
    pub fn optimal_move(&mut self, s: &GameState) -> Result<Move, GameError> {
        let moves = s.legal_moves();
        if moves.is_empty() {
            return Err(if s.is_finished() {
                GameError::Finished
            } else {
                GameError::NoMove
            });
        }
        let me = s.mover();
        for m in &moves {
            let t = s.apply_move(m)?;
            if self.value(&t)? == me {
                return Ok(m.clone());
            }
        }
        Ok(moves[0].clone())
    }
}

fn normalize(v: &mut Vec<u32>) {
    v.sort_unstable();
    v.dedup();
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

/// The `⊆`-minimal members, sorted and deduplicated.
fn minimal(mut v: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    v.sort();
    v.dedup();
    v.sort_by_key(|p| p.len());
    let mut out: Vec<Vec<u32>> = Vec::new();
    for p in v {
        if !out.iter().any(|q| is_subset(q, &p)) {
            out.push(p);
        }
    }
    out.sort();
    out
}

pub fn winner(cfg: &GameConfig) -> Result<Player, GameError> {
    let cfg = Arc::new(cfg.clone());
    let s = GameState::new(cfg.clone());
    Solver::new(cfg).value(&s)
}

/// Whether Duplicator wins the `n`-round game on the unparametrized frames.
pub fn n_equivalent(logic: LogicId, n: usize, f: &Frame, g: &Frame) -> Result<bool, GameError> {
    let cfg = GameConfig::new(logic, n, f.clone(), g.clone())?;
    Ok(winner(&cfg)? == Player::Duplicator)
}

pub fn optimal_move(s: &GameState) -> Result<Move, GameError> {
    Solver::new(s.config_arc().clone()).optimal_move(s)
}
