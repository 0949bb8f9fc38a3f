//! Model checking over frames under general (admissible-set) semantics,
//! plus the standard-semantics references for TC and LFP.
//!
//! Set quantifiers, TC and fixpoints only ever bind admissible sets. On a
//! Full frame this is ordinary second-order semantics.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::structure::{ElemSet, Frame};
use crate::syntax::{check_positive, free_variables, Formula, LogicId, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` has arity {expected}, used with {found} argument(s)")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("element {elem} assigned to `{var}` is outside the domain")]
    OutOfRange { var: String, elem: usize },
    #[error("set {set} assigned to `{var}` is not admissible")]
    NotAdmissible { var: String, set: ElemSet },
    #[error("standard semantics needs the full admissible family")]
    NotStandard,
    #[error("expected a {0} formula")]
    WrongShape(&'static str),
    #[error("set variable `{0}` is not positive in the fixpoint body")]
    NotPositive(String),
    #[error(transparent)]
    Logic(#[from] SyntaxError),
}

/// Values for free element and set variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub elems: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, ElemSet>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn elem(mut self, var: &str, e: usize) -> Assignment {
        self.elems.insert(var.to_string(), e);
        self
    }

    pub fn set(mut self, var: &str, s: ElemSet) -> Assignment {
        self.sets.insert(var.to_string(), s);
        self
    }

    /// Parses `x=0, y=2, X={1,2}`.
    pub fn parse(text: &str) -> Result<Assignment, String> {
        let mut g = Assignment::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let (name, after) = rest
                .split_once('=')
                .ok_or_else(|| format!("expected `var=value` in `{rest}`"))?;
            let name = name.trim().trim_start_matches(',').trim();
            let after = after.trim_start();
            if after.starts_with('{') {
                let close = after
                    .find('}')
                    .ok_or_else(|| format!("unclosed set for `{name}`"))?;
                g.sets
                    .insert(name.to_string(), ElemSet::parse(&after[..=close])?);
                rest = after[close + 1..]
                    .trim_start()
                    .trim_start_matches(',')
                    .trim();
            } else {
                let end = after.find(',').unwrap_or(after.len());
                let e: usize = after[..end]
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad element for `{name}`"))?;
                g.elems.insert(name.to_string(), e);
                rest = after[end..].trim_start_matches(',').trim();
            }
        }
        Ok(g)
    }
}

type Slot = u16;

#[derive(Debug, Clone, Copy)]
enum KeySlot {
    E(Slot),
    S(Slot),
}

#[derive(Debug)]
enum Node {
    Top,
    Rel(usize, Vec<Slot>),
    Eq(Slot, Slot),
    In(Slot, Slot),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Exists(Slot, Box<Node>),
    Forall(Slot, Box<Node>),
    SetQ {
        exists: bool,
        slot: Slot,
        body: Box<Node>,
        memo: usize,
        key: Vec<KeySlot>,
    },
    Tc {
        x: Slot,
        y: Slot,
        body: Box<Node>,
        u: Slot,
        v: Slot,
        memo: usize,
        key: Vec<KeySlot>,
    },
    Fix {
        least: bool,
        set: Slot,
        var: Slot,
        body: Box<Node>,
        arg: Slot,
        memo: usize,
        key: Vec<KeySlot>,
    },
}

struct Compiler<'f> {
    frame: &'f Frame,
    elem_scope: Vec<(String, Slot)>,
    set_scope: Vec<(String, Slot)>,
    n_elem: Slot,
    n_set: Slot,
    memos: usize,
}

impl Compiler<'_> {
    fn elem(&self, name: &str) -> Result<Slot, EvalError> {
        self.elem_scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn set(&self, name: &str) -> Result<Slot, EvalError> {
        self.set_scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn bind_elem(&mut self, name: &str) -> Slot {
        let s = self.n_elem;
        self.n_elem += 1;
        self.elem_scope.push((name.to_string(), s));
        s
    }

    fn bind_set(&mut self, name: &str) -> Slot {
        let s = self.n_set;
        self.n_set += 1;
        self.set_scope.push((name.to_string(), s));
        s
    }

    /// Slots of the free variables of `f`, minus the ones about to be bound.
    fn key_of(
        &self,
        f: &Formula,
        elems: &[&str],
        sets: &[&str],
    ) -> Result<Vec<KeySlot>, EvalError> {
        let fv = free_variables(f);
        let mut key = Vec::new();
        for e in fv.elems.iter().filter(|e| !elems.contains(&e.as_str())) {
            key.push(KeySlot::E(self.elem(e)?));
        }
        for s in fv.sets.iter().filter(|s| !sets.contains(&s.as_str())) {
            key.push(KeySlot::S(self.set(s)?));
        }
        Ok(key)
    }

    fn memo(&mut self) -> usize {
        self.memos += 1;
        self.memos - 1
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Top => Node::Top,
            Formula::Rel(r, args) => {
                let idx = self
                    .frame
                    .vocab()
                    .index_of(r)
                    .ok_or_else(|| EvalError::UnknownSymbol(r.clone()))?;
                let arity = self.frame.vocab().symbols()[idx].arity;
                if arity != args.len() {
                    return Err(EvalError::Arity {
                        name: r.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let slots = args
                    .iter()
                    .map(|a| self.elem(a))
                    .collect::<Result<_, _>>()?;
                Node::Rel(idx, slots)
            }
            Formula::Eq(x, y) => Node::Eq(self.elem(x)?, self.elem(y)?),
            Formula::In(s, x) => Node::In(self.set(s)?, self.elem(x)?),
            Formula::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            Formula::And(a, b) => Node::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Implies(a, b) => {
                Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?))
            }
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                let slot = self.bind_elem(x);
                let body = self.compile(a);
                self.elem_scope.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(slot, body)
                } else {
                    Node::Forall(slot, body)
                }
            }
            Formula::ExistsSet(x, a) | Formula::ForallSet(x, a) => {
                let key = self.key_of(f, &[], &[])?;
                let slot = self.bind_set(x);
                let body = self.compile(a);
                self.set_scope.pop();
                Node::SetQ {
                    exists: matches!(f, Formula::ExistsSet(..)),
                    slot,
                    body: Box::new(body?),
                    memo: self.memo(),
                    key,
                }
            }
            Formula::Tc { x, y, body, u, v } => {
                let (u, v) = (self.elem(u)?, self.elem(v)?);
                let key = self.key_of(body, &[x, y], &[])?;
                let sx = self.bind_elem(x);
                let sy = self.bind_elem(y);
                let b = self.compile(body);
                self.elem_scope.pop();
                self.elem_scope.pop();
                Node::Tc {
                    x: sx,
                    y: sy,
                    body: Box::new(b?),
                    u,
                    v,
                    memo: self.memo(),
                    key,
                }
            }
            Formula::Lfp {
                set,
                var,
                body,
                arg,
            }
            | Formula::Gfp {
                set,
                var,
                body,
                arg,
            } => {
                let arg = self.elem(arg)?;
                let key = self.key_of(body, &[var], &[set])?;
                let sv = self.bind_elem(var);
                let ss = self.bind_set(set);
                let b = self.compile(body);
                self.elem_scope.pop();
                self.set_scope.pop();
                Node::Fix {
                    least: matches!(f, Formula::Lfp { .. }),
                    set: ss,
                    var: sv,
                    body: Box::new(b?),
                    arg,
                    memo: self.memo(),
                    key,
                }
            }
        })
    }
}

struct Env {
    e: Vec<usize>,
    s: Vec<ElemSet>,
}

impl Env {
    fn key(&self, key: &[KeySlot], extra: Option<usize>) -> Vec<u32> {
        let mut k: Vec<u32> = key
            .iter()
            .map(|ks| match ks {
                KeySlot::E(s) => self.e[*s as usize] as u32,
                KeySlot::S(s) => self.s[*s as usize].0,
            })
            .collect();
        if let Some(x) = extra {
            k.push(x as u32);
        }
        k
    }
}

/// A formula compiled against one frame, reusable across assignments.
/// Closed subcomputations (set quantifiers, closures, fixpoints) are
/// memoised on the values of their free variables.
pub struct Checker<'f> {
    frame: &'f Frame,
    root: Node,
    free_elems: Vec<String>,
    free_sets: Vec<String>,
    n_elem: usize,
    n_set: usize,
    memos: Vec<HashMap<Vec<u32>, u32>>,
    trace: Option<Vec<ElemSet>>,
}

impl<'f> Checker<'f> {
    pub fn new(frame: &'f Frame, phi: &Formula) -> Result<Checker<'f>, EvalError> {
        let fv = free_variables(phi);
        let mut c = Compiler {
            frame,
            elem_scope: Vec::new(),
            set_scope: Vec::new(),
            n_elem: 0,
            n_set: 0,
            memos: 0,
        };
        for e in &fv.elems {
            c.bind_elem(e);
        }
        for s in &fv.sets {
            c.bind_set(s);
        }
        let root = c.compile(phi)?;
        Ok(Checker {
            frame,
            root,
            free_elems: fv.elems.into_iter().collect(),
            free_sets: fv.sets.into_iter().collect(),
            n_elem: c.n_elem as usize,
            n_set: c.n_set as usize,
            memos: vec![HashMap::new(); c.memos],
            trace: None,
        })
    }

    /// Records every set bound during evaluation, for auditing.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn trace(&self) -> &[ElemSet] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn eval(&mut self, g: &Assignment) -> Result<bool, EvalError> {
        let mut env = Env {
            e: vec![0; self.n_elem],
            s: vec![ElemSet::EMPTY; self.n_set],
        };
        for (i, name) in self.free_elems.iter().enumerate() {
            let e = *g
                .elems
                .get(name)
                .ok_or_else(|| EvalError::Unbound(name.clone()))?;
            if e >= self.frame.size() {
                return Err(EvalError::OutOfRange {
                    var: name.clone(),
                    elem: e,
                });
            }
            env.e[i] = e;
        }
        for (i, name) in self.free_sets.iter().enumerate() {
            let s = *g
                .sets
                .get(name)
                .ok_or_else(|| EvalError::Unbound(name.clone()))?;
            if !self.frame.is_admissible(s) {
                return Err(EvalError::NotAdmissible {
                    var: name.clone(),
                    set: s,
                });
            }
            env.s[i] = s;
        }
        let mut st = State {
            frame: self.frame,
            memos: &mut self.memos,
            trace: self.trace.as_mut(),
        };
        Ok(st.ev(&self.root, &mut env))
    }
}

struct State<'a, 'f> {
    frame: &'f Frame,
    memos: &'a mut Vec<HashMap<Vec<u32>, u32>>,
    trace: Option<&'a mut Vec<ElemSet>>,
}

impl State<'_, '_> {
    fn note(&mut self, s: ElemSet) {
        if let Some(t) = self.trace.as_mut() {
            t.push(s);
        }
    }

    fn ev(&mut self, node: &Node, env: &mut Env) -> bool {
        let n = self.frame.size();
        match node {
            Node::Top => true,
            Node::Rel(idx, args) => {
                let tuple: Vec<usize> = args.iter().map(|s| env.e[*s as usize]).collect();
                self.frame.relation_at(*idx).contains(&tuple)
            }
            Node::Eq(a, b) => env.e[*a as usize] == env.e[*b as usize],
            Node::In(s, x) => env.s[*s as usize].contains(env.e[*x as usize]),
            Node::Not(a) => !self.ev(a, env),
            Node::And(a, b) => self.ev(a, env) && self.ev(b, env),
            Node::Or(a, b) => self.ev(a, env) || self.ev(b, env),
            Node::Implies(a, b) => !self.ev(a, env) || self.ev(b, env),
            Node::Exists(slot, body) => (0..n).any(|a| {
                env.e[*slot as usize] = a;
                self.ev(body, env)
            }),
            Node::Forall(slot, body) => (0..n).all(|a| {
                env.e[*slot as usize] = a;
                self.ev(body, env)
            }),
            Node::SetQ {
                exists,
                slot,
                body,
                memo,
                key,
            } => {
                let k = env.key(key, None);
                if let Some(&r) = self.memos[*memo].get(&k) {
                    return r == 1;
                }
                let frame = self.frame;
                let mut result = !*exists;
                for a in frame.admissible_sets() {
                    self.note(a);
                    env.s[*slot as usize] = a;
                    if self.ev(body, env) == *exists {
                        result = *exists;
                        break;
                    }
                }
                self.memos[*memo].insert(k, result as u32);
                result
            }
            Node::Tc {
                x,
                y,
                body,
                u,
                v,
                memo,
                key,
            } => {
                let ue = env.e[*u as usize];
                let ve = env.e[*v as usize];
                let k = env.key(key, Some(ue));
                if let Some(&r) = self.memos[*memo].get(&k) {
                    return ElemSet(r).contains(ve);
                }
                let mut succ = vec![ElemSet::EMPTY; n];
                for (a, row) in succ.iter_mut().enumerate() {
                    for b in 0..n {
                        env.e[*x as usize] = a;
                        env.e[*y as usize] = b;
                        if self.ev(body, env) {
                            row.insert(b);
                        }
                    }
                }
                // v must lie in every admissible set that contains u and is
                // closed under one body step.
                let frame = self.frame;
                let mut meet = frame.domain();
                for a in frame.admissible_sets() {
                    self.note(a);
                    if a.contains(ue) && a.iter().all(|e| succ[e].is_subset(a)) {
                        meet = meet.intersect(a);
                    }
                }
                self.memos[*memo].insert(k, meet.0);
                meet.contains(ve)
            }
            Node::Fix {
                least,
                set,
                var,
                body,
                arg,
                memo,
                key,
            } => {
                let k = env.key(key, None);
                let y = env.e[*arg as usize];
                if let Some(&r) = self.memos[*memo].get(&k) {
                    return ElemSet(r).contains(y);
                }
                let frame = self.frame;
                // Least: meet of all prefixed admissible sets.
                // Greatest: join of all postfixed admissible sets.
                let mut acc = if *least {
                    frame.domain()
                } else {
                    ElemSet::EMPTY
                };
                for a in frame.admissible_sets() {
                    self.note(a);
                    env.s[*set as usize] = a;
                    let mut image = ElemSet::EMPTY;
                    for e in 0..n {
                        env.e[*var as usize] = e;
                        if self.ev(body, env) {
                            image.insert(e);
                        }
                    }
                    if *least && image.is_subset(a) {
                        acc = acc.intersect(a);
                    } else if !*least && a.is_subset(image) {
                        acc = acc.union(a);
                    }
                }
                self.memos[*memo].insert(k, acc.0);
                acc.contains(y)
            }
        }
    }
}

/// Truth of `phi` in `frame` under `g`.
pub fn eval(frame: &Frame, g: &Assignment, phi: &Formula) -> Result<bool, EvalError> {
    Checker::new(frame, phi)?.eval(g)
}

/// As [`eval`] after checking that `phi` belongs to `logic`.
pub fn eval_in(
    frame: &Frame,
    g: &Assignment,
    phi: &Formula,
    logic: LogicId,
) -> Result<bool, EvalError> {
    phi.check_logic(logic)?;
    eval(frame, g, phi)
}

pub fn eval_closed(frame: &Frame, phi: &Formula) -> Result<bool, EvalError> {
    eval(frame, &Assignment::new(), phi)
}

/// `tc[x,y](body)(u,v)` by graph reachability (paths of length zero
/// included). Needs the full admissible family.
pub fn eval_tc_path(frame: &Frame, g: &Assignment, phi: &Formula) -> Result<bool, EvalError> {
    let Formula::Tc { x, y, body, u, v } = phi else {
        return Err(EvalError::WrongShape("tc"));
    };
    if !frame.is_full() {
        return Err(EvalError::NotStandard);
    }
    let lookup = |name: &String| {
        g.elems
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::Unbound(name.clone()))
    };
    let (ue, ve) = (lookup(u)?, lookup(v)?);
    let n = frame.size();
    let mut checker = Checker::new(frame, body)?;
    let mut g2 = g.clone();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([ue]);
    seen[ue] = true;
    while let Some(a) = queue.pop_front() {
        for b in 0..n {
            if seen[b] {
                continue;
            }
            g2.elems.insert(x.clone(), a);
            g2.elems.insert(y.clone(), b);
            if checker.eval(&g2)? {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    Ok(seen[ve])
}

/// `lfp`/`gfp` by Kleene iteration from the empty (resp. full) set. Needs
/// the full admissible family and a positive body.
pub fn eval_lfp_kleene(frame: &Frame, g: &Assignment, phi: &Formula) -> Result<bool, EvalError> {
    let (least, set, var, body, arg) = match phi {
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => (true, set, var, body, arg),
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => (false, set, var, body, arg),
        _ => return Err(EvalError::WrongShape("fixpoint")),
    };
    if !frame.is_full() {
        return Err(EvalError::NotStandard);
    }
    if !check_positive(body, set) {
        return Err(EvalError::NotPositive(set.clone()));
    }
    let y = *g
        .elems
        .get(arg)
        .ok_or_else(|| EvalError::Unbound(arg.clone()))?;
    let mut checker = Checker::new(frame, body)?;
    let mut g2 = g.clone();
    let mut cur = if least {
        ElemSet::EMPTY
    } else {
        frame.domain()
    };
    loop {
        g2.sets.insert(set.clone(), cur);
        let mut next = ElemSet::EMPTY;
        for e in 0..frame.size() {
            g2.elems.insert(var.clone(), e);
            if checker.eval(&g2)? {
                next.insert(e);
            }
        }
        if next == cur {
            return Ok(cur.contains(y));
        }
        cur = next;
    }
}
