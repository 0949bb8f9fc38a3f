use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Formula, LogicId, Vocabulary};

const ELEM_POOL: [&str; 4] = ["x", "y", "z", "w"];
const SET_POOL: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Default)]
struct Scope {
    elems: Vec<String>,
    /// Set variables in scope. A fixpoint variable records the polarity at
    /// its binder and may only be used at that same polarity.
    sets: Vec<(String, Option<bool>)>,
}

impl Scope {
    fn with_elem(&self, x: &str) -> Scope {
        let mut s = self.clone();
        s.elems.retain(|e| e != x);
        s.elems.push(x.to_string());
        s
    }

    fn with_set(&self, x: &str, fix: Option<bool>) -> Scope {
        let mut s = self.clone();
        s.sets.retain(|(e, _)| e != x);
        s.sets.push((x.to_string(), fix));
        s
    }
}

/// Random formulas of one logic. Fixpoint bodies are generated positive in
/// their set variable; other set variables may occur with any polarity.
pub struct FormulaGen<'v> {
    vocab: &'v Vocabulary,
    logic: LogicId,
}

impl<'v> FormulaGen<'v> {
    pub fn new(vocab: &'v Vocabulary, logic: LogicId) -> Self {
        FormulaGen { vocab, logic }
    }

    /// A formula of quantifier depth at most `depth` with at most `ops`
    /// Boolean connectives.
    pub fn generate<R: Rng>(
        &mut self,
        rng: &mut R,
        depth: usize,
        ops: usize,
        free_elems: &[&str],
        free_sets: &[&str],
    ) -> Formula {
        let scope = Scope {
            elems: free_elems.iter().map(|s| s.to_string()).collect(),
            sets: free_sets.iter().map(|s| (s.to_string(), None)).collect(),
        };
        self.gen(rng, depth, ops, &scope, true)
    }

    /// A body for `tc[x,y](...)` over the given parameters, using both
    /// `x` and `y` when possible.
    pub fn tc_body<R: Rng>(
        &mut self,
        rng: &mut R,
        depth: usize,
        ops: usize,
        x: &str,
        y: &str,
    ) -> Formula {
        let scope = Scope::default().with_elem(x).with_elem(y);
        self.gen(rng, depth, ops, &scope, true)
    }

    /// A body for `lfp[X,x](...)` positive in `set`.
    pub fn lfp_body<R: Rng>(
        &mut self,
        rng: &mut R,
        depth: usize,
        ops: usize,
        set: &str,
        x: &str,
        params: &[&str],
    ) -> Formula {
        let mut scope = Scope::default();
        for p in params {
            scope = scope.with_elem(p);
        }
        let scope = scope.with_elem(x).with_set(set, Some(true));
        self.gen(rng, depth, ops, &scope, true)
    }

    fn gen<R: Rng>(
        &mut self,
        rng: &mut R,
        depth: usize,
        ops: usize,
        scope: &Scope,
        pol: bool,
    ) -> Formula {
        let mut kinds: Vec<u8> = Vec::new();
        if ops > 0 {
            kinds.extend([0, 1, 2, 3]);
        }
        if depth > 0 {
            kinds.extend([4, 4, 5, 5]);
            match self.logic {
                LogicId::Mso => kinds.extend([6, 7]),
                LogicId::Fotc1 if !scope.elems.is_empty() => kinds.extend([8, 8]),
                LogicId::Folfp1 if !scope.elems.is_empty() => kinds.extend([9, 9]),
                _ => {}
            }
        }
        // Leaves are more likely once the budgets are small.
        if kinds.is_empty() || rng.gen_bool(0.2) {
            return self.atom(rng, scope, pol);
        }
        let split = |rng: &mut R| {
            let left = rng.gen_range(0..ops);
            (left, ops - 1 - left)
        };
        match *kinds.choose(rng).expect("nonempty") {
            0 => Formula::not(self.gen(rng, depth, ops - 1, scope, !pol)),
            1 => {
                let (l, r) = split(rng);
                Formula::and(
                    self.gen(rng, depth, l, scope, pol),
                    self.gen(rng, depth, r, scope, pol),
                )
            }
            2 => {
                let (l, r) = split(rng);
                Formula::or(
                    self.gen(rng, depth, l, scope, pol),
                    self.gen(rng, depth, r, scope, pol),
                )
            }
            3 => {
                let (l, r) = split(rng);
                Formula::implies(
                    self.gen(rng, depth, l, scope, !pol),
                    self.gen(rng, depth, r, scope, pol),
                )
            }
            4 | 5 => {
                let x = *ELEM_POOL.choose(rng).expect("pool");
                let body = self.gen(rng, depth - 1, ops, &scope.with_elem(x), pol);
                if rng.gen_bool(0.5) {
                    Formula::exists(x, body)
                } else {
                    Formula::forall(x, body)
                }
            }
            6 | 7 => {
                let s = *SET_POOL.choose(rng).expect("pool");
                let body = self.gen(rng, depth - 1, ops, &scope.with_set(s, None), pol);
                if rng.gen_bool(0.5) {
                    Formula::exists_set(s, body)
                } else {
                    Formula::forall_set(s, body)
                }
            }
            8 => {
                let mut pair: Vec<&str> = ELEM_POOL.choose_multiple(rng, 2).copied().collect();
                pair.shuffle(rng);
                let (x, y) = (pair[0], pair[1]);
                let inner = scope.with_elem(x).with_elem(y);
                let body = self.gen(rng, depth - 1, ops, &inner, pol);
                let u = scope.elems.choose(rng).expect("nonempty scope");
                let v = scope.elems.choose(rng).expect("nonempty scope");
                Formula::tc(x, y, body, u, v)
            }
            _ => {
                let s = *SET_POOL.choose(rng).expect("pool");
                let x = *ELEM_POOL.choose(rng).expect("pool");
                let inner = scope.with_elem(x).with_set(s, Some(pol));
                let body = self.gen(rng, depth - 1, ops, &inner, pol);
                let y = scope.elems.choose(rng).expect("nonempty scope");
                Formula::lfp(s, x, body, y)
            }
        }
    }

    fn atom<R: Rng>(&mut self, rng: &mut R, scope: &Scope, pol: bool) -> Formula {
        if scope.elems.is_empty() {
            return Formula::Top;
        }
        let mut choices: Vec<u8> = vec![0, 0, 0, 1];
        let usable_sets: Vec<&String> = scope
            .sets
            .iter()
            .filter(|(_, fix)| fix.is_none_or(|p| p == pol))
            .map(|(s, _)| s)
            .collect();
        if !usable_sets.is_empty() && self.logic != LogicId::Fo && self.logic != LogicId::Fotc1 {
            choices.extend([2, 2, 2]);
        }
        if self.vocab.is_empty() {
            choices.retain(|&c| c != 0);
        }
        let pick = |rng: &mut R| scope.elems.choose(rng).expect("nonempty").clone();
        match *choices.choose(rng).expect("nonempty") {
            0 => {
                let sym = self.vocab.symbols().choose(rng).expect("nonempty vocab");
                let args: Vec<String> = (0..sym.arity).map(|_| pick(rng)).collect();
                Formula::Rel(sym.name.clone(), args)
            }
            1 => {
                if rng.gen_bool(0.1) {
                    Formula::Top
                } else {
                    Formula::Eq(pick(rng), pick(rng))
                }
            }
            _ => {
                let s = (*usable_sets.choose(rng).expect("nonempty")).clone();
                Formula::In(s, pick(rng))
            }
        }
    }
}
