//! Seeded generators for frames, trees and formulas, and a bounded
//! enumerator of sentences used as a distinguishability oracle.

mod enumerate;
mod formulas;

pub use enumerate::{enumerate_formulas, EnumConfig, EnumError};
pub use formulas::FormulaGen;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::structure::{tree_from_parents, Admissible, ElemSet, Frame, TreeStructure};
use crate::syntax::{Formula, LogicId, Vocabulary};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub min_size: usize,
    pub max_size: usize,
    pub vocab: Vocabulary,
    /// Quantifier depth bound for formulas.
    pub max_depth: usize,
    /// Bound on Boolean connectives per formula.
    pub max_ops: usize,
    pub logic: LogicId,
    /// Probability that a tuple is in a relation of a random frame.
    pub density: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            min_size: 1,
            max_size: 6,
            vocab: Vocabulary::tree(2),
            max_depth: 2,
            max_ops: 4,
            logic: LogicId::Mso,
            density: 0.3,
        }
    }
}

/// Single-axiom damage applied to a tree by [`Generator::near_tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    /// Drops `lt(a,c)` where `a < b < c`: breaks T1.
    LtNotTransitive,
    /// Adds `lt(a,a)`: breaks T2.
    LtReflexive,
    /// Detaches a subtree into a second root: breaks T4.
    ExtraRoot,
    /// Adds `lt(b,c)` for `b` incomparable with the parent of `c`: breaks T5.
    BranchNotLinear,
    /// Drops `slt(a,c)` where `a < b < c` among siblings: breaks T6.
    SltNotTransitive,
    /// Adds `slt(a,a)`: breaks T7.
    SltReflexive,
    /// Removes the order between two siblings: breaks T10.
    SiblingsUnordered,
    /// Adds `slt` between a parent and its child: breaks T10.
    SltAcrossLevels,
}

impl Violation {
    pub const ALL: [Violation; 8] = [
        Violation::LtNotTransitive,
        Violation::LtReflexive,
        Violation::ExtraRoot,
        Violation::BranchNotLinear,
        Violation::SltNotTransitive,
        Violation::SltReflexive,
        Violation::SiblingsUnordered,
        Violation::SltAcrossLevels,
    ];

    /// The tree axiom the damage is aimed at.
    pub fn target(self) -> &'static str {
        match self {
            Violation::LtNotTransitive => "T1",
            Violation::LtReflexive => "T2",
            Violation::ExtraRoot => "T4",
            Violation::BranchNotLinear => "T5",
            Violation::SltNotTransitive => "T6",
            Violation::SltReflexive => "T7",
            Violation::SiblingsUnordered | Violation::SltAcrossLevels => "T10",
        }
    }
}

/// A seeded stream of random objects. The same config always yields the
/// same stream.
#[derive(Debug, Clone)]
pub struct Generator {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Generator {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Generator { cfg, rng }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn size(&mut self) -> usize {
        let lo = self.cfg.min_size.max(1);
        let hi = self.cfg.max_size.max(lo);
        self.rng.gen_range(lo..=hi)
    }

    /// Arbitrary frame over the configured vocabulary with a Full family.
    pub fn frame(&mut self) -> Frame {
        let n = self.size();
        self.frame_of_size(n)
    }

    pub fn frame_of_size(&mut self, n: usize) -> Frame {
        let mut f = Frame::new(self.cfg.vocab.clone(), n).expect("size within bounds");
        let syms: Vec<(String, usize)> = self
            .cfg
            .vocab
            .symbols()
            .iter()
            .map(|s| (s.name.clone(), s.arity))
            .collect();
        for (name, arity) in syms {
            let total = n.pow(arity as u32);
            for code in 0..total {
                if self.rng.gen_bool(self.cfg.density) {
                    let mut t = Vec::with_capacity(arity);
                    let mut c = code;
                    for _ in 0..arity {
                        t.push(c % n);
                        c /= n;
                    }
                    t.reverse();
                    f.add_tuple(&name, &t).expect("tuple in range");
                }
            }
        }
        f
    }

    /// A random family of `count` distinct subsets (fewer if the domain is
    /// too small).
    pub fn family(&mut self, n: usize, count: usize) -> Admissible {
        let total = 1u64 << n;
        let count = (count as u64).min(total) as usize;
        let mut sets: Vec<ElemSet> = Vec::new();
        while sets.len() < count {
            let s = ElemSet(self.rng.gen_range(0..total) as u32);
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
        Admissible::Listed(sets)
    }

    /// Frame with a random Listed family of up to `count` sets.
    pub fn listed_frame(&mut self, count: usize) -> Frame {
        let mut f = self.frame();
        let fam = self.family(f.size(), count);
        f.set_admissible(fam).expect("family within domain");
        f
    }

    fn random_labels(&mut self, n: usize) -> Vec<Vec<String>> {
        let labels: Vec<String> = self
            .cfg
            .vocab
            .symbols()
            .iter()
            .filter(|s| s.arity == 1 && s.name != "R")
            .map(|s| s.name.clone())
            .collect();
        (0..n)
            .map(|_| {
                labels
                    .iter()
                    .filter(|_| self.rng.gen_bool(0.5))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    /// Random ordered tree with `n` nodes, numbered at random.
    pub fn tree_of_size(&mut self, n: usize) -> Frame {
        let mut parents: Vec<Option<usize>> = vec![None];
        for i in 1..n {
            parents.push(Some(self.rng.gen_range(0..i)));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut self.rng);
        let mut relabeled = vec![None; n];
        for (i, p) in parents.iter().enumerate() {
            relabeled[perm[i]] = p.map(|q| perm[q]);
        }
        // Children are ordered by their (shuffled) index.
        let labels = self.random_labels(n);
        tree_from_parents(&self.cfg.vocab, &relabeled, &labels).expect("tree vocabulary")
    }

    pub fn tree(&mut self) -> TreeStructure {
        let n = self.size();
        TreeStructure::new(self.tree_of_size(n)).expect("generated trees are trees")
    }

    /// Random ordered forest with `roots` trees and `n` nodes in total.
    pub fn forest_of_size(&mut self, n: usize, roots: usize) -> Frame {
        let roots = roots.clamp(1, n);
        let mut parents: Vec<Option<usize>> = vec![None; roots];
        for i in roots..n {
            parents.push(Some(self.rng.gen_range(0..i)));
        }
        let labels = self.random_labels(n);
        tree_from_parents(&self.cfg.vocab, &parents, &labels).expect("tree vocabulary")
    }

    /// A tree damaged by `v`. The size is raised as far as the damage needs.
    pub fn near_tree(&mut self, v: Violation) -> Frame {
        let need = match v {
            Violation::LtReflexive | Violation::SltReflexive => 1,
            Violation::ExtraRoot | Violation::SiblingsUnordered | Violation::SltAcrossLevels => 2,
            Violation::LtNotTransitive => 3,
            Violation::SltNotTransitive => 4,
            Violation::BranchNotLinear => 4,
        };
        for attempt in 0.. {
            let lo = self.cfg.min_size.max(need);
            let hi = self.cfg.max_size.max(lo) + attempt / 50;
            let n = self
                .rng
                .gen_range(lo..=hi.min(crate::structure::MAX_DOMAIN));
            let mut f = self.tree_of_size(n);
            if self.damage(&mut f, v) {
                return f;
            }
        }
        unreachable!("the loop only exits by returning")
    }

    fn damage(&mut self, f: &mut Frame, v: Violation) -> bool {
        let n = f.size();
        let lt = |f: &Frame, a: usize, b: usize| f.holds("lt", &[a, b]);
        let parent = |f: &Frame, c: usize| {
            (0..n)
                .filter(|&a| lt(f, a, c))
                .max_by_key(|&a| (0..n).filter(|&b| lt(f, b, a)).count())
        };
        let pick = |rng: &mut ChaCha8Rng, cands: Vec<Vec<usize>>| -> Option<Vec<usize>> {
            cands.choose(rng).cloned()
        };
        let all3 = || {
            let mut v = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        v.push(vec![a, b, c]);
                    }
                }
            }
            v
        };
        let chosen = match v {
            Violation::LtReflexive | Violation::SltReflexive => {
                Some(vec![self.rng.gen_range(0..n)])
            }
            Violation::LtNotTransitive => pick(
                &mut self.rng,
                all3()
                    .into_iter()
                    .filter(|t| lt(f, t[0], t[1]) && lt(f, t[1], t[2]))
                    .collect(),
            ),
            Violation::SltNotTransitive => pick(
                &mut self.rng,
                all3()
                    .into_iter()
                    .filter(|t| f.holds("slt", &[t[0], t[1]]) && f.holds("slt", &[t[1], t[2]]))
                    .collect(),
            ),
            Violation::ExtraRoot => pick(
                &mut self.rng,
                (0..n)
                    .filter(|&c| parent(f, c).is_some())
                    .map(|c| vec![c])
                    .collect(),
            ),
            Violation::SiblingsUnordered => pick(
                &mut self.rng,
                (0..n)
                    .flat_map(|a| (0..n).map(move |b| vec![a, b]))
                    .filter(|t| f.holds("slt", &[t[0], t[1]]))
                    .collect(),
            ),
            Violation::SltAcrossLevels => pick(
                &mut self.rng,
                (0..n)
                    .flat_map(|a| (0..n).map(move |b| vec![a, b]))
                    .filter(|t| lt(f, t[0], t[1]))
                    .collect(),
            ),
            Violation::BranchNotLinear => {
                let mut cands = Vec::new();
                for c in 0..n {
                    let Some(p) = parent(f, c) else { continue };
                    for b in 0..n {
                        let related = |x: usize, y: usize| x == y || lt(f, x, y) || lt(f, y, x);
                        if !related(b, p) && !related(b, c) {
                            cands.push(vec![b, c]);
                        }
                    }
                }
                pick(&mut self.rng, cands)
            }
        };
        let Some(t) = chosen else { return false };
        match v {
            Violation::LtReflexive => f.add_tuple("lt", &[t[0], t[0]]).is_ok(),
            Violation::SltReflexive => f.add_tuple("slt", &[t[0], t[0]]).is_ok(),
            Violation::LtNotTransitive => f.set_tuple("lt", &[t[0], t[2]], false).is_ok(),
            Violation::SltNotTransitive => f.set_tuple("slt", &[t[0], t[2]], false).is_ok(),
            Violation::SiblingsUnordered => f.set_tuple("slt", &[t[0], t[1]], false).is_ok(),
            Violation::SltAcrossLevels => f.add_tuple("slt", &[t[0], t[1]]).is_ok(),
            Violation::BranchNotLinear => f.add_tuple("lt", &[t[0], t[1]]).is_ok(),
            Violation::ExtraRoot => {
                let c = t[0];
                let below: Vec<usize> = (0..n).filter(|&d| d == c || lt(f, c, d)).collect();
                for a in 0..n {
                    if below.contains(&a) {
                        continue;
                    }
                    for &d in &below {
                        let _ = f.set_tuple("lt", &[a, d], false);
                    }
                    let _ = f.set_tuple("slt", &[a, c], false);
                    let _ = f.set_tuple("slt", &[c, a], false);
                }
                true
            }
        }
    }

    /// Random formula of the configured logic whose free variables lie in
    /// the given lists.
    pub fn formula(&mut self, free_elems: &[&str], free_sets: &[&str]) -> Formula {
        let depth = self.rng.gen_range(0..=self.cfg.max_depth);
        let ops = self.rng.gen_range(0..=self.cfg.max_ops);
        let mut g = FormulaGen::new(&self.cfg.vocab, self.cfg.logic);
        g.generate(&mut self.rng, depth, ops, free_elems, free_sets)
    }

    /// Random sentence of the configured logic.
    pub fn sentence(&mut self) -> Formula {
        self.formula(&[], &[])
    }
}

pub fn random_frame(cfg: &GenConfig) -> Frame {
    Generator::new(cfg.clone()).frame()
}

pub fn random_tree(cfg: &GenConfig) -> TreeStructure {
    Generator::new(cfg.clone()).tree()
}

pub fn random_formula(cfg: &GenConfig) -> Formula {
    Generator::new(cfg.clone()).sentence()
}
