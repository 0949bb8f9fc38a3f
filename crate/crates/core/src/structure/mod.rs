//! Finite frames: a domain `0..n`, relations over a vocabulary and the
//! admissible family that set quantifiers range over.

mod json;
mod tree;

pub use json::{frame_from_json, frame_to_json, parse_structure, TreeSpec};
pub use tree::{
    canonical_tree_code, check_forest_shape, check_tree_axioms, check_tree_shape, subforest_at,
    tree_from_parents, TreeAxiomReport, TreeStructure,
};

use std::fmt;

use thiserror::Error;

use crate::syntax::{SyntaxError, Vocabulary};

/// Domains are capped so that element sets fit a `u32` bitmask.
pub const MAX_DOMAIN: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed structure document: {0}")]
    Json(String),
    #[error(transparent)]
    Vocabulary(#[from] SyntaxError),
    #[error("empty domain")]
    EmptyDomain,
    #[error("domain of size {0} exceeds the limit of {MAX_DOMAIN}")]
    TooLarge(usize),
    #[error("element {elem} out of range for a domain of size {n}")]
    OutOfRange { elem: usize, n: usize },
    #[error("tuple for `{name}` has {found} entries, expected {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("set {0} is not in the admissible family")]
    NotAdmissible(ElemSet),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("not a forest: {0}")]
    NotAForest(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// A set of domain elements as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(pub u32);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> ElemSet {
        if n >= 32 {
            ElemSet(u32::MAX)
        } else {
            ElemSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(e: usize) -> ElemSet {
        ElemSet(1 << e)
    }

    pub fn contains(self, e: usize) -> bool {
        e < 32 && self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1 << e);
    }

    pub fn with(self, e: usize) -> ElemSet {
        ElemSet(self.0 | 1 << e)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 | o.0)
    }

    pub fn intersect(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 & o.0)
    }

    pub fn minus(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> ElemSet {
        ElemSet(!self.0 & ElemSet::full(n).0)
    }

    pub fn is_subset(self, o: ElemSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Parses `{0,2}` (braces optional, whitespace ignored).
    pub fn parse(s: &str) -> Result<ElemSet, String> {
        let inner = s
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .trim();
        let mut set = ElemSet::EMPTY;
        if inner.is_empty() {
            return Ok(set);
        }
        for part in inner.split(',') {
            let e: usize = part
                .trim()
                .parse()
                .map_err(|_| format!("bad element `{}` in set `{s}`", part.trim()))?;
            if e >= MAX_DOMAIN {
                return Err(format!("element {e} out of range"));
            }
            set.insert(e);
        }
        Ok(set)
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl serde::Serialize for ElemSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for ElemSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let elems = Vec::<usize>::deserialize(d)?;
        if let Some(&e) = elems.iter().find(|&&e| e >= MAX_DOMAIN) {
            return Err(serde::de::Error::custom(format!(
                "element {e} out of range"
            )));
        }
        Ok(elems.into_iter().collect())
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Dense membership table for one relation symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(arity: usize, n: usize) -> Relation {
        Relation {
            arity,
            n,
            bits: vec![false; n.pow(arity as u32)],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.n + e)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.bits[self.index(tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], value: bool) {
        let i = self.index(tuple);
        self.bits[i] = value;
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                let mut t = vec![0; self.arity];
                let mut k = i;
                for slot in t.iter_mut().rev() {
                    *slot = k % self.n;
                    k /= self.n;
                }
                out.push(t);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The sets a frame's set quantifiers range over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Admissible {
    Full,
    Listed(Vec<ElemSet>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    vocab: Vocabulary,
    n: usize,
    rels: Vec<Relation>,
    admissible: Admissible,
}

impl Frame {
    /// All relations empty, full admissible family.
    pub fn new(vocab: Vocabulary, n: usize) -> Result<Frame, StructureError> {
        if n == 0 {
            return Err(StructureError::EmptyDomain);
        }
        if n > MAX_DOMAIN {
            return Err(StructureError::TooLarge(n));
        }
        let rels = vocab
            .symbols()
            .iter()
            .map(|s| Relation::empty(s.arity, n))
            .collect();
        Ok(Frame {
            vocab,
            n,
            rels,
            admissible: Admissible::Full,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.vocab.index_of(name).map(|i| &self.rels[i])
    }

    pub fn relation_at(&self, index: usize) -> &Relation {
        &self.rels[index]
    }

    pub fn holds(&self, name: &str, tuple: &[usize]) -> bool {
        self.relation(name).is_some_and(|r| r.contains(tuple))
    }

    pub fn add_tuple(&mut self, name: &str, tuple: &[usize]) -> Result<(), StructureError> {
        self.set_tuple(name, tuple, true)
    }

    pub fn set_tuple(
        &mut self,
        name: &str,
        tuple: &[usize],
        value: bool,
    ) -> Result<(), StructureError> {
        let i = self
            .vocab
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        let arity = self.rels[i].arity();
        if tuple.len() != arity {
            return Err(StructureError::Arity {
                name: name.to_string(),
                expected: arity,
                found: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.n) {
            return Err(StructureError::OutOfRange { elem: e, n: self.n });
        }
        self.rels[i].set(tuple, value);
        Ok(())
    }

    pub fn admissible(&self) -> &Admissible {
        &self.admissible
    }

    pub fn is_full(&self) -> bool {
        self.admissible == Admissible::Full
    }

    /// Duplicates are dropped keeping first occurrences.
    pub fn set_admissible(&mut self, family: Admissible) -> Result<(), StructureError> {
        self.admissible = match family {
            Admissible::Full => Admissible::Full,
            Admissible::Listed(sets) => {
                let mut out: Vec<ElemSet> = Vec::with_capacity(sets.len());
                for s in sets {
                    if !s.is_subset(self.domain()) {
                        let bad = s.minus(self.domain()).iter().next().unwrap_or(0);
                        return Err(StructureError::OutOfRange {
                            elem: bad,
                            n: self.n,
                        });
                    }
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
                Admissible::Listed(out)
            }
        };
        Ok(())
    }

    pub fn is_admissible(&self, s: ElemSet) -> bool {
        match &self.admissible {
            Admissible::Full => s.is_subset(self.domain()),
            Admissible::Listed(sets) => sets.contains(&s),
        }
    }

    /// Admissible sets; all subsets in increasing bitmask order for Full.
    pub fn admissible_sets(&self) -> AdmissibleIter<'_> {
        match &self.admissible {
            Admissible::Full => AdmissibleIter::Full {
                next: 0,
                end: 1u64 << self.n,
            },
            Admissible::Listed(sets) => AdmissibleIter::Listed(sets.iter()),
        }
    }

    pub fn admissible_count(&self) -> usize {
        match &self.admissible {
            Admissible::Full => 1 << self.n,
            Admissible::Listed(sets) => sets.len(),
        }
    }

    /// Relation symbols with their tuples, in vocabulary order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.vocab
            .symbols()
            .iter()
            .zip(&self.rels)
            .map(|(s, r)| (s.name.as_str(), r))
    }

    /// Induced substructure on `a` (nonempty), elements renumbered in
    /// increasing order. Also returns the old index of each new element.
    pub fn substructure(&self, a: ElemSet) -> Result<(Frame, Vec<usize>), StructureError> {
        let a = a.intersect(self.domain());
        if a.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let old: Vec<usize> = a.to_vec();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &e) in old.iter().enumerate() {
            new_of[e] = i;
        }
        let mut sub = Frame::new(self.vocab.clone(), old.len())?;
        for (ri, rel) in self.rels.iter().enumerate() {
            for t in rel.tuples() {
                if t.iter().all(|&e| a.contains(e)) {
                    let nt: Vec<usize> = t.iter().map(|&e| new_of[e]).collect();
                    sub.rels[ri].set(&nt, true);
                }
            }
        }
        let map_set =
            |s: ElemSet| -> ElemSet { s.intersect(a).iter().map(|e| new_of[e]).collect() };
        sub.admissible = match &self.admissible {
            Admissible::Full => Admissible::Full,
            Admissible::Listed(sets) => {
                let mut out: Vec<ElemSet> = Vec::new();
                for &s in sets {
                    let m = map_set(s);
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
                Admissible::Listed(out)
            }
        };
        Ok((sub, old))
    }

    /// Same frame over a larger vocabulary; new symbols are empty.
    pub fn extend_vocab(&self, extra: &Vocabulary) -> Result<Frame, StructureError> {
        let vocab = self.vocab.union(extra)?;
        let mut f = Frame::new(vocab, self.n)?;
        for (name, rel) in self.relations() {
            for t in rel.tuples() {
                f.add_tuple(name, &t)?;
            }
        }
        f.admissible = self.admissible.clone();
        Ok(f)
    }

    /// Applies a permutation `perm[old] = new` of the domain.
    pub fn permute(&self, perm: &[usize]) -> Frame {
        let mut f = Frame::new(self.vocab.clone(), self.n).expect("same size");
        for (ri, rel) in self.rels.iter().enumerate() {
            for t in rel.tuples() {
                let nt: Vec<usize> = t.iter().map(|&e| perm[e]).collect();
                f.rels[ri].set(&nt, true);
            }
        }
        f.admissible = match &self.admissible {
            Admissible::Full => Admissible::Full,
            Admissible::Listed(sets) => Admissible::Listed(
                sets.iter()
                    .map(|s| s.iter().map(|e| perm[e]).collect())
                    .collect(),
            ),
        };
        f
    }
}

pub enum AdmissibleIter<'a> {
    Full { next: u64, end: u64 },
    Listed(std::slice::Iter<'a, ElemSet>),
}

impl Iterator for AdmissibleIter<'_> {
    type Item = ElemSet;

    fn next(&mut self) -> Option<ElemSet> {
        match self {
            AdmissibleIter::Full { next, end } => {
                if *next < *end {
                    let s = ElemSet(*next as u32);
                    *next += 1;
                    Some(s)
                } else {
                    None
                }
            }
            AdmissibleIter::Listed(it) => it.next().copied(),
        }
    }
}
