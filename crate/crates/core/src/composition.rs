//! Disjoint unions, f-fusions and the forest composition used to decompose
//! trees.

use std::collections::{BTreeMap, HashSet};

use serde_json::Value;
use thiserror::Error;

use crate::eval::{Assignment, Checker, EvalError};
use crate::structure::{
    check_forest_shape, Admissible, ElemSet, Frame, StructureError, MAX_DOMAIN,
};
use crate::syntax::{free_variables, parse_formula, Formula, SyntaxError, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("nothing to combine")]
    NoFrames,
    #[error("component {0} has a different vocabulary")]
    VocabularyMismatch(usize),
    #[error("tag predicate `{0}` clashes with a symbol of the vocabulary")]
    TagClash(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("fusion map has no formula for `{0}`")]
    MissingSymbol(String),
    #[error("fusion map formula for `{symbol}` is not quantifier-free")]
    NotQuantifierFree { symbol: String },
    #[error(
        "fusion map formula for `{symbol}` uses variable `{var}`; only x1..x{arity} are allowed"
    )]
    BadVariable {
        symbol: String,
        var: String,
        arity: usize,
    },
    #[error("fusion map formula for `{symbol}` uses `{name}`, which is not a symbol of the tagged vocabulary")]
    UnknownSymbol { symbol: String, name: String },
    #[error("fusion map: {0}")]
    Json(String),
    #[error("{0}")]
    Shape(String),
}

/// Name of the tag predicate for component `i` (0-based).
pub fn tag(i: usize) -> String {
    format!("Q{}", i + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointUnion {
    /// Over σ plus `Q1..Qk`.
    pub frame: Frame,
    /// Component `i` occupies `offsets[i] .. offsets[i] + size_i`.
    pub offsets: Vec<usize>,
}

impl DisjointUnion {
    /// Element of the union standing for element `e` of component `i`.
    pub fn embed(&self, i: usize, e: usize) -> usize {
        self.offsets[i] + e
    }
}

/// The σ* vocabulary: σ followed by one tag predicate per component.
pub fn tagged_vocab(sigma: &Vocabulary, k: usize) -> Result<Vocabulary, CompositionError> {
    let mut v = sigma.clone();
    for i in 0..k {
        let q = tag(i);
        if sigma.contains(&q) {
            return Err(CompositionError::TagClash(q));
        }
        v.add(&q, 1)?;
    }
    Ok(v)
}

pub fn disjoint_union(frames: &[Frame]) -> Result<DisjointUnion, CompositionError> {
    let first = frames.first().ok_or(CompositionError::NoFrames)?;
    let sigma = first.vocab().clone();
    if let Some(i) = frames.iter().position(|f| f.vocab() != &sigma) {
        return Err(CompositionError::VocabularyMismatch(i));
    }
    let mut offsets = Vec::with_capacity(frames.len());
    let mut n = 0;
    for f in frames {
        offsets.push(n);
        n += f.size();
    }
    if n > MAX_DOMAIN {
        return Err(StructureError::TooLarge(n).into());
    }
    let vocab = tagged_vocab(&sigma, frames.len())?;
    let mut out = Frame::new(vocab, n)?;
    for (i, f) in frames.iter().enumerate() {
        let off = offsets[i];
        for (name, rel) in f.relations() {
            for t in rel.tuples() {
                let t: Vec<usize> = t.iter().map(|&e| e + off).collect();
                out.add_tuple(name, &t)?;
            }
        }
        for e in 0..f.size() {
            out.add_tuple(&tag(i), &[e + off])?;
        }
    }
    out.set_admissible(union_family(frames, &offsets))?;
    Ok(DisjointUnion {
        frame: out,
        offsets,
    })
}

/// Unions `A_1 ∪ ... ∪ A_k` with each `A_i` admissible in component `i`.
fn union_family(frames: &[Frame], offsets: &[usize]) -> Admissible {
    if frames.iter().all(Frame::is_full) {
        return Admissible::Full;
    }
    let mut acc: Vec<ElemSet> = vec![ElemSet::EMPTY];
    for (f, &off) in frames.iter().zip(offsets) {
        let shifted: Vec<ElemSet> = f.admissible_sets().map(|s| ElemSet(s.0 << off)).collect();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for &a in &acc {
            for &s in &shifted {
                let u = a.union(s);
                if seen.insert(u) {
                    next.push(u);
                }
            }
        }
        acc = next;
    }
    acc.sort();
    Admissible::Listed(acc)
}

/// Quantifier-free definitions `f(r)` in variables `x1..xk` over σ*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionMap {
    /// Vocabulary of the fused frame.
    pub target: Vocabulary,
    pub defs: BTreeMap<String, Formula>,
}

impl FusionMap {
    /// The map `r ↦ r(x1..xk)` on every symbol of `sigma`.
    pub fn identity(sigma: &Vocabulary) -> FusionMap {
        let defs = sigma
            .symbols()
            .iter()
            .map(|s| (s.name.clone(), identity_def(&s.name, s.arity)))
            .collect();
        FusionMap {
            target: sigma.clone(),
            defs,
        }
    }

    /// Reads `{"f": {"lt": "<formula>", ...}, "vocab": [...]}`. Formulas are
    /// parsed over `sigma` plus `Q1..Qk`; without `"vocab"` the target is
    /// `sigma`.
    pub fn from_json(
        v: &Value,
        sigma: &Vocabulary,
        k: usize,
    ) -> Result<FusionMap, CompositionError> {
        let bad = |m: &str| CompositionError::Json(m.to_string());
        let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
        let f = obj
            .get("f")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing object \"f\""))?;
        let target = match obj.get("vocab") {
            Some(vv) => Vocabulary::from_json(vv)?,
            None => sigma.clone(),
        };
        let star = tagged_vocab(sigma, k)?;
        let mut defs = BTreeMap::new();
        for (name, text) in f {
            let text = text
                .as_str()
                .ok_or_else(|| bad("formulas must be strings"))?;
            defs.insert(name.clone(), parse_formula(text, &star)?);
        }
        let map = FusionMap { target, defs };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<(), CompositionError> {
        for s in self.target.symbols() {
            let phi = self
                .defs
                .get(&s.name)
                .ok_or_else(|| CompositionError::MissingSymbol(s.name.clone()))?;
            if !phi.is_quantifier_free() {
                return Err(CompositionError::NotQuantifierFree {
                    symbol: s.name.clone(),
                });
            }
            let fv = free_variables(phi);
            if let Some(name) = fv.sets.iter().next() {
                return Err(CompositionError::UnknownSymbol {
                    symbol: s.name.clone(),
                    name: name.clone(),
                });
            }
            let allowed: Vec<String> = (1..=s.arity).map(|i| format!("x{i}")).collect();
            if let Some(var) = fv.elems.iter().find(|v| !allowed.contains(v)) {
                return Err(CompositionError::BadVariable {
                    symbol: s.name.clone(),
                    var: var.clone(),
                    arity: s.arity,
                });
            }
        }
        Ok(())
    }
}

fn identity_def(name: &str, arity: usize) -> Formula {
    Formula::Rel(
        name.to_string(),
        (1..=arity).map(|i| format!("x{i}")).collect(),
    )
}

/// The f-fusion: the disjoint union with each target symbol reinterpreted
/// by its quantifier-free definition. Domain and admissible family are the
/// union's; tag predicates are dropped.
pub fn fuse(frames: &[Frame], f: &FusionMap) -> Result<Frame, CompositionError> {
    f.validate()?;
    let u = disjoint_union(frames)?;
    fuse_union(&u, f)
}

fn fuse_union(u: &DisjointUnion, f: &FusionMap) -> Result<Frame, CompositionError> {
    let n = u.frame.size();
    let mut out = Frame::new(f.target.clone(), n)?;
    for s in f.target.symbols() {
        let phi = &f.defs[&s.name];
        let mut checker = Checker::new(&u.frame, phi)?;
        let vars: Vec<String> = (1..=s.arity).map(|i| format!("x{i}")).collect();
        let total = n.pow(s.arity as u32);
        let mut tuple = vec![0; s.arity];
        for code in 0..total {
            let mut c = code;
            for slot in tuple.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            let g = vars
                .iter()
                .zip(&tuple)
                .fold(Assignment::new(), |g, (v, &e)| g.elem(v, e));
            if checker.eval(&g)? {
                out.add_tuple(&s.name, &tuple)?;
            }
        }
    }
    out.set_admissible(u.frame.admissible().clone())?;
    Ok(out)
}

/// All unions of sub-families, indexed by bitmask `I` over the inputs and
/// listed in increasing `I`, keeping the first occurrence of each set.
///
/// Panics with more than 24 input sets.
pub fn union_closure(sets: &[ElemSet]) -> Vec<ElemSet> {
    assert!(sets.len() <= 24, "union_closure supports at most 24 sets");
    let total = 1usize << sets.len();
    let mut unions = vec![ElemSet::EMPTY; total];
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..total {
        if i > 0 {
            let low = i.trailing_zeros() as usize;
            unions[i] = unions[i & (i - 1)].union(sets[low]);
        }
        if seen.insert(unions[i]) {
            out.push(unions[i]);
        }
    }
    out
}

/// The f^△ map on the tree vocabulary: `Q1` is the new leftmost root, `Q2`
/// the forest below it and `Q3` the forest to its right. Labels keep their
/// identity.
pub fn forest_map(sigma: &Vocabulary) -> Result<FusionMap, CompositionError> {
    forest_map_with(sigma, Some("Q2"), Some("Q3"))
}

/// f^△ with the lower and right tags renamed; an absent component's tag
/// is false everywhere.
fn forest_map_with(
    sigma: &Vocabulary,
    below: Option<&str>,
    right: Option<&str>,
) -> Result<FusionMap, CompositionError> {
    for (name, arity) in [("lt", 2), ("slt", 2), ("R", 1)] {
        if sigma.arity(name) != Some(arity) {
            return Err(CompositionError::Shape(format!(
                "forest composition needs `{name}` of arity {arity}"
            )));
        }
    }
    let tagged = |q: Option<&str>, x: &str| match q {
        Some(q) => Formula::rel(q, &[x]),
        None => Formula::not(Formula::Top),
    };
    let mut defs = BTreeMap::new();
    for s in sigma.symbols() {
        let def = match s.name.as_str() {
            "lt" => Formula::or(
                Formula::rel("lt", &["x1", "x2"]),
                Formula::and(Formula::rel("Q1", &["x1"]), tagged(below, "x2")),
            ),
            "slt" => Formula::or(
                Formula::rel("slt", &["x1", "x2"]),
                Formula::and(
                    Formula::and(Formula::rel("Q1", &["x1"]), tagged(right, "x2")),
                    Formula::rel("R", &["x2"]),
                ),
            ),
            "R" => Formula::or(
                Formula::and(tagged(right, "x1"), Formula::rel("R", &["x1"])),
                Formula::rel("Q1", &["x1"]),
            ),
            _ => identity_def(&s.name, s.arity),
        };
        defs.insert(s.name.clone(), def);
    }
    Ok(FusionMap {
        target: sigma.clone(),
        defs,
    })
}

/// `single` becomes the leftmost root, the roots of `below` its children and
/// the roots of `right` its right siblings. An absent component is the empty
/// forest.
pub fn forest_compose(
    single: &Frame,
    below: Option<&Frame>,
    right: Option<&Frame>,
) -> Result<Frame, CompositionError> {
    if single.size() != 1 {
        return Err(CompositionError::Shape(format!(
            "the first component must be a single node, not {} nodes",
            single.size()
        )));
    }
    let mut frames = vec![single.clone()];
    let mut tag_of = |f: Option<&Frame>, what: &str| -> Result<Option<String>, CompositionError> {
        let Some(f) = f else {
            return Ok(None);
        };
        if !check_forest_shape(f) {
            return Err(CompositionError::Shape(format!(
                "the `{what}` component is not a forest"
            )));
        }
        frames.push(f.clone());
        Ok(Some(tag(frames.len() - 1)))
    };
    let b = tag_of(below, "below")?;
    let r = tag_of(right, "right")?;
    let map = forest_map_with(single.vocab(), b.as_deref(), r.as_deref())?;
    fuse(&frames, &map)
}
