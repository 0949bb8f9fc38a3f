use std::collections::BTreeMap;

use super::{ElemSet, Frame, StructureError};
use crate::eval::eval_closed;
use crate::syntax::Vocabulary;
use crate::transforms::{axiom_instance, AxiomId, Bindings};

/// Builds an ordered forest: `lt` is the strict ancestor relation, `slt`
/// the transitive order among siblings (roots count as siblings) and `R`
/// marks the roots.
pub(crate) fn build_forest(
    vocab: &Vocabulary,
    roots: &[usize],
    children: &[Vec<usize>],
    labels: &[Vec<String>],
) -> Result<Frame, StructureError> {
    for (name, arity) in [("lt", 2), ("slt", 2), ("R", 1)] {
        if vocab.arity(name) != Some(arity) {
            return Err(StructureError::UnknownSymbol(name.to_string()));
        }
    }
    let n = children.len();
    let mut frame = Frame::new(vocab.clone(), n)?;
    let mut ancestors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack: Vec<usize> = roots.to_vec();
    while let Some(x) = stack.pop() {
        for &c in &children[x] {
            let mut anc = ancestors[x].clone();
            anc.push(x);
            ancestors[c] = anc;
            stack.push(c);
        }
    }
    for (x, anc) in ancestors.iter().enumerate() {
        for &a in anc {
            frame.add_tuple("lt", &[a, x])?;
        }
    }
    let groups = std::iter::once(roots).chain(children.iter().map(|c| c.as_slice()));
    for group in groups {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                frame.add_tuple("slt", &[group[i], group[j]])?;
            }
        }
    }
    for &r in roots {
        frame.add_tuple("R", &[r])?;
    }
    for (x, ls) in labels.iter().enumerate() {
        for l in ls {
            if l == "R" {
                continue;
            }
            frame.add_tuple(l, &[x])?;
        }
    }
    Ok(frame)
}

/// Tree or forest from a parent array; children keep index order.
pub fn tree_from_parents(
    vocab: &Vocabulary,
    parents: &[Option<usize>],
    labels: &[Vec<String>],
) -> Result<Frame, StructureError> {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (x, p) in parents.iter().enumerate() {
        match p {
            Some(p) if *p < n => children[*p].push(x),
            Some(p) => return Err(StructureError::OutOfRange { elem: *p, n }),
            None => roots.push(x),
        }
    }
    let mut labels = labels.to_vec();
    labels.resize(n, Vec::new());
    build_forest(vocab, &roots, &children, &labels)
}

/// Parent links and ordered children recovered from `lt` and `slt`.
#[derive(Debug, Clone)]
struct Shape {
    parent: Vec<Option<usize>>,
    roots: Vec<usize>,
    children: Vec<Vec<usize>>,
}

fn shape(frame: &Frame, forest: bool) -> Result<Shape, String> {
    let n = frame.size();
    let lt = frame.relation("lt").filter(|r| r.arity() == 2);
    let slt = frame.relation("slt").filter(|r| r.arity() == 2);
    let (Some(lt), Some(slt)) = (lt, slt) else {
        return Err("vocabulary lacks binary lt or slt".into());
    };
    for x in 0..n {
        if lt.contains(&[x, x]) {
            return Err(format!("lt is reflexive at {x}"));
        }
        if slt.contains(&[x, x]) {
            return Err(format!("slt is reflexive at {x}"));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if lt.contains(&[x, y]) && lt.contains(&[y, z]) && !lt.contains(&[x, z]) {
                    return Err(format!("lt is not transitive at {x},{y},{z}"));
                }
                if slt.contains(&[x, y]) && slt.contains(&[y, z]) && !slt.contains(&[x, z]) {
                    return Err(format!("slt is not transitive at {x},{y},{z}"));
                }
            }
        }
    }
    let mut parent = vec![None; n];
    let mut roots = Vec::new();
    for x in 0..n {
        let anc: Vec<usize> = (0..n).filter(|&y| lt.contains(&[y, x])).collect();
        for &a in &anc {
            for &b in &anc {
                if a != b && !lt.contains(&[a, b]) && !lt.contains(&[b, a]) {
                    return Err(format!("ancestors {a} and {b} of {x} are incomparable"));
                }
            }
        }
        match anc
            .iter()
            .find(|&&a| anc.iter().all(|&b| b == a || lt.contains(&[b, a])))
        {
            Some(&p) => parent[x] = Some(p),
            None => roots.push(x),
        }
    }
    if roots.is_empty() {
        return Err("no root".into());
    }
    if !forest && roots.len() > 1 {
        return Err(format!("{} roots", roots.len()));
    }
    let siblings = |x: usize, y: usize| parent[x] == parent[y];
    for x in 0..n {
        for y in 0..n {
            if slt.contains(&[x, y]) && !siblings(x, y) {
                return Err(format!("slt relates non-siblings {x} and {y}"));
            }
            if x != y && siblings(x, y) && !slt.contains(&[x, y]) && !slt.contains(&[y, x]) {
                return Err(format!("siblings {x} and {y} are unordered"));
            }
        }
    }
    let order = |group: &mut Vec<usize>| {
        group.sort_by_key(|&x| group_rank(slt, x, n));
    };
    let mut children = vec![Vec::new(); n];
    for x in 0..n {
        if let Some(p) = parent[x] {
            children[p].push(x);
        }
    }
    for c in children.iter_mut() {
        order(c);
    }
    order(&mut roots);
    Ok(Shape {
        parent,
        roots,
        children,
    })
}

fn group_rank(slt: &super::Relation, x: usize, n: usize) -> usize {
    (0..n).filter(|&y| slt.contains(&[y, x])).count()
}

/// A finite ordered tree: `lt` a strict order whose ancestors form chains
/// under a unique root, `slt` a strict total order on each sibling group.
/// `R` and labels are not consulted.
pub fn check_tree_shape(frame: &Frame) -> bool {
    shape(frame, false).is_ok()
}

/// Like [`check_tree_shape`] but several roots, ordered by `slt`, are
/// allowed; when `R` is in the vocabulary it must mark exactly the roots.
pub fn check_forest_shape(frame: &Frame) -> bool {
    forest_shape(frame).is_ok()
}

fn forest_shape(frame: &Frame) -> Result<Shape, String> {
    let s = shape(frame, true)?;
    if let Some(r) = frame.relation("R") {
        for x in 0..frame.size() {
            if r.contains(&[x]) != s.parent[x].is_none() {
                return Err(format!("R disagrees with the roots at {x}"));
            }
        }
    }
    Ok(s)
}

/// A frame known to be an ordered tree, with navigation helpers.
#[derive(Debug, Clone)]
pub struct TreeStructure {
    frame: Frame,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl TreeStructure {
    pub fn new(frame: Frame) -> Result<TreeStructure, StructureError> {
        let s = shape(&frame, false).map_err(StructureError::NotATree)?;
        Ok(TreeStructure {
            root: s.roots[0],
            parent: s.parent,
            children: s.children,
            frame,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn into_frame(self) -> Frame {
        self.frame
    }

    pub fn size(&self) -> usize {
        self.frame.size()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn first_child(&self, x: usize) -> Option<usize> {
        self.children[x].first().copied()
    }

    pub fn next_sibling(&self, x: usize) -> Option<usize> {
        let p = self.parent[x]?;
        let sibs = &self.children[p];
        let i = sibs.iter().position(|&s| s == x)?;
        sibs.get(i + 1).copied()
    }
}

/// `a`, its right siblings and all their descendants, with `R` recomputed.
pub fn subforest_at(frame: &Frame, a: usize) -> Result<Frame, StructureError> {
    if a >= frame.size() {
        return Err(StructureError::OutOfRange {
            elem: a,
            n: frame.size(),
        });
    }
    let s = forest_shape(frame).map_err(StructureError::NotAForest)?;
    let group: &[usize] = match s.parent[a] {
        Some(p) => &s.children[p],
        None => &s.roots,
    };
    let start = group.iter().position(|&x| x == a).expect("a in its group");
    let mut keep = ElemSet::EMPTY;
    let mut stack: Vec<usize> = group[start..].to_vec();
    while let Some(x) = stack.pop() {
        keep.insert(x);
        stack.extend(s.children[x].iter().copied());
    }
    let (mut sub, old) = frame.substructure(keep)?;
    if sub.vocab().contains("R") {
        for (i, &o) in old.iter().enumerate() {
            let root = group[start..].contains(&o);
            sub.set_tuple("R", &[i], root)?;
        }
    }
    Ok(sub)
}

/// Nested-parenthesis code of an ordered labelled forest, independent of
/// element numbering. Labels are the unary symbols other than `R`.
pub fn canonical_tree_code(frame: &Frame) -> Result<String, StructureError> {
    let s = shape(frame, true).map_err(StructureError::NotAForest)?;
    let labels: Vec<&str> = frame
        .vocab()
        .symbols()
        .iter()
        .filter(|sym| sym.arity == 1 && sym.name != "R")
        .map(|sym| sym.name.as_str())
        .collect();
    fn code(x: usize, s: &Shape, frame: &Frame, labels: &[&str], out: &mut String) {
        out.push('(');
        let mine: Vec<&str> = labels
            .iter()
            .copied()
            .filter(|l| frame.holds(l, &[x]))
            .collect();
        out.push_str(&mine.join(","));
        for &c in &s.children[x] {
            code(c, s, frame, labels, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    for &r in &s.roots {
        code(r, &s, frame, &labels, &mut out);
    }
    Ok(out)
}

/// Truth of each tree axiom `T1..T10` in the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAxiomReport {
    pub results: BTreeMap<AxiomId, bool>,
}

impl TreeAxiomReport {
    pub fn all(&self) -> bool {
        self.results.values().all(|&b| b)
    }

    pub fn failed(&self) -> Vec<AxiomId> {
        self.results
            .iter()
            .filter(|(_, &b)| !b)
            .map(|(&k, _)| k)
            .collect()
    }
}

pub fn check_tree_axioms(frame: &Frame) -> Result<TreeAxiomReport, StructureError> {
    let mut results = BTreeMap::new();
    for id in AxiomId::TREE {
        let phi = axiom_instance(id, &Bindings::new()).expect("closed tree axiom");
        let ok = eval_closed(frame, &phi).map_err(|e| StructureError::Eval(e.to_string()))?;
        results.insert(id, ok);
    }
    Ok(TreeAxiomReport { results })
}
