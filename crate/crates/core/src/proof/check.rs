//! Line-by-line checking of Hilbert-style proofs relative to premises.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use super::tautology_check;
use crate::syntax::{
    check_positive, free_variables, parse_formula, substitute_set, symbols, Formula, LogicId,
    SyntaxError, Vocabulary,
};
use crate::transforms::{axiom_instance, parse_bindings, AxiomId, Theory, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("malformed proof: {0}")]
    Format(String),
    #[error("line {line}: {source}")]
    Line { line: usize, source: SyntaxError },
    #[error("premise {index}: {source}")]
    Premise { index: usize, source: SyntaxError },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("letter budget exceeded: {0} propositional letters, at most {max}", max = super::MAX_LETTERS)]
    TooManyLetters(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Premise(usize),
    Axiom {
        id: AxiomId,
        bind: BTreeMap<String, String>,
    },
    Taut,
    Mp(usize, usize),
    Gen {
        from: usize,
        var: String,
    },
    SetGen {
        from: usize,
        var: String,
    },
    TcGen {
        from: usize,
        pred: String,
    },
    LfpGen {
        from: usize,
        pred: String,
    },
}

impl Justification {
    /// Earlier lines this justification cites.
    pub fn cites(&self) -> Vec<usize> {
        match self {
            Justification::Mp(i, j) => vec![*i, *j],
            Justification::Gen { from, .. }
            | Justification::SetGen { from, .. }
            | Justification::TcGen { from, .. }
            | Justification::LfpGen { from, .. } => vec![*from],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub logic: LogicId,
    pub theory: Theory,
    /// The base vocabulary plus the declared rule predicates.
    pub vocab: Vocabulary,
    /// Unary predicates declared for the TC and LFP generalization rules.
    pub predicates: Vec<String>,
    pub premises: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    /// `line` is 0-based, like the references inside a proof.
    Reject {
        line: usize,
        reason: String,
    },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl Proof {
    /// Reads the JSON proof format. Without `"vocab"` the tree vocabulary
    /// with labels `P1`, `P2` is used; `"predicates"` adds fresh unary
    /// symbols for the generalization rules.
    pub fn from_json(v: &Value) -> Result<Proof, ProofError> {
        let fmt = |m: String| ProofError::Format(m);
        let obj = v
            .as_object()
            .ok_or_else(|| fmt("expected an object".into()))?;
        let logic: LogicId =
            serde_json::from_value(obj.get("logic").cloned().unwrap_or(Value::Null))
                .map_err(|e| fmt(format!("logic: {e}")))?;
        let theory = match obj.get("theory").and_then(Value::as_str) {
            None | Some("none") | Some("pure") => Theory::None,
            Some("tree") => Theory::Tree,
            Some("linear") => Theory::Linear,
            Some(other) => return Err(fmt(format!("unknown theory `{other}`"))),
        };
        let mut vocab = match obj.get("vocab") {
            Some(vv) => Vocabulary::from_json(vv)?,
            None => Vocabulary::tree(2),
        };
        let mut predicates = Vec::new();
        for p in obj
            .get("predicates")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let p = p
                .as_str()
                .ok_or_else(|| fmt("predicates must be strings".into()))?;
            vocab.add(p, 1)?;
            predicates.push(p.to_string());
        }
        let mut premises = Vec::new();
        for (index, p) in obj
            .get("premises")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
            .enumerate()
        {
            let text = p
                .as_str()
                .ok_or_else(|| fmt(format!("premise {index} is not a string")))?;
            let f = parse_formula(text, &vocab)
                .map_err(|source| ProofError::Premise { index, source })?;
            premises.push(primitive(&f));
        }
        let raw_lines = obj
            .get("lines")
            .and_then(Value::as_array)
            .ok_or_else(|| fmt("missing array \"lines\"".into()))?;
        let mut lines = Vec::new();
        for (line, l) in raw_lines.iter().enumerate() {
            let text = l
                .get("formula")
                .and_then(Value::as_str)
                .ok_or_else(|| fmt(format!("line {line}: missing formula")))?;
            let formula =
                parse_formula(text, &vocab).map_err(|source| ProofError::Line { line, source })?;
            let by = l
                .get("by")
                .ok_or_else(|| fmt(format!("line {line}: missing justification")))
                .and_then(|b| justification(b).map_err(|m| fmt(format!("line {line}: {m}"))))?;
            lines.push(ProofLine {
                formula: primitive(&formula),
                by,
            });
        }
        Ok(Proof {
            logic,
            theory,
            vocab,
            predicates,
            premises,
            lines,
        })
    }
}

/// Rewrites `∃` as `¬∀¬`, for element and set quantifiers alike; the
/// axiom systems take `∀` as primitive.
pub fn primitive(f: &Formula) -> Formula {
    use Formula as F;
    let b = |g: &Formula| Box::new(primitive(g));
    match f {
        F::Top | F::Rel(..) | F::Eq(..) | F::In(..) => f.clone(),
        F::Not(a) => F::Not(b(a)),
        F::And(x, y) => F::And(b(x), b(y)),
        F::Or(x, y) => F::Or(b(x), b(y)),
        F::Implies(x, y) => F::Implies(b(x), b(y)),
        F::Exists(v, a) => F::not(F::forall(v, F::not(primitive(a)))),
        F::Forall(v, a) => F::Forall(v.clone(), b(a)),
        F::ExistsSet(v, a) => F::not(F::forall_set(v, F::not(primitive(a)))),
        F::ForallSet(v, a) => F::ForallSet(v.clone(), b(a)),
        F::Tc { x, y, body, u, v } => F::Tc {
            x: x.clone(),
            y: y.clone(),
            body: b(body),
            u: u.clone(),
            v: v.clone(),
        },
        F::Lfp {
            set,
            var,
            body,
            arg,
        } => F::Lfp {
            set: set.clone(),
            var: var.clone(),
            body: b(body),
            arg: arg.clone(),
        },
        F::Gfp {
            set,
            var,
            body,
            arg,
        } => F::Gfp {
            set: set.clone(),
            var: var.clone(),
            body: b(body),
            arg: arg.clone(),
        },
    }
}

/// Reads and checks a JSON proof. A line that does not parse is rejected
/// at that line; other format problems are errors.
pub fn check_proof_json(v: &Value) -> Result<Verdict, ProofError> {
    match Proof::from_json(v) {
        Ok(p) => Ok(check_proof(&p)),
        Err(ProofError::Line { line, source }) => Ok(Verdict::Reject {
            line,
            reason: source.to_string(),
        }),
        Err(e) => Err(e),
    }
}

fn justification(v: &Value) -> Result<Justification, String> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or("missing \"kind\"")?;
    let index = |key: &str| -> Result<usize, String> {
        match v.get(key) {
            Some(Value::Number(n)) => n
                .as_u64()
                .map(|n| n as usize)
                .ok_or(format!("bad \"{key}\"")),
            Some(Value::Array(a)) if a.len() == 1 => a[0]
                .as_u64()
                .map(|n| n as usize)
                .ok_or(format!("bad \"{key}\"")),
            _ => Err(format!("missing line reference \"{key}\"")),
        }
    };
    let name = |keys: &[&str]| -> Result<String, String> {
        keys.iter()
            .find_map(|k| v.get(*k).and_then(Value::as_str))
            .map(str::to_string)
            .ok_or(format!("missing \"{}\"", keys[0]))
    };
    Ok(match kind {
        "premise" => Justification::Premise(index("id")?),
        "axiom" => {
            let id: AxiomId = name(&["id"])?
                .parse()
                .map_err(|e: TransformError| e.to_string())?;
            let mut bind = BTreeMap::new();
            if let Some(b) = v.get("bind").and_then(Value::as_object) {
                for (k, x) in b {
                    let x = x.as_str().ok_or(format!("binding `{k}` is not a string"))?;
                    bind.insert(k.clone(), x.to_string());
                }
            }
            Justification::Axiom { id, bind }
        }
        "taut" => Justification::Taut,
        "mp" => {
            let from = v
                .get("from")
                .and_then(Value::as_array)
                .ok_or("mp needs \"from\": [i, j]")?;
            let ix: Vec<usize> = from
                .iter()
                .filter_map(Value::as_u64)
                .map(|n| n as usize)
                .collect();
            if ix.len() != 2 || from.len() != 2 {
                return Err("mp needs \"from\": [i, j]".into());
            }
            Justification::Mp(ix[0], ix[1])
        }
        "gen" => Justification::Gen {
            from: index("from")?,
            var: name(&["var", "x"])?,
        },
        "setgen" => Justification::SetGen {
            from: index("from")?,
            var: name(&["var", "X"])?,
        },
        "tcgen" => Justification::TcGen {
            from: index("from")?,
            pred: name(&["pred", "P"])?,
        },
        "lfpgen" => Justification::LfpGen {
            from: index("from")?,
            pred: name(&["pred", "P"])?,
        },
        other => return Err(format!("unknown justification `{other}`")),
    })
}

fn axiom_available(id: AxiomId, logic: LogicId, theory: Theory) -> bool {
    use AxiomId::*;
    match id {
        Fo1 | Fo2 | Fo3 | Fo4 | Fo5 | Fo6 => true,
        Comp | Mso1 | Mso2 | Mso3 => logic == LogicId::Mso,
        Tcax => logic == LogicId::Fotc1,
        Lfpax => logic == LogicId::Folfp1,
        _ => AxiomId::theory_axioms(theory).contains(&id),
    }
}

/// Checks every line in order and stops at the first unjustified one.
pub fn check_proof(p: &Proof) -> Verdict {
    let mut deps: Vec<BTreeSet<usize>> = Vec::with_capacity(p.lines.len());
    for n in 0..p.lines.len() {
        match check_line(p, n, &deps) {
            Ok(d) => deps.push(d),
            Err(reason) => return Verdict::Reject { line: n, reason },
        }
    }
    Verdict::Accept
}

/// Premises each line depends on, for an accepted proof.
pub fn premise_dependencies(p: &Proof) -> Option<Vec<BTreeSet<usize>>> {
    let mut deps = Vec::with_capacity(p.lines.len());
    for n in 0..p.lines.len() {
        deps.push(check_line(p, n, &deps).ok()?);
    }
    Some(deps)
}

fn check_line(p: &Proof, n: usize, deps: &[BTreeSet<usize>]) -> Result<BTreeSet<usize>, String> {
    let line = &p.lines[n];
    let phi = &line.formula;
    phi.check_logic(p.logic).map_err(|e| e.to_string())?;
    for c in line.by.cites() {
        if c >= n {
            return Err(format!("line {c} is not an earlier line"));
        }
    }
    let earlier = |i: usize| &p.lines[i].formula;
    let mut d = BTreeSet::new();
    match &line.by {
        Justification::Premise(i) => {
            let prem = p
                .premises
                .get(*i)
                .ok_or(format!("there is no premise {i}"))?;
            if prem != phi {
                return Err(format!("the formula is not premise {i}"));
            }
            d.insert(*i);
        }
        Justification::Taut => match tautology_check(phi) {
            Ok(true) => {}
            Ok(false) => return Err("φ is a propositional tautology".into()),
            Err(e) => return Err(e.to_string()),
        },
        Justification::Axiom { id, bind } => {
            if !axiom_available(*id, p.logic, p.theory) {
                return Err(format!(
                    "axiom {id} is not available in {} with this theory",
                    p.logic
                ));
            }
            let b = parse_bindings(bind, &p.vocab).map_err(|e| e.to_string())?;
            let inst = axiom_instance(*id, &b).map_err(|e| match e {
                TransformError::SideCondition(c) => c,
                other => other.to_string(),
            })?;
            if primitive(&inst) != *phi {
                return Err(format!(
                    "the formula is not the {id} instance for the given bindings"
                ));
            }
        }
        Justification::Mp(i, j) => {
            match earlier(*j) {
                Formula::Implies(a, b) if **a == *earlier(*i) => {
                    if **b != *phi {
                        return Err(format!("the formula is not the consequent of line {j}"));
                    }
                }
                _ => return Err(format!("line {j} is not an implication from line {i}")),
            }
            d.extend(&deps[*i]);
            d.extend(&deps[*j]);
        }
        Justification::Gen { from, var } => {
            if *phi != Formula::forall(var, earlier(*from).clone()) {
                return Err(format!("the formula is not ∀{var} applied to line {from}"));
            }
            for &i in &deps[*from] {
                if free_variables(&p.premises[i]).elems.contains(var) {
                    return Err(format!("{var} does not occur free in premise {i}"));
                }
            }
            d.extend(&deps[*from]);
        }
        Justification::SetGen { from, var } => {
            if p.logic != LogicId::Mso {
                return Err("MSO generalization is a rule of MSO only".into());
            }
            if *phi != Formula::forall_set(var, earlier(*from).clone()) {
                return Err(format!("the formula is not ∀{var} applied to line {from}"));
            }
            for &i in &deps[*from] {
                if free_variables(&p.premises[i]).sets.contains(var) {
                    return Err(format!("{var} does not occur free in premise {i}"));
                }
            }
            d.extend(&deps[*from]);
        }
        Justification::TcGen { from, pred } => {
            if p.logic != LogicId::Fotc1 {
                return Err("TC generalization is a rule of FO(TC¹) only".into());
            }
            let (xi, x, y, body, u, v) = match phi {
                Formula::Implies(xi, c) => match &**c {
                    Formula::Tc { x, y, body, u, v } => (xi, x, y, body, u, v),
                    _ => return Err("the formula has the form ξ → [TC_xy φ](u,v)".into()),
                },
                _ => return Err("the formula has the form ξ → [TC_xy φ](u,v)".into()),
            };
            fresh_predicate(p, pred)?;
            let pa = |t: &str| Formula::rel(pred, &[t]);
            let expected = Formula::implies(
                (**xi).clone(),
                Formula::implies(
                    Formula::and(
                        pa(u),
                        Formula::forall(
                            x,
                            Formula::forall(
                                y,
                                Formula::implies(Formula::and(pa(x), (**body).clone()), pa(y)),
                            ),
                        ),
                    ),
                    pa(v),
                ),
            );
            if *earlier(*from) != expected {
                return Err(format!(
                    "line {from} is ξ → ((P(u) ∧ ∀x ∀y (P(x) ∧ φ(x,y) → P(y))) → P(v)) for this conclusion"
                ));
            }
            if symbols(xi).contains(pred) {
                return Err("P does not occur in ξ".into());
            }
            if symbols(body).contains(pred) {
                return Err("P does not occur in φ".into());
            }
            premises_avoid(p, &deps[*from], pred)?;
            d.extend(&deps[*from]);
        }
        Justification::LfpGen { from, pred } => {
            if p.logic != LogicId::Folfp1 {
                return Err("LFP generalization is a rule of FO(LFP¹) only".into());
            }
            let (xi, set, x, body, y) = match phi {
                Formula::Implies(xi, c) => match &**c {
                    Formula::Lfp {
                        set,
                        var,
                        body,
                        arg,
                    } => (xi, set, var, body, arg),
                    _ => return Err("the formula has the form ξ → [LFP_Xx φ](y)".into()),
                },
                _ => return Err("the formula has the form ξ → [LFP_Xx φ](y)".into()),
            };
            fresh_predicate(p, pred)?;
            if symbols(body).contains(pred) {
                return Err("P does not occur in φ(x,X)".into());
            }
            let with_p = substitute_set(body, set, pred, true).map_err(|e| e.to_string())?;
            let expected = Formula::implies(
                (**xi).clone(),
                Formula::implies(
                    Formula::forall(x, Formula::implies(with_p, Formula::rel(pred, &[x]))),
                    Formula::rel(pred, &[y]),
                ),
            );
            if *earlier(*from) != expected {
                return Err(format!(
                    "line {from} is ξ → (∀x (φ(x,P) → P(x)) → P(y)) for this conclusion"
                ));
            }
            if !check_positive(body, set) {
                return Err("P positive in φ".into());
            }
            if symbols(xi).contains(pred) {
                return Err("P does not occur in ξ".into());
            }
            premises_avoid(p, &deps[*from], pred)?;
            d.extend(&deps[*from]);
        }
    }
    Ok(d)
}

fn fresh_predicate(p: &Proof, pred: &str) -> Result<(), String> {
    if !p.predicates.iter().any(|q| q == pred) {
        return Err(format!("P = {pred} is declared under \"predicates\""));
    }
    Ok(())
}

fn premises_avoid(p: &Proof, used: &BTreeSet<usize>, pred: &str) -> Result<(), String> {
    for &i in used {
        if symbols(&p.premises[i]).contains(pred) {
            return Err(format!("P does not occur in premise {i}"));
        }
    }
    Ok(())
}
