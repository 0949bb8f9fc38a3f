//! Formula syntax: the AST, vocabularies, logic fragments, a parser for the
//! ASCII grammar and a renderer that the parser reads back unchanged.

mod analysis;
mod parser;
mod render;

pub use analysis::{
    all_variables, check_positive, free_variables, fresh_name, nnf_gfp, quantifier_depth,
    rename_bound_avoiding, replace_set_atoms, substitute, substitute_renaming, substitute_set,
    symbols, FreeVars,
};
pub use parser::{parse_formula, MACROS};
pub use render::{render_folded, render_formula};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("parse error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("set variable `{0}` occurs negatively in a fixpoint body")]
    NotPositive(String),
    #[error("`{term}` is not substitutable for `{var}`")]
    NotSubstitutable { var: String, term: String },
    #[error("{construct} is not allowed in {logic}")]
    LogicViolation { logic: LogicId, construct: String },
    #[error("invalid vocabulary: {0}")]
    Vocabulary(String),
}

/// The four logics handled throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicId {
    #[serde(rename = "FO", alias = "fo")]
    Fo,
    #[serde(rename = "MSO", alias = "mso")]
    Mso,
    #[serde(rename = "FOTC1", alias = "fotc1", alias = "tc")]
    Fotc1,
    #[serde(rename = "FOLFP1", alias = "folfp1", alias = "lfp")]
    Folfp1,
}

impl LogicId {
    pub const ALL: [LogicId; 4] = [LogicId::Fo, LogicId::Mso, LogicId::Fotc1, LogicId::Folfp1];

    pub fn name(self) -> &'static str {
        match self {
            LogicId::Fo => "FO",
            LogicId::Mso => "MSO",
            LogicId::Fotc1 => "FOTC1",
            LogicId::Folfp1 => "FOLFP1",
        }
    }

    /// Games in these logics place set pebbles.
    pub fn has_set_moves(self) -> bool {
        self != LogicId::Fo
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LogicId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fo" => Ok(LogicId::Fo),
            "mso" => Ok(LogicId::Mso),
            "fotc1" | "tc" | "fo(tc1)" => Ok(LogicId::Fotc1),
            "folfp1" | "lfp" | "fo(lfp1)" => Ok(LogicId::Folfp1),
            _ => Err(format!(
                "unknown logic `{s}` (expected fo, mso, fotc1 or folfp1)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Rel(String, Vec<String>),
    Eq(String, String),
    /// `X(x)`: membership of an element variable in a set variable.
    In(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
    Tc {
        x: String,
        y: String,
        body: Box<Formula>,
        u: String,
        v: String,
    },
    Lfp {
        set: String,
        var: String,
        body: Box<Formula>,
        arg: String,
    },
    Gfp {
        set: String,
        var: String,
        body: Box<Formula>,
        arg: String,
    },
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Formula {
        Formula::Rel(
            name.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
        )
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.to_string(), y.to_string())
    }

    pub fn is_in(set: &str, x: &str) -> Formula {
        Formula::In(set.to_string(), x.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `(a -> b) & (b -> a)`; the AST has no biconditional node.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(f))
    }

    pub fn exists_set(x: &str, f: Formula) -> Formula {
        Formula::ExistsSet(x.to_string(), Box::new(f))
    }

    pub fn forall_set(x: &str, f: Formula) -> Formula {
        Formula::ForallSet(x.to_string(), Box::new(f))
    }

    pub fn tc(x: &str, y: &str, body: Formula, u: &str, v: &str) -> Formula {
        Formula::Tc {
            x: x.to_string(),
            y: y.to_string(),
            body: Box::new(body),
            u: u.to_string(),
            v: v.to_string(),
        }
    }

    pub fn lfp(set: &str, var: &str, body: Formula, arg: &str) -> Formula {
        Formula::Lfp {
            set: set.to_string(),
            var: var.to_string(),
            body: Box::new(body),
            arg: arg.to_string(),
        }
    }

    pub fn gfp(set: &str, var: &str, body: Formula, arg: &str) -> Formula {
        Formula::Gfp {
            set: set.to_string(),
            var: var.to_string(),
            body: Box::new(body),
            arg: arg.to_string(),
        }
    }

    /// Conjunction of a list, left-associated; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Disjunction of a list, left-associated; `!true` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(|| Formula::not(Formula::Top))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..)
        )
    }

    /// True when no quantifier, closure or fixpoint occurs.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            _ => false,
        }
    }

    /// Rejects constructs outside the given fragment.
    pub fn check_logic(&self, logic: LogicId) -> Result<(), SyntaxError> {
        let violation = |construct: &str| {
            Err(SyntaxError::LogicViolation {
                logic,
                construct: construct.to_string(),
            })
        };
        match self {
            Formula::Top | Formula::Rel(..) | Formula::Eq(..) => Ok(()),
            Formula::In(..) => match logic {
                LogicId::Fo | LogicId::Fotc1 => violation("a set atom"),
                _ => Ok(()),
            },
            Formula::Not(a) => a.check_logic(logic),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check_logic(logic)?;
                b.check_logic(logic)
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) => a.check_logic(logic),
            Formula::ExistsSet(_, a) | Formula::ForallSet(_, a) => {
                if logic != LogicId::Mso {
                    return violation("set quantification");
                }
                a.check_logic(logic)
            }
            Formula::Tc { body, .. } => {
                if logic != LogicId::Fotc1 {
                    return violation("the TC operator");
                }
                body.check_logic(logic)
            }
            Formula::Lfp { body, .. } | Formula::Gfp { body, .. } => {
                if logic != LogicId::Folfp1 {
                    return violation("a fixpoint operator");
                }
                body.check_logic(logic)
            }
        }
    }

    /// Number of nodes; used for budgets and sampling.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => 1,
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::ExistsSet(_, a)
            | Formula::ForallSet(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Tc { body, .. } | Formula::Lfp { body, .. } | Formula::Gfp { body, .. } => {
                1 + body.size()
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

/// Element variables start lowercase; set variables start uppercase.
pub fn is_set_var_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Relation symbols with arities, kept in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
}

impl Vocabulary {
    pub fn new(symbols: impl IntoIterator<Item = (String, usize)>) -> Result<Self, SyntaxError> {
        let mut v = Vocabulary::default();
        for (name, arity) in symbols {
            v.add(&name, arity)?;
        }
        Ok(v)
    }

    /// `lt`, `slt`, `R`, then `P1..Pn`.
    pub fn tree(labels: usize) -> Self {
        let mut symbols = vec![
            Symbol {
                name: "lt".into(),
                arity: 2,
            },
            Symbol {
                name: "slt".into(),
                arity: 2,
            },
            Symbol {
                name: "R".into(),
                arity: 1,
            },
        ];
        for i in 1..=labels {
            symbols.push(Symbol {
                name: format!("P{i}"),
                arity: 1,
            });
        }
        Vocabulary { symbols }
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if !valid_ident(name) {
            return Err(SyntaxError::Vocabulary(format!("bad symbol name `{name}`")));
        }
        if parser::is_reserved(name) {
            return Err(SyntaxError::Vocabulary(format!(
                "`{name}` is a reserved word"
            )));
        }
        match self.arity(name) {
            Some(a) if a == arity => Ok(()),
            Some(a) => Err(SyntaxError::Vocabulary(format!(
                "`{name}` declared with arities {a} and {arity}"
            ))),
            None => {
                self.symbols.push(Symbol {
                    name: name.to_string(),
                    arity,
                });
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Union, keeping `self`'s order first.
    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary, SyntaxError> {
        let mut v = self.clone();
        for s in &other.symbols {
            v.add(&s.name, s.arity)?;
        }
        Ok(v)
    }

    pub fn to_map(&self) -> BTreeMap<String, usize> {
        self.symbols
            .iter()
            .map(|s| (s.name.clone(), s.arity))
            .collect()
    }

    /// Renders as `["lt/2", "P1/1", ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.symbols
                .iter()
                .map(|s| serde_json::Value::String(format!("{}/{}", s.name, s.arity)))
                .collect(),
        )
    }

    /// Accepts `"name/arity"` strings or `{"name":..,"arity":..}` objects.
    pub fn from_json(v: &serde_json::Value) -> Result<Vocabulary, SyntaxError> {
        let items = v
            .as_array()
            .ok_or_else(|| SyntaxError::Vocabulary("expected an array".into()))?;
        let mut vocab = Vocabulary::default();
        for item in items {
            match item {
                serde_json::Value::String(s) => {
                    let (name, arity) = s.rsplit_once('/').ok_or_else(|| {
                        SyntaxError::Vocabulary(format!("expected `name/arity`, got `{s}`"))
                    })?;
                    let arity = arity
                        .parse()
                        .map_err(|_| SyntaxError::Vocabulary(format!("bad arity in `{s}`")))?;
                    vocab.add(name, arity)?;
                }
                other => {
                    let sym: Symbol = serde_json::from_value(other.clone())
                        .map_err(|e| SyntaxError::Vocabulary(e.to_string()))?;
                    vocab.add(&sym.name, sym.arity)?;
                }
            }
        }
        Ok(vocab)
    }
}

pub(crate) fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
