use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::proof::is_tautology;
use crate::syntax::{
    check_positive, free_variables, is_set_var_name, parse_formula, replace_set_atoms, substitute,
    substitute_set, Formula, Vocabulary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AxiomId {
    Fo1,
    Fo2,
    Fo3,
    Fo4,
    Fo5,
    Fo6,
    Comp,
    Mso1,
    Mso2,
    Mso3,
    Tcax,
    Lfpax,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    Ind,
    L1,
    L2,
    L3,
    L4,
    L5,
    Lind,
}

impl AxiomId {
    pub const ALL: [AxiomId; 29] = [
        AxiomId::Fo1,
        AxiomId::Fo2,
        AxiomId::Fo3,
        AxiomId::Fo4,
        AxiomId::Fo5,
        AxiomId::Fo6,
        AxiomId::Comp,
        AxiomId::Mso1,
        AxiomId::Mso2,
        AxiomId::Mso3,
        AxiomId::Tcax,
        AxiomId::Lfpax,
        AxiomId::T1,
        AxiomId::T2,
        AxiomId::T3,
        AxiomId::T4,
        AxiomId::T5,
        AxiomId::T6,
        AxiomId::T7,
        AxiomId::T8,
        AxiomId::T9,
        AxiomId::T10,
        AxiomId::Ind,
        AxiomId::L1,
        AxiomId::L2,
        AxiomId::L3,
        AxiomId::L4,
        AxiomId::L5,
        AxiomId::Lind,
    ];

    pub const TREE: [AxiomId; 10] = [
        AxiomId::T1,
        AxiomId::T2,
        AxiomId::T3,
        AxiomId::T4,
        AxiomId::T5,
        AxiomId::T6,
        AxiomId::T7,
        AxiomId::T8,
        AxiomId::T9,
        AxiomId::T10,
    ];

    pub const LINEAR: [AxiomId; 5] = [
        AxiomId::L1,
        AxiomId::L2,
        AxiomId::L3,
        AxiomId::L4,
        AxiomId::L5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Fo1 => "FO1",
            AxiomId::Fo2 => "FO2",
            AxiomId::Fo3 => "FO3",
            AxiomId::Fo4 => "FO4",
            AxiomId::Fo5 => "FO5",
            AxiomId::Fo6 => "FO6",
            AxiomId::Comp => "COMP",
            AxiomId::Mso1 => "MSO1",
            AxiomId::Mso2 => "MSO2",
            AxiomId::Mso3 => "MSO3",
            AxiomId::Tcax => "TCAX",
            AxiomId::Lfpax => "LFPAX",
            AxiomId::T1 => "T1",
            AxiomId::T2 => "T2",
            AxiomId::T3 => "T3",
            AxiomId::T4 => "T4",
            AxiomId::T5 => "T5",
            AxiomId::T6 => "T6",
            AxiomId::T7 => "T7",
            AxiomId::T8 => "T8",
            AxiomId::T9 => "T9",
            AxiomId::T10 => "T10",
            AxiomId::Ind => "IND",
            AxiomId::L1 => "L1",
            AxiomId::L2 => "L2",
            AxiomId::L3 => "L3",
            AxiomId::L4 => "L4",
            AxiomId::L5 => "L5",
            AxiomId::Lind => "LIND",
        }
    }

    /// Closed axioms need no bindings.
    pub fn is_closed(self) -> bool {
        AxiomId::TREE.contains(&self) || AxiomId::LINEAR.contains(&self)
    }

    /// Names of the meta-variables the schema takes; optional ones are
    /// suffixed with `?`.
    pub fn metavars(self) -> &'static [&'static str] {
        match self {
            AxiomId::Fo1 => &["phi"],
            AxiomId::Fo2 => &["phi", "x", "t"],
            AxiomId::Fo3 => &["phi", "psi", "x"],
            AxiomId::Fo4 => &["phi", "x"],
            AxiomId::Fo5 => &["x"],
            AxiomId::Fo6 => &["x", "y", "phi", "psi"],
            AxiomId::Comp => &["X", "x", "phi"],
            AxiomId::Mso1 => &["X", "phi", "T"],
            AxiomId::Mso2 => &["X", "phi", "psi"],
            AxiomId::Mso3 => &["X", "phi"],
            AxiomId::Tcax => &["x", "y", "u", "v", "phi", "psi", "w?"],
            AxiomId::Lfpax => &["X", "x", "y", "phi", "psi", "w?"],
            AxiomId::Ind | AxiomId::Lind => &["phi", "x?"],
            _ => &[],
        }
    }

    /// Axioms available in a theory in addition to the logical ones.
    pub fn theory_axioms(theory: Theory) -> &'static [AxiomId] {
        match theory {
            Theory::None => &[],
            Theory::Tree => &[
                AxiomId::T1,
                AxiomId::T2,
                AxiomId::T3,
                AxiomId::T4,
                AxiomId::T5,
                AxiomId::T6,
                AxiomId::T7,
                AxiomId::T8,
                AxiomId::T9,
                AxiomId::T10,
                AxiomId::Ind,
            ],
            Theory::Linear => &[
                AxiomId::L1,
                AxiomId::L2,
                AxiomId::L3,
                AxiomId::L4,
                AxiomId::L5,
                AxiomId::Lind,
            ],
        }
    }
}

/// Background theory whose specific axioms may be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    #[default]
    None,
    Tree,
    Linear,
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        let alias = match up.as_str() {
            "TC" | "FOTC" => "TCAX",
            "LFP" | "FOLFP" => "LFPAX",
            "LINEARIND" | "LIND" => "LIND",
            other => other,
        };
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == alias)
            .ok_or_else(|| TransformError::UnknownAxiom(s.to_string()))
    }
}

impl TryFrom<String> for AxiomId {
    type Error = TransformError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AxiomId> for String {
    fn from(a: AxiomId) -> String {
        a.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Formula(Formula),
    /// An element or set variable.
    Var(String),
    /// A unary predicate symbol standing for a set.
    Pred(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, Binding>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn with_formula(mut self, key: &str, f: Formula) -> Self {
        self.0.insert(key.to_string(), Binding::Formula(f));
        self
    }

    pub fn with_var(mut self, key: &str, v: &str) -> Self {
        self.0.insert(key.to_string(), Binding::Var(v.to_string()));
        self
    }

    pub fn with_pred(mut self, key: &str, p: &str) -> Self {
        self.0.insert(key.to_string(), Binding::Pred(p.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Binding> {
        self.0.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Binding)> {
        self.0.iter()
    }

    fn formula(&self, key: &str) -> Result<&Formula, TransformError> {
        match self.0.get(key) {
            Some(Binding::Formula(f)) => Ok(f),
            Some(_) => Err(TransformError::BindingKind {
                name: key.to_string(),
                expected: "a formula",
            }),
            None => Err(TransformError::MissingBinding(key.to_string())),
        }
    }

    fn var(&self, key: &str) -> Result<&str, TransformError> {
        match self.opt_var(key)? {
            Some(v) => Ok(v),
            None => Err(TransformError::MissingBinding(key.to_string())),
        }
    }

    fn opt_var(&self, key: &str) -> Result<Option<&str>, TransformError> {
        let want_set = is_set_var_name(key);
        match self.0.get(key) {
            Some(Binding::Var(v)) if is_set_var_name(v) == want_set => Ok(Some(v)),
            Some(_) => Err(TransformError::BindingKind {
                name: key.to_string(),
                expected: if want_set {
                    "a set variable"
                } else {
                    "an element variable"
                },
            }),
            None => Ok(None),
        }
    }
}

/// Reads textual bindings: `phi`/`psi` are formulas over `vocab`, `T` is a
/// unary predicate of `vocab` or a set variable, everything else a
/// variable name.
pub fn parse_bindings(
    raw: &BTreeMap<String, String>,
    vocab: &Vocabulary,
) -> Result<Bindings, TransformError> {
    let mut out = Bindings::new();
    for (k, v) in raw {
        let v = v.trim();
        let b = match k.as_str() {
            "phi" | "psi" => Binding::Formula(parse_formula(v, vocab)?),
            "T" if vocab.arity(v) == Some(1) => Binding::Pred(v.to_string()),
            _ => Binding::Var(v.to_string()),
        };
        out.0.insert(k.clone(), b);
    }
    Ok(out)
}

fn side(cond: &str) -> TransformError {
    TransformError::SideCondition(cond.to_string())
}

fn fixed(text: &str) -> Formula {
    parse_formula(text, &Vocabulary::tree(0)).expect("fixed axiom text parses")
}

/// The instance of schema `id` under `b`, after checking its side
/// conditions.
pub fn axiom_instance(id: AxiomId, b: &Bindings) -> Result<Formula, TransformError> {
    use Formula as F;
    let f = match id {
        AxiomId::Fo1 => {
            let phi = b.formula("phi")?;
            if !is_tautology(phi) {
                return Err(side("φ is a propositional tautology"));
            }
            phi.clone()
        }
        AxiomId::Fo2 => {
            let (phi, x, t) = (b.formula("phi")?, b.var("x")?, b.var("t")?);
            let inst = substitute(phi, x, t).map_err(|_| side("t is substitutable for x in φ"))?;
            F::implies(F::forall(x, phi.clone()), inst)
        }
        AxiomId::Fo3 => {
            let (phi, psi, x) = (b.formula("phi")?, b.formula("psi")?, b.var("x")?);
            F::implies(
                F::forall(x, F::implies(phi.clone(), psi.clone())),
                F::implies(F::forall(x, phi.clone()), F::forall(x, psi.clone())),
            )
        }
        AxiomId::Fo4 => {
            let (phi, x) = (b.formula("phi")?, b.var("x")?);
            if free_variables(phi).elems.contains(x) {
                return Err(side("x does not occur free in φ"));
            }
            F::implies(phi.clone(), F::forall(x, phi.clone()))
        }
        AxiomId::Fo5 => {
            let x = b.var("x")?;
            F::eq(x, x)
        }
        AxiomId::Fo6 => {
            let (x, y) = (b.var("x")?, b.var("y")?);
            let (phi, psi) = (b.formula("phi")?, b.formula("psi")?);
            if !phi.is_atomic() {
                return Err(side("φ is atomic"));
            }
            if !replaced_in_places(phi, psi, x, y) {
                return Err(side(
                    "ψ is obtained from φ by replacing x in zero or more places by y",
                ));
            }
            F::implies(F::eq(x, y), F::implies(phi.clone(), psi.clone()))
        }
        AxiomId::Comp => {
            let (set, x, phi) = (b.var("X")?, b.var("x")?, b.formula("phi")?);
            if free_variables(phi).sets.contains(set) {
                return Err(side("X does not occur free in φ"));
            }
            F::exists_set(set, F::forall(x, F::iff(F::is_in(set, x), phi.clone())))
        }
        AxiomId::Mso1 => {
            let (set, phi) = (b.var("X")?, b.formula("phi")?);
            let (t, pred) = match b.get("T") {
                Some(Binding::Var(t)) if is_set_var_name(t) => (t.as_str(), false),
                Some(Binding::Pred(p)) => (p.as_str(), true),
                Some(_) => {
                    return Err(TransformError::BindingKind {
                        name: "T".into(),
                        expected: "a set variable or a unary predicate",
                    })
                }
                None => return Err(TransformError::MissingBinding("T".into())),
            };
            let inst = substitute_set(phi, set, t, pred)
                .map_err(|_| side("T is substitutable in φ for X"))?;
            F::implies(F::forall_set(set, phi.clone()), inst)
        }
        AxiomId::Mso2 => {
            let (set, phi, psi) = (b.var("X")?, b.formula("phi")?, b.formula("psi")?);
            F::implies(
                F::forall_set(set, F::implies(phi.clone(), psi.clone())),
                F::implies(
                    F::forall_set(set, phi.clone()),
                    F::forall_set(set, psi.clone()),
                ),
            )
        }
        AxiomId::Mso3 => {
            let (set, phi) = (b.var("X")?, b.formula("phi")?);
            if free_variables(phi).sets.contains(set) {
                return Err(side("X does not occur free in φ"));
            }
            F::implies(phi.clone(), F::forall_set(set, phi.clone()))
        }
        AxiomId::Tcax => {
            let (x, y, u, v) = (b.var("x")?, b.var("y")?, b.var("u")?, b.var("v")?);
            let (phi, psi) = (b.formula("phi")?, b.formula("psi")?);
            if x == y {
                return Err(side("x and y are distinct"));
            }
            let w = &pick_arg(psi, b.opt_var("w")?, x);
            let params = params_of(psi, w);
            if params.contains(&x.to_string()) || params.contains(&y.to_string()) {
                return Err(side(
                    "x and y do not occur free in ψ other than as its argument",
                ));
            }
            let at = |t: &str| {
                substitute(psi, w, t).map_err(|_| side("ψ admits substitution of its argument"))
            };
            F::implies(
                F::tc(x, y, phi.clone(), u, v),
                F::implies(
                    F::and(
                        at(u)?,
                        F::forall(
                            x,
                            F::forall(y, F::implies(F::and(at(x)?, phi.clone()), at(y)?)),
                        ),
                    ),
                    at(v)?,
                ),
            )
        }
        AxiomId::Lfpax => {
            let (set, x, y) = (b.var("X")?, b.var("x")?, b.var("y")?);
            let (phi, psi) = (b.formula("phi")?, b.formula("psi")?);
            if !check_positive(phi, set) {
                return Err(side("X occurs only positively in φ"));
            }
            let w = &pick_arg(psi, b.opt_var("w")?, x);
            if params_of(psi, w).contains(&x.to_string()) {
                return Err(side(
                    "x does not occur free in ψ other than as its argument",
                ));
            }
            if free_variables(psi).sets.contains(set) {
                return Err(side("X does not occur free in ψ"));
            }
            let at = |t: &str| {
                substitute(psi, w, t).map_err(|_| side("ψ admits substitution of its argument"))
            };
            let replaced = replace_set_atoms(phi, set, psi, w);
            F::implies(
                F::lfp(set, x, phi.clone(), y),
                F::implies(F::forall(x, F::implies(replaced, at(x)?)), at(y)?),
            )
        }
        AxiomId::Ind | AxiomId::Lind => {
            let phi = b.formula("phi")?;
            let w = &pick_arg(phi, b.opt_var("x")?, "x");
            let fv = free_variables(phi);
            if fv.elems.iter().any(|v| v != w) || !fv.sets.is_empty() {
                return Err(side("φ has at most one free variable"));
            }
            let at = |t: &str| {
                substitute(phi, w, t).map_err(|_| side("φ admits substitution of its argument"))
            };
            let guard = if id == AxiomId::Ind {
                F::or(F::rel("lt", &["x", "y"]), F::rel("slt", &["x", "y"]))
            } else {
                F::rel("lt", &["x", "y"])
            };
            F::implies(
                F::forall(
                    "x",
                    F::implies(F::forall("y", F::implies(guard, at("y")?)), at("x")?),
                ),
                F::forall("x", at("x")?),
            )
        }
        AxiomId::T1 => fixed("A x. A y. A z. (lt(x,y) & lt(y,z) -> lt(x,z))"),
        AxiomId::T2 | AxiomId::L2 => fixed("!(E x. lt(x,x))"),
        AxiomId::T3 | AxiomId::L3 => {
            fixed("A x. A y. (lt(x,y) -> E z. (ltch(x,z) & (lt(z,y) | z = y)))")
        }
        AxiomId::T4 => fixed("E x. A y. (lt(x,y) | x = y)"),
        AxiomId::T5 => {
            fixed("A x. A y. A z. (lt(x,z) & lt(y,z) -> (lt(x,y) | x = y) | (lt(y,x) | y = x))")
        }
        AxiomId::T6 => fixed("A x. A y. A z. (slt(x,y) & slt(y,z) -> slt(x,z))"),
        AxiomId::T7 => fixed("!(E x. slt(x,x))"),
        AxiomId::T8 => fixed("A x. A y. (slt(x,y) -> E z. (sltns(x,z) & (slt(z,y) | z = y)))"),
        AxiomId::T9 => fixed("A x. E y. ((slt(y,x) | y = x) & !(E z. slt(z,y)))"),
        AxiomId::T10 => {
            let lhs = fixed("slt(x,y) | slt(y,x)");
            let rhs = fixed("(E z. (ltch(z,x) & ltch(z,y))) & x != y");
            F::forall("x", F::forall("y", F::iff(lhs, rhs)))
        }
        AxiomId::L1 => fixed("A x. A y. A z. (lt(x,y) & lt(y,z) -> lt(x,z))"),
        AxiomId::L4 => fixed("E x. A y. !lt(y,x)"),
        AxiomId::L5 => fixed("A x. A y. (x = y | lt(x,y) | lt(y,x))"),
    };
    Ok(f)
}

/// The distinguished argument of a unary schema formula: the bound name if
/// given, else its only free element variable, else `default`.
fn pick_arg(f: &Formula, given: Option<&str>, default: &str) -> String {
    if let Some(g) = given {
        return g.to_string();
    }
    let fv = free_variables(f).elems;
    if fv.len() == 1 {
        return fv.into_iter().next().expect("one element");
    }
    default.to_string()
}

fn params_of(f: &Formula, arg: &str) -> Vec<String> {
    free_variables(f)
        .elems
        .into_iter()
        .filter(|v| v != arg)
        .collect()
}

fn replaced_in_places(phi: &Formula, psi: &Formula, x: &str, y: &str) -> bool {
    let same = |a: &String, b: &String| a == b || (a == x && b == y);
    match (phi, psi) {
        (Formula::Top, Formula::Top) => true,
        (Formula::Rel(p, xs), Formula::Rel(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| same(a, b))
        }
        (Formula::Eq(a1, b1), Formula::Eq(a2, b2)) => same(a1, a2) && same(b1, b2),
        (Formula::In(s1, a1), Formula::In(s2, a2)) => s1 == s2 && same(a1, a2),
        _ => false,
    }
}
