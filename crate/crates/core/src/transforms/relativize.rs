use super::TransformError;
use crate::syntax::{
    all_variables, free_variables, rename_bound_avoiding, substitute_renaming, Formula,
};

/// `REL(phi, psi, x)`: `phi` with every quantifier, closure and fixpoint
/// restricted to `{a | psi(a)}`, where `x` is the distinguished free
/// variable of `psi`.
///
/// Bound variables of either formula that clash with the other are renamed
/// first. Free variables shared by the two formulas are an error.
pub fn relativize(phi: &Formula, psi: &Formula, x: &str) -> Result<Formula, TransformError> {
    let fpsi = free_variables(psi);
    if !fpsi.elems.contains(x) {
        return Err(TransformError::NotFree { var: x.to_string() });
    }
    let fphi = free_variables(phi);
    let shared = fphi
        .elems
        .intersection(&fpsi.elems)
        .chain(fphi.sets.intersection(&fpsi.sets))
        .next();
    if let Some(v) = shared {
        return Err(TransformError::SharedVariable(v.clone()));
    }
    let phi = rename_bound_avoiding(phi, &all_variables(psi));
    let psi = rename_bound_avoiding(psi, &all_variables(&phi));
    Ok(rel(&phi, &psi, x))
}

fn at(psi: &Formula, x: &str, y: &str) -> Formula {
    substitute_renaming(psi, x, y)
}

fn set_guard(psi: &Formula, x: &str, set: &str) -> Formula {
    Formula::forall(x, Formula::implies(Formula::is_in(set, x), psi.clone()))
}

fn rel(f: &Formula, psi: &Formula, x: &str) -> Formula {
    let r = |g: &Formula| rel(g, psi, x);
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => f.clone(),
        Formula::Not(a) => Formula::not(r(a)),
        Formula::And(a, b) => Formula::and(r(a), r(b)),
        Formula::Or(a, b) => Formula::or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::implies(r(a), r(b)),
        Formula::Exists(y, a) => Formula::exists(y, Formula::and(at(psi, x, y), r(a))),
        Formula::Forall(y, a) => Formula::forall(y, Formula::implies(at(psi, x, y), r(a))),
        Formula::ExistsSet(s, a) => {
            Formula::exists_set(s, Formula::and(set_guard(psi, x, s), r(a)))
        }
        Formula::ForallSet(s, a) => {
            Formula::forall_set(s, Formula::implies(set_guard(psi, x, s), r(a)))
        }
        Formula::Tc {
            x: bx,
            y: by,
            body,
            u,
            v,
        } => Formula::tc(
            bx,
            by,
            Formula::and(Formula::and(r(body), at(psi, x, bx)), at(psi, x, by)),
            u,
            v,
        ),
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => Formula::lfp(set, var, Formula::and(r(body), at(psi, x, var)), arg),
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => Formula::gfp(set, var, Formula::and(r(body), at(psi, x, var)), arg),
    }
}
