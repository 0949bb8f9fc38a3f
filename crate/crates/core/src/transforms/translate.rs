use std::collections::BTreeSet;

use crate::syntax::{all_variables, fresh_name, substitute_renaming, Formula};

/// Replaces fixpoints by set quantification:
/// `lfp[X,x](phi)(y)` becomes `A2 X. ((A x. (phi -> X(x))) -> X(y))` and
/// `gfp[X,x](phi)(y)` becomes `E2 X. (X(y) & A x. (X(x) -> phi))`.
pub fn lfp_to_mso(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => f.clone(),
        Formula::Not(a) => Formula::not(lfp_to_mso(a)),
        Formula::And(a, b) => Formula::and(lfp_to_mso(a), lfp_to_mso(b)),
        Formula::Or(a, b) => Formula::or(lfp_to_mso(a), lfp_to_mso(b)),
        Formula::Implies(a, b) => Formula::implies(lfp_to_mso(a), lfp_to_mso(b)),
        Formula::Exists(x, a) => Formula::exists(x, lfp_to_mso(a)),
        Formula::Forall(x, a) => Formula::forall(x, lfp_to_mso(a)),
        Formula::ExistsSet(x, a) => Formula::exists_set(x, lfp_to_mso(a)),
        Formula::ForallSet(x, a) => Formula::forall_set(x, lfp_to_mso(a)),
        Formula::Tc { x, y, body, u, v } => Formula::tc(x, y, lfp_to_mso(body), u, v),
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => Formula::forall_set(
            set,
            Formula::implies(
                Formula::forall(
                    var,
                    Formula::implies(lfp_to_mso(body), Formula::is_in(set, var)),
                ),
                Formula::is_in(set, arg),
            ),
        ),
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => Formula::exists_set(
            set,
            Formula::and(
                Formula::is_in(set, arg),
                Formula::forall(
                    var,
                    Formula::implies(Formula::is_in(set, var), lfp_to_mso(body)),
                ),
            ),
        ),
    }
}

/// Replaces `tc[x,y](phi)(u,v)` by
/// `lfp[X,y](y = u | E x. (X(x) & phi))(v)` with `X` fresh.
pub fn tc_to_lfp(f: &Formula) -> Formula {
    let mut used = all_variables(f);
    tc_rec(f, &mut used)
}

fn tc_rec(f: &Formula, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => f.clone(),
        Formula::Not(a) => Formula::not(tc_rec(a, used)),
        Formula::And(a, b) => Formula::and(tc_rec(a, used), tc_rec(b, used)),
        Formula::Or(a, b) => Formula::or(tc_rec(a, used), tc_rec(b, used)),
        Formula::Implies(a, b) => Formula::implies(tc_rec(a, used), tc_rec(b, used)),
        Formula::Exists(x, a) => Formula::exists(x, tc_rec(a, used)),
        Formula::Forall(x, a) => Formula::forall(x, tc_rec(a, used)),
        Formula::ExistsSet(x, a) => Formula::exists_set(x, tc_rec(a, used)),
        Formula::ForallSet(x, a) => Formula::forall_set(x, tc_rec(a, used)),
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => Formula::lfp(set, var, tc_rec(body, used), arg),
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => Formula::gfp(set, var, tc_rec(body, used), arg),
        Formula::Tc { x, y, body, u, v } => {
            let mut body = tc_rec(body, used);
            let mut y = y.clone();
            if &y == u {
                // `y = u` would otherwise refer to the bound y.
                let fresh = fresh_name(&y, used);
                used.insert(fresh.clone());
                body = substitute_renaming(&body, &y, &fresh);
                y = fresh;
            }
            let set = fresh_name("X", used);
            used.insert(set.clone());
            Formula::lfp(
                &set,
                &y,
                Formula::or(
                    Formula::eq(&y, u),
                    Formula::exists(x, Formula::and(Formula::is_in(&set, x), body)),
                ),
                v,
            )
        }
    }
}
