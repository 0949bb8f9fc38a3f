use std::collections::BTreeSet;

use super::{Formula, SyntaxError};

/// Quantifiers, TC and fixpoint operators each count one level.
pub fn quantifier_depth(f: &Formula) -> usize {
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => 0,
        Formula::Not(a) => quantifier_depth(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            quantifier_depth(a).max(quantifier_depth(b))
        }
        Formula::Exists(_, a)
        | Formula::Forall(_, a)
        | Formula::ExistsSet(_, a)
        | Formula::ForallSet(_, a) => 1 + quantifier_depth(a),
        Formula::Tc { body, .. } | Formula::Lfp { body, .. } | Formula::Gfp { body, .. } => {
            1 + quantifier_depth(body)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub elems: BTreeSet<String>,
    pub sets: BTreeSet<String>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty() && self.sets.is_empty()
    }
}

pub fn free_variables(f: &Formula) -> FreeVars {
    let mut fv = FreeVars::default();
    collect_free(f, &mut Vec::new(), &mut Vec::new(), &mut fv);
    fv
}

fn collect_free(f: &Formula, be: &mut Vec<String>, bs: &mut Vec<String>, fv: &mut FreeVars) {
    let elem = |x: &String, be: &Vec<String>, fv: &mut FreeVars| {
        if !be.contains(x) {
            fv.elems.insert(x.clone());
        }
    };
    match f {
        Formula::Top => {}
        Formula::Rel(_, args) => args.iter().for_each(|a| elem(a, be, fv)),
        Formula::Eq(x, y) => {
            elem(x, be, fv);
            elem(y, be, fv);
        }
        Formula::In(s, x) => {
            if !bs.contains(s) {
                fv.sets.insert(s.clone());
            }
            elem(x, be, fv);
        }
        Formula::Not(a) => collect_free(a, be, bs, fv),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_free(a, be, bs, fv);
            collect_free(b, be, bs, fv);
        }
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            be.push(x.clone());
            collect_free(a, be, bs, fv);
            be.pop();
        }
        Formula::ExistsSet(x, a) | Formula::ForallSet(x, a) => {
            bs.push(x.clone());
            collect_free(a, be, bs, fv);
            bs.pop();
        }
        Formula::Tc { x, y, body, u, v } => {
            elem(u, be, fv);
            elem(v, be, fv);
            be.push(x.clone());
            be.push(y.clone());
            collect_free(body, be, bs, fv);
            be.pop();
            be.pop();
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            elem(arg, be, fv);
            be.push(var.clone());
            bs.push(set.clone());
            collect_free(body, be, bs, fv);
            be.pop();
            bs.pop();
        }
    }
}

/// Every variable name occurring anywhere, free or bound, of either sort.
pub fn all_variables(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_all(f, &mut out);
    out
}

fn collect_all(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Top => {}
        Formula::Rel(_, args) => out.extend(args.iter().cloned()),
        Formula::Eq(x, y) | Formula::In(x, y) => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        Formula::Not(a) => collect_all(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_all(a, out);
            collect_all(b, out);
        }
        Formula::Exists(x, a)
        | Formula::Forall(x, a)
        | Formula::ExistsSet(x, a)
        | Formula::ForallSet(x, a) => {
            out.insert(x.clone());
            collect_all(a, out);
        }
        Formula::Tc { x, y, body, u, v } => {
            out.extend([x, y, u, v].into_iter().cloned());
            collect_all(body, out);
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            out.extend([set, var, arg].into_iter().cloned());
            collect_all(body, out);
        }
    }
}

/// Relation symbols occurring in the formula.
pub fn symbols(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk(f, &mut |g| {
        if let Formula::Rel(r, _) = g {
            out.insert(r.clone());
        }
    });
    out
}

fn walk(f: &Formula, visit: &mut dyn FnMut(&Formula)) {
    visit(f);
    match f {
        Formula::Not(a)
        | Formula::Exists(_, a)
        | Formula::Forall(_, a)
        | Formula::ExistsSet(_, a)
        | Formula::ForallSet(_, a) => walk(a, visit),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            walk(a, visit);
            walk(b, visit);
        }
        Formula::Tc { body, .. } | Formula::Lfp { body, .. } | Formula::Gfp { body, .. } => {
            walk(body, visit)
        }
        _ => {}
    }
}

/// First of `base`, `base1`, `base2`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

fn rn(v: &str, x: &str, t: &str) -> String {
    if v == x {
        t.to_string()
    } else {
        v.to_string()
    }
}

/// `f[t/x]` for element variables, refusing when a binder would capture `t`.
pub fn substitute(f: &Formula, x: &str, t: &str) -> Result<Formula, SyntaxError> {
    subst_strict(f, x, t, false).ok_or_else(|| SyntaxError::NotSubstitutable {
        var: x.to_string(),
        term: t.to_string(),
    })
}

fn occurs_free(f: &Formula, x: &str) -> bool {
    free_variables(f).elems.contains(x)
}

fn subst_strict(f: &Formula, x: &str, t: &str, captured: bool) -> Option<Formula> {
    if x == t {
        return Some(f.clone());
    }
    let var = |v: &String| -> Option<String> {
        if v == x {
            if captured {
                None
            } else {
                Some(t.to_string())
            }
        } else {
            Some(v.clone())
        }
    };
    Some(match f {
        Formula::Top => Formula::Top,
        Formula::Rel(r, args) => {
            Formula::Rel(r.clone(), args.iter().map(var).collect::<Option<_>>()?)
        }
        Formula::Eq(a, b) => Formula::Eq(var(a)?, var(b)?),
        Formula::In(s, a) => Formula::In(s.clone(), var(a)?),
        Formula::Not(a) => Formula::not(subst_strict(a, x, t, captured)?),
        Formula::And(a, b) => Formula::and(
            subst_strict(a, x, t, captured)?,
            subst_strict(b, x, t, captured)?,
        ),
        Formula::Or(a, b) => Formula::or(
            subst_strict(a, x, t, captured)?,
            subst_strict(b, x, t, captured)?,
        ),
        Formula::Implies(a, b) => Formula::implies(
            subst_strict(a, x, t, captured)?,
            subst_strict(b, x, t, captured)?,
        ),
        Formula::Exists(y, a) | Formula::Forall(y, a) => {
            let body = if y == x {
                (**a).clone()
            } else {
                subst_strict(a, x, t, captured || y == t)?
            };
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(y, body)
            } else {
                Formula::forall(y, body)
            }
        }
        Formula::ExistsSet(s, a) => Formula::exists_set(s, subst_strict(a, x, t, captured)?),
        Formula::ForallSet(s, a) => Formula::forall_set(s, subst_strict(a, x, t, captured)?),
        Formula::Tc {
            x: bx,
            y: by,
            body,
            u,
            v,
        } => {
            let nb = if bx == x || by == x {
                (**body).clone()
            } else {
                subst_strict(body, x, t, captured || bx == t || by == t)?
            };
            Formula::tc(bx, by, nb, &var(u)?, &var(v)?)
        }
        Formula::Lfp {
            set,
            var: bv,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var: bv,
            body,
            arg,
        } => {
            let nb = if bv == x {
                (**body).clone()
            } else {
                subst_strict(body, x, t, captured || bv == t)?
            };
            if matches!(f, Formula::Lfp { .. }) {
                Formula::lfp(set, bv, nb, &var(arg)?)
            } else {
                Formula::gfp(set, bv, nb, &var(arg)?)
            }
        }
    })
}

/// `f[t/x]`, renaming element binders that would capture `t`. Fresh names
/// come from [`fresh_name`] over all variables of `f` plus `t`.
pub fn substitute_renaming(f: &Formula, x: &str, t: &str) -> Formula {
    if x == t || !occurs_free(f, x) {
        return f.clone();
    }
    let mut avoid = all_variables(f);
    avoid.insert(t.to_string());
    avoid.insert(x.to_string());
    subst_rename(f, x, t, &mut avoid)
}

fn subst_rename(f: &Formula, x: &str, t: &str, avoid: &mut BTreeSet<String>) -> Formula {
    if !occurs_free(f, x) {
        return f.clone();
    }
    match f {
        Formula::Top => Formula::Top,
        Formula::Rel(r, args) => {
            Formula::Rel(r.clone(), args.iter().map(|a| rn(a, x, t)).collect())
        }
        Formula::Eq(a, b) => Formula::Eq(rn(a, x, t), rn(b, x, t)),
        Formula::In(s, a) => Formula::In(s.clone(), rn(a, x, t)),
        Formula::Not(a) => Formula::not(subst_rename(a, x, t, avoid)),
        Formula::And(a, b) => {
            Formula::and(subst_rename(a, x, t, avoid), subst_rename(b, x, t, avoid))
        }
        Formula::Or(a, b) => {
            Formula::or(subst_rename(a, x, t, avoid), subst_rename(b, x, t, avoid))
        }
        Formula::Implies(a, b) => {
            Formula::implies(subst_rename(a, x, t, avoid), subst_rename(b, x, t, avoid))
        }
        Formula::Exists(y, a) | Formula::Forall(y, a) => {
            let (y2, a2) = if y == t {
                let fresh = fresh_name(y, avoid);
                avoid.insert(fresh.clone());
                let renamed = subst_rename(a, y, &fresh, avoid);
                (fresh, renamed)
            } else {
                (y.clone(), (**a).clone())
            };
            let body = subst_rename(&a2, x, t, avoid);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(&y2, body)
            } else {
                Formula::forall(&y2, body)
            }
        }
        Formula::ExistsSet(s, a) => Formula::exists_set(s, subst_rename(a, x, t, avoid)),
        Formula::ForallSet(s, a) => Formula::forall_set(s, subst_rename(a, x, t, avoid)),
        Formula::Tc {
            x: bx,
            y: by,
            body,
            u,
            v,
        } => {
            let mut bx2 = bx.clone();
            let mut by2 = by.clone();
            let mut b2 = (**body).clone();
            if bx != x && by != x {
                if bx == t {
                    bx2 = fresh_name(bx, avoid);
                    avoid.insert(bx2.clone());
                    b2 = subst_rename(&b2, bx, &bx2, avoid);
                }
                if by == t {
                    by2 = fresh_name(by, avoid);
                    avoid.insert(by2.clone());
                    b2 = subst_rename(&b2, by, &by2, avoid);
                }
                b2 = subst_rename(&b2, x, t, avoid);
            }
            Formula::tc(&bx2, &by2, b2, &rn(u, x, t), &rn(v, x, t))
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            let mut var2 = var.clone();
            let mut b2 = (**body).clone();
            if var != x {
                if var == t {
                    var2 = fresh_name(var, avoid);
                    avoid.insert(var2.clone());
                    b2 = subst_rename(&b2, var, &var2, avoid);
                }
                b2 = subst_rename(&b2, x, t, avoid);
            }
            if matches!(f, Formula::Lfp { .. }) {
                Formula::lfp(set, &var2, b2, &rn(arg, x, t))
            } else {
                Formula::gfp(set, &var2, b2, &rn(arg, x, t))
            }
        }
    }
}

/// Renames every bound variable of `f` whose name is in `clash` to a fresh
/// name avoiding `clash` and all names in `f`.
pub fn rename_bound_avoiding(f: &Formula, clash: &BTreeSet<String>) -> Formula {
    let mut avoid = all_variables(f);
    avoid.extend(clash.iter().cloned());
    rename_bound(f, clash, &mut avoid)
}

fn rename_bound(f: &Formula, clash: &BTreeSet<String>, avoid: &mut BTreeSet<String>) -> Formula {
    let pick = |name: &String, avoid: &mut BTreeSet<String>| -> String {
        if clash.contains(name) {
            let n = fresh_name(name, avoid);
            avoid.insert(n.clone());
            n
        } else {
            name.clone()
        }
    };
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => f.clone(),
        Formula::Not(a) => Formula::not(rename_bound(a, clash, avoid)),
        Formula::And(a, b) => {
            Formula::and(rename_bound(a, clash, avoid), rename_bound(b, clash, avoid))
        }
        Formula::Or(a, b) => {
            Formula::or(rename_bound(a, clash, avoid), rename_bound(b, clash, avoid))
        }
        Formula::Implies(a, b) => {
            Formula::implies(rename_bound(a, clash, avoid), rename_bound(b, clash, avoid))
        }
        Formula::Exists(y, a) | Formula::Forall(y, a) => {
            let y2 = pick(y, avoid);
            let body = rename_bound(&subst_rename(a, y, &y2, avoid), clash, avoid);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(&y2, body)
            } else {
                Formula::forall(&y2, body)
            }
        }
        Formula::ExistsSet(s, a) | Formula::ForallSet(s, a) => {
            let s2 = pick(s, avoid);
            let body = rename_bound(&rename_set_free(a, s, &s2), clash, avoid);
            if matches!(f, Formula::ExistsSet(..)) {
                Formula::exists_set(&s2, body)
            } else {
                Formula::forall_set(&s2, body)
            }
        }
        Formula::Tc { x, y, body, u, v } => {
            let x2 = pick(x, avoid);
            let y2 = pick(y, avoid);
            let b = subst_rename(body, x, &x2, avoid);
            let b = subst_rename(&b, y, &y2, avoid);
            Formula::tc(&x2, &y2, rename_bound(&b, clash, avoid), u, v)
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            let set2 = pick(set, avoid);
            let var2 = pick(var, avoid);
            let b = subst_rename(body, var, &var2, avoid);
            let b = rename_set_free(&b, set, &set2);
            let b = rename_bound(&b, clash, avoid);
            if matches!(f, Formula::Lfp { .. }) {
                Formula::lfp(&set2, &var2, b, arg)
            } else {
                Formula::gfp(&set2, &var2, b, arg)
            }
        }
    }
}

/// Renames free occurrences of set variable `s` to `s2`, where `s2` is
/// known not to occur in `f`.
fn rename_set_free(f: &Formula, s: &str, s2: &str) -> Formula {
    if s == s2 {
        return f.clone();
    }
    map_set_atoms(f, s, &mut |x| Formula::In(s2.to_string(), x.to_string()))
}

/// Replaces every free atom `s(t)` by `g(t)`; binders of `s` stop the walk.
fn map_set_atoms(f: &Formula, s: &str, g: &mut dyn FnMut(&str) -> Formula) -> Formula {
    match f {
        Formula::In(t, x) if t == s => g(x),
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) | Formula::In(..) => f.clone(),
        Formula::Not(a) => Formula::not(map_set_atoms(a, s, g)),
        Formula::And(a, b) => Formula::and(map_set_atoms(a, s, g), map_set_atoms(b, s, g)),
        Formula::Or(a, b) => Formula::or(map_set_atoms(a, s, g), map_set_atoms(b, s, g)),
        Formula::Implies(a, b) => Formula::implies(map_set_atoms(a, s, g), map_set_atoms(b, s, g)),
        Formula::Exists(y, a) => Formula::exists(y, map_set_atoms(a, s, g)),
        Formula::Forall(y, a) => Formula::forall(y, map_set_atoms(a, s, g)),
        Formula::ExistsSet(t, _) | Formula::ForallSet(t, _) if t == s => f.clone(),
        Formula::ExistsSet(t, a) => Formula::exists_set(t, map_set_atoms(a, s, g)),
        Formula::ForallSet(t, a) => Formula::forall_set(t, map_set_atoms(a, s, g)),
        Formula::Tc { x, y, body, u, v } => Formula::tc(x, y, map_set_atoms(body, s, g), u, v),
        Formula::Lfp { set, .. } | Formula::Gfp { set, .. } if set == s => f.clone(),
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => Formula::lfp(set, var, map_set_atoms(body, s, g), arg),
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => Formula::gfp(set, var, map_set_atoms(body, s, g), arg),
    }
}

fn set_binders_on_path(f: &Formula, s: &str, t: &str, inside: bool) -> bool {
    // True when some free occurrence of `s` sits under a binder of `t`.
    match f {
        Formula::In(u, _) => u == s && inside,
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) => false,
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => {
            set_binders_on_path(a, s, t, inside)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            set_binders_on_path(a, s, t, inside) || set_binders_on_path(b, s, t, inside)
        }
        Formula::ExistsSet(u, a) | Formula::ForallSet(u, a) => {
            u != s && set_binders_on_path(a, s, t, inside || u == t)
        }
        Formula::Tc { body, .. } => set_binders_on_path(body, s, t, inside),
        Formula::Lfp { set, body, .. } | Formula::Gfp { set, body, .. } => {
            set != s && set_binders_on_path(body, s, t, inside || set == t)
        }
    }
}

/// `f[T/X]`: replaces free set variable `x` by `t`, which is either another
/// set variable or a unary predicate (`as_predicate`).
pub fn substitute_set(
    f: &Formula,
    x: &str,
    t: &str,
    as_predicate: bool,
) -> Result<Formula, SyntaxError> {
    if !as_predicate && set_binders_on_path(f, x, t, false) {
        return Err(SyntaxError::NotSubstitutable {
            var: x.to_string(),
            term: t.to_string(),
        });
    }
    Ok(map_set_atoms(f, x, &mut |z| {
        if as_predicate {
            Formula::Rel(t.to_string(), vec![z.to_string()])
        } else {
            Formula::In(t.to_string(), z.to_string())
        }
    }))
}

/// Replaces each free atom `X(t)` of `f` by `psi[t/w]`. Bound element
/// variables of `f` that would capture a free variable of `psi` are renamed
/// first, and `psi`'s own binders are renamed around `t` as needed.
pub fn replace_set_atoms(f: &Formula, set: &str, psi: &Formula, w: &str) -> Formula {
    let mut params = free_variables(psi).elems;
    params.remove(w);
    let f = if params.is_empty() {
        f.clone()
    } else {
        rename_bound_avoiding(f, &params)
    };
    map_set_atoms(&f, set, &mut |t| substitute_renaming(psi, w, t))
}

/// Every free occurrence of set variable `x` lies under an even number of
/// negations; the antecedent of `->` counts as one.
pub fn check_positive(f: &Formula, x: &str) -> bool {
    positive(f, x, true)
}

fn positive(f: &Formula, x: &str, pol: bool) -> bool {
    match f {
        Formula::In(s, _) => s != x || pol,
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) => true,
        Formula::Not(a) => positive(a, x, !pol),
        Formula::And(a, b) | Formula::Or(a, b) => positive(a, x, pol) && positive(b, x, pol),
        Formula::Implies(a, b) => positive(a, x, !pol) && positive(b, x, pol),
        Formula::Exists(_, a) | Formula::Forall(_, a) => positive(a, x, pol),
        Formula::ExistsSet(s, a) | Formula::ForallSet(s, a) => s == x || positive(a, x, pol),
        Formula::Tc { body, .. } => positive(body, x, pol),
        Formula::Lfp { set, body, .. } | Formula::Gfp { set, body, .. } => {
            set == x || positive(body, x, pol)
        }
    }
}

/// Negation normal form. Negated least fixpoints become greatest fixpoints
/// of the dual body; negations end up on atoms and on TC subformulas.
pub fn nnf_gfp(f: &Formula) -> Formula {
    nnf(f, false, &BTreeSet::new())
}

fn nnf(f: &Formula, neg: bool, flip: &BTreeSet<String>) -> Formula {
    let lit = |a: Formula, neg: bool| if neg { Formula::not(a) } else { a };
    match f {
        Formula::Top | Formula::Rel(..) | Formula::Eq(..) => lit(f.clone(), neg),
        Formula::In(s, _) => lit(f.clone(), neg ^ flip.contains(s)),
        Formula::Not(a) => nnf(a, !neg, flip),
        Formula::And(a, b) => {
            let (l, r) = (nnf(a, neg, flip), nnf(b, neg, flip));
            if neg {
                Formula::or(l, r)
            } else {
                Formula::and(l, r)
            }
        }
        Formula::Or(a, b) => {
            let (l, r) = (nnf(a, neg, flip), nnf(b, neg, flip));
            if neg {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Formula::Implies(a, b) => {
            let (l, r) = (nnf(a, !neg, flip), nnf(b, neg, flip));
            if neg {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            let body = nnf(a, neg, flip);
            if matches!(f, Formula::Exists(..)) != neg {
                Formula::exists(x, body)
            } else {
                Formula::forall(x, body)
            }
        }
        Formula::ExistsSet(s, a) | Formula::ForallSet(s, a) => {
            let mut inner = flip.clone();
            inner.remove(s);
            let body = nnf(a, neg, &inner);
            if matches!(f, Formula::ExistsSet(..)) != neg {
                Formula::exists_set(s, body)
            } else {
                Formula::forall_set(s, body)
            }
        }
        Formula::Tc { x, y, body, u, v } => {
            lit(Formula::tc(x, y, nnf(body, false, flip), u, v), neg)
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        }
        | Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            let least = matches!(f, Formula::Lfp { .. });
            let mut inner = flip.clone();
            if neg {
                inner.insert(set.clone());
            } else {
                inner.remove(set);
            }
            let b = nnf(body, neg, &inner);
            if least != neg {
                Formula::lfp(set, var, b, arg)
            } else {
                Formula::gfp(set, var, b, arg)
            }
        }
    }
}
