use super::parser::match_macro;
use super::Formula;

// Binding strength: quantifiers extend to the right and bind weakest.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const ATOM: u8 = 5;

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(..) => 4,
        Formula::Exists(..)
        | Formula::Forall(..)
        | Formula::ExistsSet(..)
        | Formula::ForallSet(..) => 0,
        _ => ATOM,
    }
}

/// Renders in the ASCII grammar; `parse_formula` reads the output back to
/// the same tree.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, false, &mut out);
    out
}

/// Like [`render_formula`] but prints expanded `ltch`/`sltns` macros folded.
pub fn render_folded(f: &Formula) -> String {
    let mut out = String::new();
    write(f, true, &mut out);
    out
}

fn child(f: &Formula, min: u8, fold: bool, out: &mut String) {
    let folded_macro = fold && match_macro(f).is_some();
    if strength(f) < min && !folded_macro {
        out.push('(');
        write(f, fold, out);
        out.push(')');
    } else {
        write(f, fold, out);
    }
}

fn quant_body(f: &Formula, fold: bool, out: &mut String) {
    let binary = matches!(f, Formula::And(..) | Formula::Or(..) | Formula::Implies(..));
    if binary && !(fold && match_macro(f).is_some()) {
        out.push('(');
        write(f, fold, out);
        out.push(')');
    } else {
        write(f, fold, out);
    }
}

fn write(f: &Formula, fold: bool, out: &mut String) {
    if fold {
        if let Some((name, x, y)) = match_macro(f) {
            out.push_str(&format!("{name}({x},{y})"));
            return;
        }
    }
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Rel(r, args) => {
            out.push_str(r);
            out.push('(');
            out.push_str(&args.join(","));
            out.push(')');
        }
        Formula::Eq(x, y) => out.push_str(&format!("{x} = {y}")),
        Formula::In(s, x) => out.push_str(&format!("{s}({x})")),
        Formula::Not(a) => {
            out.push('!');
            let bare = matches!(
                a.as_ref(),
                Formula::Not(..)
                    | Formula::Top
                    | Formula::Rel(..)
                    | Formula::In(..)
                    | Formula::Tc { .. }
                    | Formula::Lfp { .. }
                    | Formula::Gfp { .. }
            ) || (fold && match_macro(a).is_some());
            if bare {
                write(a, fold, out);
            } else {
                out.push('(');
                write(a, fold, out);
                out.push(')');
            }
        }
        Formula::And(a, b) => {
            child(a, AND, fold, out);
            out.push_str(" & ");
            child(b, AND + 1, fold, out);
        }
        Formula::Or(a, b) => {
            child(a, OR, fold, out);
            out.push_str(" | ");
            child(b, OR + 1, fold, out);
        }
        Formula::Implies(a, b) => {
            child(a, IMP + 1, fold, out);
            out.push_str(" -> ");
            child(b, IMP, fold, out);
        }
        Formula::Exists(x, a) => {
            out.push_str(&format!("E {x}. "));
            quant_body(a, fold, out);
        }
        Formula::Forall(x, a) => {
            out.push_str(&format!("A {x}. "));
            quant_body(a, fold, out);
        }
        Formula::ExistsSet(x, a) => {
            out.push_str(&format!("E2 {x}. "));
            quant_body(a, fold, out);
        }
        Formula::ForallSet(x, a) => {
            out.push_str(&format!("A2 {x}. "));
            quant_body(a, fold, out);
        }
        Formula::Tc { x, y, body, u, v } => {
            out.push_str(&format!("tc[{x},{y}]("));
            write(body, fold, out);
            out.push_str(&format!(")({u},{v})"));
        }
        Formula::Lfp {
            set,
            var,
            body,
            arg,
        } => {
            out.push_str(&format!("lfp[{set},{var}]("));
            write(body, fold, out);
            out.push_str(&format!(")({arg})"));
        }
        Formula::Gfp {
            set,
            var,
            body,
            arg,
        } => {
            out.push_str(&format!("gfp[{set},{var}]("));
            write(body, fold, out);
            out.push_str(&format!(")({arg})"));
        }
    }
}
