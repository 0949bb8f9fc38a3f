use super::ProofError;
use crate::syntax::Formula;

/// Propositional skeleton: every maximal subformula that is not built by
/// `!`, `&`, `|`, `->` or `true` becomes a letter, structurally identical
/// subformulas sharing a letter.
fn skeleton<'f>(f: &'f Formula, letters: &mut Vec<&'f Formula>) -> Prop {
    match f {
        Formula::Top => Prop::Const(true),
        Formula::Not(a) => Prop::Not(Box::new(skeleton(a, letters))),
        Formula::And(a, b) => Prop::And(
            Box::new(skeleton(a, letters)),
            Box::new(skeleton(b, letters)),
        ),
        Formula::Or(a, b) => Prop::Or(
            Box::new(skeleton(a, letters)),
            Box::new(skeleton(b, letters)),
        ),
        Formula::Implies(a, b) => Prop::Implies(
            Box::new(skeleton(a, letters)),
            Box::new(skeleton(b, letters)),
        ),
        _ => {
            let i = match letters.iter().position(|l| *l == f) {
                Some(i) => i,
                None => {
                    letters.push(f);
                    letters.len() - 1
                }
            };
            Prop::Letter(i)
        }
    }
}

enum Prop {
    Const(bool),
    Letter(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, row: u64) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Letter(i) => row >> i & 1 == 1,
            Prop::Not(a) => !a.eval(row),
            Prop::And(a, b) => a.eval(row) && b.eval(row),
            Prop::Or(a, b) => a.eval(row) || b.eval(row),
            Prop::Implies(a, b) => !a.eval(row) || b.eval(row),
        }
    }
}

/// Maximum number of distinct letters a truth table is built for.
pub const MAX_LETTERS: usize = 20;

/// Whether `f` is an instance of a valid propositional formula, or an error
/// when its skeleton has more than [`MAX_LETTERS`] letters.
pub fn tautology_check(f: &Formula) -> Result<bool, ProofError> {
    let mut letters = Vec::new();
    let p = skeleton(f, &mut letters);
    if letters.len() > MAX_LETTERS {
        return Err(ProofError::TooManyLetters(letters.len()));
    }
    Ok((0..1u64 << letters.len()).all(|row| p.eval(row)))
}

/// [`tautology_check`] with an exceeded budget counted as `false`.
pub fn is_tautology(f: &Formula) -> bool {
    tautology_check(f).unwrap_or(false)
}
