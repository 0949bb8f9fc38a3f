use thiserror::Error;

use crate::syntax::{Formula, LogicId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    /// Quantifier depth bound.
    pub depth: usize,
    /// Maximum number of literals in each conjunction.
    pub width: usize,
    pub logic: LogicId,
    /// Refuse to build more literals than this at any level.
    pub max_formulas: usize,
}

impl EnumConfig {
    pub fn new(logic: LogicId, depth: usize, width: usize) -> Self {
        EnumConfig {
            depth,
            width,
            logic,
            max_formulas: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("enumeration would exceed {0} formulas")]
    Budget(usize),
    #[error("enumeration supports FO and MSO only")]
    Logic,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Var {
    Elem(usize),
    Set(usize),
}

fn name(v: Var) -> String {
    match v {
        Var::Elem(i) => format!("x{i}"),
        Var::Set(i) => format!("X{i}"),
    }
}

/// Closed formulas of quantifier depth at most `cfg.depth`, in the shape
///
/// ```text
/// L ::= atom | !L | E v. C      C ::= L & ... & L   (at most width)
/// ```
///
/// where the variable bound at level `k` is `xk` or `Xk`, and atoms inside
/// a quantifier mention the variable it binds. Every sentence of the
/// bounded depth is equivalent to a Boolean combination of the output once
/// the width suffices, and the list is duplicate-free.
pub fn enumerate_formulas(vocab: &Vocabulary, cfg: &EnumConfig) -> Result<Vec<Formula>, EnumError> {
    if !matches!(cfg.logic, LogicId::Fo | LogicId::Mso) {
        return Err(EnumError::Logic);
    }
    let mut e = Enumerator { vocab, cfg };
    let mut out = e.literals(&[], cfg.depth)?;
    out.insert(0, Formula::Top);
    out.insert(1, Formula::not(Formula::Top));
    Ok(out)
}

struct Enumerator<'a> {
    vocab: &'a Vocabulary,
    cfg: &'a EnumConfig,
}

impl Enumerator<'_> {
    fn atoms(&self, ctx: &[Var]) -> Vec<Formula> {
        let Some(&newest) = ctx.last() else {
            return Vec::new();
        };
        let elems: Vec<String> = ctx
            .iter()
            .filter(|v| matches!(v, Var::Elem(_)))
            .map(|&v| name(v))
            .collect();
        let sets: Vec<String> = ctx
            .iter()
            .filter(|v| matches!(v, Var::Set(_)))
            .map(|&v| name(v))
            .collect();
        let new = name(newest);
        let mut out = Vec::new();
        match newest {
            Var::Elem(_) => {
                for sym in self.vocab.symbols() {
                    for args in tuples(&elems, sym.arity) {
                        if args.contains(&new) {
                            out.push(Formula::Rel(sym.name.clone(), args));
                        }
                    }
                }
                for u in &elems {
                    if *u != new {
                        out.push(Formula::eq(u, &new));
                    }
                }
                for s in &sets {
                    out.push(Formula::is_in(s, &new));
                }
            }
            Var::Set(_) => {
                for u in &elems {
                    out.push(Formula::is_in(&new, u));
                }
            }
        }
        out
    }

    fn literals(&mut self, ctx: &[Var], remaining: usize) -> Result<Vec<Formula>, EnumError> {
        let mut positive = self.atoms(ctx);
        if remaining > 0 {
            let level = ctx.len() + 1;
            let mut kinds = vec![Var::Elem(level)];
            if self.cfg.logic == LogicId::Mso {
                kinds.push(Var::Set(level));
            }
            for v in kinds {
                let mut inner = ctx.to_vec();
                inner.push(v);
                let bodies = self.conjunctions(&inner, remaining - 1)?;
                for b in bodies {
                    positive.push(match v {
                        Var::Elem(_) => Formula::exists(&name(v), b),
                        Var::Set(_) => Formula::exists_set(&name(v), b),
                    });
                }
            }
        }
        let mut out = Vec::with_capacity(positive.len() * 2);
        for f in positive {
            out.push(Formula::not(f.clone()));
            out.push(f);
        }
        if out.len() > self.cfg.max_formulas {
            return Err(EnumError::Budget(self.cfg.max_formulas));
        }
        Ok(out)
    }

    fn conjunctions(&mut self, ctx: &[Var], remaining: usize) -> Result<Vec<Formula>, EnumError> {
        let lits = self.literals(ctx, remaining)?;
        let mut estimate = 1usize;
        let mut binom = 1usize;
        for k in 1..=self.cfg.width.min(lits.len()) {
            binom = binom.saturating_mul(lits.len() + 1 - k) / k;
            estimate = estimate.saturating_add(binom);
        }
        if estimate > self.cfg.max_formulas {
            return Err(EnumError::Budget(self.cfg.max_formulas));
        }
        let mut out = vec![Formula::Top];
        let mut stack: Vec<(usize, Formula, usize)> = lits
            .iter()
            .enumerate()
            .map(|(i, l)| (i, l.clone(), 1))
            .collect();
        stack.reverse();
        while let Some((i, f, k)) = stack.pop() {
            if k < self.cfg.width {
                for j in (i + 1..lits.len()).rev() {
                    stack.push((j, Formula::and(f.clone(), lits[j].clone()), k + 1));
                }
            }
            out.push(f);
        }
        Ok(out)
    }
}

fn tuples(elems: &[String], arity: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            for e in elems {
                let mut t2 = t.clone();
                t2.push(e.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}
