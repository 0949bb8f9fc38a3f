use super::{check_positive, is_set_var_name, Formula, SyntaxError, Vocabulary};

/// Macro names accepted in place of relation symbols, with arity 2.
pub const MACROS: [&str; 2] = ["ltch", "sltns"];

const RESERVED: [&str; 9] = ["true", "false", "E", "A", "E2", "A2", "tc", "lfp", "gfp"];

pub(crate) fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name) || MACROS.contains(&name)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Bang,
    Amp,
    Bar,
    Arrow,
    Iff,
    Equals,
    NotEquals,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Iff => "`<->`".into(),
        Tok::Equals => "`=`".into(),
        Tok::NotEquals => "`!=`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '=' => Tok::Equals,
            '<' if text[i..].starts_with("<->") => {
                i += 2;
                Tok::Iff
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::NotEquals
                } else {
                    Tok::Bang
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Tok::Arrow
                } else {
                    return Err(SyntaxError::Parse {
                        pos: i,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
                {
                    j += 1;
                }
                out.push((Tok::Ident(text[i..j].to_string()), start));
                i = j;
                continue;
            }
            other => {
                return Err(SyntaxError::Parse {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vocab: &'a Vocabulary,
}

/// Parses the ASCII grammar. Macros are expanded, fixpoint bodies are
/// checked for positivity and relation arities against `vocab`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vocab,
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(p.error(format!("unexpected {}", describe(&p.toks[p.pos].0))));
    }
    Ok(f)
}

impl Parser<'_> {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn error(&self, message: String) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.here(),
            message,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if self.eat(&t) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(describe)
                .unwrap_or_else(|| "end of input".into());
            Err(self.error(format!("expected {}, found {found}", describe(&t))))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected an identifier, found {}", describe(t)))),
            None => Err(self.error("expected an identifier, found end of input".into())),
        }
    }

    fn elem_var(&mut self) -> Result<String, SyntaxError> {
        let at = self.here();
        let name = self.ident()?;
        if is_set_var_name(&name) || is_reserved(&name) {
            return Err(SyntaxError::Parse {
                pos: at,
                message: format!("`{name}` is not an element variable"),
            });
        }
        Ok(name)
    }

    fn set_var(&mut self) -> Result<String, SyntaxError> {
        let at = self.here();
        let name = self.ident()?;
        if !is_set_var_name(&name) || is_reserved(&name) || self.vocab.contains(&name) {
            return Err(SyntaxError::Parse {
                pos: at,
                message: format!("`{name}` is not a set variable"),
            });
        }
        Ok(name)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else if self.eat(&Tok::Iff) {
            // Sugar only: expands to a conjunction of two implications.
            let rhs = self.formula()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        if let Some(Tok::Ident(kw)) = self.peek() {
            let kw = kw.clone();
            if matches!(kw.as_str(), "E" | "A" | "E2" | "A2") {
                self.pos += 1;
                let var = if kw.ends_with('2') {
                    self.set_var()?
                } else {
                    self.elem_var()?
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                return Ok(match kw.as_str() {
                    "E" => Formula::exists(&var, body),
                    "A" => Formula::forall(&var, body),
                    "E2" => Formula::exists_set(&var, body),
                    _ => Formula::forall_set(&var, body),
                });
            }
        }
        self.primary()
    }

    fn args(&mut self) -> Result<Vec<String>, SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut out = vec![self.elem_var()?];
        while self.eat(&Tok::Comma) {
            out.push(self.elem_var()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                match name.as_str() {
                    "true" => {
                        self.pos += 1;
                        return Ok(Formula::Top);
                    }
                    "false" => {
                        self.pos += 1;
                        return Ok(Formula::not(Formula::Top));
                    }
                    "tc" if self.peek_at(1) == Some(&Tok::LBrack) => return self.tc(),
                    "lfp" | "gfp" if self.peek_at(1) == Some(&Tok::LBrack) => {
                        return self.fixpoint(name == "lfp")
                    }
                    _ => {}
                }
                if self.peek_at(1) == Some(&Tok::LParen) {
                    self.pos += 1;
                    let args = self.args()?;
                    return self.application(&name, args);
                }
                if is_set_var_name(&name) {
                    return Err(SyntaxError::Parse {
                        pos: at,
                        message: format!("`{name}` must be applied to arguments"),
                    });
                }
                let x = self.elem_var()?;
                if self.eat(&Tok::Equals) {
                    let y = self.elem_var()?;
                    Ok(Formula::Eq(x, y))
                } else if self.eat(&Tok::NotEquals) {
                    let y = self.elem_var()?;
                    Ok(Formula::not(Formula::Eq(x, y)))
                } else {
                    Err(self.error(format!("expected `=` after variable `{x}`")))
                }
            }
            Some(t) => Err(self.error(format!("unexpected {}", describe(&t)))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn application(&mut self, name: &str, args: Vec<String>) -> Result<Formula, SyntaxError> {
        if let Some(arity) = self.vocab.arity(name) {
            if arity != args.len() {
                return Err(SyntaxError::Arity {
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            return Ok(Formula::Rel(name.to_string(), args));
        }
        if MACROS.contains(&name) {
            if args.len() != 2 {
                return Err(SyntaxError::Arity {
                    name: name.to_string(),
                    expected: 2,
                    found: args.len(),
                });
            }
            let base = if name == "ltch" { "lt" } else { "slt" };
            if self.vocab.arity(base) != Some(2) {
                return Err(SyntaxError::UnknownSymbol(base.to_string()));
            }
            return Ok(expand_macro(name, &args[0], &args[1]));
        }
        if is_set_var_name(name) && !is_reserved(name) {
            if args.len() != 1 {
                return Err(SyntaxError::Arity {
                    name: name.to_string(),
                    expected: 1,
                    found: args.len(),
                });
            }
            return Ok(Formula::In(name.to_string(), args[0].clone()));
        }
        Err(SyntaxError::UnknownSymbol(name.to_string()))
    }

    fn tc(&mut self) -> Result<Formula, SyntaxError> {
        self.pos += 1;
        self.expect(Tok::LBrack)?;
        let x = self.elem_var()?;
        self.expect(Tok::Comma)?;
        let y = self.elem_var()?;
        self.expect(Tok::RBrack)?;
        if x == y {
            return Err(self.error("tc binds two distinct variables".into()));
        }
        self.expect(Tok::LParen)?;
        let body = self.formula()?;
        self.expect(Tok::RParen)?;
        let args = self.args()?;
        if args.len() != 2 {
            return Err(SyntaxError::Arity {
                name: "tc".into(),
                expected: 2,
                found: args.len(),
            });
        }
        Ok(Formula::tc(&x, &y, body, &args[0], &args[1]))
    }

    fn fixpoint(&mut self, least: bool) -> Result<Formula, SyntaxError> {
        self.pos += 1;
        self.expect(Tok::LBrack)?;
        let set = self.set_var()?;
        self.expect(Tok::Comma)?;
        let var = self.elem_var()?;
        self.expect(Tok::RBrack)?;
        self.expect(Tok::LParen)?;
        let body = self.formula()?;
        self.expect(Tok::RParen)?;
        let args = self.args()?;
        if args.len() != 1 {
            return Err(SyntaxError::Arity {
                name: if least { "lfp" } else { "gfp" }.into(),
                expected: 1,
                found: args.len(),
            });
        }
        if !check_positive(&body, &set) {
            return Err(SyntaxError::NotPositive(set));
        }
        Ok(if least {
            Formula::lfp(&set, &var, body, &args[0])
        } else {
            Formula::gfp(&set, &var, body, &args[0])
        })
    }
}

fn macro_inner_var(x: &str, y: &str) -> String {
    let mut k = 0;
    loop {
        let name = if k == 0 {
            "z".to_string()
        } else {
            format!("z{k}")
        };
        if name != x && name != y {
            return name;
        }
        k += 1;
    }
}

/// `ltch(x,y)` and `sltns(x,y)`: a strict pair with nothing in between.
pub(crate) fn expand_macro(name: &str, x: &str, y: &str) -> Formula {
    let z = macro_inner_var(x, y);
    match name {
        "ltch" => Formula::and(
            Formula::rel("lt", &[x, y]),
            Formula::not(Formula::exists(
                &z,
                Formula::and(Formula::rel("lt", &[&z, y]), Formula::rel("lt", &[x, &z])),
            )),
        ),
        _ => Formula::and(
            Formula::rel("slt", &[x, y]),
            Formula::not(Formula::exists(
                &z,
                Formula::and(Formula::rel("slt", &[x, &z]), Formula::rel("slt", &[&z, y])),
            )),
        ),
    }
}

/// Recognises an expanded macro, returning its name and arguments.
pub(crate) fn match_macro(f: &Formula) -> Option<(&'static str, String, String)> {
    let Formula::And(a, _) = f else { return None };
    let Formula::Rel(r, args) = a.as_ref() else {
        return None;
    };
    if args.len() != 2 {
        return None;
    }
    let name = match r.as_str() {
        "lt" => "ltch",
        "slt" => "sltns",
        _ => return None,
    };
    let (x, y) = (&args[0], &args[1]);
    if expand_macro(name, x, y) == *f {
        Some((name, x.clone(), y.clone()))
    } else {
        None
    }
}
