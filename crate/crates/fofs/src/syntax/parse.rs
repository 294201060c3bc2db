//! Lexer and recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := 'forall' IDENT '.' formula | 'exists' IDENT '.' formula | imp
//! imp     := disj ('->' imp)?                      (right-assoc)
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := 'box' unary | 'dia' unary | '~' unary | atom
//! atom    := IDENT '(' term (',' term)* ')' | term '=' term | 'true' | 'false' | '(' formula ')'
//! term    := IDENT
//! ```
//!
//! Quantifier bodies extend maximally to the right; `~`, `true` expand at
//! parse time. An identifier in term position is a variable when bound by
//! an enclosing quantifier, otherwise a constant.

use std::collections::BTreeMap;

use super::{Formula, Signature, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    BoxKw,
    DiaKw,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Bar,
    Amp,
    Tilde,
    Equals,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some((tok, at)) = lx.next_token()? {
            out.push((tok, at));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, SyntaxError> {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let at = self.pos;
        let c = self.src[self.pos] as char;
        let tok = match c {
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            ',' => {
                self.pos += 1;
                Tok::Comma
            }
            '.' => {
                self.pos += 1;
                Tok::Dot
            }
            '|' => {
                self.pos += 1;
                Tok::Bar
            }
            '&' => {
                self.pos += 1;
                Tok::Amp
            }
            '~' => {
                self.pos += 1;
                Tok::Tilde
            }
            '=' => {
                self.pos += 1;
                Tok::Equals
            }
            '-' => {
                if self.pos + 1 < self.src.len() && self.src[self.pos + 1] == b'>' {
                    self.pos += 2;
                    Tok::Arrow
                } else {
                    return Err(SyntaxError::Lex {
                        pos: at,
                        msg: "expected '->'".into(),
                    });
                }
            }
            '@' => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len()
                    && ((self.src[self.pos] as char).is_ascii_alphanumeric()
                        || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(SyntaxError::Lex {
                        pos: at,
                        msg: "'@' must begin a generated constant name".into(),
                    });
                }
                let name = format!("@{}", std::str::from_utf8(&self.src[start..self.pos]).unwrap());
                Tok::Ident(name)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && ((self.src[self.pos] as char).is_ascii_alphanumeric()
                        || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "box" => Tok::BoxKw,
                    "dia" => Tok::DiaKw,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(SyntaxError::Lex {
                    pos: at,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        Ok(Some((tok, at)))
    }
}

/// Name resolution mode: check against a signature, or infer one.
enum Names<'a> {
    Strict(&'a Signature),
    Infer {
        constants: Vec<String>,
        predicates: BTreeMap<String, usize>,
    },
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    bound: Vec<String>,
    names: Names<'a>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        let at = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(SyntaxError::Parse {
                pos: at,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let is_forall = matches!(self.peek(), Some(Tok::Forall));
                self.bump();
                let at = self.pos();
                let x = match self.bump() {
                    Some(Tok::Ident(x)) if !x.starts_with('@') => x,
                    _ => {
                        return Err(SyntaxError::Parse {
                            pos: at,
                            msg: "expected a variable name after quantifier".into(),
                        })
                    }
                };
                self.expect(Tok::Dot, "'.' after quantified variable")?;
                self.bound.push(x.clone());
                let body = self.formula()?;
                self.bound.pop();
                Ok(if is_forall {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                })
            }
            _ => self.imp(),
        }
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disj()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.bump();
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.conj()?;
        while matches!(self.peek(), Some(Tok::Bar)) {
            self.bump();
            let rhs = self.conj()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while matches!(self.peek(), Some(Tok::Amp)) {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::BoxKw) => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Some(Tok::DiaKw) => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        let at = self.pos();
        match self.bump() {
            Some(Tok::True) => Ok(Formula::top()),
            Some(Tok::False) => Ok(Formula::False),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "')' after predicate arguments")?;
                    if name.starts_with('@') {
                        return Err(SyntaxError::Parse {
                            pos: at,
                            msg: "generated names cannot be predicates".into(),
                        });
                    }
                    self.check_pred(&name, args.len(), at)?;
                    Ok(Formula::Pred(name, args))
                } else {
                    let s = self.resolve_term(name, at)?;
                    self.expect(Tok::Equals, "'=' in equality atom")?;
                    let t = self.term()?;
                    Ok(Formula::Eq(s, t))
                }
            }
            _ => Err(SyntaxError::Parse {
                pos: at,
                msg: "expected an atom".into(),
            }),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let at = self.pos();
        match self.bump() {
            Some(Tok::Ident(name)) => self.resolve_term(name, at),
            _ => Err(SyntaxError::Parse {
                pos: at,
                msg: "expected a term".into(),
            }),
        }
    }

    fn resolve_term(&mut self, name: String, at: usize) -> Result<Term, SyntaxError> {
        if self.bound.iter().any(|b| *b == name) {
            return Ok(Term::Var(name));
        }
        match &mut self.names {
            Names::Strict(sig) => {
                if sig.has_constant(&name) {
                    Ok(Term::Con(name))
                } else {
                    Err(SyntaxError::Unbound { name, pos: at })
                }
            }
            Names::Infer { constants, .. } => {
                if !constants.contains(&name) {
                    constants.push(name.clone());
                }
                Ok(Term::Con(name))
            }
        }
    }

    fn check_pred(&mut self, name: &str, got: usize, at: usize) -> Result<(), SyntaxError> {
        match &mut self.names {
            Names::Strict(sig) => match sig.arity(name) {
                None => Err(SyntaxError::Unbound {
                    name: name.to_string(),
                    pos: at,
                }),
                Some(a) if a != got => Err(SyntaxError::ArityMismatch {
                    pred: name.to_string(),
                    expected: a,
                    got,
                }),
                _ => Ok(()),
            },
            Names::Infer { predicates, .. } => match predicates.get(name) {
                Some(&a) if a != got => Err(SyntaxError::ArityMismatch {
                    pred: name.to_string(),
                    expected: a,
                    got,
                }),
                _ => {
                    predicates.insert(name.to_string(), got);
                    Ok(())
                }
            },
        }
    }
}

fn run_parser<'a>(text: &str, names: Names<'a>) -> Result<(Formula, Names<'a>), SyntaxError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        bound: Vec::new(),
        names,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.idx != p.toks.len() {
        return Err(SyntaxError::Parse {
            pos: p.pos(),
            msg: "trailing input after formula".into(),
        });
    }
    Ok((f, p.names))
}

/// Parses against a known signature; every name must resolve.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    run_parser(text, Names::Strict(sig)).map(|(f, _)| f)
}

/// A formula together with the signature inferred from it.
#[derive(Debug, Clone)]
pub struct ParsedWithSig {
    pub formula: Formula,
    pub constants: Vec<String>,
    pub predicates: BTreeMap<String, usize>,
}

/// Parses while inferring the signature: unbound identifiers in term
/// position become constants, predicate arities come from use and must
/// be consistent within the text.
pub fn parse_formula_inferred(text: &str) -> Result<ParsedWithSig, SyntaxError> {
    let (formula, names) = run_parser(
        text,
        Names::Infer {
            constants: Vec::new(),
            predicates: BTreeMap::new(),
        },
    )?;
    match names {
        Names::Infer {
            constants,
            predicates,
        } => Ok(ParsedWithSig {
            formula,
            constants,
            predicates,
        }),
        Names::Strict(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn sig() -> Signature {
        Signature::new(
            vec!["c".into(), "d".into()],
            [("P".to_string(), 1), ("Q".to_string(), 1)]
                .into_iter()
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_box_implication() {
        let f = parse_formula("box (P(c) -> Q(c))", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::boxed(Formula::imp(
                Formula::pred("P", vec![Term::con("c")]),
                Formula::pred("Q", vec![Term::con("c")]),
            ))
        );
    }

    #[test]
    fn unary_binds_tighter_than_or() {
        let f = parse_formula("dia P(c) | Q(c)", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::dia(Formula::pred("P", vec![Term::con("c")])),
                Formula::pred("Q", vec![Term::con("c")]),
            )
        );
    }

    #[test]
    fn arity_mismatch_reported() {
        let err = parse_formula("P(c, d)", &sig()).unwrap_err();
        assert!(matches!(err, SyntaxError::ArityMismatch { .. }));
    }

    #[test]
    fn unbound_name_reported_with_position() {
        let err = parse_formula("P(e)", &sig()).unwrap_err();
        assert!(matches!(err, SyntaxError::Unbound { pos: 2, .. }));
    }

    #[test]
    fn quantifier_scopes_right() {
        let f = parse_formula("forall x. P(x) -> Q(x)", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::imp(
                    Formula::pred("P", vec![Term::var("x")]),
                    Formula::pred("Q", vec![Term::var("x")]),
                )
            )
        );
    }

    #[test]
    fn sugar_expands() {
        let f = parse_formula("~P(c)", &sig()).unwrap();
        assert_eq!(f, Formula::neg(Formula::pred("P", vec![Term::con("c")])));
        let t = parse_formula("true", &sig()).unwrap();
        assert_eq!(t, Formula::imp(Formula::False, Formula::False));
    }

    #[test]
    fn implication_right_associates() {
        let f = parse_formula("P(c) -> Q(c) -> P(d)", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::imp(
                Formula::pred("P", vec![Term::con("c")]),
                Formula::imp(
                    Formula::pred("Q", vec![Term::con("c")]),
                    Formula::pred("P", vec![Term::con("d")]),
                )
            )
        );
    }

    #[test]
    fn inference_collects_names() {
        let p = parse_formula_inferred("forall x. R(x, e) & S(e)").unwrap();
        assert_eq!(p.constants, vec!["e".to_string()]);
        let mut want = BTreeMap::new();
        want.insert("R".to_string(), 2);
        want.insert("S".to_string(), 1);
        assert_eq!(p.predicates, want);
    }

    #[test]
    fn inference_rejects_inconsistent_arity() {
        assert!(parse_formula_inferred("R(c) & R(c, d)").is_err());
    }
}
