//! Boolean formulas over atomic propositions.
//!
//! Grammar: `true | false | IDENT | ! f | f & f | f | f | ( f )`, with `!`
//! binding tightest and `|` loosest. Disjunction is stored in negation normal
//! form `!(!a & !b)`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: String, offset: usize },
    #[error("unexpected end of formula")]
    UnexpectedEnd,
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelFormula {
    True,
    Prop(String),
    Not(Box<LabelFormula>),
    And(Box<LabelFormula>, Box<LabelFormula>),
}

impl LabelFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        LabelFormula::Prop(name.into())
    }

    pub fn negate(self) -> Self {
        LabelFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        LabelFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        self.negate().and(other.negate()).negate()
    }

    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.disjunction()?;
        match p.tokens.get(p.pos) {
            None => Ok(f),
            Some((tok, offset)) => Err(FormulaError::Unexpected { found: tok.to_string(), offset: *offset }),
        }
    }

    /// Propositions mentioned in the formula, in order of first appearance.
    pub fn propositions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            LabelFormula::True => {}
            LabelFormula::Prop(p) => {
                if !out.contains(&p.as_str()) {
                    out.push(p);
                }
            }
            LabelFormula::Not(f) => f.collect(out),
            LabelFormula::And(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Bind proposition names to indices of `ap`.
    pub fn resolve(&self, ap: &[String]) -> Result<Resolved, FormulaError> {
        Ok(match self {
            LabelFormula::True => Resolved::True,
            LabelFormula::Prop(p) => Resolved::Prop(
                ap.iter().position(|x| x == p).ok_or_else(|| FormulaError::UnknownProposition(p.clone()))?,
            ),
            LabelFormula::Not(f) => Resolved::Not(Box::new(f.resolve(ap)?)),
            LabelFormula::And(a, b) => Resolved::And(Box::new(a.resolve(ap)?), Box::new(b.resolve(ap)?)),
        })
    }
}

/// A formula with propositions bound to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    True,
    Prop(usize),
    Not(Box<Resolved>),
    And(Box<Resolved>, Box<Resolved>),
}

impl Resolved {
    /// Evaluate under a sorted set of true proposition indices.
    pub fn eval(&self, labels: &[usize]) -> bool {
        match self {
            Resolved::True => true,
            Resolved::Prop(p) => labels.binary_search(p).is_ok(),
            Resolved::Not(f) => !f.eval(labels),
            Resolved::And(a, b) => a.eval(labels) && b.eval(labels),
        }
    }
}

impl fmt::Display for LabelFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelFormula::True => f.write_str("true"),
            LabelFormula::Prop(p) => f.write_str(p),
            LabelFormula::Not(inner) => match inner.as_ref() {
                LabelFormula::And(_, _) => write!(f, "!({inner})"),
                _ => write!(f, "!{inner}"),
            },
            LabelFormula::And(a, b) => match b.as_ref() {
                // `&` associates to the left when parsed
                LabelFormula::And(_, _) => write!(f, "{a} & ({b})"),
                _ => write!(f, "{a} & {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    True,
    False,
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::True => f.write_str("true"),
            Token::False => f.write_str("false"),
            Token::Ident(s) => f.write_str(s),
            Token::Not => f.write_str("!"),
            Token::And => f.write_str("&"),
            Token::Or => f.write_str("|"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, FormulaError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '!' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '(' => Token::LParen,
            ')' => Token::RParen,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word.to_string()),
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(FormulaError::Unexpected { found: ch.to_string(), offset: i });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn disjunction(&mut self) -> Result<LabelFormula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LabelFormula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LabelFormula, FormulaError> {
        let (tok, offset) = self.tokens.get(self.pos).cloned().ok_or(FormulaError::UnexpectedEnd)?;
        self.pos += 1;
        match tok {
            Token::Not => Ok(self.unary()?.negate()),
            Token::True => Ok(LabelFormula::True),
            Token::False => Ok(LabelFormula::True.negate()),
            Token::Ident(name) => Ok(LabelFormula::Prop(name)),
            Token::LParen => {
                let inner = self.disjunction()?;
                match self.tokens.get(self.pos) {
                    Some((Token::RParen, _)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some((t, o)) => Err(FormulaError::Unexpected { found: t.to_string(), offset: *o }),
                    None => Err(FormulaError::UnexpectedEnd),
                }
            }
            other => Err(FormulaError::Unexpected { found: other.to_string(), offset }),
        }
    }
}
