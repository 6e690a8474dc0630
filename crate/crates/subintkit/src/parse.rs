//! Text grammar for both formula languages.
//!
//! Atoms match `[a-z][a-z0-9_]*`; `bot`, `top`, and `box` are reserved words.
//! Precedence, tightest first: unary (`~`, `[]`/`box`), `&`, `|`, `->`
//! (right-associative), `<->`. `&`, `|`, and `<->` associate to the left.
//! Sugar is expanded during parsing, so the resulting trees are core syntax.

use crate::formula::{ModalFormula, PropFormula};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bot,
    Top,
    Neg,
    BoxOp,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'~' => {
                toks.push((i, Tok::Neg));
                i += 1;
            }
            b'&' => {
                toks.push((i, Tok::And));
                i += 1;
            }
            b'|' => {
                toks.push((i, Tok::Or));
                i += 1;
            }
            b'[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((i, Tok::BoxOp));
                    i += 2;
                } else {
                    return err(i, "expected `[]`");
                }
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Imp));
                    i += 2;
                } else {
                    return err(i, "expected `->`");
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((i, Tok::Iff));
                    i += 3;
                } else {
                    return err(i, "expected `<->`");
                }
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                toks.push((
                    start,
                    match word {
                        "bot" => Tok::Bot,
                        "top" => Tok::Top,
                        "box" => Tok::BoxOp,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
            }
            _ => return err(i, format!("unexpected character `{}`", &text[i..i + 1])),
        }
    }
    Ok(toks)
}

// The parser builds modal trees and the propositional entry point rejects
// any `[]` afterwards, reporting the offset where it occurred.
struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn iff(&mut self) -> Result<ModalFormula, ParseError> {
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.imp()?;
            lhs = ModalFormula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<ModalFormula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Imp) {
            self.bump();
            let rhs = self.imp()?;
            Ok(ModalFormula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<ModalFormula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.and()?;
            lhs = ModalFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<ModalFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            lhs = ModalFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ModalFormula, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Neg) => Ok(ModalFormula::neg(self.unary()?)),
            Some(Tok::BoxOp) => Ok(ModalFormula::Box(Box::new(self.unary()?))),
            Some(Tok::Bot) => Ok(ModalFormula::Falsum),
            Some(Tok::Top) => Ok(ModalFormula::top()),
            Some(Tok::Ident(name)) => Ok(ModalFormula::Atom(name.clone())),
            Some(Tok::LParen) => {
                let inner = self.iff()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    err(self.offset(), "expected `)`")
                }
            }
            Some(_) => err(offset, "expected a formula"),
            None => err(offset, "unexpected end of input"),
        }
    }
}

fn parse(text: &str) -> Result<ModalFormula, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let f = parser.iff()?;
    if parser.pos < toks.len() {
        return err(parser.offset(), "trailing input after formula");
    }
    Ok(f)
}

/// Parse a modal formula.
pub fn parse_modal(text: &str) -> Result<ModalFormula, ParseError> {
    parse(text)
}

/// Parse a propositional formula. `[]`/`box` is rejected with the offset of
/// its first occurrence.
pub fn parse_prop(text: &str) -> Result<PropFormula, ParseError> {
    let toks = tokenize(text)?;
    if let Some((offset, _)) = toks.iter().find(|(_, t)| *t == Tok::BoxOp) {
        return err(*offset, "`[]` is not allowed in the propositional language");
    }
    let f = parse(text)?;
    Ok(demote(&f))
}

// Total on box-free trees; parse_prop has already rejected boxes.
fn demote(f: &ModalFormula) -> PropFormula {
    match f {
        ModalFormula::Atom(p) => PropFormula::Atom(p.clone()),
        ModalFormula::Falsum => PropFormula::Falsum,
        ModalFormula::And(a, b) => PropFormula::and(demote(a), demote(b)),
        ModalFormula::Or(a, b) => PropFormula::or(demote(a), demote(b)),
        ModalFormula::Imp(a, b) => PropFormula::imp(demote(a), demote(b)),
        ModalFormula::Box(_) => unreachable!("boxes rejected before demotion"),
    }
}

/// Lift a propositional formula into the modal language.
pub fn promote(f: &PropFormula) -> ModalFormula {
    match f {
        PropFormula::Atom(p) => ModalFormula::Atom(p.clone()),
        PropFormula::Falsum => ModalFormula::Falsum,
        PropFormula::And(a, b) => ModalFormula::and(promote(a), promote(b)),
        PropFormula::Or(a, b) => ModalFormula::or(promote(a), promote(b)),
        PropFormula::Imp(a, b) => ModalFormula::imp(promote(a), promote(b)),
    }
}
