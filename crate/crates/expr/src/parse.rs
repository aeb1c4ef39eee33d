//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          integer-valued exponent only
//! primary := integer | ident | func '(' sum ')' | '(' sum ')'
//! ```

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::expr::Expr;

const FUNCTIONS: [&str; 5] = ["exp", "ln", "sin", "cos", "sqrt"];
const MAX_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("zero denominator at byte {offset}")]
    ZeroDenominator { offset: usize },
    #[error("exponent at byte {offset} is not an integer")]
    NonIntegerExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::ZeroDenominator { offset }
            | ParseError::NonIntegerExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(u8),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("ascii digits");
                out.push((Tok::Int(n), start));
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(b), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Op(b'+') => {
                    self.bump();
                    acc = &acc + &self.product()?;
                }
                Tok::Op(b'-') => {
                    self.bump();
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op(b'*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op(b'/') => {
                    self.bump();
                    let offset = self.offset();
                    let rhs = self.unary()?;
                    acc = acc
                        .checked_div(&rhs)
                        .ok_or(ParseError::ZeroDenominator { offset })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op(b'-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op(b'+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base_offset = self.offset();
        let base = self.primary()?;
        if *self.peek() != Tok::Op(b'^') {
            return Ok(base);
        }
        self.bump();
        let offset = self.offset();
        let exponent = self.unary()?;
        let n = exponent
            .as_integer()
            .ok_or(ParseError::NonIntegerExponent { offset })?;
        let n = n
            .to_i64()
            .filter(|n| n.abs() <= MAX_EXPONENT)
            .ok_or_else(|| ParseError::Syntax {
                offset,
                message: format!("exponent magnitude exceeds {MAX_EXPONENT}"),
            })?;
        if n < 0 && base.is_zero() {
            return Err(ParseError::ZeroDenominator {
                offset: base_offset,
            });
        }
        Ok(base.pow(n))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::integer(n)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    if !FUNCTIONS.contains(&name.as_str()) {
                        return Err(ParseError::UnknownFunction { offset, name });
                    }
                    self.bump();
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Expr::apply(&name, &arg).expect("known function"));
                }
                if FUNCTIONS.contains(&name.as_str()) {
                    return Err(ParseError::Syntax {
                        offset,
                        message: format!("function `{name}` needs an argument"),
                    });
                }
                Ok(Expr::var(&name))
            }
            Tok::LParen => {
                let e = self.sum()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::End => Err(ParseError::Syntax {
                offset,
                message: "unexpected end of input".to_string(),
            }),
            Tok::RParen => Err(ParseError::Syntax {
                offset,
                message: "unexpected `)`".to_string(),
            }),
            Tok::Op(b) => Err(ParseError::Syntax {
                offset,
                message: format!("unexpected `{}`", b as char),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            self.syntax("expected `)`")
        }
    }
}

/// Parses and canonicalizes an expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
