//! Recursive-descent parser for scalar expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-'|'+') factor | base ('^' '-'? integer)?
//! base   := integer | variable | func '(' expr ')' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use thiserror::Error;

use super::poly::{Var, Q};
use super::scalar::{Func, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = lx.src[start..i].parse().unwrap();
                lx.toks.push((Tok::Int(n), start));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(lx.src[start..i].to_string()), start));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    allowed: Option<&'v [Var]>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Sym('/') => {
                    let at = self.offset();
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|e| ParseError {
                        offset: at,
                        message: match e {
                            ScalarError::DivisionByZero => "division by zero".into(),
                            other => other.to_string(),
                        },
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Scalar, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                return Ok(self.factor()?.neg());
            }
            Tok::Sym('+') => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let negative = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let e = match self.bump() {
            Tok::Int(n) => i32::try_from(n).map_err(|_| ParseError {
                offset: at,
                message: "exponent too large".into(),
            })?,
            _ => {
                self.pos -= 1;
                return self.err("expected integer exponent");
            }
        };
        let e = if negative { -e } else { e };
        base.powi(e).map_err(|_| ParseError {
            offset: at,
            message: "division by zero".into(),
        })
    }

    fn base(&mut self) -> Result<Scalar, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Scalar::constant(Q::from_integer(n))),
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Scalar::call(f, &arg));
                }
                let v = Var::new(&name);
                if let Some(allowed) = self.allowed {
                    if !allowed.contains(&v) {
                        return Err(ParseError {
                            offset: at,
                            message: format!("unknown variable `{name}`"),
                        });
                    }
                }
                Ok(Scalar::var(&v))
            }
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                self.err("unexpected end of input")
            }
            Tok::Sym(c) => Err(ParseError {
                offset: at,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

fn parse_with(text: &str, allowed: Option<&[Var]>) -> Result<Scalar, ParseError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        allowed,
    };
    let s = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(s)
}

/// Parses a scalar; exact when only rational operations appear.
pub fn parse(text: &str) -> Result<Scalar, ParseError> {
    parse_with(text, None)
}

/// Parses a scalar whose variables must belong to `vars`.
pub fn parse_in(text: &str, vars: &[Var]) -> Result<Scalar, ParseError> {
    parse_with(text, Some(vars))
}
