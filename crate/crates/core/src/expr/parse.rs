//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := exp | ln | sin | cos | sqrt
//! ```
//!
//! Unary minus belongs to `base`, so `-x^2` reads as `(-x)^2`.

use thiserror::Error;

use super::{Expr, Func, ScalarField};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at column {}: {message}", .pos + 1)]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at column {}", .pos + 1)]
    UnknownIdentifier { pos: usize, name: String },
    #[error("variable `{name}` at column {} is out of range for arity {arity}", .pos + 1)]
    VarOutOfRange {
        pos: usize,
        name: String,
        arity: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::VarOutOfRange { pos, .. } => *pos,
        }
    }
}

/// Parses with the default coordinate names `x1 … xn`.
pub fn parse(text: &str, arity: usize) -> Result<ScalarField, ParseError> {
    let names: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let expr = Parser::new(text, &names).run()?;
    Ok(ScalarField { expr, arity })
}

/// Parses with explicit coordinate names; identifier `names[i]` is variable `i`.
pub fn parse_with_names(text: &str, names: &[String]) -> Result<ScalarField, ParseError> {
    let expr = Parser::new(text, names).run()?;
    Ok(ScalarField {
        expr,
        arity: names.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a [u8],
    names: &'a [String],
    pos: usize,
    tok: Tok,
    tok_pos: usize,
    depth: usize,
}

const MAX_DEPTH: usize = 256;

impl<'a> Parser<'a> {
    fn new(text: &'a str, names: &'a [String]) -> Parser<'a> {
        Parser {
            src: text.as_bytes(),
            names,
            pos: 0,
            tok: Tok::End,
            tok_pos: 0,
            depth: 0,
        }
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        let e = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.tok_pos,
            message: message.to_string(),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_pos = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        self.tok = match c {
            b'+' => self.single(Tok::Plus),
            b'-' => self.single(Tok::Minus),
            b'*' => self.single(Tok::Star),
            b'/' => self.single(Tok::Slash),
            b'^' => self.single(Tok::Caret),
            b'(' => self.single(Tok::LParen),
            b')' => self.single(Tok::RParen),
            b'0'..=b'9' | b'.' => self.number()?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: self.pos,
                    message: format!("unexpected character {:?}", self.char_at(self.pos)),
                })
            }
        };
        Ok(())
    }

    fn char_at(&self, pos: usize) -> char {
        std::str::from_utf8(&self.src[pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or(self.src[pos] as char)
    }

    fn single(&mut self, t: Tok) -> Tok {
        self.pos += 1;
        t
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let mut n = self.digits();
        let mut is_int = true;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += self.digits();
            is_int = false;
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                pos: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = save;
            } else {
                is_int = false;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        if is_int {
            if let Ok(i) = text.parse::<i64>() {
                return Ok(Tok::Int(i));
            }
        }
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Tok::Num)
            .ok_or(ParseError::Syntax {
                pos: start,
                message: format!("number `{text}` is not a finite double"),
            })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    acc = Expr::add(&acc, &self.term()?);
                }
                Tok::Minus => {
                    self.advance()?;
                    acc = Expr::sub(&acc, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.advance()?;
                    acc = Expr::mul(&acc, &self.factor()?);
                }
                Tok::Slash => {
                    self.advance()?;
                    acc = Expr::div(&acc, &self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.advance()?;
        let negative = if self.tok == Tok::Minus {
            self.advance()?;
            true
        } else {
            false
        };
        let Tok::Int(k) = self.tok else {
            return Err(self.error("exponent must be an integer literal"));
        };
        let k = if negative { -k } else { k };
        let k = i32::try_from(k).map_err(|_| self.error("exponent out of range"))?;
        self.advance()?;
        Ok(Expr::powi(&base, k))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let out = match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Expr::constant(v)
            }
            Tok::Int(i) => {
                self.advance()?;
                Expr::constant(i as f64)
            }
            Tok::Minus => {
                self.advance()?;
                Expr::neg(&self.base()?)
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                inner
            }
            Tok::Ident(name) => {
                let pos = self.tok_pos;
                self.advance()?;
                if let Some(func) = Func::from_name(&name) {
                    if self.tok != Tok::LParen {
                        return Err(self.error(&format!("expected '(' after `{name}`")));
                    }
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Expr::apply(func, &arg)
                } else {
                    self.variable(&name, pos)?
                }
            }
            Tok::End => return Err(self.error("unexpected end of input")),
            _ => return Err(self.error("expected a number, identifier or '('")),
        };
        self.depth -= 1;
        Ok(out)
    }

    fn variable(&self, name: &str, pos: usize) -> Result<Expr, ParseError> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(Expr::var(i));
        }
        let default_index = name
            .strip_prefix('x')
            .filter(|d| {
                !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0')
            })
            .and_then(|d| d.parse::<usize>().ok());
        let uses_defaults = self
            .names
            .iter()
            .enumerate()
            .all(|(i, n)| *n == format!("x{}", i + 1));
        match default_index {
            Some(k) if uses_defaults && k > self.names.len() => Err(ParseError::VarOutOfRange {
                pos,
                name: name.to_string(),
                arity: self.names.len(),
            }),
            _ => Err(ParseError::UnknownIdentifier {
                pos,
                name: name.to_string(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(self.error("expected ')'"));
        }
        self.advance()
    }
}
