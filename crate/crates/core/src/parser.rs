//! Recursive-descent parser for the operator grammar.
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' exponent)?
//! base     := 'x' | 'p' | 'i' | 'hbar' | NUMBER | IDENT | IDENT "'"* '(' 'x' ')' | '(' expr ')'
//! exponent := ['-'] NUMBER | IDENT | '(' affine ')'
//! ```
//!
//! Multiplication must be written with `*`. Scalars (`i`, `hbar`, numbers
//! and bare identifiers) fold into the word coefficient; `x`, `p` and applied
//! identifiers such as `f(x)` or `f''(x)` are operator factors.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exponent::ExponentExpr;
use crate::operator::{Base, Factor, OperatorExpr};
use crate::poly::ParamSymbol;
use crate::scalar::ScalarExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}..{} (expected {})",
            self.message,
            self.span.start,
            self.span.end,
            self.expected.join(", ")
        )
    }
}

impl ParseError {
    /// Renders the error with a caret line under the offending input.
    pub fn render(&self, input: &str) -> String {
        let prefix = input[..self.span.start].chars().count();
        let width = input[self.span.start..self.span.end].chars().count().max(1);
        format!(
            "error: {}\n  {}\n  {}{}\n  expected: {}",
            self.message,
            input,
            " ".repeat(prefix),
            "^".repeat(width),
            self.expected.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Apostrophe,
    Number(BigRational),
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Apostrophe => "\"'\"".into(),
            Tok::Number(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self, Tok::Number(_) | Tok::Ident(_) | Tok::LParen)
    }
}

fn err(message: impl Into<String>, span: SourceSpan, expected: &[&str]) -> ParseError {
    ParseError {
        message: message.into(),
        span,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'\'' => Some(Tok::Apostrophe),
            _ => None,
        };
        if let Some(t) = single {
            i += 1;
            out.push((t, SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let numer: BigInt = input[start..i].parse().unwrap();
            let mut value = BigRational::from_integer(numer);
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                let dstart = i + 1;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let denom: BigInt = input[dstart..i].parse().unwrap();
                if denom.is_zero() {
                    return Err(err(
                        "zero denominator in number",
                        SourceSpan::new(start, i),
                        &["nonzero denominator"],
                    ));
                }
                value /= BigRational::from_integer(denom);
            }
            out.push((Tok::Number(value), SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((
                Tok::Ident(input[start..i].to_string()),
                SourceSpan::new(start, i),
            ));
            continue;
        }
        let ch = input[start..].chars().next().unwrap();
        let end = start + ch.len_utf8();
        return Err(err(
            format!("unexpected character `{ch}`"),
            SourceSpan::new(start, end),
            &["operator", "number", "identifier", "'('"],
        ));
    }
    out.push((Tok::Eof, SourceSpan::new(input.len(), input.len())));
    Ok(out)
}

enum BaseValue {
    Generator(Base),
    Scalar(ScalarExpr),
    Group(OperatorExpr),
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

const RESERVED: [&str; 4] = ["x", "p", "i", "hbar"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        err(
            format!("unexpected {}", self.peek().describe()),
            self.span(),
            expected,
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&[expected]))
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                t if t.starts_factor() => {
                    return Err(err(
                        "implicit multiplication is not allowed",
                        self.span(),
                        &["'*'"],
                    ));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<OperatorExpr, ParseError> {
        let start = self.span().start;
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(match base {
                BaseValue::Generator(b) => {
                    OperatorExpr::factor(Factor::new(b, ExponentExpr::one()))
                }
                BaseValue::Scalar(s) => OperatorExpr::scalar(s),
                BaseValue::Group(e) => e,
            });
        }
        self.bump();
        let exp_start = self.span().start;
        let exponent = self.exponent()?;
        let exp_span = SourceSpan::new(exp_start, self.toks[self.pos.saturating_sub(1)].1.end);
        let span = SourceSpan::new(start, exp_span.end);
        match base {
            BaseValue::Generator(b) => Ok(OperatorExpr::factor(Factor::new(b, exponent))),
            BaseValue::Scalar(s) => {
                let n = exponent.as_integer().ok_or_else(|| {
                    err(
                        "scalar bases need an integer exponent",
                        exp_span,
                        &["integer exponent"],
                    )
                })?;
                let v = s
                    .pow(n)
                    .map_err(|_| err("zero raised to a negative power", span, &["nonzero base"]))?;
                Ok(OperatorExpr::scalar(v))
            }
            BaseValue::Group(e) => {
                let n = exponent.as_integer().ok_or_else(|| {
                    err(
                        "parenthesised expressions need an integer exponent",
                        exp_span,
                        &["integer exponent"],
                    )
                })?;
                if let Some(s) = e.as_scalar() {
                    let v = s.pow(n).map_err(|_| {
                        err("zero raised to a negative power", span, &["nonzero base"])
                    })?;
                    return Ok(OperatorExpr::scalar(v));
                }
                if n < 0 {
                    return Err(err(
                        "negative power of an operator expression is unsupported",
                        exp_span,
                        &["nonnegative integer exponent"],
                    ));
                }
                Ok(e.pow(n as u32))
            }
        }
    }

    fn base(&mut self) -> Result<BaseValue, ParseError> {
        const EXPECTED: [&str; 5] = ["'x'", "'p'", "number", "identifier", "'('"];
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(BaseValue::Scalar(ScalarExpr::rational(n)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(BaseValue::Group(inner))
            }
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                let mut primes = 0u32;
                while *self.peek() == Tok::Apostrophe {
                    self.bump();
                    primes += 1;
                }
                let applied = *self.peek() == Tok::LParen
                    && matches!(self.peek_at(1), Tok::Ident(s) if s == "x")
                    && *self.peek_at(2) == Tok::RParen;
                if applied && !RESERVED.contains(&name.as_str()) {
                    self.bump();
                    self.bump();
                    self.bump();
                    return Ok(BaseValue::Generator(Base::Func(name, primes)));
                }
                if primes > 0 {
                    return Err(err(
                        "derivative marks must be followed by an application to (x)",
                        self.span(),
                        &["'(x)'"],
                    ));
                }
                if applied {
                    return Err(err(
                        format!("`{name}` is reserved and cannot be applied"),
                        span,
                        &["function name"],
                    ));
                }
                Ok(match name.as_str() {
                    "x" => BaseValue::Generator(Base::X),
                    "p" => BaseValue::Generator(Base::P),
                    "i" => BaseValue::Scalar(ScalarExpr::i()),
                    _ => BaseValue::Scalar(ScalarExpr::param(ParamSymbol::new(name))),
                })
            }
            _ => Err(self.unexpected(&EXPECTED)),
        }
    }

    fn exponent(&mut self) -> Result<ExponentExpr, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Number(n) => {
                        self.bump();
                        Ok(ExponentExpr::constant(-n))
                    }
                    _ => Err(self.unexpected(&["number"])),
                }
            }
            Tok::Number(n) => {
                self.bump();
                Ok(ExponentExpr::constant(n))
            }
            Tok::Ident(_) => self.exponent_atom(),
            Tok::LParen => {
                self.bump();
                let e = self.affine()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["number", "identifier", "'('"])),
        }
    }

    fn exponent_atom(&mut self) -> Result<ExponentExpr, ParseError> {
        let (tok, span) = self.bump();
        let Tok::Ident(name) = tok else {
            unreachable!()
        };
        let applied = *self.peek() == Tok::LParen || *self.peek() == Tok::Apostrophe;
        match name.as_str() {
            "x" | "p" => Err(err(
                "operator-valued exponent unsupported",
                span,
                &["number", "parameter"],
            )),
            _ if applied => Err(err(
                "operator-valued exponent unsupported",
                span,
                &["number", "parameter"],
            )),
            "i" | "hbar" => Err(err(
                format!("`{name}` cannot appear in an exponent"),
                span,
                &["number", "parameter"],
            )),
            _ => Ok(ExponentExpr::param(ParamSymbol::new(name))),
        }
    }

    fn affine(&mut self) -> Result<ExponentExpr, ParseError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.affine_term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.affine_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.affine_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn affine_term(&mut self) -> Result<ExponentExpr, ParseError> {
        let mut acc = self.affine_atom()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let span = self.span();
                    let rhs = self.affine_atom()?;
                    acc = if acc.is_constant() {
                        rhs.scale(acc.constant_part())
                    } else if rhs.is_constant() {
                        acc.scale(rhs.constant_part())
                    } else {
                        return Err(err(
                            "exponent must be affine in parameters",
                            span,
                            &["number"],
                        ));
                    };
                }
                Tok::Slash => {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Number(n) if !n.is_zero() => {
                            self.bump();
                            acc = acc.scale(&(BigRational::from_integer(1.into()) / n));
                        }
                        Tok::Number(_) => {
                            return Err(err("division by zero", self.span(), &["nonzero number"]))
                        }
                        _ => return Err(self.unexpected(&["number"])),
                    }
                }
                t if t.starts_factor() => {
                    return Err(err(
                        "implicit multiplication is not allowed",
                        self.span(),
                        &["'*'"],
                    ));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn affine_atom(&mut self) -> Result<ExponentExpr, ParseError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(ExponentExpr::constant(n))
            }
            Tok::Ident(_) => self.exponent_atom(),
            Tok::LParen => {
                self.bump();
                let e = self.affine()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                Ok(self.affine_atom()?.neg())
            }
            _ => Err(self.unexpected(&["number", "parameter", "'('"])),
        }
    }
}

/// Parses operator text into an [`OperatorExpr`].
pub fn parse_operator(text: &str) -> Result<OperatorExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(e)
}
