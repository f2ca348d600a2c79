//! Recursive-descent parser for expression text.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names listed in `vars` become variables, every other name is a symbol.
//! Decimal literals are read exactly (`0.1` is `1/10`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use thiserror::Error;

use super::{Expr, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            column: column + 1,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let bytes = self.src.as_bytes();
        let mut out = Vec::new();
        while self.pos < bytes.len() {
            let c = bytes[self.pos] as char;
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += 1;
            } else if c.is_ascii_digit() || c == '.' {
                out.push((Tok::Num(self.number()?), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                    self.pos += 1;
                }
                out.push((Tok::Ident(self.src[start..self.pos].to_string()), start));
            } else if "+-*/^()".contains(c) {
                self.pos += 1;
                out.push((Tok::Op(c), start));
            } else {
                return Err(self.err(start, format!("unexpected character `{c}`")));
            }
        }
        out.push((Tok::End, self.src.len()));
        Ok(out)
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            s..*pos
        };
        let int_part = digits(&mut self.pos);
        let mut frac_part = self.pos..self.pos;
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            frac_part = digits(&mut self.pos);
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.err(start, "malformed number"));
        }
        let mut exp: i64 = 0;
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut p = self.pos + 1;
            let negative = p < bytes.len() && bytes[p] == b'-';
            if p < bytes.len() && (bytes[p] == b'-' || bytes[p] == b'+') {
                p += 1;
            }
            let e_digits = digits(&mut p);
            if e_digits.is_empty() {
                return Err(self.err(self.pos, "malformed exponent"));
            }
            exp = self.src[e_digits]
                .parse::<i64>()
                .map_err(|_| self.err(self.pos, "exponent out of range"))?;
            if negative {
                exp = -exp;
            }
            self.pos = p;
        }
        let mantissa = format!("{}{}", &self.src[int_part], &self.src[frac_part.clone()]);
        let n: BigInt = mantissa.parse().map_err(|_| self.err(start, "malformed number"))?;
        let scale = exp - frac_part.len() as i64;
        let ten = BigRational::from_integer(10.into());
        let factor: Rational = Pow::pow(
            &ten,
            i32::try_from(scale).map_err(|_| self.err(start, "exponent out of range"))?,
        );
        Ok(BigRational::from_integer(n) * factor)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn column(&self) -> usize {
        self.toks[self.at].1 + 1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.column(),
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    factors.push(self.unary()?.recip());
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => -other,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let col = self.column();
        let exponent = self.unary()?;
        match exponent.simplify() {
            Expr::Const(k) => Ok(base.pow(k)),
            _ => Err(ParseError {
                column: col,
                message: "exponent must be a rational constant".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::Num(c) => Ok(Expr::Const(c)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    if name != "Gamma" {
                        return Err(ParseError {
                            column: col,
                            message: format!("unknown function `{name}`"),
                        });
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::gamma(arg));
                }
                Ok(if self.vars.contains(&name.as_str()) {
                    Expr::var(&name)
                } else {
                    Expr::sym(&name)
                })
            }
            Tok::End => Err(ParseError {
                column: col,
                message: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(ParseError {
                column: col,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

/// Parses `text`, treating the names in `vars` as dynamical variables.
pub fn parse_expr(text: &str, vars: &[&str]) -> Result<Expr, ParseError> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser { toks, at: 0, vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}
