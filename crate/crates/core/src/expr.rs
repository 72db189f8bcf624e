//! Rational-function expressions in `T` over named rational constants.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] INT | '^' '(' ['-'] INT ')')?
//! atom  := INT | IDENT | 'T' | '(' expr ')'
//! ```
//!
//! The Unicode minus sign is accepted wherever `-` is.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use crate::scalars::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Const(String),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            if i < cs.len() && cs[i] == '.' {
                return Err(Error::Parse {
                    line,
                    column: i + 1,
                    message: "decimal literals are not exact; write a fraction".into(),
                });
            }
            let txt: String = cs[st..i].iter().collect();
            out.push((Tok::Int(txt.parse().unwrap()), col));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(cs[st..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) || c == '\u{2212}' {
            out.push((Tok::Op(if c == '\u{2212}' { '-' } else { c }), col));
            i += 1;
        } else {
            return Err(Error::Parse {
                line,
                column: col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.col(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Int(k)) => k.clone(),
            _ => return self.err("exponent must be an integer"),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return self.err("expected ')'");
        }
        let k = match k.to_i64() {
            Some(k) if k <= 1 << 20 => k,
            _ => return self.err("exponent too large"),
        };
        Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Expr::Int(k))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(if name == "T" { Expr::T } else { Expr::Const(name) })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parse `s`, reporting positions as `line` and 1-based columns offset by
/// `col0`.
pub fn parse_expr_at(s: &str, line: usize, col0: usize) -> Result<Expr> {
    let shift = |e: Error| match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column: column + col0,
            message,
        },
        e => e,
    };
    let toks = lex(s, line).map_err(shift)?;
    let mut ps = Parser {
        toks,
        pos: 0,
        line,
        end: s.chars().count() + 1,
    };
    let e = ps.expr().map_err(shift)?;
    if ps.pos < ps.toks.len() {
        return ps.err::<Expr>("trailing input").map_err(shift);
    }
    Ok(e)
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    parse_expr_at(s, 1, 0)
}

impl Expr {
    pub fn eval(&self, consts: &BTreeMap<String, Q>, line: usize) -> Result<RatFun> {
        let ev = |e: &Expr| e.eval(consts, line);
        Ok(match self {
            Expr::Int(k) => RatFun::constant(Q::from_integer(k.clone())),
            Expr::Const(n) => RatFun::constant(
                consts
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::UnboundConstant {
                        name: n.clone(),
                        line,
                    })?,
            ),
            Expr::T => RatFun::t(),
            Expr::Neg(a) => -ev(a)?,
            Expr::Add(a, b) => &ev(a)? + &ev(b)?,
            Expr::Sub(a, b) => &ev(a)? - &ev(b)?,
            Expr::Mul(a, b) => &ev(a)? * &ev(b)?,
            Expr::Div(a, b) => {
                let d = ev(b)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                &ev(a)? / &d
            }
            Expr::Pow(a, k) => ev(a)?.pow(*k)?,
        })
    }

    /// A value free of `T`.
    pub fn eval_const(&self, consts: &BTreeMap<String, Q>, line: usize) -> Result<Q> {
        self.eval(consts, line)?.as_constant().ok_or(Error::Parse {
            line,
            column: 1,
            message: "expected a constant".into(),
        })
    }

    /// Fully parenthesised form; parses back to the same tree.
    pub fn render(&self) -> String {
        match self {
            Expr::Int(k) => k.to_string(),
            Expr::Const(n) => n.clone(),
            Expr::T => "T".into(),
            Expr::Neg(a) => format!("(-{})", a.render()),
            Expr::Add(a, b) => format!("({} + {})", a.render(), b.render()),
            Expr::Sub(a, b) => format!("({} - {})", a.render(), b.render()),
            Expr::Mul(a, b) => format!("({} * {})", a.render(), b.render()),
            Expr::Div(a, b) => format!("({} / {})", a.render(), b.render()),
            Expr::Pow(a, k) => match **a {
                Expr::Pow(..) => format!("({})^({})", a.render(), k),
                _ => format!("{}^({})", a.render(), k),
            },
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// A rational literal: `n`, `n/d`, optionally signed.
pub fn parse_literal(name: &str, s: &str) -> Result<Q> {
    crate::scalars::parse_q(s.trim()).ok_or_else(|| Error::NonRationalLiteral {
        name: name.into(),
        value: s.trim().into(),
    })
}
