//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | power
//! power   := atom ('^' factor)?            -- right associative
//! atom    := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//! IDENT   := [a-zA-Z_][a-zA-Z0-9_]*
//! ```
//!
//! `pi` and `e` are named constants. A constant exponent with a small
//! rational value becomes a `Pow` node; any other exponent is rewritten as
//! `exp(q*ln(base))`.

use std::collections::HashMap;

use thiserror::Error;

use super::{Expr, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

/// Parses an infix expression string.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(tok) => Err(ParseError::Syntax {
            offset: tok.offset,
            message: format!("unexpected `{}`", tok.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("{v}"),
            TokKind::Ident(s) => s.clone(),
            TokKind::Plus => "+".into(),
            TokKind::Minus => "-".into(),
            TokKind::Star => "*".into(),
            TokKind::Slash => "/".into(),
            TokKind::Caret => "^".into(),
            TokKind::LParen => "(".into(),
            TokKind::RParen => ")".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push(Token { kind: TokKind::Plus, offset: i });
                i += 1;
            }
            b'-' => {
                out.push(Token { kind: TokKind::Minus, offset: i });
                i += 1;
            }
            b'*' => {
                out.push(Token { kind: TokKind::Star, offset: i });
                i += 1;
            }
            b'/' => {
                out.push(Token { kind: TokKind::Slash, offset: i });
                i += 1;
            }
            b'^' => {
                out.push(Token { kind: TokKind::Caret, offset: i });
                i += 1;
            }
            b'(' => {
                out.push(Token { kind: TokKind::LParen, offset: i });
                i += 1;
            }
            b')' => {
                out.push(Token { kind: TokKind::RParen, offset: i });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // exponent part only when followed by digits
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{slice}`"),
                })?;
                out.push(Token { kind: TokKind::Num(value), offset: start });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token {
                    kind: TokKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

const FUNCTIONS: &[&str] = &[
    "exp", "ln", "sqrt", "sin", "cos", "tan", "sinh", "cosh", "tanh", "sech",
];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            let (offset, found) = match self.peek() {
                Some(t) => (t.offset, t.kind.describe()),
                None => (self.end, "end of input".to_string()),
            };
            Err(ParseError::Syntax {
                offset,
                message: format!("expected `{}`, found `{found}`", kind.describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(&TokKind::Plus) {
                terms.push(self.term()?);
            } else if self.eat(&TokKind::Minus) {
                terms.push(self.term()?.neg());
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat(&TokKind::Star) {
                factors.push(self.factor()?);
            } else if self.eat(&TokKind::Slash) {
                factors.push(Expr::Pow(Box::new(self.factor()?), Rational::int(-1)));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&TokKind::Minus) {
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(&TokKind::Caret) {
            return Ok(base);
        }
        let exponent = self.factor()?;
        Ok(apply_power(base, exponent))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.bump().ok_or(ParseError::Syntax {
            offset: self.end,
            message: "unexpected end of input".to_string(),
        })?;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(inner)
            }
            TokKind::Ident(name) => {
                if self.peek().map(|t| &t.kind) == Some(&TokKind::LParen) {
                    if !FUNCTIONS.contains(&name.as_str()) {
                        return Err(ParseError::UnknownIdentifier { offset: tok.offset, name });
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(TokKind::RParen)?;
                    Ok(make_call(&name, arg))
                } else {
                    match name.as_str() {
                        "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                        "e" => Ok(Expr::Num(std::f64::consts::E)),
                        _ => Ok(Expr::Var(name)),
                    }
                }
            }
            other => Err(ParseError::Syntax {
                offset: tok.offset,
                message: format!("unexpected `{}`", other.describe()),
            }),
        }
    }
}

fn make_call(name: &str, arg: Expr) -> Expr {
    let b = Box::new(arg);
    match name {
        "exp" => Expr::Exp(b),
        "ln" => Expr::Ln(b),
        "sqrt" => Expr::Pow(b, Rational::new(1, 2)),
        "sin" => Expr::Sin(b),
        "cos" => Expr::Cos(b),
        "tan" => Expr::Tan(b),
        "sinh" => Expr::Sinh(b),
        "cosh" => Expr::Cosh(b),
        "tanh" => Expr::Tanh(b),
        "sech" => Expr::Sech(b),
        _ => unreachable!("function list checked by caller"),
    }
}

fn apply_power(base: Expr, exponent: Expr) -> Expr {
    // constant rational exponent -> Pow node, anything else -> exp(q*ln(base))
    let env = HashMap::new();
    if let Ok(v) = exponent.eval(&env) {
        if let Some(q) = Rational::approximate(v, 4096, 1e-12) {
            return Expr::Pow(Box::new(base), q);
        }
    }
    Expr::Mul(vec![exponent, Expr::Ln(Box::new(base))]).exp()
}
