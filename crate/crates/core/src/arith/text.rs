//! Textual polynomial syntax: tokens, expression trees, parsing and printing.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary ("*" unary)*
//! unary := "-" unary | power
//! power := atom ("^" INT)?
//! atom  := INT ("/" INT)? | IDENT | "(" expr ")"
//! ```
//!
//! The lexer is shared with the corpus language, which is why it knows about
//! braces, arrows and `#` comments.

use std::fmt;

use num_traits::{One, Signed};

use super::poly::{Poly, Vars};
use super::rational::{parse_rational, Rational};

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(s) => write!(f, "number `{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &str = "+-*/^()[]{};,=";

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            if s.len() > 40 {
                return Err(SyntaxError::new(pos, "numeric literal too long"));
            }
            out.push(Token {
                tok: Tok::Int(s),
                pos,
            });
            continue;
        }
        if c == '-' {
            chars.next();
            col += 1;
            if chars.peek() == Some(&'>') {
                chars.next();
                col += 1;
                out.push(Token { tok: Tok::Arrow, pos });
            } else {
                out.push(Token {
                    tok: Tok::Sym('-'),
                    pos,
                });
            }
            continue;
        }
        if SYMBOLS.contains(c) {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                pos,
            });
            continue;
        }
        return Err(SyntaxError::new(pos, format!("unexpected character {c:?}")));
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

/// Polynomial expression tree; identifiers are resolved at evaluation time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Name(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 256;

/// Cursor over a token slice; the corpus parser drives the same cursor.
pub struct Cursor<'a> {
    toks: &'a [Token],
    at: usize,
    depth: u32,
}

/// Nesting bound for parentheses and prefix minus.
const MAX_DEPTH: u32 = 128;

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        Cursor {
            toks,
            at: 0,
            depth: 0,
        }
    }

    fn descend(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(SyntaxError::new(self.pos(), "expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.at + k).min(self.toks.len() - 1)]
    }

    pub fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub fn pos(&self) -> Pos {
        self.peek().pos
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<Pos, SyntaxError> {
        let t = self.bump();
        if t.tok == Tok::Sym(c) {
            Ok(t.pos)
        } else {
            Err(SyntaxError::new(
                t.pos,
                format!("expected `{c}`, found {}", t.tok),
            ))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => Err(SyntaxError::new(
                t.pos,
                format!("expected identifier, found {other}"),
            )),
        }
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn parse_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat_sym('+') {
                let rhs = self.parse_term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat_sym('-') {
                let rhs = self.parse_term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_unary()?;
        loop {
            if self.eat_sym('*') {
                let rhs = self.parse_unary()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.peek().tok == Tok::Sym('/') {
                // Division only by a nonzero integer literal: `x/2` is `x*1/2`.
                let slash = self.bump().pos;
                let t = self.bump();
                let inv = match &t.tok {
                    Tok::Int(d) => parse_rational(&format!("1/{d}"))
                        .ok_or_else(|| SyntaxError::new(t.pos, "zero denominator"))?,
                    _ => {
                        return Err(SyntaxError::new(
                            slash,
                            "`/` must be followed by an integer literal",
                        ))
                    }
                };
                lhs = Expr::Mul(Box::new(lhs), Box::new(Expr::Num(inv)));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat_sym('-') {
            self.descend()?;
            let inner = self.parse_unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.parse_atom()?;
        if self.eat_sym('^') {
            let t = self.bump();
            let e = match &t.tok {
                Tok::Int(s) => s
                    .parse::<u32>()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| SyntaxError::new(t.pos, format!("exponent exceeds {MAX_EXPONENT}")))?,
                other => {
                    return Err(SyntaxError::new(
                        t.pos,
                        format!("expected non-negative integer exponent, found {other}"),
                    ))
                }
            };
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => {
                if self.peek().tok == Tok::Sym('/') {
                    if let Tok::Int(d) = &self.peek_at(1).tok {
                        let d = d.clone();
                        let dpos = self.peek_at(1).pos;
                        self.bump();
                        self.bump();
                        return parse_rational(&format!("{n}/{d}"))
                            .map(Expr::Num)
                            .ok_or_else(|| SyntaxError::new(dpos, "zero denominator"));
                    }
                }
                Ok(Expr::Num(parse_rational(&n).expect("digits")))
            }
            Tok::Ident(s) => Ok(Expr::Name(s, t.pos)),
            Tok::Sym('(') => {
                self.descend()?;
                let e = self.parse_expr()?;
                self.expect_sym(')')?;
                self.depth -= 1;
                Ok(e)
            }
            other => Err(SyntaxError::new(
                t.pos,
                format!("expected expression, found {other}"),
            )),
        }
    }
}

/// Parse a complete expression (used for standalone polynomial text).
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let toks = tokenize(src)?;
    let mut cur = Cursor::new(&toks);
    let e = cur.parse_expr()?;
    if !cur.at_eof() {
        let t = cur.peek();
        return Err(SyntaxError::new(t.pos, format!("unexpected {}", t.tok)));
    }
    Ok(e)
}

/// Failure while evaluating an expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalError {
    pub pos: Option<Pos>,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for EvalError {}

/// Total-degree ceiling applied while evaluating untrusted text.
pub const DEFAULT_DEGREE_LIMIT: u32 = 64;

impl Expr {
    /// Evaluate over `vars`; names that are not ring variables go to `resolve`.
    pub fn eval(
        &self,
        vars: &Vars,
        resolve: &dyn Fn(&str) -> Option<Poly>,
        degree_limit: u32,
    ) -> Result<Poly, EvalError> {
        let r = match self {
            Expr::Num(c) => Poly::constant(vars, c.clone()),
            Expr::Name(n, pos) => match vars.index_of(n) {
                Some(i) => Poly::var(vars, i),
                None => match resolve(n) {
                    Some(p) if p.vars() == vars => p,
                    Some(p) => p.embed(vars).map_err(|_| EvalError {
                        pos: Some(*pos),
                        message: format!("`{n}` is not a polynomial in {:?}", vars),
                    })?,
                    None => {
                        return Err(EvalError {
                            pos: Some(*pos),
                            message: format!("unknown name `{n}`"),
                        })
                    }
                },
            },
            Expr::Neg(a) => -a.eval(vars, resolve, degree_limit)?,
            Expr::Add(a, b) => a.eval(vars, resolve, degree_limit)? + b.eval(vars, resolve, degree_limit)?,
            Expr::Sub(a, b) => a.eval(vars, resolve, degree_limit)? - b.eval(vars, resolve, degree_limit)?,
            Expr::Mul(a, b) => {
                let l = a.eval(vars, resolve, degree_limit)?;
                let r = b.eval(vars, resolve, degree_limit)?;
                check_degree(
                    l.total_degree().unwrap_or(0) + r.total_degree().unwrap_or(0),
                    degree_limit,
                    self,
                )?;
                l * r
            }
            Expr::Pow(a, e) => {
                let base = a.eval(vars, resolve, degree_limit)?;
                check_degree(
                    base.total_degree().unwrap_or(0).saturating_mul(*e),
                    degree_limit,
                    self,
                )?;
                base.pow(*e)
            }
        };
        Ok(r)
    }

    /// Evaluate with only ring variables allowed.
    pub fn eval_closed(&self, vars: &Vars) -> Result<Poly, EvalError> {
        self.eval(vars, &|_| None, DEFAULT_DEGREE_LIMIT)
    }

    pub fn first_pos(&self) -> Option<Pos> {
        match self {
            Expr::Num(_) => None,
            Expr::Name(_, p) => Some(*p),
            Expr::Neg(a) | Expr::Pow(a, _) => a.first_pos(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.first_pos().or_else(|| b.first_pos()),
        }
    }

    /// Every identifier mentioned, with its position.
    pub fn names(&self, out: &mut Vec<(String, Pos)>) {
        match self {
            Expr::Num(_) => {}
            Expr::Name(n, p) => out.push((n.clone(), *p)),
            Expr::Neg(a) | Expr::Pow(a, _) => a.names(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.names(out);
                b.names(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_negative() || !c.denom().is_one() => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Name(..) => 5,
        }
    }
}

fn check_degree(deg: u32, limit: u32, at: &Expr) -> Result<(), EvalError> {
    if deg > limit {
        Err(EvalError {
            pos: at.first_pos(),
            message: format!("degree {deg} exceeds the limit {limit}"),
        })
    } else {
        Ok(())
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => {
                if c.is_negative() {
                    write!(f, "-{}", c.abs())
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Name(n, _) => f.write_str(n),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("*")?;
                write_child(f, b, 4)
            }
            Expr::Pow(a, e) => {
                write_child(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

/// Parse polynomial text over a fixed ring.
pub fn parse_poly(src: &str, vars: &Vars) -> Result<Poly, String> {
    let e = parse_expr(src).map_err(|e| e.to_string())?;
    e.eval_closed(vars).map_err(|e| e.to_string())
}

impl std::str::FromStr for Poly {
    type Err = String;

    /// Parses over `Q[x, y, z]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s, &Vars::xyz())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_canonically() {
        let p: Poly = "(x*z + y^2)*(x*z + y^2)".parse().unwrap();
        assert_eq!(p.to_string(), "x^2*z^2 + 2*x*y^2*z + y^4");
        let q: Poly = "5/7*x - -3".parse().unwrap();
        assert_eq!(q.to_string(), "5/7*x + 3");
    }

    #[test]
    fn poly_text_roundtrip() {
        for src in ["x*z + y^2", "-1/2*P^2 + z*P - 3", "0", "-x", "z^3 - z + 1/9"] {
            let vars = Vars::new(["x", "y", "z", "P"]);
            let p = parse_poly(src, &vars).unwrap();
            let s = p.to_string();
            assert_eq!(parse_poly(&s, &vars).unwrap().to_string(), s);
        }
    }

    #[test]
    fn positioned_errors() {
        let e = parse_expr("x +\n  * y").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 3 });
        let e = parse_expr("x ^ y").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 5 });
        let e = parse_expr("x / y").unwrap_err();
        assert_eq!(e.pos.col, 3);
        assert!(parse_expr("x / 0").is_err());
        assert_eq!(
            parse_poly("(x + y)/2", &Vars::xyz()).unwrap(),
            parse_poly("1/2*x + 1/2*y", &Vars::xyz()).unwrap()
        );
        assert!(parse_expr("1/0").is_err());
        assert!(parse_expr("x^999").is_err());
    }

    #[test]
    fn degree_limit_is_enforced() {
        let e = parse_expr("(x + y)^40*(x+z)^40").unwrap();
        assert!(e.eval_closed(&Vars::xyz()).is_err());
    }

    #[test]
    fn expr_printing_roundtrips() {
        for src in [
            "-(x + y)^2",
            "a - (b - c)",
            "x*(-y)",
            "-(-x)",
            "(1/2*x)^3",
            "2*(x + 1)*y",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            let again = parse_expr(&printed).unwrap();
            assert_eq!(again.to_string(), printed, "{src}");
        }
    }
}
