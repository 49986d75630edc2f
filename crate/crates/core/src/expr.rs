//! Scalar component expressions over chart coordinates.
//!
//! Grammar (ASCII, whitespace insignificant):
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := "-" factor | atom ("^" ["-"] intlit)? ;
//! atom   := reallit | coord | "norm2" | fn "(" expr ")" | "(" expr ")" ;
//! coord  := "x" intlit ;   fn := "exp"|"ln"|"sin"|"cos"|"sqrt" ;
//! ```
//!
//! `norm2` is the sum of squares of all chart coordinates. Expressions are
//! evaluated in any [`Scalar`], so the same tree yields values, first-order
//! jets, or jets of jets.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::jets::{DomainError, Func, Jet, Ring, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    Const(f64),
    /// 1-based coordinate index.
    Coord(usize),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    PowInt(Box<Expression>, i32),
    Apply(Func, Box<Expression>),
    Norm2,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl Expression {
    pub fn constant(c: f64) -> Self {
        Expression::Const(c)
    }

    pub fn coord(i: usize) -> Self {
        Expression::Coord(i)
    }

    pub fn zero() -> Self {
        Expression::Const(0.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expression::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn apply(func: Func, arg: Expression) -> Self {
        if let Some(c) = arg.as_const() {
            if let Ok(v) = c.try_apply(func) {
                return Expression::Const(v);
            }
        }
        Expression::Apply(func, Box::new(arg))
    }

    pub fn exp(arg: Expression) -> Self {
        Expression::apply(Func::Exp, arg)
    }

    pub fn ln(arg: Expression) -> Self {
        Expression::apply(Func::Ln, arg)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Expression::Const(1.0),
            1 => self,
            _ => Expression::PowInt(Box::new(self), n),
        }
    }

    /// Largest coordinate index referenced, 0 when none.
    pub fn max_coord(&self) -> usize {
        use Expression::*;
        match self {
            Const(_) | Norm2 => 0,
            Coord(i) => *i,
            Neg(a) | PowInt(a, _) | Apply(_, a) => a.max_coord(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    /// Evaluate with the coordinate functions bound to `coords`.
    ///
    /// Panics if a coordinate index exceeds `coords.len()`; parsed
    /// expressions are validated against their chart dimension.
    pub fn eval<T: Scalar>(&self, coords: &[T]) -> Result<T, DomainError> {
        use Expression::*;
        Ok(match self {
            Const(c) => coords[0].constant_like(*c),
            Coord(i) => coords[*i - 1].clone(),
            Neg(a) => -a.eval(coords)?,
            Add(a, b) => a.eval(coords)? + b.eval(coords)?,
            Sub(a, b) => a.eval(coords)? - b.eval(coords)?,
            Mul(a, b) => a.eval(coords)? * b.eval(coords)?,
            Div(a, b) => a.eval(coords)?.try_div(b.eval(coords)?)?,
            PowInt(a, n) => a.eval(coords)?.try_powi(*n)?,
            Apply(f, a) => a.eval(coords)?.try_apply(*f)?,
            Norm2 => {
                let mut acc = coords[0].clone() * coords[0].clone();
                for c in &coords[1..] {
                    acc = acc + c.clone() * c.clone();
                }
                acc
            }
        })
    }

    pub fn eval_f64(&self, p: &[f64]) -> Result<f64, DomainError> {
        self.eval(p)
    }

    /// Value and exact gradient at `p`.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet, DomainError> {
        self.eval(&Jet::seed(p))
    }

    /// Replace every coordinate reference `x_i` by `subs[i-1]` (and `norm2` by
    /// the sum of squares of `subs`).
    pub fn substitute(&self, subs: &[Expression]) -> Expression {
        use Expression::*;
        match self {
            Const(c) => Const(*c),
            Coord(i) => subs[*i - 1].clone(),
            Neg(a) => -a.substitute(subs),
            Add(a, b) => a.substitute(subs) + b.substitute(subs),
            Sub(a, b) => a.substitute(subs) - b.substitute(subs),
            Mul(a, b) => a.substitute(subs) * b.substitute(subs),
            Div(a, b) => a.substitute(subs) / b.substitute(subs),
            PowInt(a, n) => a.substitute(subs).powi(*n),
            Apply(f, a) => Expression::apply(*f, a.substitute(subs)),
            Norm2 => subs
                .iter()
                .map(|s| s.clone() * s.clone())
                .reduce(|a, b| a + b)
                .unwrap_or_else(Expression::zero),
        }
    }
}

// Builders fold constant subtrees and the neutral elements 0 and 1 so that
// structures assembled from constant data stay constant.

impl Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expression::Const(a + b),
            (Some(0.0), None) => rhs,
            (None, Some(0.0)) => self,
            _ => Expression::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expression::Const(a - b),
            (Some(0.0), None) => -rhs,
            (None, Some(0.0)) => self,
            _ => Expression::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expression::Const(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Expression::Const(0.0),
            (Some(1.0), None) => rhs,
            (None, Some(1.0)) => self,
            _ => Expression::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Div for Expression {
    type Output = Expression;
    fn div(self, rhs: Expression) -> Expression {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expression::Const(a / b),
            (Some(0.0), _) => Expression::Const(0.0),
            (None, Some(1.0)) => self,
            _ => Expression::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        match self {
            Expression::Const(c) => Expression::Const(-c),
            Expression::Neg(inner) => *inner,
            other => Expression::Neg(Box::new(other)),
        }
    }
}

impl Ring for Expression {
    fn constant_like(&self, c: f64) -> Self {
        Expression::Const(c)
    }
}

impl fmt::Display for Expression {
    /// Canonical form: every compound node is parenthesized, constants use
    /// the shortest round-tripping decimal. Re-parsing reproduces the tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expression::*;
        match self {
            Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{:?})", -c)
            }
            Const(c) => write!(f, "{c:?}"),
            Coord(i) => write!(f, "x{i}"),
            Norm2 => f.write_str("norm2"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            PowInt(a, n) => match **a {
                Const(_) | Neg(_) | PowInt(..) => write!(f, "({a})^{n}"),
                _ => write!(f, "{a}^{n}"),
            },
            Apply(func, a) => write!(f, "{func}({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut is_int = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_int = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_int = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let tok = if is_int {
                match lit.parse::<i64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => Tok::Num(lit.parse::<f64>().map_err(|_| ParseError {
                        offset: start,
                        expected: "numeric literal".into(),
                        found: format!("'{lit}'"),
                    })?),
                }
            } else {
                Tok::Num(lit.parse::<f64>().map_err(|_| ParseError {
                    offset: start,
                    expected: "numeric literal".into(),
                    found: format!("'{lit}'"),
                })?)
            };
            out.push((start, tok));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((start, Tok::Sym(c as char)));
            i += 1;
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: start,
                expected: "expression token".into(),
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("'{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expression::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expression::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expression::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expression::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expression::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let negative = if *self.peek() == Tok::Sym('-') {
                self.bump();
                true
            } else {
                false
            };
            let at = self.offset();
            match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    let n = if negative { -n } else { n };
                    let n = i32::try_from(n).map_err(|_| ParseError {
                        offset: at,
                        expected: "exponent within 32-bit range".into(),
                        found: format!("integer {n}"),
                    })?;
                    return Ok(Expression::PowInt(Box::new(base), n));
                }
                _ => return Err(self.error("integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expression::Const(v))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expression::Const(v as f64))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "norm2" {
                    return Ok(Expression::Norm2);
                }
                if let Some(func) = Func::from_name(&name) {
                    self.expect_sym('(')?;
                    let arg = self.expr()?;
                    self.expect_sym(')')?;
                    return Ok(Expression::Apply(func, Box::new(arg)));
                }
                if let Some(digits) = name.strip_prefix('x') {
                    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                        let idx: usize = digits.parse().unwrap_or(usize::MAX);
                        if idx == 0 || idx > self.dim {
                            return Err(ParseError {
                                offset: at,
                                expected: format!("coordinate x1..x{}", self.dim),
                                found: format!(
                                    "'{name}' (coordinate index exceeds chart dimension)"
                                ),
                            });
                        }
                        return Ok(Expression::Coord(idx));
                    }
                }
                Err(ParseError {
                    offset: at,
                    expected: "number, coordinate, norm2, function or '('".into(),
                    found: format!("'{name}'"),
                })
            }
            _ => Err(self.error("number, coordinate, norm2, function or '('")),
        }
    }
}

/// Parse `text` into an expression over a chart of dimension `dim`.
pub fn parse(text: &str, dim: usize) -> Result<Expression, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, dim };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}
