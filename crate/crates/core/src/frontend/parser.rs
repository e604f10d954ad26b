//! Recursive-descent parser for expressions and binding of identifiers to
//! signature roles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{normalize, ExpVec, Expr, MultiIndex, RawAtom, RawExpr};
use crate::jet::SystemSignature;
use crate::symbol::Symbol;

/// Unbound expression tree; identifiers carry their byte offset.
#[derive(Clone, Debug, PartialEq)]
pub enum Syntax {
    Number(BigRational),
    Ident(String, usize),
    Jet(String, Vec<String>, usize),
    Call(String, u32, Box<Syntax>, usize),
    Add(Box<Syntax>, Box<Syntax>),
    Sub(Box<Syntax>, Box<Syntax>),
    Mul(Box<Syntax>, Box<Syntax>),
    Div(Box<Syntax>, Box<Syntax>),
    Neg(Box<Syntax>),
    Pow(Box<Syntax>, ExpForm),
}

/// `base + Σ k·name` as written in an exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpForm {
    pub base: i64,
    pub terms: Vec<(String, i64)>,
    pub pos: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        if !self.src.get(self.pos).copied().is_some_and(is_ident_start) {
            return self.err("expected identifier");
        }
        while self.src.get(self.pos).copied().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Ok((String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(), start))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small_integer(&mut self) -> Result<i64> {
        let n = self.integer()?;
        i64::try_from(n).or_else(|_| self.err("exponent out of range"))
    }

    fn number(&mut self) -> Result<BigRational> {
        let int = self.integer()?;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let start = self.pos;
            while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            let frac = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let f: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().expect("digits parse") };
            return Ok(BigRational::new(int * &scale + f, scale));
        }
        Ok(BigRational::from_integer(int))
    }

    fn expr(&mut self) -> Result<Syntax> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Syntax::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Syntax::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Syntax> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Syntax::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Syntax::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Syntax> {
        if self.eat(b'-') {
            return Ok(Syntax::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            if self.peek() == Some(b'^') {
                return self.err("chained powers need parentheses");
            }
            return Ok(Syntax::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Syntax> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Syntax::Number(self.number()?)),
            Some(c) if is_ident_start(c) => {
                let (name, pos) = self.ident()?;
                if self.src.get(self.pos) == Some(&b'[') {
                    self.pos += 1;
                    let mut dirs = vec![self.ident()?.0];
                    while self.eat(b',') {
                        dirs.push(self.ident()?.0);
                    }
                    self.expect(b']')?;
                    return Ok(Syntax::Jet(name, dirs, pos));
                }
                let mut primes = 0;
                while self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    primes += 1;
                }
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Syntax::Call(name, primes, Box::new(arg), pos));
                }
                if primes > 0 {
                    return self.err("expected '(' after primes");
                }
                Ok(Syntax::Ident(name, pos))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn exponent(&mut self) -> Result<ExpForm> {
        let pos = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.linear_form(pos)?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(ExpForm { base: -self.small_integer()?, terms: Vec::new(), pos })
            }
            Some(c) if c.is_ascii_digit() => Ok(ExpForm { base: self.small_integer()?, terms: Vec::new(), pos }),
            Some(c) if is_ident_start(c) => Ok(ExpForm { base: 0, terms: vec![(self.ident()?.0, 1)], pos }),
            _ => self.err("expected exponent"),
        }
    }

    fn linear_form(&mut self, pos: usize) -> Result<ExpForm> {
        let mut form = ExpForm { base: 0, terms: Vec::new(), pos };
        let mut sign = if self.eat(b'-') { -1 } else { 1 };
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let k = self.small_integer()?;
                    if self.eat(b'*') {
                        let (name, _) = self.ident()?;
                        form.terms.push((name, sign * k));
                    } else {
                        form.base += sign * k;
                    }
                }
                Some(c) if is_ident_start(c) => {
                    let (name, _) = self.ident()?;
                    form.terms.push((name, sign));
                }
                _ => return self.err("expected integer-linear exponent"),
            }
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                return Ok(form);
            }
        }
    }
}

/// Parses one expression; trailing input is an error.
pub fn parse_expression(text: &str) -> Result<Syntax> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Resolves identifiers against `sig`.
pub fn bind(s: &Syntax, sig: &SystemSignature) -> Result<RawExpr> {
    let has = |v: &[Symbol], n: &str| v.iter().any(|x| x.as_str() == n);
    Ok(match s {
        Syntax::Number(r) => RawExpr::Number(r.clone()),
        Syntax::Ident(n, _) => {
            if has(&sig.independents, n) {
                RawExpr::Atom(RawAtom::Coordinate(Symbol::new(n)))
            } else if has(&sig.fields, n) || has(&sig.parameters, n) {
                RawExpr::Atom(RawAtom::Jet(Symbol::new(n), MultiIndex::empty()))
            } else if has(&sig.constants, n) || has(&sig.exponent_constants, n) {
                RawExpr::Constant(Symbol::new(n))
            } else {
                return Err(Error::UnknownIdentifier(n.clone()));
            }
        }
        Syntax::Jet(n, dirs, _) => {
            if !(has(&sig.fields, n) || has(&sig.parameters, n)) {
                return Err(Error::UnknownIdentifier(n.clone()));
            }
            if let Some(d) = dirs.iter().find(|d| !has(&sig.independents, d)) {
                return Err(Error::UnknownIdentifier(d.clone()));
            }
            RawExpr::Atom(RawAtom::Jet(Symbol::new(n), MultiIndex::from_directions(dirs.iter().map(|d| d.as_str()))))
        }
        Syntax::Call(n, k, arg, _) => {
            if !has(&sig.functions, n) {
                return Err(Error::UnknownIdentifier(n.clone()));
            }
            RawExpr::Atom(RawAtom::Function(Symbol::new(n), *k, Box::new(bind(arg, sig)?)))
        }
        Syntax::Add(a, b) => RawExpr::Add(vec![bind(a, sig)?, bind(b, sig)?]),
        Syntax::Sub(a, b) => RawExpr::Add(vec![bind(a, sig)?, RawExpr::Neg(Box::new(bind(b, sig)?))]),
        Syntax::Mul(a, b) => RawExpr::Mul(vec![bind(a, sig)?, bind(b, sig)?]),
        Syntax::Div(a, b) => RawExpr::Div(Box::new(bind(a, sig)?), Box::new(bind(b, sig)?)),
        Syntax::Neg(a) => RawExpr::Neg(Box::new(bind(a, sig)?)),
        Syntax::Pow(b, f) => {
            let mut terms = Vec::new();
            for (n, k) in &f.terms {
                if has(&sig.exponent_constants, n) {
                    terms.push((Symbol::new(n), *k));
                } else if sig.is_declared(n) {
                    return Err(Error::Exponent(format!("{n} is not an exponent constant")));
                } else {
                    return Err(Error::UnknownIdentifier(n.clone()));
                }
            }
            RawExpr::Pow(Box::new(bind(b, sig)?), ExpVec::from_parts(f.base, terms))
        }
    })
}

/// Parses, binds and normalizes.
pub fn parse_expr(text: &str, sig: &SystemSignature) -> Result<Expr> {
    normalize(&bind(&parse_expression(text)?, sig)?)
}
