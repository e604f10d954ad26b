//! Test oracles that share no code with the library's algebra.
//!
//! [`Oracle`] evaluates expression text with every field replaced by a
//! random polynomial in the independent variables. Products are truncated
//! at total degree [`DEGREE`] around a random base point, so the constant
//! term and first derivatives of every evaluated quantity are exact. A
//! total derivative is then an ordinary partial derivative of the
//! composed series, computed without the library's jet calculus.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use conslaw::conservation::Current;
use conslaw::expr::{Atom, Expr, Point};
use conslaw::Symbol;

pub const DEGREE: u32 = 2;
/// Total degree of the random field polynomials.
pub const FIELD_DEGREE: u32 = 7;
pub const TRIALS: usize = 20;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=5);
        if n != 0 {
            return rat(n, d);
        }
    }
}

/// Truncated multivariate series in the shifted independents.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub dim: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Series {
    pub fn zero(dim: usize) -> Series {
        Series { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: BigRational) -> Series {
        let mut s = Series::zero(dim);
        if !c.is_zero() {
            s.terms.insert(vec![0; dim], c);
        }
        s
    }

    pub fn value(&self) -> BigRational {
        self.terms.get(&vec![0; self.dim]).cloned().unwrap_or_else(BigRational::zero)
    }

    fn is_scalar(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|e| *e == 0))
    }

    fn truncate(mut self, n: u32) -> Series {
        self.terms.retain(|k, v| k.iter().sum::<u32>() <= n && !v.is_zero());
        self
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            let e = out.terms.entry(k.clone()).or_insert_with(BigRational::zero);
            *e += v;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn scale(&self, c: &BigRational) -> Series {
        Series { dim: self.dim, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }.truncate(u32::MAX)
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn mul(&self, o: &Series) -> Series {
        let mut out = Series::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let k: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                if k.iter().sum::<u32>() > DEGREE {
                    continue;
                }
                let e = out.terms.entry(k).or_insert_with(BigRational::zero);
                *e += x * y;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn deriv(&self, i: usize) -> Series {
        let mut out = Series::zero(self.dim);
        for (k, v) in &self.terms {
            if k[i] > 0 {
                let mut k2 = k.clone();
                k2[i] -= 1;
                out.terms.insert(k2, v * BigRational::from_integer(BigInt::from(k[i])));
            }
        }
        out
    }

    fn recip(&self) -> Option<Series> {
        let c = self.value();
        if c.is_zero() {
            return None;
        }
        let h = self.scale(&c.recip()).sub(&Series::constant(self.dim, BigRational::one()));
        let mut out = Series::constant(self.dim, BigRational::one());
        let mut p = out.clone();
        for _ in 0..DEGREE {
            p = p.mul(&h).scale(&-BigRational::one());
            out = out.add(&p);
        }
        Some(out.scale(&c.recip()))
    }

    pub fn pow(&self, n: i64) -> Option<Series> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut out = Series::constant(self.dim, BigRational::one());
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Some(out)
    }
}

/// A random configuration: fields, constants, parameters and the
/// functions `name(y)` as polynomials in one variable.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub independents: Vec<String>,
    pub point: Vec<BigRational>,
    pub fields: BTreeMap<String, Series>,
    pub scalars: BTreeMap<String, BigRational>,
    pub functions: BTreeMap<String, Vec<BigRational>>,
}

impl Oracle {
    /// Random fields and base point; `scalars` fixes named constants and
    /// any other name in `random_scalars` gets a random nonzero value.
    pub fn random(
        rng: &mut ChaCha8Rng,
        independents: &[&str],
        fields: &[&str],
        scalars: &[(&str, BigRational)],
        random_scalars: &[&str],
    ) -> Oracle {
        let dim = independents.len();
        let mut fs = BTreeMap::new();
        for f in fields {
            let mut s = Series::zero(dim);
            for k in exponents(dim, FIELD_DEGREE) {
                s.terms.insert(k, random_rational(rng));
            }
            fs.insert(f.to_string(), s);
        }
        let mut sc: BTreeMap<String, BigRational> = scalars.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        for s in random_scalars {
            sc.entry(s.to_string()).or_insert_with(|| random_rational(rng));
        }
        let mut functions = BTreeMap::new();
        for name in ["V", "W"] {
            functions.insert(name.to_string(), (0..5).map(|_| random_rational(rng)).collect());
        }
        Oracle {
            independents: independents.iter().map(|s| s.to_string()).collect(),
            point: (0..dim).map(|_| random_rational(rng)).collect(),
            fields: fs,
            scalars: sc,
            functions,
        }
    }

    pub fn dim(&self) -> usize {
        self.independents.len()
    }

    pub fn eval(&self, text: &str) -> Series {
        let mut p = Reader { s: text.as_bytes(), i: 0, o: self };
        let v = p.expr();
        p.ws();
        assert!(p.i == p.s.len(), "trailing input at {} in {text:?}", p.i);
        v
    }

    pub fn eval_expr(&self, e: &Expr) -> Series {
        self.eval(&e.to_string())
    }

    /// Constant term of the divergence of a current.
    pub fn divergence(&self, j: &Current) -> BigRational {
        j.0.iter().enumerate().map(|(i, c)| self.eval_expr(c).deriv(i).value()).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Constant term of `D_mu e`.
    pub fn total_derivative(&self, e: &Expr, mu: &str) -> BigRational {
        let i = self.independents.iter().position(|x| x == mu).expect("independent");
        self.eval_expr(e).deriv(i).value()
    }

    fn jet(&self, f: &str, dirs: &[String]) -> Series {
        let mut s = self.fields[f].clone();
        for d in dirs {
            let i = self.independents.iter().position(|x| x == d).unwrap_or_else(|| panic!("unknown direction {d}"));
            s = s.deriv(i);
        }
        s.truncate(DEGREE)
    }

    fn function(&self, name: &str, primes: usize, arg: &Series) -> Series {
        let mut c = self.functions.get(name).unwrap_or_else(|| panic!("unknown function {name}")).clone();
        for _ in 0..primes {
            c = c.iter().enumerate().skip(1).map(|(k, a)| a * BigRational::from_integer(BigInt::from(k))).collect();
        }
        let mut out = Series::zero(arg.dim);
        for a in c.iter().rev() {
            out = out.mul(arg).add(&Series::constant(arg.dim, a.clone()));
        }
        out
    }
}

fn exponents(dim: usize, max: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in exponents(dim - 1, max - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

struct Reader<'a> {
    s: &'a [u8],
    i: usize,
    o: &'a Oracle,
}

impl Reader<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn dim(&self) -> usize {
        self.o.dim()
    }

    fn expr(&mut self) -> Series {
        let mut v = self.term();
        loop {
            if self.eat(b'+') {
                v = v.add(&self.term());
            } else if self.eat(b'-') {
                v = v.sub(&self.term());
            } else {
                return v;
            }
        }
    }

    fn term(&mut self) -> Series {
        let mut v = self.factor();
        loop {
            if self.eat(b'*') {
                v = v.mul(&self.factor());
            } else if self.eat(b'/') {
                let d = self.factor();
                assert!(d.is_scalar(), "division by a non-constant");
                v = v.scale(&d.value().recip());
            } else {
                return v;
            }
        }
    }

    fn factor(&mut self) -> Series {
        if self.eat(b'-') {
            return self.factor().scale(&-BigRational::one());
        }
        let b = self.base();
        if self.eat(b'^') {
            let e = if self.eat(b'-') { -self.exponent() } else { self.exponent() };
            assert!(e.is_integer(), "non-integer exponent {e}");
            let n: i64 = e.to_integer().try_into().expect("small exponent");
            return b.pow(n).expect("negative power of a series vanishing at the point");
        }
        b
    }

    fn exponent(&mut self) -> BigRational {
        if self.peek() == Some(b'(') {
            self.i += 1;
            let v = self.expr();
            assert!(self.eat(b')'));
            assert!(v.is_scalar());
            return v.value();
        }
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return self.number();
        }
        let id = self.ident();
        self.o.scalars.get(&id).cloned().unwrap_or_else(|| panic!("unknown exponent {id}"))
    }

    fn number(&mut self) -> BigRational {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        match t.split_once('.') {
            None => BigRational::from_integer(t.parse().unwrap()),
            Some((a, b)) => {
                let scale = BigInt::from(10).pow(b.len() as u32);
                let a: BigInt = if a.is_empty() { BigInt::zero() } else { a.parse().unwrap() };
                let b: BigInt = if b.is_empty() { BigInt::zero() } else { b.parse().unwrap() };
                BigRational::new(a * &scale + b, scale)
            }
        }
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        assert!(self.i > start, "expected a name at {start}");
        String::from_utf8(self.s[start..self.i].to_vec()).unwrap()
    }

    fn base(&mut self) -> Series {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr();
                assert!(self.eat(b')'), "unbalanced parenthesis");
                v
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Series::constant(self.dim(), self.number()),
            _ => {
                let id = self.ident();
                if self.eat(b'[') {
                    let mut dirs = vec![self.ident()];
                    while self.eat(b',') {
                        dirs.push(self.ident());
                    }
                    assert!(self.eat(b']'));
                    return self.o.jet(&id, &dirs);
                }
                let mut primes = 0;
                while self.eat(b'\'') {
                    primes += 1;
                }
                if self.eat(b'(') {
                    let arg = self.expr();
                    assert!(self.eat(b')'));
                    return self.o.function(&id, primes, &arg);
                }
                if let Some(i) = self.o.independents.iter().position(|x| *x == id) {
                    let mut s = Series::constant(self.dim(), self.o.point[i].clone());
                    let mut k = vec![0; self.dim()];
                    k[i] = 1;
                    s.terms.insert(k, BigRational::one());
                    return s;
                }
                if self.o.fields.contains_key(&id) {
                    return self.o.jet(&id, &[]);
                }
                let v = self.o.scalars.get(&id).cloned().unwrap_or_else(|| panic!("unknown name {id}"));
                Series::constant(self.dim(), v)
            }
        }
    }
}

pub type FunctionValues<'a> = &'a dyn Fn(&Symbol, u32, &BigRational) -> Option<BigRational>;

/// Random values for every atom of the expressions, with constants fixed.
pub fn random_point<'a>(
    rng: &mut ChaCha8Rng,
    exprs: &[&Expr],
    constants: &BTreeMap<Symbol, BigRational>,
    functions: Option<FunctionValues<'a>>,
) -> Point<'a> {
    let mut atoms = BTreeMap::new();
    for e in exprs {
        for a in e.atoms() {
            if !matches!(a, Atom::FunctionApp(..)) {
                atoms.entry(a).or_insert_with(|| random_rational(rng));
            }
        }
    }
    Point { atoms, constants: constants.clone(), functions }
}

/// `name^(k)(y)` for the fixed test functions `V(y) = y^3 - 2y^2 + 5y + 1`
/// and `W(y) = 2y^2 + y - 3`.
pub fn test_function(name: &Symbol, k: u32, y: &BigRational) -> Option<BigRational> {
    let c: Vec<i64> = match name.as_str() {
        "V" => vec![1, 5, -2, 1],
        "W" => vec![-3, 1, 2],
        _ => return None,
    };
    let mut c: Vec<BigRational> = c.into_iter().map(|n| BigRational::from_integer(n.into())).collect();
    for _ in 0..k {
        c = c.iter().enumerate().skip(1).map(|(i, a)| a * BigRational::from_integer(BigInt::from(i))).collect();
    }
    Some(c.iter().rev().fold(BigRational::zero(), |acc, a| acc * y + a))
}

/// Confirms `a == b` by evaluation at [`TRIALS`] random rational points,
/// skipping points where either side has a pole.
pub fn confirm_equal(rng: &mut ChaCha8Rng, a: &Expr, b: &Expr, constants: &BTreeMap<Symbol, BigRational>) {
    let f: &dyn Fn(&Symbol, u32, &BigRational) -> Option<BigRational> = &test_function;
    let mut done = 0;
    let mut attempts = 0;
    while done < TRIALS {
        attempts += 1;
        assert!(attempts < 20 * TRIALS, "too many poles");
        let pt = random_point(rng, &[a, b], constants, Some(f));
        let (Ok(x), Ok(y)) = (a.eval(&pt), b.eval(&pt)) else { continue };
        assert_eq!(x, y, "{a} != {b} at {:?}", pt.atoms);
        done += 1;
    }
}

pub fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}

/// Random multi-index of order at most `max` over the independents.
pub fn random_multi_index(rng: &mut ChaCha8Rng, sig: &conslaw::jet::SystemSignature, max: u32) -> conslaw::MultiIndex {
    let order = rng.gen_range(0..=max);
    let dirs: Vec<Symbol> =
        (0..order).map(|_| sig.independents[rng.gen_range(0..sig.independents.len())].clone()).collect();
    conslaw::MultiIndex::from_directions(dirs)
}

/// Random polynomial in the jets (order at most `order`) of `fields` and
/// the independents, with at most `factors` factors per term.
pub fn random_expr_in(
    rng: &mut ChaCha8Rng,
    sig: &conslaw::jet::SystemSignature,
    fields: &[&str],
    order: u32,
    factors: usize,
) -> Expr {
    let mut e = Expr::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let mut t = Expr::constant(conslaw::Coefficient::rational(random_rational(rng)));
        for _ in 0..rng.gen_range(0..=factors) {
            let a = if rng.gen_bool(0.15) {
                Expr::coordinate(sig.independents[rng.gen_range(0..sig.independents.len())].as_str())
            } else {
                let f = fields[rng.gen_range(0..fields.len())];
                Expr::atom(Atom::Jet(Symbol::new(f), random_multi_index(rng, sig, order)))
            };
            t = t * a;
        }
        e = e + t;
    }
    e
}

pub fn random_expr(rng: &mut ChaCha8Rng, sig: &conslaw::jet::SystemSignature, order: u32, factors: usize) -> Expr {
    let fields: Vec<&str> = sig.fields.iter().map(|s| s.as_str()).collect();
    random_expr_in(rng, sig, &fields, order, factors)
}
