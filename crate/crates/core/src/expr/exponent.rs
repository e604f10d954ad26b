use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::symbol::Symbol;

/// Integer-linear form `base + sum k_i * s_i` in exponent constants.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExpVec {
    base: i64,
    syms: Vec<(Symbol, i64)>,
}

impl ExpVec {
    pub fn zero() -> Self {
        ExpVec::default()
    }

    pub fn int(n: i64) -> Self {
        ExpVec { base: n, syms: Vec::new() }
    }

    pub fn symbol(s: &Symbol) -> Self {
        ExpVec { base: 0, syms: vec![(s.clone(), 1)] }
    }

    pub fn from_parts<I: IntoIterator<Item = (Symbol, i64)>>(base: i64, syms: I) -> Self {
        let mut m: BTreeMap<Symbol, i64> = BTreeMap::new();
        for (s, k) in syms {
            *m.entry(s).or_default() += k;
        }
        ExpVec { base, syms: m.into_iter().filter(|(_, k)| *k != 0).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.base == 0 && self.syms.is_empty()
    }

    pub fn as_int(&self) -> Option<i64> {
        self.syms.is_empty().then_some(self.base)
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn symbolic_part(&self) -> &[(Symbol, i64)] {
        &self.syms
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.syms.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn add(&self, o: &ExpVec) -> ExpVec {
        ExpVec::from_parts(self.base + o.base, self.syms.iter().chain(o.syms.iter()).cloned())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec::from_parts(-self.base, self.syms.iter().map(|(s, k)| (s.clone(), -k)))
    }

    pub fn sub(&self, o: &ExpVec) -> ExpVec {
        self.add(&o.neg())
    }

    pub fn scale(&self, n: i64) -> ExpVec {
        ExpVec::from_parts(self.base * n, self.syms.iter().map(|(s, k)| (s.clone(), k * n)))
    }

    /// Product, defined when at least one factor is an integer.
    pub fn mul(&self, o: &ExpVec) -> Option<ExpVec> {
        match (self.as_int(), o.as_int()) {
            (Some(a), _) => Some(o.scale(a)),
            (_, Some(b)) => Some(self.scale(b)),
            _ => None,
        }
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::from_int(self.base);
        for (s, k) in &self.syms {
            p = p.add(&Poly::var(s).scale(&BigRational::from_integer(BigInt::from(*k))));
        }
        p
    }

    pub fn to_coefficient(&self) -> Coefficient {
        Coefficient::from_poly(self.to_poly())
    }

    /// Inverse of [`ExpVec::to_coefficient`] for integer-linear coefficients.
    pub fn from_coefficient(c: &Coefficient) -> Option<ExpVec> {
        if !c.denominator().is_one() {
            return None;
        }
        let mut base = 0;
        let mut syms = Vec::new();
        for (pp, r) in c.numerator().terms() {
            if !r.is_integer() {
                return None;
            }
            let k = r.to_integer().to_i64()?;
            match pp.as_slice() {
                [] => base = k,
                [(s, 1)] => syms.push((s.clone(), k)),
                _ => return None,
            }
        }
        Some(ExpVec::from_parts(base, syms))
    }

    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<ExpVec> {
        let mut base = self.base;
        let mut rest = Vec::new();
        for (s, k) in &self.syms {
            match values.get(s) {
                Some(v) => base += k * integer_value(s, v)?,
                None => rest.push((s.clone(), *k)),
            }
        }
        Ok(ExpVec::from_parts(base, rest))
    }

    pub fn eval(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<i64> {
        let e = self.specialize(values)?;
        e.as_int().ok_or_else(|| Error::MissingAssignment(format!("exponent constants of {self}")))
    }
}

fn integer_value(s: &Symbol, v: &BigRational) -> Result<i64> {
    if !v.is_integer() {
        return Err(Error::Exponent(format!("exponent constant {s} = {v} is not an integer")));
    }
    v.to_integer().to_i64().ok_or_else(|| Error::Exponent(format!("exponent constant {s} = {v} out of range")))
}

impl fmt::Display for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (s, k) in &self.syms {
            let mag = k.unsigned_abs();
            let body = if mag == 1 { s.to_string() } else { format!("{mag}*{s}") };
            if *k < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            out.push_str(&body);
        }
        if self.base != 0 || out.is_empty() {
            if self.base > 0 && !out.is_empty() {
                out.push('+');
            }
            out.push_str(&self.base.to_string());
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
