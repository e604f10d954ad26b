//! Sparse multivariate polynomials over the rationals, with exact division
//! and a recursive primitive-PRS gcd. These back the coefficient field of
//! [`crate::Expr`], so the variables are constant symbols (`p`, `m`, `n`, ...).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::symbol::Symbol;

/// Power product: variables sorted by name, exponents strictly positive.
pub type PowerProduct = Vec<(Symbol, u32)>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<PowerProduct, BigRational>,
}

fn pp_mul(a: &PowerProduct, b: &PowerProduct) -> PowerProduct {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `a / b` when `b` divides `a`.
fn pp_div(a: &PowerProduct, b: &PowerProduct) -> Option<PowerProduct> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for (v, e) in a {
        if j < b.len() && b[j].0 < *v {
            return None;
        }
        if j < b.len() && b[j].0 == *v {
            match e.cmp(&b[j].1) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((v.clone(), e - b[j].1)),
            }
            j += 1;
        } else {
            out.push((v.clone(), *e));
        }
    }
    if j < b.len() {
        return None;
    }
    Some(out)
}

fn pp_degree(a: &PowerProduct) -> u32 {
    a.iter().map(|(_, e)| *e).sum()
}

/// Lexicographic monomial order, variables ranked by ascending name.
fn lex_cmp(a: &PowerProduct, b: &PowerProduct) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(eb);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

fn grlex_cmp(a: &PowerProduct, b: &PowerProduct) -> Ordering {
    pp_degree(a).cmp(&pp_degree(b)).then_with(|| lex_cmp(a, b))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(name.clone(), 1)], BigRational::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Returns the value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PowerProduct, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|pp| pp.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(pp_degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, pp: PowerProduct, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(pp) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (pp, c) in &other.terms {
            out.add_term(pp.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (pp, c) in &other.terms {
            out.add_term(pp.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Poly::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                out.add_term(pp_mul(pa, pb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn degree_in(&self, v: &Symbol) -> u32 {
        self.terms.keys().map(|pp| pp.iter().find(|(w, _)| w == v).map(|(_, e)| *e).unwrap_or(0)).max().unwrap_or(0)
    }

    /// Coefficients as a univariate polynomial in `v`, index = power of `v`.
    pub fn coefficients_in(&self, v: &Symbol) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (pp, c) in &self.terms {
            let mut rest = Vec::with_capacity(pp.len());
            let mut k = 0u32;
            for (w, e) in pp {
                if w == v {
                    k = *e;
                } else {
                    rest.push((w.clone(), *e));
                }
            }
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, v: &Symbol) -> Poly {
        self.coefficients_in(v).pop().unwrap_or_default()
    }

    /// Substitute rational values for some variables.
    pub fn eval_partial(&self, values: &BTreeMap<Symbol, BigRational>) -> Poly {
        let mut out = Poly::zero();
        for (pp, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in pp {
                match values.get(v) {
                    Some(val) => coeff *= num_traits::pow(val.clone(), *e as usize),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    /// Full evaluation; `None` if a variable is unassigned.
    pub fn eval(&self, values: &BTreeMap<Symbol, BigRational>) -> Option<BigRational> {
        self.eval_partial(values).as_constant().filter(|_| self.vars().iter().all(|v| values.contains_key(v)))
    }

    fn leading_lex(&self) -> Option<(&PowerProduct, &BigRational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    /// Leading coefficient under graded lexicographic order.
    pub fn leading_coefficient_grlex(&self) -> BigRational {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0)).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dpp, dc) = divisor.leading_lex().map(|(p, c)| (p.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rpp, rc)) = rem.leading_lex().map(|(p, c)| (p.clone(), c.clone())) {
            let qpp = pp_div(&rpp, &dpp)?;
            let qc = rc / &dc;
            let mut term = Poly::zero();
            term.add_term(qpp, qc);
            rem = rem.sub(&term.mul(divisor));
            quot = quot.add(&term);
        }
        Some(quot)
    }

    /// Scale so that the grlex-leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coefficient_grlex();
        self.scale(&lc.recip())
    }

    /// Content with respect to `v`: gcd of the coefficients in `v`.
    fn content_in(&self, v: &Symbol) -> Poly {
        let mut g = Poly::zero();
        for c in self.coefficients_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }

    fn primitive_part_in(&self, v: &Symbol) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content_in(v);
        self.exact_div(&c).expect("content divides polynomial")
    }

    fn pseudo_remainder_in(&self, divisor: &Poly, v: &Symbol) -> Poly {
        let db = divisor.degree_in(v);
        let lb = divisor.leading_coefficient_in(v);
        let vp = Poly::var(v);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lr = r.leading_coefficient_in(v);
            let shift = vp.pow(dr - db);
            r = r.mul(&lb).sub(&lr.mul(&shift).mul(divisor));
        }
        r
    }

    /// Formal partial derivative with respect to a variable.
    pub fn derivative(&self, v: &Symbol) -> Poly {
        let mut out = Poly::zero();
        for (pp, c) in &self.terms {
            let mut rest = Vec::with_capacity(pp.len());
            let mut k = 0;
            for (w, e) in pp {
                if w == v {
                    k = *e;
                    if *e > 1 {
                        rest.push((w.clone(), e - 1));
                    }
                } else {
                    rest.push((w.clone(), *e));
                }
            }
            if k > 0 {
                out.add_term(rest, c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        out
    }
}

/// Greatest common divisor, normalized to grlex-leading coefficient 1
/// (`gcd(0, 0) = 0`).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    let v = va.union(&vb).next().cloned().expect("non-constant");
    if !va.contains(&v) {
        return gcd(a, &b.content_in(&v));
    }
    if !vb.contains(&v) {
        return gcd(&a.content_in(&v), b);
    }
    let ca = a.content_in(&v);
    let cb = b.content_in(&v);
    let content = gcd(&ca, &cb);
    let mut p = a.exact_div(&ca).expect("content divides");
    let mut q = b.exact_div(&cb).expect("content divides");
    if p.degree_in(&v) < q.degree_in(&v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = p.pseudo_remainder_in(&q, &v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(&v) == 0 {
            return content.monic();
        }
        p = q;
        q = r.primitive_part_in(&v);
    }
    content.mul(&q.primitive_part_in(&v)).monic()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (i, (pp, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || pp.is_empty() {
                parts.push(mag.to_string());
            }
            for (v, e) in pp {
                if *e == 1 {
                    parts.push(v.to_string());
                } else {
                    parts.push(format!("{v}^{e}"));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
