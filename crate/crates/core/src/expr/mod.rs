//! Canonical differential polynomials.
//!
//! An [`Expr`] is a finite sum of monomials with [`Coefficient`]s. A monomial
//! is a sorted product of [`Atom`] powers whose exponents are integer-linear
//! forms in exponent constants ([`ExpVec`]), so `u^(p+1)` and `g^(-p)` are
//! representable without general symbolic powers. Because every value is
//! kept in canonical form, structural equality is algebraic equality and
//! zero testing is a length check.

mod exponent;
mod raw;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

pub use exponent::ExpVec;
pub use raw::{normalize, RawAtom, RawExpr};

/// Symmetric multi-index: independent-variable name -> derivative count.
/// Zero counts are absent, so `u[x,t]` and `u[t,x]` share one representation.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<(Symbol, u32)>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn from_counts<I: IntoIterator<Item = (Symbol, u32)>>(counts: I) -> Self {
        let mut m: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, c) in counts {
            *m.entry(s).or_default() += c;
        }
        MultiIndex(m.into_iter().filter(|(_, c)| *c > 0).collect())
    }

    /// Builds from a list of directions, e.g. `["x", "x", "t"]`.
    pub fn from_directions<S: Into<Symbol>, I: IntoIterator<Item = S>>(dirs: I) -> Self {
        Self::from_counts(dirs.into_iter().map(|d| (d.into(), 1)))
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|(_, c)| *c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, dir: &Symbol) -> u32 {
        self.0.iter().find(|(s, _)| s == dir).map(|(_, c)| *c).unwrap_or(0)
    }

    pub fn counts(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn with(&self, dir: &Symbol) -> Self {
        let mut v = self.0.clone();
        match v.iter_mut().find(|(s, _)| s == dir) {
            Some(e) => e.1 += 1,
            None => {
                v.push((dir.clone(), 1));
                v.sort();
            }
        }
        MultiIndex(v)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        Self::from_counts(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// `self - other` if `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::new();
        for (s, c) in &self.0 {
            let o = other.count(s);
            if o > *c {
                return None;
            }
            if c - o > 0 {
                out.push((s.clone(), c - o));
            }
        }
        if other.0.iter().any(|(s, _)| self.count(s) == 0) {
            return None;
        }
        Some(MultiIndex(out))
    }

    /// Directions with multiplicity, sorted by name.
    pub fn directions(&self) -> Vec<Symbol> {
        self.0.iter().flat_map(|(s, c)| std::iter::repeat_n(s.clone(), *c as usize)).collect()
    }

    /// All `(a, b)` with `a + b = self`.
    pub fn splits(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let mut out = vec![(MultiIndex::empty(), MultiIndex::empty())];
        for (s, c) in &self.0 {
            let mut next = Vec::new();
            for (a, b) in &out {
                for k in 0..=*c {
                    let mut a2 = a.0.clone();
                    let mut b2 = b.0.clone();
                    if k > 0 {
                        a2.push((s.clone(), k));
                    }
                    if c - k > 0 {
                        b2.push((s.clone(), c - k));
                    }
                    next.push((MultiIndex(a2), MultiIndex(b2)));
                }
            }
            out = next;
        }
        out
    }

    /// Number of distinct orderings of the directions: `|J|! / prod J_k!`.
    pub fn multinomial(&self) -> u64 {
        let mut num: u64 = 1;
        let mut n = 0u64;
        for (_, c) in &self.0 {
            for k in 1..=*c as u64 {
                n += 1;
                num = num * n / k;
            }
        }
        num
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order().cmp(&other.order()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dirs: Vec<String> = self.directions().iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", dirs.join(","))
    }
}

/// Algebraic variable of the jet space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Coordinate(Symbol),
    /// Derivative of a field (or of a parameter) by a multi-index.
    Jet(Symbol, MultiIndex),
    /// `name^(k)(arg)`, the k-th derivative of a unary function symbol.
    FunctionApp(Symbol, u32, Arc<Expr>),
}

impl Atom {
    pub fn field(name: &str) -> Self {
        Atom::Jet(Symbol::new(name), MultiIndex::empty())
    }

    pub fn jet(name: &str, dirs: &[&str]) -> Self {
        Atom::Jet(Symbol::new(name), MultiIndex::from_directions(dirs.iter().copied()))
    }

    pub fn coordinate(name: &str) -> Self {
        Atom::Coordinate(Symbol::new(name))
    }

    pub fn jet_parts(&self) -> Option<(&Symbol, &MultiIndex)> {
        match self {
            Atom::Jet(f, j) => Some((f, j)),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Coordinate(s) => write!(f, "{s}"),
            Atom::Jet(s, j) if j.is_empty() => write!(f, "{s}"),
            Atom::Jet(s, j) => {
                let dirs: Vec<String> = j.directions().iter().map(|d| d.to_string()).collect();
                write!(f, "{s}[{}]", dirs.join(","))
            }
            Atom::FunctionApp(s, k, arg) => {
                write!(f, "{s}{}({arg})", "'".repeat(*k as usize))
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sorted product of atom powers with nonzero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Atom, ExpVec)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, e: ExpVec) -> Self {
        if e.is_zero() {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn factors(&self) -> &[(Atom, ExpVec)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        use std::cmp::Ordering;
        let (a, b) = (&self.0, &other.0);
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
                    let e = a[i].1.add(&b[j].1);
                    if !e.is_zero() {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Exponent of `a` in this monomial (zero when absent).
    pub fn exponent_of(&self, a: &Atom) -> ExpVec {
        self.0.iter().find(|(b, _)| b == a).map(|(_, e)| e.clone()).unwrap_or_else(ExpVec::zero)
    }

    fn without_one(&self, idx: usize) -> Monomial {
        let mut v = self.0.clone();
        let e = v[idx].1.sub(&ExpVec::int(1));
        if e.is_zero() {
            v.remove(idx);
        } else {
            v[idx].1 = e;
        }
        Monomial(v)
    }

    /// Drops the factor on `a` entirely.
    pub fn without_atom(&self, a: &Atom) -> Monomial {
        Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(a, e)| match e.as_int() {
                Some(1) => a.to_string(),
                Some(n) if n > 1 => format!("{a}^{n}"),
                _ => format!("{a}^({e})"),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Values used by [`Expr::eval`].
#[derive(Default)]
pub struct Point<'a> {
    pub atoms: BTreeMap<Atom, BigRational>,
    pub constants: BTreeMap<Symbol, BigRational>,
    /// Value of `name^(k)` at a rational argument.
    #[allow(clippy::type_complexity)]
    pub functions: Option<&'a dyn Fn(&Symbol, u32, &BigRational) -> Option<BigRational>>,
}

/// A canonical local function.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Coefficient::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Coefficient::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::constant(Coefficient::ratio(n, d))
    }

    pub fn constant(c: Coefficient) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Expr { terms }
    }

    pub fn term(c: Coefficient, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn atom(a: Atom) -> Self {
        Expr::term(Coefficient::one(), Monomial::atom(a, ExpVec::int(1)))
    }

    pub fn atom_pow(a: Atom, e: ExpVec) -> Self {
        Expr::term(Coefficient::one(), Monomial::atom(a, e))
    }

    pub fn field(name: &str) -> Self {
        Expr::atom(Atom::field(name))
    }

    pub fn jet(name: &str, dirs: &[&str]) -> Self {
        Expr::atom(Atom::jet(name, dirs))
    }

    pub fn coordinate(name: &str) -> Self {
        Expr::atom(Atom::coordinate(name))
    }

    pub fn func(name: &str, k: u32, arg: Expr) -> Self {
        Expr::atom(Atom::FunctionApp(Symbol::new(name), k, Arc::new(arg)))
    }

    /// A constant symbol as a coefficient, e.g. `p` or `m`.
    pub fn symbol(name: &str) -> Self {
        Expr::constant(Coefficient::symbol(&Symbol::new(name)))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coefficient)>>(it: I) -> Self {
        let mut e = Expr::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    /// Coefficient of the constant monomial if the expression has no atoms.
    pub fn as_coefficient(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_single_term(&self) -> Option<(&Monomial, &Coefficient)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * m * other`.
    fn add_product(&mut self, c: &Coefficient, m: &Monomial, other: &Expr) {
        for (om, oc) in &other.terms {
            self.add_term(m.mul(om), c.mul(oc));
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, k)| (m.clone(), k.mul(c))).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Expr {
        self.scale(&Coefficient::from_int(n))
    }

    pub fn pow_int(&self, n: u32) -> Expr {
        let mut out = Expr::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Power with an integer-linear exponent. Non-integer or negative
    /// exponents are only defined for a single monomial; a symbolic exponent
    /// additionally requires coefficient one.
    pub fn pow_exp(&self, e: &ExpVec) -> Result<Expr> {
        if let Some(n) = e.as_int() {
            if n >= 0 {
                return Ok(self.pow_int(n as u32));
            }
        }
        let (m, c) = match self.as_single_term() {
            Some(t) => t,
            None if self.is_zero() => {
                return Err(Error::Pole(format!("0^({e})")));
            }
            None => {
                return Err(Error::Exponent(format!("({self})^({e}) is not a monomial power")));
            }
        };
        let coeff = match e.as_int() {
            Some(n) => c.pow_i(n)?,
            None if c.is_one() => Coefficient::one(),
            None => return Err(Error::Exponent(format!("symbolic power ({e}) of coefficient {c}"))),
        };
        let mut factors = Vec::with_capacity(m.0.len());
        for (a, x) in &m.0 {
            let y = x.mul(e).ok_or_else(|| Error::Exponent(format!("({a}^({x}))^({e}) has a nonlinear exponent")))?;
            if !y.is_zero() {
                factors.push((a.clone(), y));
            }
        }
        Ok(Expr::term(coeff, Monomial(factors)))
    }

    /// Every atom, including those inside function arguments.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                if let Atom::FunctionApp(_, _, arg) = a {
                    arg.collect_atoms(out);
                }
                out.insert(a.clone());
            }
        }
    }

    /// Jet atoms of `field` (with their multi-indices), including nested ones.
    pub fn jets_of(&self, field: &Symbol) -> BTreeSet<MultiIndex> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Jet(f, j) if &f == field => Some(j),
                _ => None,
            })
            .collect()
    }

    /// Constant symbols appearing in coefficients or exponents.
    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (m, c) in &self.terms {
            out.extend(c.symbols());
            for (a, e) in &m.0 {
                out.extend(e.symbols());
                if let Atom::FunctionApp(_, _, arg) = a {
                    out.extend(arg.constants());
                }
            }
        }
        out
    }

    /// Applies the derivation determined by its values on non-function
    /// atoms; `FunctionApp` atoms follow the chain rule.
    pub fn derive_with<F>(&self, d: &mut F) -> Expr
    where
        F: FnMut(&Atom) -> Expr,
    {
        let mut cache: BTreeMap<Atom, Expr> = BTreeMap::new();
        self.derive_cached(d, &mut cache)
    }

    fn derive_cached<F>(&self, d: &mut F, cache: &mut BTreeMap<Atom, Expr>) -> Expr
    where
        F: FnMut(&Atom) -> Expr,
    {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (i, (a, e)) in m.0.iter().enumerate() {
                let da = match cache.get(a) {
                    Some(v) => v.clone(),
                    None => {
                        let v = match a {
                            Atom::FunctionApp(f, k, arg) => {
                                let darg = arg.derive_cached(d, cache);
                                if darg.is_zero() {
                                    Expr::zero()
                                } else {
                                    &Expr::atom(Atom::FunctionApp(f.clone(), k + 1, arg.clone())) * &darg
                                }
                            }
                            _ => d(a),
                        };
                        cache.insert(a.clone(), v.clone());
                        v
                    }
                };
                if da.is_zero() {
                    continue;
                }
                let coeff = c.mul(&e.to_coefficient());
                out.add_product(&coeff, &m.without_one(i), &da);
            }
        }
        out
    }

    /// Partial derivative with respect to a coordinate or jet atom.
    pub fn partial(&self, a: &Atom) -> Expr {
        self.derive_with(&mut |b: &Atom| if b == a { Expr::one() } else { Expr::zero() })
    }

    /// Simultaneous replacement of whole atoms (also inside function
    /// arguments), followed by normalization.
    pub fn substitute(&self, rules: &BTreeMap<Atom, Expr>) -> Result<Expr> {
        if rules.is_empty() {
            return Ok(self.clone());
        }
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut acc = Expr::constant(c.clone());
            let mut plain = Monomial::one();
            for (a, e) in &m.0 {
                if let Some(r) = rules.get(a) {
                    acc = &acc * &r.pow_exp(e)?;
                    continue;
                }
                let atom = match a {
                    Atom::FunctionApp(f, k, arg) => {
                        let new_arg = arg.substitute(rules)?;
                        if &new_arg == arg.as_ref() {
                            a.clone()
                        } else {
                            Atom::FunctionApp(f.clone(), *k, Arc::new(new_arg))
                        }
                    }
                    _ => a.clone(),
                };
                plain = plain.mul(&Monomial::atom(atom, e.clone()));
            }
            out.add_product(&Coefficient::one(), &plain, &acc);
        }
        Ok(out)
    }

    /// Rebuilds the expression atom by atom with `f`, keeping exponents.
    pub fn map_atoms<F>(&self, f: &mut F) -> Result<Expr>
    where
        F: FnMut(&Atom) -> Result<Option<Expr>>,
    {
        let mut rules = BTreeMap::new();
        for a in self.atoms() {
            if let Some(r) = f(&a)? {
                rules.insert(a, r);
            }
        }
        self.substitute(&rules)
    }

    /// Replaces constants by rational values. Exponent constants must receive
    /// integers; `negative_ok` decides which atoms may end up with a negative
    /// integer exponent.
    pub fn specialize_constants(
        &self,
        values: &BTreeMap<Symbol, BigRational>,
        negative_ok: &dyn Fn(&Atom) -> bool,
    ) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let coeff = c.specialize(values)?;
            let mut mono = Monomial::one();
            for (a, e) in &m.0 {
                let e2 = e.specialize(values)?;
                let atom = match a {
                    Atom::FunctionApp(f, k, arg) => {
                        Atom::FunctionApp(f.clone(), *k, Arc::new(arg.specialize_constants(values, negative_ok)?))
                    }
                    _ => a.clone(),
                };
                if let Some(n) = e2.as_int() {
                    if n < 0 && !negative_ok(&atom) {
                        return Err(Error::Exponent(format!("negative exponent {n} on {atom}")));
                    }
                }
                mono = mono.mul(&Monomial::atom(atom, e2));
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &Point<'_>) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.eval(&point.constants)?;
            for (a, e) in &m.0 {
                let n = e.eval(&point.constants)?;
                let base = match a {
                    Atom::FunctionApp(f, k, arg) => {
                        let x = arg.eval(point)?;
                        let table = point.functions.ok_or_else(|| Error::MissingAssignment(format!("function {f}")))?;
                        table(f, *k, &x).ok_or_else(|| Error::MissingAssignment(a.to_string()))?
                    }
                    _ => point.atoms.get(a).cloned().ok_or_else(|| Error::MissingAssignment(a.to_string()))?,
                };
                if n < 0 && base.is_zero() {
                    return Err(Error::Pole(format!("{a} = 0 raised to {n}")));
                }
                let p = num_traits::pow(base, n.unsigned_abs() as usize);
                v *= if n < 0 { p.recip() } else { p };
            }
            total += v;
        }
        Ok(total)
    }

    /// Splits off the part of each monomial that is a power of `a`:
    /// returns `exponent -> coefficient expression`.
    pub fn collect_powers_of(&self, a: &Atom) -> BTreeMap<ExpVec, Expr> {
        let mut out: BTreeMap<ExpVec, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(a);
            out.entry(e).or_default().add_term(m.without_atom(a), c.clone());
        }
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = match c.as_rational() {
                Some(r) => {
                    let mag = r.abs();
                    let body = if m.is_one() {
                        mag.to_string()
                    } else if mag.is_one() {
                        m.to_string()
                    } else {
                        format!("{mag}*{m}")
                    };
                    (r.is_negative(), body)
                }
                None => {
                    let neg = c.numerator().leading_coefficient_grlex().is_negative();
                    let c = if neg { c.neg() } else { c.clone() };
                    let body = if m.is_one() { format!("{c}") } else { format!("{c}*{m}") };
                    (neg, body)
                }
            };
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            out.add_product(c, m, rhs);
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: &'a Expr) -> Expr { (&self).$f(rhs) }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut out = Expr::zero();
        for e in iter {
            for (m, c) in e.terms {
                out.add_term(m, c);
            }
        }
        out
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Coefficient> for Expr {
    fn from(c: Coefficient) -> Self {
        Expr::constant(c)
    }
}

#[cfg(test)]
mod tests;
