//! Rational functions in the declared constants: the coefficient field of
//! every [`crate::Expr`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::poly::{gcd, Poly};
use crate::symbol::Symbol;

/// Reduced fraction `num / den`; `den` has grlex-leading coefficient 1 and
/// zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coefficient {
    num: Poly,
    den: Poly,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Coefficient { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient { num: Poly::from_int(n), den: Poly::one() }
    }

    pub fn rational(r: BigRational) -> Self {
        Coefficient { num: Poly::constant(r), den: Poly::one() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Coefficient::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_poly(p: Poly) -> Self {
        Coefficient { num: p, den: Poly::one() }
    }

    pub fn symbol(s: &Symbol) -> Self {
        Coefficient::from_poly(Poly::var(s))
    }

    /// Builds and reduces `num / den`.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Pole(format!("zero denominator in ({num})/(0)")));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Coefficient::zero();
        }
        if let Some(c) = den.as_constant() {
            return Coefficient { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lc = den.leading_coefficient_grlex().recip();
        Coefficient { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The value when the coefficient contains no constant symbols.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Whether the coefficient is a plain rational number less than zero.
    pub fn is_negative_number(&self) -> bool {
        self.as_rational().map(|r| r.is_negative()).unwrap_or(false)
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        if self.den == other.den {
            if self.den.is_one() {
                return Coefficient { num: self.num.add(&other.num), den: Poly::one() };
            }
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        Self::reduce(self.num.mul(&other.den).add(&other.num.mul(&self.den)), self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &Coefficient) -> Coefficient {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Coefficient {
        Coefficient { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        if self.den.is_one() && other.den.is_one() {
            return Coefficient { num: self.num.mul(&other.num), den: Poly::one() };
        }
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Coefficient> {
        Coefficient::fraction(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Coefficient) -> Result<Coefficient> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow_i(&self, n: i64) -> Result<Coefficient> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(Coefficient { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    /// Substitutes rational values for constants. Fails with a pole error
    /// if the denominator vanishes at the point.
    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<Coefficient> {
        let den = self.den.eval_partial(values);
        if den.is_zero() {
            return Err(Error::Pole(format!("denominator {} vanishes", self.den)));
        }
        Ok(Self::reduce(self.num.eval_partial(values), den))
    }

    pub fn eval(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<BigRational> {
        let c = self.specialize(values)?;
        c.as_rational().ok_or_else(|| Error::MissingAssignment(format!("constants of {self}")))
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            if self.num.num_terms() > 1 {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            let n = if self.num.num_terms() > 1 { format!("({})", self.num) } else { self.num.to_string() };
            write!(f, "{n}/({})", self.den)
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::zero()
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::from_int(n)
    }
}
