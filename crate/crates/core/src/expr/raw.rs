use std::sync::Arc;

use num_rational::BigRational;

use super::{Atom, ExpVec, Expr, MultiIndex};
use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

/// Expression tree with roles already resolved, before canonicalization.
#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Number(BigRational),
    Constant(Symbol),
    Atom(RawAtom),
    Add(Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Mul(Vec<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, ExpVec),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawAtom {
    Coordinate(Symbol),
    Jet(Symbol, MultiIndex),
    Function(Symbol, u32, Box<RawExpr>),
}

/// Canonical form of a raw tree. Division is only by expressions free of
/// atoms.
pub fn normalize(raw: &RawExpr) -> Result<Expr> {
    Ok(match raw {
        RawExpr::Number(r) => Expr::constant(Coefficient::rational(r.clone())),
        RawExpr::Constant(s) => Expr::constant(Coefficient::symbol(s)),
        RawExpr::Atom(a) => Expr::atom(match a {
            RawAtom::Coordinate(s) => Atom::Coordinate(s.clone()),
            RawAtom::Jet(f, j) => Atom::Jet(f.clone(), j.clone()),
            RawAtom::Function(f, k, arg) => Atom::FunctionApp(f.clone(), *k, Arc::new(normalize(arg)?)),
        }),
        RawExpr::Add(items) => {
            let mut parts = Vec::with_capacity(items.len());
            for i in items {
                parts.push(normalize(i)?);
            }
            parts.into_iter().sum()
        }
        RawExpr::Neg(x) => -normalize(x)?,
        RawExpr::Mul(items) => {
            let mut acc = Expr::one();
            for i in items {
                acc = &acc * &normalize(i)?;
            }
            acc
        }
        RawExpr::Div(n, d) => {
            let den = normalize(d)?;
            let c = den.as_coefficient().ok_or_else(|| Error::DivisionByExpr(den.to_string()))?;
            if c.is_zero() {
                return Err(Error::Pole("division by zero".into()));
            }
            normalize(n)?.scale(&c.inv()?)
        }
        RawExpr::Pow(b, e) => normalize(b)?.pow_exp(e)?,
    })
}
