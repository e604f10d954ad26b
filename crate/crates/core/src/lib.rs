//! Exact jet-space algebra for conservation laws.
//!
//! The crate represents local functions of fields and their derivatives as
//! canonical polynomials ([`Expr`]) and builds on them the operators used to
//! relate conservation-law multipliers, adjoint-symmetries, symmetries and
//! Noether currents: total derivatives, Euler operators, variations,
//! on-shell reduction, integration by parts and extended systems with
//! promoted parameters.

pub mod coefficient;
pub mod conservation;
pub mod embedding;
pub mod error;
pub mod expr;
pub mod extension;
pub mod frontend;
pub mod jet;
pub mod noether;
pub mod poly;
pub mod report;
pub mod symbol;

pub use coefficient::Coefficient;
pub use error::{Error, Result};
pub use expr::{Atom, ExpVec, Expr, Monomial, MultiIndex};
pub use symbol::Symbol;
