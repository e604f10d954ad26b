//! Total derivatives, Euler operators, variations and scaling weights.

use std::collections::{BTreeMap, BTreeSet};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, MultiIndex};
use crate::symbol::Symbol;

/// Names and roles of everything an [`Expr`] may mention.
///
/// Jet atoms whose symbol is listed in `parameters` are constants under
/// total differentiation; every other jet symbol is a field.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SystemSignature {
    pub independents: Vec<Symbol>,
    pub fields: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
    pub constants: Vec<Symbol>,
    pub exponent_constants: Vec<Symbol>,
    pub functions: Vec<Symbol>,
}

impl SystemSignature {
    pub fn new(independents: &[&str], fields: &[&str]) -> Self {
        SystemSignature {
            independents: independents.iter().map(|s| Symbol::new(s)).collect(),
            fields: fields.iter().map(|s| Symbol::new(s)).collect(),
            ..Default::default()
        }
    }

    pub fn with_parameters(mut self, names: &[&str]) -> Self {
        self.parameters.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn with_constants(mut self, names: &[&str]) -> Self {
        self.constants.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn with_exponent_constants(mut self, names: &[&str]) -> Self {
        self.exponent_constants.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn with_functions(mut self, names: &[&str]) -> Self {
        self.functions.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    fn all_names(&self) -> impl Iterator<Item = &Symbol> {
        self.independents
            .iter()
            .chain(&self.fields)
            .chain(&self.parameters)
            .chain(&self.constants)
            .chain(&self.exponent_constants)
            .chain(&self.functions)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.all_names().any(|s| s.as_str() == name)
    }

    /// Fails with a collision error if any name is declared twice.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in self.all_names() {
            if !seen.insert(s.clone()) {
                return Err(Error::NameCollision(s.to_string()));
            }
        }
        if self.independents.is_empty() {
            return Err(Error::Precondition("at least one independent variable is required".into()));
        }
        Ok(())
    }

    pub fn is_parameter(&self, name: &Symbol) -> bool {
        self.parameters.contains(name)
    }

    pub fn is_field(&self, name: &Symbol) -> bool {
        self.fields.contains(name)
    }

    pub fn check_fresh(&self, name: &str) -> Result<()> {
        if self.is_declared(name) {
            Err(Error::NameCollision(name.to_string()))
        } else {
            Ok(())
        }
    }

    /// The signature with one more field.
    pub fn with_field(&self, name: &str) -> Result<SystemSignature> {
        self.check_fresh(name)?;
        let mut s = self.clone();
        s.fields.push(Symbol::new(name));
        Ok(s)
    }

    /// First of `base`, `base_`, `base__`, ... that is not declared.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.is_declared(&name) {
            name.push('_');
        }
        name
    }

    /// Re-types a parameter as a field.
    pub fn promote(&self, name: &Symbol) -> Result<SystemSignature> {
        if !self.is_parameter(name) {
            return Err(Error::Precondition(format!("{name} is not a parameter")));
        }
        let mut s = self.clone();
        s.parameters.retain(|p| p != name);
        s.fields.push(name.clone());
        Ok(s)
    }

    pub fn dimension(&self) -> usize {
        self.independents.len()
    }
}

/// Evolutionary generator: field -> δu. Missing entries are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Characteristic(BTreeMap<Symbol, Expr>);

impl Characteristic {
    pub fn new() -> Self {
        Characteristic::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, Expr)>>(it: I) -> Self {
        let mut c = Characteristic::new();
        for (f, e) in it {
            c.insert(f, e);
        }
        c
    }

    pub fn insert(&mut self, field: Symbol, e: Expr) {
        if e.is_zero() {
            self.0.remove(&field);
        } else {
            self.0.insert(field, e);
        }
    }

    pub fn with(mut self, field: &str, e: Expr) -> Self {
        self.insert(Symbol::new(field), e);
        self
    }

    pub fn get(&self, field: &Symbol) -> Option<&Expr> {
        self.0.get(field)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies `f` to every entry.
    pub fn try_map<F: FnMut(&Expr) -> Result<Expr>>(&self, mut f: F) -> Result<Characteristic> {
        let mut out = Characteristic::new();
        for (k, v) in &self.0 {
            out.insert(k.clone(), f(v)?);
        }
        Ok(out)
    }

    /// Per-field weights of a diagonal scaling `δu = w_u u`.
    pub fn diagonal_weights(&self) -> Result<BTreeMap<Symbol, Coefficient>> {
        let mut out = BTreeMap::new();
        for (f, e) in &self.0 {
            let w = e
                .as_single_term()
                .and_then(|(m, c)| {
                    let unit = Expr::atom(Atom::Jet(f.clone(), MultiIndex::empty()));
                    let (um, _) = unit.as_single_term()?;
                    (m == um).then(|| c.clone())
                })
                .ok_or_else(|| Error::Precondition(format!("δ{f} = {e} is not a diagonal scaling")))?;
            out.insert(f.clone(), w);
        }
        Ok(out)
    }
}

/// `D_μ e`.
pub fn total_derivative(sig: &SystemSignature, e: &Expr, mu: &Symbol) -> Expr {
    e.derive_with(&mut |a: &Atom| match a {
        Atom::Coordinate(x) if x == mu => Expr::one(),
        Atom::Jet(f, j) if !sig.is_parameter(f) => Expr::atom(Atom::Jet(f.clone(), j.with(mu))),
        _ => Expr::zero(),
    })
}

/// `D_J e`, applying one direction at a time.
pub fn total_derivative_multi(sig: &SystemSignature, e: &Expr, j: &MultiIndex) -> Expr {
    let mut out = e.clone();
    for d in j.directions() {
        if out.is_zero() {
            break;
        }
        out = total_derivative(sig, &out, &d);
    }
    out
}

/// `Σ_μ D_μ J^μ` for a current given in independent-variable order.
pub fn divergence(sig: &SystemSignature, current: &[Expr]) -> Expr {
    sig.independents.iter().zip(current).map(|(mu, c)| total_derivative(sig, c, mu)).sum()
}

/// First-order variation `δe = Σ ∂e/∂u_J · D_J δu`.
pub fn variation(sig: &SystemSignature, e: &Expr, delta: &Characteristic) -> Expr {
    e.derive_with(&mut |a: &Atom| match a {
        Atom::Jet(f, j) => match delta.get(f) {
            Some(d) => total_derivative_multi(sig, d, j),
            None => Expr::zero(),
        },
        _ => Expr::zero(),
    })
}

/// Euler operator `E^f(e) = Σ_J (-D)_J ∂e/∂f_J` over distinct multi-indices.
pub fn euler_lagrange(sig: &SystemSignature, e: &Expr, field: &Symbol) -> Expr {
    let mut out = Expr::zero();
    for j in e.jets_of(field) {
        let d = e.partial(&Atom::Jet(field.clone(), j.clone()));
        let term = total_derivative_multi(sig, &d, &j);
        out = if j.order() % 2 == 0 { out + term } else { out - term };
    }
    out
}

/// Fields that `e` depends on, in signature order, followed by any other
/// non-parameter jet symbols.
pub fn dependent_fields(sig: &SystemSignature, e: &Expr) -> Vec<Symbol> {
    let used: BTreeSet<Symbol> = e
        .atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Jet(f, _) if !sig.is_parameter(&f) => Some(f),
            _ => None,
        })
        .collect();
    let mut out: Vec<Symbol> = sig.fields.iter().filter(|f| used.contains(*f)).cloned().collect();
    out.extend(used.into_iter().filter(|f| !sig.fields.contains(f)));
    out
}

/// Weight `s` with `δe = s e`, if one exists. Zero has no weight.
pub fn scaling_weight(sig: &SystemSignature, e: &Expr, delta: &Characteristic) -> Option<Coefficient> {
    let (m, c) = e.terms().next()?;
    let v = variation(sig, e, delta);
    let vc = v.terms().find(|(vm, _)| *vm == m).map(|(_, k)| k.clone()).unwrap_or_default();
    let s = vc.div(c).ok()?;
    (v - e.scale(&s)).is_zero().then_some(s)
}

/// Common weight of the nonzero components.
pub fn scaling_weight_all(sig: &SystemSignature, es: &[Expr], delta: &Characteristic) -> Option<Coefficient> {
    let mut w: Option<Coefficient> = None;
    for e in es.iter().filter(|e| !e.is_zero()) {
        let s = scaling_weight(sig, e, delta)?;
        match &w {
            Some(prev) if prev != &s => return None,
            _ => w = Some(s),
        }
    }
    w
}

/// Euler-operator test for being a total divergence.
pub fn is_total_divergence(sig: &SystemSignature, e: &Expr) -> bool {
    let mut fields: BTreeSet<Symbol> = sig.fields.iter().cloned().collect();
    fields.extend(dependent_fields(sig, e));
    fields.iter().all(|f| euler_lagrange(sig, e, f).is_zero())
}

/// Linearization `G = d/dς F[u + ς v]` at ς = 0, with `v` named by `fresh`.
pub fn linearize(
    sig: &SystemSignature,
    equations: &[Expr],
    fresh: &BTreeMap<Symbol, String>,
) -> Result<(SystemSignature, Vec<Expr>)> {
    let mut ext = sig.clone();
    let mut delta = Characteristic::new();
    for (f, v) in fresh {
        ext = ext.with_field(v)?;
        delta.insert(f.clone(), Expr::field(v));
    }
    let out = equations.iter().map(|e| variation(&ext, e, &delta)).collect();
    Ok((ext, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> SystemSignature {
        SystemSignature::new(&["t", "x"], &["u"]).with_parameters(&["g"]).with_exponent_constants(&["p"])
    }

    fn up(e: crate::ExpVec) -> Expr {
        Expr::atom_pow(Atom::field("u"), e)
    }

    fn p() -> crate::ExpVec {
        crate::ExpVec::symbol(&Symbol::new("p"))
    }

    fn gkdv() -> Expr {
        Expr::jet("u", &["t"]) + Expr::field("g") * up(p()) * Expr::jet("u", &["x"]) + Expr::jet("u", &["x", "x", "x"])
    }

    #[test]
    fn chain_rule() {
        let x = Symbol::new("x");
        let e = total_derivative(&sig(), &Expr::field("u").pow_int(2), &x);
        assert_eq!(e, Expr::field("u") * Expr::jet("u", &["x"]) * Expr::int(2));
    }

    #[test]
    fn parameters_are_constant() {
        let x = Symbol::new("x");
        assert!(total_derivative(&sig(), &Expr::field("g"), &x).is_zero());
        let promoted = sig().promote(&Symbol::new("g")).unwrap();
        assert_eq!(total_derivative(&promoted, &Expr::field("g"), &x), Expr::jet("g", &["x"]));
    }

    #[test]
    fn scaling_leaves_gkdv_invariant() {
        let delta = Characteristic::new().with("u", Expr::field("u")).with("g", Expr::field("g") * -Expr::symbol("p"));
        assert_eq!(variation(&sig(), &gkdv(), &delta), gkdv());
        assert_eq!(scaling_weight(&sig(), &gkdv(), &delta), Some(Coefficient::one()));
    }

    #[test]
    fn euler_homogeneity() {
        let e = up(p().add(&crate::ExpVec::int(1)));
        let delta = Characteristic::new().with("u", Expr::field("u"));
        let w = p().add(&crate::ExpVec::int(1)).to_coefficient();
        assert_eq!(variation(&sig(), &e, &delta), e.scale(&w));
    }

    #[test]
    fn euler_operator_examples() {
        let u = Symbol::new("u");
        let e = Expr::field("u") * Expr::jet("u", &["x", "x"]);
        assert_eq!(euler_lagrange(&sig(), &e, &u), Expr::jet("u", &["x", "x"]).scale_int(2));
        let div = total_derivative(&sig(), &Expr::field("u").pow_int(3), &Symbol::new("x"));
        assert!(euler_lagrange(&sig(), &div, &u).is_zero());
    }

    #[test]
    fn divergence_test() {
        assert!(is_total_divergence(&sig(), &(Expr::field("u") * Expr::jet("u", &["x"]))));
        assert!(!is_total_divergence(&sig(), &Expr::field("u").pow_int(2)));
    }

    #[test]
    fn inhomogeneous_sum_has_no_weight() {
        let delta = Characteristic::new().with("u", Expr::field("u"));
        let e = Expr::field("u") + Expr::field("u").pow_int(2);
        assert_eq!(scaling_weight(&sig(), &e, &delta), None);
    }

    #[test]
    fn linearization_is_weight_one() {
        let fresh = BTreeMap::from([(Symbol::new("u"), "v".to_string())]);
        let (ext, g) = linearize(&sig(), &[gkdv()], &fresh).unwrap();
        let dv = Characteristic::new().with("v", Expr::field("v"));
        assert_eq!(scaling_weight(&ext, &g[0], &dv), Some(Coefficient::one()));
        assert!(matches!(
            linearize(&sig(), &[gkdv()], &BTreeMap::from([(Symbol::new("u"), "g".to_string())])),
            Err(Error::NameCollision(_))
        ));
    }
}
