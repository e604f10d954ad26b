//! Systems of equations, currents, multipliers and on-shell reduction.

use std::collections::BTreeMap;
use std::fmt;

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, MultiIndex};
use crate::jet::{self, Characteristic, SystemSignature};
use crate::noether;
use crate::report::{Check, Report, Verdict};
use crate::symbol::Symbol;

/// Components `J^μ` in the order of the signature's independents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Current(pub Vec<Expr>);

impl Current {
    pub fn zero(dim: usize) -> Current {
        Current(vec![Expr::zero(); dim])
    }

    pub fn components(&self) -> &[Expr] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Expr::is_zero)
    }

    fn zip(&self, other: &Current, f: impl Fn(&Expr, &Expr) -> Expr) -> Current {
        let n = self.0.len().max(other.0.len());
        let z = Expr::zero();
        Current((0..n).map(|i| f(self.0.get(i).unwrap_or(&z), other.0.get(i).unwrap_or(&z))).collect())
    }

    pub fn add(&self, other: &Current) -> Current {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Current) -> Current {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Coefficient) -> Current {
        Current(self.0.iter().map(|e| e.scale(c)).collect())
    }

    pub fn mul_expr(&self, e: &Expr) -> Current {
        Current(self.0.iter().map(|c| c * e).collect())
    }

    pub fn try_map<F: FnMut(&Expr) -> Result<Expr>>(&self, mut f: F) -> Result<Current> {
        Ok(Current(self.0.iter().map(&mut f).collect::<Result<_>>()?))
    }

    pub fn map<F: FnMut(&Expr) -> Expr>(&self, f: F) -> Current {
        Current(self.0.iter().map(f).collect())
    }
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Multiplier components keyed by equation label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiplier(pub BTreeMap<Symbol, Expr>);

impl Multiplier {
    /// The multiplier of a single-equation system.
    pub fn single(label: &Symbol, q: Expr) -> Multiplier {
        Multiplier(BTreeMap::from([(label.clone(), q)]))
    }

    pub fn get(&self, label: &Symbol) -> Option<&Expr> {
        self.0.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.0.iter()
    }

    pub fn try_map<F: FnMut(&Expr) -> Result<Expr>>(&self, mut f: F) -> Result<Multiplier> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.0 {
            out.insert(k.clone(), f(v)?);
        }
        Ok(Multiplier(out))
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A solved-form rule `field[lhs] -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub field: Symbol,
    pub lhs: MultiIndex,
    pub rhs: Expr,
}

impl Rule {
    pub fn new(field: &str, lhs: &[&str], rhs: Expr) -> Rule {
        Rule { field: Symbol::new(field), lhs: MultiIndex::from_directions(lhs.iter().copied()), rhs }
    }

    fn lhs_atom(&self) -> Atom {
        Atom::Jet(self.field.clone(), self.lhs.clone())
    }
}

const MAX_REDUCTION_DEPTH: usize = 256;

/// Rewriting system for reduction modulo the equations and their
/// prolongations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedForm {
    sig: SystemSignature,
    rules: Vec<Rule>,
}

impl SolvedForm {
    /// Validates distinctness, the ranking condition and irreducibility of
    /// every right-hand side.
    pub fn new(sig: &SystemSignature, rules: Vec<Rule>) -> Result<SolvedForm> {
        for (i, a) in rules.iter().enumerate() {
            for b in rules.iter().skip(i + 1) {
                if a.field == b.field && (a.lhs.checked_sub(&b.lhs).is_some() || b.lhs.checked_sub(&a.lhs).is_some()) {
                    return Err(Error::NonTerminatingRule(format!(
                        "left-hand sides {} and {} overlap",
                        a.lhs_atom(),
                        b.lhs_atom()
                    )));
                }
            }
        }
        let form = SolvedForm { sig: sig.clone(), rules };
        for r in &form.rules {
            let d = form.leading_direction(&r.lhs);
            let key = |j: &MultiIndex| (j.count(&d), j.order(), j.clone());
            let top = key(&r.lhs);
            for a in r.rhs.atoms() {
                if let Atom::Jet(f, j) = &a {
                    if sig.is_parameter(f) {
                        continue;
                    }
                    if key(j) >= top {
                        return Err(Error::NonTerminatingRule(format!(
                            "{} does not dominate {a} in its right-hand side",
                            r.lhs_atom()
                        )));
                    }
                    if form.rule_for(&a).is_some() {
                        return Err(Error::NonTerminatingRule(format!(
                            "right-hand side of {} contains reducible {a}",
                            r.lhs_atom()
                        )));
                    }
                }
            }
        }
        Ok(form)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &SystemSignature {
        &self.sig
    }

    fn leading_direction(&self, j: &MultiIndex) -> Symbol {
        let mut best: Option<(u32, &Symbol)> = None;
        for x in &self.sig.independents {
            let c = j.count(x);
            if best.map(|(b, _)| c > b).unwrap_or(true) {
                best = Some((c, x));
            }
        }
        best.map(|(_, x)| x.clone()).unwrap_or_else(|| Symbol::new(""))
    }

    /// The rule whose lhs this atom is a derivative of, with the remaining
    /// multi-index.
    fn rule_for(&self, a: &Atom) -> Option<(&Rule, MultiIndex)> {
        let (f, j) = a.jet_parts()?;
        self.rules.iter().filter(|r| &r.field == f).find_map(|r| j.checked_sub(&r.lhs).map(|rest| (r, rest)))
    }

    pub fn is_reduced(&self, e: &Expr) -> bool {
        e.atoms().iter().all(|a| self.rule_for(a).is_none())
    }

    /// Normal form with no reducible atom, also inside function arguments.
    pub fn reduce(&self, e: &Expr) -> Result<Expr> {
        let mut memo = BTreeMap::new();
        self.reduce_with(e, &mut memo, 0)
    }

    fn reduce_with(&self, e: &Expr, memo: &mut BTreeMap<Atom, Expr>, depth: usize) -> Result<Expr> {
        if depth > MAX_REDUCTION_DEPTH {
            return Err(Error::NonTerminatingRule(format!("reduction of {e} does not terminate")));
        }
        let mut rules = BTreeMap::new();
        for m in e.terms().map(|(m, _)| m) {
            for (a, _) in m.factors() {
                if rules.contains_key(a) {
                    continue;
                }
                if let Some(r) = self.reduce_atom(a, memo, depth)? {
                    rules.insert(a.clone(), r);
                }
            }
        }
        e.substitute(&rules)
    }

    /// Reduced form of a single atom, or `None` when it is already reduced.
    fn reduce_atom(&self, a: &Atom, memo: &mut BTreeMap<Atom, Expr>, depth: usize) -> Result<Option<Expr>> {
        if let Some(v) = memo.get(a) {
            return Ok(Some(v.clone()));
        }
        let out = match a {
            Atom::FunctionApp(f, k, arg) => {
                let r = self.reduce_with(arg, memo, depth + 1)?;
                if &r == arg.as_ref() {
                    return Ok(None);
                }
                Expr::atom(Atom::FunctionApp(f.clone(), *k, std::sync::Arc::new(r)))
            }
            Atom::Jet(f, _) => {
                let Some((rule, rest)) = self.rule_for(a) else { return Ok(None) };
                if rest.is_empty() {
                    rule.rhs.clone()
                } else {
                    // Peel one direction: reduce the lower atom, differentiate, reduce again.
                    let mu = rest.directions().pop().expect("nonempty");
                    let lower = Atom::Jet(
                        f.clone(),
                        a.jet_parts().unwrap().1.checked_sub(&MultiIndex::from_directions([mu.clone()])).unwrap(),
                    );
                    let base = match self.reduce_atom(&lower, memo, depth + 1)? {
                        Some(r) => r,
                        None => Expr::atom(lower),
                    };
                    let d = jet::total_derivative(&self.sig, &base, &mu);
                    self.reduce_with(&d, memo, depth + 1)?
                }
            }
            Atom::Coordinate(_) => return Ok(None),
        };
        memo.insert(a.clone(), out.clone());
        Ok(Some(out))
    }
}

/// A system of equations `F^a = 0` with an optional solved form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DESystem {
    pub sig: SystemSignature,
    pub equations: Vec<(Symbol, Expr)>,
    pub solved: Option<SolvedForm>,
}

impl DESystem {
    pub fn new(sig: SystemSignature, equations: Vec<(Symbol, Expr)>) -> Result<DESystem> {
        sig.validate()?;
        for (i, (l, _)) in equations.iter().enumerate() {
            if equations[..i].iter().any(|(k, _)| k == l) {
                return Err(Error::NameCollision(format!("equation label {l}")));
            }
        }
        Ok(DESystem { sig, equations, solved: None })
    }

    pub fn with_solved(mut self, rules: Vec<Rule>) -> Result<DESystem> {
        self.solved = Some(SolvedForm::new(&self.sig, rules)?);
        Ok(self)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Symbol> {
        self.equations.iter().map(|(l, _)| l)
    }

    pub fn equation(&self, label: &Symbol) -> Option<&Expr> {
        self.equations.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }

    pub fn dim(&self) -> usize {
        self.sig.dimension()
    }

    pub fn solved(&self) -> Result<&SolvedForm> {
        self.solved.as_ref().ok_or(Error::NoSolvedForm)
    }

    /// `Σ_a F^a q_a`.
    pub fn contract(&self, q: &Multiplier) -> Result<Expr> {
        let mut out = Expr::zero();
        for (l, qa) in q.iter() {
            let f = self.equation(l).ok_or_else(|| Error::UnknownIdentifier(format!("equation {l}")))?;
            out = out + f * qa;
        }
        Ok(out)
    }
}

pub fn divergence(sys: &DESystem, j: &Current) -> Expr {
    jet::divergence(&sys.sig, &j.0)
}

pub fn on_shell_reduce(sys: &DESystem, e: &Expr) -> Result<Expr> {
    sys.solved()?.reduce(e)
}

/// `E^i(Σ F^a q_a)` for every field.
pub fn multiplier_determining(sys: &DESystem, q: &Multiplier) -> Result<BTreeMap<Symbol, Expr>> {
    let fq = sys.contract(q)?;
    Ok(sys.sig.fields.iter().map(|f| (f.clone(), jet::euler_lagrange(&sys.sig, &fq, f))).collect())
}

pub fn determining_report(sys: &DESystem, q: &Multiplier) -> Result<Report> {
    let mut r = Report::new("determining");
    for (f, e) in multiplier_determining(sys, q)? {
        r.push(Check::zero(format!("E_{f}(F q) = 0"), [e]));
    }
    Ok(r)
}

/// Off-shell check of `Σ F^a q_a = D_μ J^μ`.
pub fn verify_multiplier_current_pair(sys: &DESystem, q: &Multiplier, j: &Current) -> Result<Report> {
    let residual = sys.contract(q)? - divergence(sys, j);
    Ok(Report::new("verify-pair").with_check(Check::zero("F q - D_mu J^mu = 0", [residual])))
}

pub fn is_conserved_on_shell(sys: &DESystem, j: &Current) -> Result<Report> {
    let div = divergence(sys, j);
    let residual = if div.is_zero() { div } else { on_shell_reduce(sys, &div)? };
    Ok(Report::new("conserved").with_check(Check::zero("D_mu J^mu = 0 on shell", [residual])))
}

/// Decomposition `J1 - J2 = bar + hat`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub bar: Current,
    pub hat: Current,
}

pub fn currents_equivalent(
    sys: &DESystem,
    j1: &Current,
    j2: &Current,
    witness: Option<&EquivalenceWitness>,
) -> Result<Report> {
    let mut r = Report::new("equiv");
    let diff = j1.sub(j2);
    match witness {
        Some(w) => {
            let rest = diff.sub(&w.bar).sub(&w.hat);
            r.push(Check::zero("J1 - J2 - bar - hat = 0", rest.0));
            r.push(Check::zero("D_mu bar^mu = 0 identically", [divergence(sys, &w.bar)]));
            let hat = if w.hat.is_zero() { Vec::new() } else { w.hat.try_map(|e| on_shell_reduce(sys, e))?.0 };
            r.push(Check::zero("hat = 0 on shell", hat));
        }
        None => {
            let div = divergence(sys, &diff);
            let res = if div.is_zero() { div } else { on_shell_reduce(sys, &div)? };
            let mut c = Check::zero("D_mu (J1 - J2)^mu = 0 on shell", [res]);
            if c.passed() {
                c.verdict = Verdict::NecessaryOnly;
            }
            r.push(c);
        }
    }
    Ok(r)
}

/// `(1/ω) j_(Fq)` for a multiplier whose product with the equations has
/// weight `ω` under `δ`.
pub fn current_from_homogeneity(
    sys: &DESystem,
    q: &Multiplier,
    delta: &Characteristic,
    omega: &Coefficient,
) -> Result<Current> {
    if omega.is_zero() {
        return Err(Error::ZeroWeight("ω = 0".into()));
    }
    if let Some((g, _)) = delta.iter().find(|(f, _)| sys.sig.is_parameter(f)) {
        return Err(Error::Precondition(format!("δ acts on the parameter {g}; promote it to a field first")));
    }
    let fq = sys.contract(q)?;
    let defect = jet::variation(&sys.sig, &fq, delta) - fq.scale(omega);
    if !defect.is_zero() {
        return Err(Error::NotHomogeneous(format!("δ(F q) - ({omega}) F q = {defect}")));
    }
    let (_, j) = noether::variation_split(&sys.sig, &fq, delta);
    Ok(j.scale(&omega.inv()?))
}

/// Weight shared by all nonzero components of a current.
pub fn current_weight(sys: &DESystem, j: &Current, delta: &Characteristic) -> Option<Coefficient> {
    jet::scaling_weight_all(&sys.sig, &j.0, delta)
}
