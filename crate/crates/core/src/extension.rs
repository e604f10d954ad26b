//! Extended systems with parameters promoted to fields, the trivial
//! extension, and insertion of a scaling parameter into homogeneous parts.

use std::collections::BTreeMap;

use crate::coefficient::Coefficient;
use crate::conservation::{self, Current, DESystem, Multiplier, Rule};
use crate::embedding;
use crate::error::{Error, Result};
use crate::expr::{Atom, ExpVec, Expr, Monomial, MultiIndex};
use crate::jet::{self, Characteristic};
use crate::report::{Check, Report};
use crate::symbol::Symbol;

/// A system together with `∂_μ g_l = 0` for each promoted parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedSystem {
    pub base: DESystem,
    pub system: DESystem,
    pub promoted: Vec<Symbol>,
    /// Equation label of `∂_μ g_l = 0`, keyed by `(g_l, μ)`.
    pub labels: BTreeMap<(Symbol, Symbol), Symbol>,
    /// Scaling attached by [`trivial_extend`].
    pub symmetry: Option<Characteristic>,
}

impl ExtendedSystem {
    pub fn label(&self, g: &Symbol, mu: &Symbol) -> &Symbol {
        &self.labels[&(g.clone(), mu.clone())]
    }

    /// Sets every positive-order jet of a promoted parameter to zero.
    pub fn constant_parameters(&self, e: &Expr) -> Result<Expr> {
        e.map_atoms(&mut |a: &Atom| {
            Ok(match a {
                Atom::Jet(f, j) if !j.is_empty() && self.promoted.contains(f) => Some(Expr::zero()),
                _ => None,
            })
        })
    }

    pub fn constant_parameters_current(&self, j: &Current) -> Result<Current> {
        j.try_map(|e| self.constant_parameters(e))
    }
}

fn has_parameter_derivative(e: &Expr, g: &Symbol) -> bool {
    e.atoms().iter().any(|a| matches!(a, Atom::Jet(f, j) if f == g && !j.is_empty()))
}

/// Promotes `params` to fields and appends `∂_μ g = 0` with solved rules
/// `g[μ] -> 0`.
pub fn extend_system(sys: &DESystem, params: &[Symbol]) -> Result<ExtendedSystem> {
    let mut sig = sys.sig.clone();
    let mut equations = sys.equations.clone();
    let mut labels = BTreeMap::new();
    let mut rules: Vec<Rule> = sys.solved.as_ref().map(|s| s.rules().to_vec()).unwrap_or_default();
    for g in params {
        if sys.equations.iter().any(|(_, f)| has_parameter_derivative(f, g)) {
            return Err(Error::DerivativeOfParameter(g.to_string()));
        }
        sig = sig.promote(g)?;
        for mu in &sys.sig.independents {
            let label = Symbol::new(&format!("{g}_{mu}"));
            if equations.iter().any(|(l, _)| l == &label) || sig.is_declared(label.as_str()) {
                return Err(Error::NameCollision(format!("equation label {label}")));
            }
            let j = MultiIndex::from_directions([mu.clone()]);
            equations.push((label.clone(), Expr::atom(Atom::Jet(g.clone(), j.clone()))));
            labels.insert((g.clone(), mu.clone()), label);
            rules.push(Rule { field: g.clone(), lhs: j, rhs: Expr::zero() });
        }
    }
    let mut system = DESystem::new(sig, equations)?;
    if sys.solved.is_some() {
        system = system.with_solved(rules)?;
    }
    Ok(ExtendedSystem { base: sys.clone(), system, promoted: params.to_vec(), labels, symmetry: None })
}

/// A multiplier and current for constant parameters, with
/// `θ^μ_l = ∂J^μ/∂g_l` computed from `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterizedPair {
    pub q: Multiplier,
    pub j: Current,
    pub theta: BTreeMap<(Symbol, Symbol), Expr>,
}

impl ParameterizedPair {
    pub fn new(ext: &ExtendedSystem, q: &Multiplier, j: &Current) -> ParameterizedPair {
        let mut theta = BTreeMap::new();
        for g in &ext.promoted {
            let ga = Atom::Jet(g.clone(), MultiIndex::empty());
            for (mu, c) in ext.base.sig.independents.iter().zip(&j.0) {
                theta.insert((g.clone(), mu.clone()), c.partial(&ga));
            }
        }
        ParameterizedPair { q: q.clone(), j: j.clone(), theta }
    }

    pub fn theta_current(&self, ext: &ExtendedSystem, g: &Symbol) -> Current {
        Current(ext.base.sig.independents.iter().map(|mu| self.theta[&(g.clone(), mu.clone())].clone()).collect())
    }

    /// `{q_a, θ^μ_l}` as a multiplier of the extended system.
    pub fn lifted(&self, ext: &ExtendedSystem) -> Multiplier {
        let mut m = self.q.0.clone();
        for (key, th) in &self.theta {
            m.insert(ext.labels[key].clone(), th.clone());
        }
        Multiplier(m)
    }
}

fn require_pair(sys: &DESystem, q: &Multiplier, j: &Current) -> Result<()> {
    let r = conservation::verify_multiplier_current_pair(sys, q, j)?;
    if r.passed() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "(q, J) is not a pair on the base system; residual {}",
            r.checks[0].residuals[0]
        )))
    }
}

/// Lifts a parameterized pair to the extended system and certifies the
/// identity with variable parameters.
pub fn lift_parameterized_multiplier(
    ext: &ExtendedSystem,
    q: &Multiplier,
    j: &Current,
) -> Result<(Multiplier, ParameterizedPair, Report)> {
    require_pair(&ext.base, q, j)?;
    let pair = ParameterizedPair::new(ext, q, j);
    let lifted = pair.lifted(ext);
    let residual = ext.system.contract(&lifted)? - conservation::divergence(&ext.system, j);
    let mut r = Report::new("lift").with_check(Check::zero("F q + θ ∂g - D_mu J^mu = 0 for variable g", [residual]));
    for g in &ext.promoted {
        r.output(format!("dJ/d{g}"), pair.theta_current(ext, g));
    }
    Ok((lifted, pair, r))
}

/// The embedding current of the lifted multiplier at constant parameters,
/// with the identities it satisfies on the base system.
pub fn theorem2_current(
    ext: &ExtendedSystem,
    q: &Multiplier,
    j: &Current,
    delta: &Characteristic,
) -> Result<(Current, Report)> {
    let sym = embedding::check_system_symmetry(&ext.system, delta)?;
    if !sym.passed() {
        return Err(Error::Precondition("δ is not a symmetry of the extended system".into()));
    }
    let (lifted, _, lift_report) = lift_parameterized_multiplier(ext, q, j)?;
    let full = embedding::embedding_current(&ext.system, Some(&lifted), delta)?;
    let current = ext.constant_parameters_current(&full)?;

    let mut r = Report::new("theorem2");
    r.absorb("lift", lift_report);
    let base = &ext.base;
    let split = embedding::split_embedding_current(base, q, delta)?;
    let dj = j.map(|c| jet::variation(&base.sig, c, delta));
    r.push(Check::zero(
        "D_mu (j + j_F~q - δJ)^mu = 0 identically (g constant)",
        [conservation::divergence(base, &current.add(&split.frozen_f).sub(&dj))],
    ));
    if let Some(w) = conservation::current_weight(base, j, delta) {
        // j - ωJ = hat + bar with hat = 0 on shell; bar must be identically
        // conserved, and is zero when j reduces to ωJ exactly.
        let bar = current.sub(&j.scale(&w)).try_map(|e| conservation::on_shell_reduce(base, e))?;
        r.push(Check::zero(
            format!("j - ({w}) J = 0 on shell up to an identically conserved current"),
            [conservation::divergence(base, &bar)],
        ));
        r.output("omega", &w);
        r.output("j - omega J on shell", &bar);
    }
    r.output("j", &current);
    r.output("j_F~q", &split.frozen_f);
    Ok((current, r))
}

/// The first-theorem certificate, run on the extension by the parameters
/// that `δ` transforms (with the lifted multiplier) when there are any.
pub fn theorem1_with_parameters(
    sys: &DESystem,
    q: &Multiplier,
    j: &Current,
    delta: &Characteristic,
    hypothesis: embedding::SymmetryHypothesis,
) -> Result<Report> {
    let params: Vec<Symbol> = delta.iter().map(|(f, _)| f.clone()).filter(|f| sys.sig.is_parameter(f)).collect();
    if params.is_empty() {
        return embedding::theorem1_certificate(sys, q, j, delta, hypothesis);
    }
    let ext = extend_system(sys, &params)?;
    let (lifted, _, lift) = lift_parameterized_multiplier(&ext, q, j)?;
    let mut r = embedding::theorem1_certificate(&ext.system, &lifted, j, delta, hypothesis)?;
    r.absorb("lift", lift);
    Ok(r)
}

/// Drops positive-order parameter jets and the `∂g` components, then
/// certifies the result on the base system.
pub fn restrict_multiplier(
    ext: &ExtendedSystem,
    q_ext: &Multiplier,
    j_ext: &Current,
) -> Result<(ParameterizedPair, Report)> {
    let mut q = BTreeMap::new();
    for (l, e) in q_ext.iter() {
        if ext.base.equation(l).is_some() {
            q.insert(l.clone(), ext.constant_parameters(e)?);
        }
    }
    let q = Multiplier(q);
    let j = ext.constant_parameters_current(j_ext)?;
    let mut r = conservation::verify_multiplier_current_pair(&ext.base, &q, &j)?;
    r.command = "restrict".into();
    Ok((ParameterizedPair::new(ext, &q, &j), r))
}

/// Sufficient conditions for `δJ - ωJ` to be conserved at constant
/// parameters.
pub fn scc_check(ext: &ExtendedSystem, q: &Multiplier, delta: &Characteristic, omega: &Coefficient) -> Result<Report> {
    let base = &ext.base;
    let fq = base.contract(q)?;
    let mut r = Report::new("scc");
    r.push(Check::zero(
        format!("δ(F q) - ({omega}) F q = 0"),
        [jet::variation(&base.sig, &fq, delta) - fq.scale(omega)],
    ));
    for g in &ext.promoted {
        let dg = delta.get(g).cloned().unwrap_or_default();
        let res: Vec<Expr> = base.sig.independents.iter().map(|mu| jet::total_derivative(&base.sig, &dg, mu)).collect();
        r.push(Check::zero(format!("D_mu δ{g} = 0 for constant g"), res));
    }
    Ok(r)
}

/// The adjoint-symmetry `{0, ϑ^μ δ^l_l0}` of a conserved current and its
/// embedding current `ϑ^μ δg_l0`.
pub fn adjoint_from_current(
    ext: &ExtendedSystem,
    theta: &Current,
    g0: &Symbol,
    delta: &Characteristic,
) -> Result<(Multiplier, Current, Report)> {
    let conserved = conservation::is_conserved_on_shell(&ext.system, theta)?;
    if !conserved.passed() {
        return Err(Error::Precondition("ϑ is not conserved on shell".into()));
    }
    if !ext.promoted.contains(g0) {
        return Err(Error::Precondition(format!("{g0} is not a promoted parameter")));
    }
    let mut rho = BTreeMap::new();
    for l in ext.system.labels() {
        rho.insert(l.clone(), Expr::zero());
    }
    for (mu, t) in ext.base.sig.independents.iter().zip(&theta.0) {
        rho.insert(ext.label(g0, mu).clone(), t.clone());
    }
    let rho = Multiplier(rho);
    let mut r = embedding::check_adjoint_symmetry(&ext.system, &rho)?;
    r.command = "adjoint-from-current".into();
    let j = embedding::embedding_current(&ext.system, Some(&rho), delta)?;
    let j = ext.constant_parameters_current(&j)?;
    let expected = theta.mul_expr(&delta.get(g0).cloned().unwrap_or_default());
    r.push(Check::zero("j - ϑ δg = 0", j.sub(&expected).0));
    r.output("j", &j);
    Ok((rho, j, r))
}

/// Appends a fresh field `g` with `∂_μ g = 0` and the scaling `δu = 0, δg = g`.
pub fn trivial_extend(sys: &DESystem) -> Result<ExtendedSystem> {
    let name = (0..)
        .map(|i| if i == 0 { "g".to_string() } else { format!("g{}", i - 1) })
        .find(|n| !sys.sig.is_declared(n))
        .expect("unbounded search");
    let g = Symbol::new(&name);
    let mut with_param = sys.clone();
    with_param.sig.parameters.push(g.clone());
    let mut ext = extend_system(&with_param, std::slice::from_ref(&g))?;
    ext.base = sys.clone();
    ext.symmetry = Some(Characteristic::new().with(&name, Expr::field(&name)));
    Ok(ext)
}

fn trivial_field(ext: &ExtendedSystem) -> Result<&Symbol> {
    ext.promoted
        .first()
        .filter(|_| ext.promoted.len() == 1)
        .ok_or_else(|| Error::Precondition("not a trivial extension".into()))
}

/// `({g q_a, J^μ}, g J)` on the trivial extension.
pub fn lift_trivial_multiplier(
    ext: &ExtendedSystem,
    q: &Multiplier,
    j: &Current,
) -> Result<(Multiplier, Current, Report)> {
    require_pair(&ext.base, q, j)?;
    let g = trivial_field(ext)?;
    let ge = Expr::field(g.as_str());
    let mut m: BTreeMap<Symbol, Expr> = q.iter().map(|(l, e)| (l.clone(), e * &ge)).collect();
    for (mu, c) in ext.base.sig.independents.iter().zip(&j.0) {
        m.insert(ext.label(g, mu).clone(), c.clone());
    }
    let m = Multiplier(m);
    let gj = j.mul_expr(&ge);
    let residual = ext.system.contract(&m)? - conservation::divergence(&ext.system, &gj);
    let mut r = Report::new("trivial-lift").with_check(Check::zero("g q F + J ∂g - D_mu (g J)^mu = 0", [residual]));
    r.output("current", &gj);
    Ok((m, gj, r))
}

/// Recovers `(q, ϑ)` from a multiplier `{g q_a, ϑ^μ}` of the trivial
/// extension.
pub fn project_trivial_multiplier(ext: &ExtendedSystem, m: &Multiplier) -> Result<(Multiplier, Current, Report)> {
    let g = trivial_field(ext)?;
    let ga = Atom::Jet(g.clone(), MultiIndex::empty());
    let ge = Expr::atom(ga.clone());
    let mut q = BTreeMap::new();
    for l in ext.base.labels() {
        let e = m.get(l).cloned().unwrap_or_default();
        let qa = e.partial(&ga);
        if !(&qa * &ge - &e).is_zero() {
            return Err(Error::Precondition(format!("component {l} is not linear homogeneous in {g}")));
        }
        q.insert(l.clone(), qa);
    }
    let q = Multiplier(q);
    let theta = Current(
        ext.base.sig.independents.iter().map(|mu| m.get(ext.label(g, mu)).cloned().unwrap_or_default()).collect(),
    );
    let mut r = conservation::verify_multiplier_current_pair(&ext.base, &q, &theta)?;
    r.command = "trivial-project".into();
    Ok((q, theta, r))
}

/// Scaling weight of a monomial under a diagonal scaling.
fn monomial_weight(m: &Monomial, weights: &BTreeMap<Symbol, Coefficient>) -> Result<Coefficient> {
    let mut w = Coefficient::zero();
    for (a, e) in m.factors() {
        let aw = match a {
            Atom::Jet(f, _) => weights.get(f).cloned().unwrap_or_default(),
            Atom::Coordinate(_) => Coefficient::zero(),
            Atom::FunctionApp(f, _, arg) => {
                let parts = decompose_by_weights(arg, weights)?;
                if parts.keys().any(|k| !k.is_zero()) {
                    return Err(Error::NotHomogeneous(format!("argument of {f} has nonzero weight")));
                }
                Coefficient::zero()
            }
        };
        w = w.add(&aw.mul(&e.to_coefficient()));
    }
    Ok(w)
}

fn decompose_by_weights(e: &Expr, weights: &BTreeMap<Symbol, Coefficient>) -> Result<BTreeMap<Coefficient, Expr>> {
    let mut out: BTreeMap<Coefficient, Expr> = BTreeMap::new();
    for (m, c) in e.terms() {
        let w = monomial_weight(m, weights)?;
        let part = Expr::term(c.clone(), m.clone());
        let slot = out.entry(w).or_default();
        *slot = &*slot + &part;
    }
    Ok(out)
}

/// Groups the monomials of `e` by weight under a diagonal scaling.
pub fn homogeneous_decompose(e: &Expr, delta: &Characteristic) -> Result<BTreeMap<Coefficient, Expr>> {
    decompose_by_weights(e, &delta.diagonal_weights()?)
}

/// Exponents `η` and `ρ` for [`insert_parameter`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionPlan {
    pub eta: Coefficient,
    pub rho: Coefficient,
    pub g: Symbol,
}

/// Result of [`insert_parameter`].
#[derive(Clone, Debug)]
pub struct Inserted {
    pub system: DESystem,
    pub q: Multiplier,
    pub j: Current,
    /// `δu = u` for every field and `δg = g`.
    pub scaling: Characteristic,
    pub report: Report,
}

fn insert_power(e: &Expr, weights: &BTreeMap<Symbol, Coefficient>, g: &Symbol, total: &Coefficient) -> Result<Expr> {
    let mut out = Expr::zero();
    for (w, part) in decompose_by_weights(e, weights)? {
        let x = total.sub(&w);
        let exp = ExpVec::from_coefficient(&x)
            .ok_or_else(|| Error::Exponent(format!("g exponent {x} is not an integer-linear form")))?;
        out = out + Expr::atom_pow(Atom::Jet(g.clone(), MultiIndex::empty()), exp) * part;
    }
    Ok(out)
}

/// Multiplies each homogeneous part of `F`, `q` and `J` (weights under
/// `δu = u`) by the power of a new parameter `g` that makes the results
/// homogeneous of weights `η`, `ρ` and `η + ρ` under `δu = u, δg = g`.
pub fn insert_parameter(sys: &DESystem, q: &Multiplier, j: &Current, plan: &ExtensionPlan) -> Result<Inserted> {
    let total = plan.eta.add(&plan.rho);
    if total.is_zero() {
        return Err(Error::ZeroWeight("η + ρ = 0".into()));
    }
    sys.sig.check_fresh(plan.g.as_str())?;
    let weights: BTreeMap<Symbol, Coefficient> =
        sys.sig.fields.iter().map(|f| (f.clone(), Coefficient::one())).collect();
    let g = &plan.g;

    let mut sig = sys.sig.clone();
    sig.parameters.push(g.clone());
    let mut equations = Vec::new();
    for (l, f) in &sys.equations {
        equations.push((l.clone(), insert_power(f, &weights, g, &plan.eta)?));
    }
    let mut system = DESystem::new(sig, equations)?;
    if let Some(s) = &sys.solved {
        let mut rules = Vec::new();
        for rule in s.rules() {
            let lhs = Expr::atom(Atom::Jet(rule.field.clone(), rule.lhs.clone()));
            let ins = insert_power(&(&lhs - &rule.rhs), &weights, g, &plan.eta)?;
            let rhs = &lhs - &ins;
            if rhs.atoms().contains(&Atom::Jet(rule.field.clone(), rule.lhs.clone())) {
                rules.clear();
                break;
            }
            rules.push(Rule { field: rule.field.clone(), lhs: rule.lhs.clone(), rhs });
        }
        if !rules.is_empty() {
            system = system.with_solved(rules)?;
        }
    }
    let q2 = q.try_map(|e| insert_power(e, &weights, g, &plan.rho))?;
    let j2 = j.try_map(|e| insert_power(e, &weights, g, &total))?;

    let mut scaling = Characteristic::new();
    for f in &sys.sig.fields {
        scaling.insert(f.clone(), Expr::atom(Atom::Jet(f.clone(), MultiIndex::empty())));
    }
    scaling.insert(g.clone(), Expr::atom(Atom::Jet(g.clone(), MultiIndex::empty())));

    let mut report = Report::new("insert-parameter");
    let var = |e: &Expr, w: &Coefficient| jet::variation(&system.sig, e, &scaling) - e.scale(w);
    report.push(Check::zero("δF - η F = 0", system.equations.iter().map(|(_, f)| var(f, &plan.eta))));
    report.push(Check::zero("δq - ρ q = 0", q2.iter().map(|(_, e)| var(e, &plan.rho))));
    report.push(Check::zero("δJ - (η+ρ) J = 0", j2.0.iter().map(|e| var(e, &total))));
    report.absorb("pair", conservation::verify_multiplier_current_pair(&system, &q2, &j2)?);
    Ok(Inserted { system, q: q2, j: j2, scaling, report })
}

/// Rewrites `g^(c·unit)` as `g^c`, e.g. `g^(-p) -> g`.
pub fn rebase_power(e: &Expr, g: &Symbol, unit: &ExpVec) -> Result<Expr> {
    let ga = Atom::Jet(g.clone(), MultiIndex::empty());
    let mut out = Expr::zero();
    for (x, part) in e.collect_powers_of(&ga) {
        let c = power_multiple(&x, unit)
            .ok_or_else(|| Error::Exponent(format!("{g}^({x}) is not a power of {g}^({unit})")))?;
        out = out + Expr::atom_pow(ga.clone(), ExpVec::int(c)) * part;
    }
    Ok(out)
}

fn power_multiple(x: &ExpVec, unit: &ExpVec) -> Option<i64> {
    if x.is_zero() {
        return Some(0);
    }
    let (k, n) = match (unit.symbolic_part().first(), x.symbolic_part().first()) {
        (Some((s, k)), _) => (*k, x.symbolic_part().iter().find(|(t, _)| t == s).map(|(_, n)| *n)?),
        (None, _) => (unit.base(), x.as_int()?),
    };
    if k == 0 || n % k != 0 {
        return None;
    }
    let c = n / k;
    (&unit.scale(c) == x).then_some(c)
}

/// `J = J|_{g=0} + ∫_0^g θ dg` for currents polynomial in `g`.
pub fn current_from_theta(theta: &Current, g: &Symbol, at_zero: &Current) -> Result<Current> {
    let ga = Atom::Jet(g.clone(), MultiIndex::empty());
    let integrated = theta.try_map(|e| {
        let mut out = Expr::zero();
        for (x, part) in e.collect_powers_of(&ga) {
            let k = x
                .as_int()
                .filter(|k| *k >= 0)
                .ok_or_else(|| Error::Precondition(format!("θ is not polynomial in {g} (power {x})")))?;
            if part.atoms().iter().any(|a| matches!(a, Atom::FunctionApp(_, _, arg) if arg.atoms().contains(&ga))) {
                return Err(Error::Precondition(format!("θ depends on {g} through a function")));
            }
            out = out + Expr::atom_pow(ga.clone(), ExpVec::int(k + 1)) * part.scale(&Coefficient::ratio(1, k + 1));
        }
        Ok(out)
    })?;
    Ok(at_zero.add(&integrated))
}
