//! Shipped example systems and the checks `examples run` performs on them.

use crate::conservation::{self, Current, DESystem, Multiplier};
use crate::embedding::{self, SymmetryHypothesis};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::extension;
use crate::frontend::document::{Document, EmbeddingExpectation};
use crate::jet::{self, Characteristic};
use crate::noether::{self, Shell, SymmetryWitness};
use crate::report::{Check, Report};

pub const ENTRIES: &[(&str, &str)] = &[
    ("kg-phi-n", include_str!("../../data/kg_phi_n.toml")),
    ("kg-potential", include_str!("../../data/kg_potential.toml")),
    ("kg-w", include_str!("../../data/kg_w.toml")),
    ("gkdv", include_str!("../../data/gkdv.toml")),
    ("trivial-ext", include_str!("../../data/trivial_ext.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    let key = name.trim_end_matches(".toml").replace('_', "-");
    ENTRIES.iter().find(|(n, _)| *n == key).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<Document> {
    let src = source(name).ok_or_else(|| Error::UnknownIdentifier(format!("example {name}")))?;
    Document::parse(src)
}

/// Document specialized to the `[valid_at]` values of the named objects.
pub fn specialized_for(doc: &Document, objects: &[&str]) -> Result<Document> {
    doc.specialize(&doc.validity(objects))
}

/// Trivial-extension round trip for one pair: the lift passes off-shell,
/// the projection recovers `(q, J)`, the adjoint-symmetry `{0, J}` embeds
/// to `g J`, and a transformation preserving only `F q` satisfies the
/// certificate.
pub fn trivial_extension_checks(
    sys: &DESystem,
    q: &Multiplier,
    j: &Current,
    base_symmetry: Option<&Characteristic>,
) -> Result<Report> {
    let ext = extension::trivial_extend(sys)?;
    let g = ext.promoted[0].clone();
    let mut r = Report::new("trivial-ext");
    let (m, gj, lift) = extension::lift_trivial_multiplier(&ext, q, j)?;
    r.absorb("lift", lift);
    let (q2, theta, proj) = extension::project_trivial_multiplier(&ext, &m)?;
    r.absorb("project", proj);
    r.push(Check::zero("projected q - q = 0", q.iter().map(|(l, e)| q2.get(l).cloned().unwrap_or_default() - e)));
    r.push(Check::zero("projected J - J = 0", theta.sub(j).0));

    let delta = ext.symmetry.clone().expect("trivial extension carries its scaling");
    let (_, emb, adj) = extension::adjoint_from_current(&ext, j, &g, &delta)?;
    r.absorb("embed {0, J}", adj);
    r.push(Check::zero("j - g J = 0", emb.sub(&gj).0));

    if let Some(du) = base_symmetry {
        let mut mixed = du.clone();
        mixed.insert(g.clone(), Expr::coordinate(sys.sig.independents[0].as_str()));
        let not_symmetry = !embedding::check_system_symmetry(&ext.system, &mixed)?.passed();
        r.push(Check::flag(format!("δ{g} = {} breaks the extended system", sys.sig.independents[0]), not_symmetry));
        let cert = embedding::theorem1_certificate(&ext.system, q, j, &mixed, SymmetryHypothesis::ProductOnly)?;
        r.absorb("product-only certificate", cert);
    }
    Ok(r)
}

/// Lift of a parameterized pair: `θ = ∂J/∂g` and the off-shell identity
/// with variable parameters.
pub fn lift_checks(sys: &DESystem, q: &Multiplier, j: &Current) -> Result<Report> {
    let params = sys.sig.parameters.clone();
    let ext = extension::extend_system(sys, &params)?;
    let (lifted, pair, mut r) = extension::lift_parameterized_multiplier(&ext, q, j)?;
    for g in &params {
        let ga = crate::expr::Atom::Jet(g.clone(), crate::expr::MultiIndex::empty());
        let dj = j.map(|c| c.partial(&ga));
        let got = Current(
            sys.sig.independents.iter().map(|mu| lifted.get(ext.label(g, mu)).cloned().unwrap_or_default()).collect(),
        );
        r.push(Check::zero(format!("θ_{g} - dJ/d{g} = 0"), got.sub(&dj).0));
        r.push(Check::zero(format!("stored θ_{g} - dJ/d{g} = 0"), pair.theta_current(&ext, g).sub(&dj).0));
    }
    Ok(r)
}

/// Runs one `[[theorem2]]` expectation.
pub fn theorem2_checks(doc: &Document, t: &EmbeddingExpectation) -> Result<Report> {
    let specialized = specialized_for(doc, &[&t.q, &t.current])?;
    let sys = &specialized.system;
    let q = specialized.multiplier(&t.q)?;
    let j = specialized.current(&t.current)?;
    let delta = specialized.characteristic(&t.characteristic)?;
    let params: Vec<_> = t.params.iter().filter(|g| sys.sig.is_parameter(g)).cloned().collect();
    let ext = extension::extend_system(sys, &params)?;
    let (cur, mut r) = extension::theorem2_current(&ext, q, j, delta)?;
    let split = embedding::split_embedding_current(sys, q, delta)?;
    let t = specialized_expectation(&specialized, t)?;
    let bar = t.bar.clone().unwrap_or_else(|| Current::zero(sys.dim()));
    let rest = j.scale(&crate::Coefficient::rational(t.scale.clone())).sub(&cur).sub(&split.frozen_f).sub(&bar);
    r.push(Check::zero(format!("{} J - j - j_F~q - bar = 0", t.scale), rest.0));
    if t.bar.is_some() {
        r.push(Check::zero("D_mu bar^mu = 0 identically", [conservation::divergence(sys, &bar)]));
    }
    if let Some(expect) = &t.j {
        r.push(Check::zero("j - expected = 0", cur.sub(expect).0));
    }
    if let Some(expect) = &t.frozen {
        r.push(Check::zero("j_F~q - expected = 0", split.frozen_f.sub(expect).0));
    }
    Ok(r)
}

fn specialized_expectation(specialized: &Document, t: &EmbeddingExpectation) -> Result<EmbeddingExpectation> {
    Ok(specialized
        .theorem2
        .iter()
        .find(|x| x.q == t.q && x.current == t.current && x.characteristic == t.characteristic)
        .cloned()
        .unwrap_or_else(|| t.clone()))
}

/// First characteristic acting on fields only that is a system symmetry.
fn field_symmetry(doc: &Document) -> Option<&Characteristic> {
    doc.characteristics
        .values()
        .filter(|c| c.iter().all(|(f, _)| doc.system.sig.is_field(f)))
        .find(|c| embedding::check_system_symmetry(&doc.system, c).map(|s| s.passed()).unwrap_or(false))
}

/// All applicable module checks for a document.
pub fn run_document(doc: &Document) -> Result<Report> {
    let mut r = Report::new(format!("examples run {}", doc.name));
    for (qn, jn) in &doc.pairs {
        let specialized = specialized_for(doc, &[qn, jn])?;
        let sys = &specialized.system;
        let q = specialized.multiplier(qn)?;
        let j = specialized.current(jn)?;
        let p = format!("{qn}/{jn}");
        r.absorb(&format!("{p} determining"), conservation::determining_report(sys, q)?);
        r.absorb(&format!("{p} pair"), conservation::verify_multiplier_current_pair(sys, q, j)?);
        r.absorb(&format!("{p} conserved"), conservation::is_conserved_on_shell(sys, j)?);
        r.absorb(&format!("{p} adjoint"), embedding::check_adjoint_symmetry(sys, q)?);
        let (neg_j, ms) = embedding::multiplier_symmetry_check(sys, q, j)?;
        r.absorb(&format!("{p} multiplier-symmetry"), ms);
        r.push(Check::zero(format!("{p} multiplier-symmetry: Noether current + J = 0"), neg_j.add(j).0));
        if !sys.sig.parameters.is_empty() {
            r.absorb(&format!("{p} lift"), lift_checks(sys, q, j)?);
        }
        let bs = field_symmetry(&specialized);
        r.absorb(&format!("{p} trivial-ext"), trivial_extension_checks(sys, q, j, bs)?);
    }
    for (name, c) in &doc.characteristics {
        r.absorb(&format!("{name} symmetry"), embedding::check_system_symmetry(&doc.system, c)?);
    }
    for t in &doc.theorem1 {
        let specialized = specialized_for(doc, &[&t.q, &t.current])?;
        let hyp = if t.product_only { SymmetryHypothesis::ProductOnly } else { SymmetryHypothesis::System };
        let cert = extension::theorem1_with_parameters(
            &specialized.system,
            specialized.multiplier(&t.q)?,
            specialized.current(&t.current)?,
            specialized.characteristic(&t.characteristic)?,
            hyp,
        )?;
        r.absorb(&format!("theorem1 {}/{} {}", t.q, t.current, t.characteristic), cert);
    }
    for t in &doc.theorem2 {
        r.absorb(&format!("theorem2 {}/{} {}", t.q, t.current, t.characteristic), theorem2_checks(doc, t)?);
    }
    for (l, f, label) in &doc.euler_lagrange {
        let lag = doc.lagrangian(l)?;
        let eq = doc.system.equation(&crate::Symbol::new(label)).cloned().unwrap_or_default();
        r.push(Check::zero(format!("E_{f}({l}) - {label} = 0"), [jet::euler_lagrange(&doc.system.sig, lag, f) - eq]));
    }
    for n in &doc.noether {
        let w =
            SymmetryWitness { delta: doc.characteristic(&n.characteristic)?.clone(), k: doc.current(&n.k)?.clone() };
        let (cur, rep) = noether::noether_current(&doc.system.sig, doc.lagrangian(&n.lagrangian)?, &w, Shell::Off)?;
        r.absorb(&format!("noether {} {}", n.lagrangian, n.characteristic), rep);
        if let Some(c) = &n.current {
            r.push(Check::zero(format!("noether current - {c} = 0"), cur.sub(doc.current(c)?).0));
        }
    }
    Ok(r)
}

pub fn run(name: &str) -> Result<Report> {
    run_document(&load(name)?)
}
