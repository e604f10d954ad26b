//! Auxiliary Lagrangians, adjoint-symmetries and the currents they induce.

use std::collections::BTreeMap;

use crate::conservation::{self, Current, DESystem, Multiplier};
use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, MultiIndex};
use crate::jet::{self, Characteristic, SystemSignature};
use crate::noether::{self, Shell, SymmetryWitness};
use crate::report::{Check, Report};
use crate::symbol::Symbol;

/// Fresh names `rho_<label>` for the auxiliary fields.
pub fn rho_names(sys: &DESystem) -> BTreeMap<Symbol, Symbol> {
    fresh_per_label(sys, "rho")
}

fn fresh_per_label(sys: &DESystem, prefix: &str) -> BTreeMap<Symbol, Symbol> {
    let mut sig = sys.sig.clone();
    let mut out = BTreeMap::new();
    for l in sys.labels() {
        let name = sig.fresh_name(&format!("{prefix}_{l}"));
        sig.fields.push(Symbol::new(&name));
        out.insert(l.clone(), Symbol::new(&name));
    }
    out
}

/// `L̂ = Σ_a F^a ρ_a` with the signature extended by the `ρ_a`.
pub fn auxiliary_lagrangian(sys: &DESystem, rho: &BTreeMap<Symbol, Symbol>) -> Result<(SystemSignature, Expr)> {
    let mut sig = sys.sig.clone();
    let mut l = Expr::zero();
    for (label, f) in &sys.equations {
        let r =
            rho.get(label).ok_or_else(|| Error::Precondition(format!("no auxiliary field for equation {label}")))?;
        sig = sig.with_field(r.as_str())?;
        l = l + f * &Expr::atom(Atom::Jet(r.clone(), MultiIndex::empty()));
    }
    Ok((sig, l))
}

/// `E^i(F^a ρ_a)` for every field of the system, with `ρ` symbolic.
pub fn adjoint_determining(sys: &DESystem) -> Result<(SystemSignature, BTreeMap<Symbol, Expr>)> {
    let rho = rho_names(sys);
    let (sig, l) = auxiliary_lagrangian(sys, &rho)?;
    let out = sys.sig.fields.iter().map(|f| (f.clone(), jet::euler_lagrange(&sig, &l, f))).collect();
    Ok((sig, out))
}

/// Replaces the jets of each frozen symbol by total derivatives of its value.
fn unfreeze(sig: &SystemSignature, e: &Expr, values: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
    e.map_atoms(&mut |a: &Atom| {
        Ok(match a {
            Atom::Jet(s, j) => values.get(s).map(|v| jet::total_derivative_multi(sig, v, j)),
            _ => None,
        })
    })
}

/// Boundary current of `δl` restricted to the slots of the fields in `delta`,
/// followed by unfreezing.
fn slot_current(
    sig: &SystemSignature,
    l: &Expr,
    delta: &Characteristic,
    values: &BTreeMap<Symbol, Expr>,
) -> Result<Current> {
    let mut cur = Current::zero(sig.dimension());
    for (f, d) in delta.iter() {
        if values.contains_key(f) {
            continue;
        }
        let slots = noether::slots_of(l, f);
        if !slots.is_empty() {
            cur = cur.add(&noether::ibp_current(sig, &slots, d));
        }
    }
    cur.try_map(|e| unfreeze(sig, e, values))
}

fn rho_values(sys: &DESystem, rho: &BTreeMap<Symbol, Symbol>, q: &Multiplier) -> Result<BTreeMap<Symbol, Expr>> {
    let mut out = BTreeMap::new();
    for (label, name) in rho {
        out.insert(name.clone(), q.get(label).cloned().unwrap_or_else(Expr::zero));
    }
    for l in q.0.keys() {
        if sys.equation(l).is_none() {
            return Err(Error::UnknownIdentifier(format!("equation {l}")));
        }
    }
    Ok(out)
}

/// Adjoint-symmetry test: the adjoint determining expressions with `ρ`
/// replaced by the given values vanish on shell.
pub fn check_adjoint_symmetry(sys: &DESystem, rho_vals: &Multiplier) -> Result<Report> {
    let solved = sys.solved()?;
    let rho = rho_names(sys);
    let (sig, l) = auxiliary_lagrangian(sys, &rho)?;
    let values = rho_values(sys, &rho, rho_vals)?;
    let mut r = Report::new("adjoint");
    for f in &sys.sig.fields {
        let e = jet::euler_lagrange(&sig, &l, f);
        let e = unfreeze(&sys.sig, &e, &values)?;
        r.push(Check::zero(format!("E_{f}(F rho) = 0 on shell"), [solved.reduce(&e)?]));
    }
    Ok(r)
}

/// `δF^a = 0` on shell for every equation.
pub fn check_system_symmetry(sys: &DESystem, delta: &Characteristic) -> Result<Report> {
    let solved = sys.solved()?;
    let mut r = Report::new("symmetry");
    for (label, f) in &sys.equations {
        let v = jet::variation(&sys.sig, f, delta);
        r.push(Check::zero(format!("δ{label} = 0 on shell"), [solved.reduce(&v)?]));
    }
    Ok(r)
}

/// Current of the auxiliary Lagrangian for the transformation `δ`, with the
/// auxiliary fields frozen during integration by parts and then replaced by
/// `rho_vals` (or kept as the symbolic `rho_<label>` fields).
pub fn embedding_current(sys: &DESystem, rho_vals: Option<&Multiplier>, delta: &Characteristic) -> Result<Current> {
    let rho = rho_names(sys);
    let (sig, l) = auxiliary_lagrangian(sys, &rho)?;
    let values = match rho_vals {
        Some(q) => rho_values(sys, &rho, q)?,
        None => BTreeMap::new(),
    };
    let u_delta = Characteristic::from_pairs(
        delta.iter().filter(|(f, _)| !rho.values().any(|r| r == *f)).map(|(f, e)| (f.clone(), e.clone())),
    );
    slot_current(&sig, &l, &u_delta, &values)
}

/// Product-rule split `j_(Fq) = j_(F̃q) + j_(Fq̃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCurrents {
    pub frozen_f: Current,
    pub frozen_q: Current,
    pub full: Current,
}

pub fn split_embedding_current(sys: &DESystem, q: &Multiplier, delta: &Characteristic) -> Result<SplitCurrents> {
    let fq = sys.contract(q)?;
    let (_, full) = noether::variation_split(&sys.sig, &fq, delta);

    let qs = fresh_per_label(sys, "qfrozen");
    let mut lq = Expr::zero();
    let mut qvals = BTreeMap::new();
    for (label, f) in &sys.equations {
        let Some(qa) = q.get(label) else { continue };
        let s = &qs[label];
        lq = lq + f * &Expr::atom(Atom::Jet(s.clone(), MultiIndex::empty()));
        qvals.insert(s.clone(), qa.clone());
    }
    let frozen_q = slot_current(&sys.sig, &lq, delta, &qvals)?;

    let fs = fresh_per_label(sys, "Ffrozen");
    let mut lf = Expr::zero();
    let mut fvals = BTreeMap::new();
    for (label, f) in &sys.equations {
        let Some(qa) = q.get(label) else { continue };
        let s = &fs[label];
        lf = lf + qa * &Expr::atom(Atom::Jet(s.clone(), MultiIndex::empty()));
        fvals.insert(s.clone(), f.clone());
    }
    let frozen_f = slot_current(&sys.sig, &lf, delta, &fvals)?;
    Ok(SplitCurrents { frozen_f, frozen_q, full })
}

/// Which hypothesis on `δ` the certificate assumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryHypothesis {
    /// `δ` maps solutions to solutions.
    System,
    /// Only `δ(F^a q_a)` vanishes on shell.
    ProductOnly,
}

/// Certificate relating `j_(Fq)` to `δJ`.
pub fn theorem1_certificate(
    sys: &DESystem,
    q: &Multiplier,
    j: &Current,
    delta: &Characteristic,
    hypothesis: SymmetryHypothesis,
) -> Result<Report> {
    if let Some((g, _)) = delta.iter().find(|(f, _)| sys.sig.is_parameter(f)) {
        return Err(Error::Precondition(format!("δ acts on the parameter {g}; promote it to a field first")));
    }
    let mut r = Report::new("theorem1");
    let pair = conservation::verify_multiplier_current_pair(sys, q, j)?;
    if !pair.passed() {
        return Err(Error::Precondition(format!(
            "(q, J) is not a multiplier/current pair: {}",
            pair.checks[0].residuals[0]
        )));
    }
    let solved = sys.solved()?;
    match hypothesis {
        SymmetryHypothesis::System => {
            let sym = check_system_symmetry(sys, delta)?;
            if !sym.passed() {
                return Err(Error::Precondition("δ is not a symmetry of the system".into()));
            }
        }
        SymmetryHypothesis::ProductOnly => {
            let v = jet::variation(&sys.sig, &sys.contract(q)?, delta);
            if !solved.reduce(&v)?.is_zero() {
                return Err(Error::Precondition("δ(F q) does not vanish on shell".into()));
            }
        }
    }
    let split = split_embedding_current(sys, q, delta)?;
    let dj = j.try_map(|c| Ok(jet::variation(&sys.sig, c, delta)))?;
    r.push(Check::zero("D_mu (j_Fq - δJ)^mu = 0 identically", [conservation::divergence(sys, &split.full.sub(&dj))]));
    r.push(Check::zero("D_mu δJ^mu = 0 on shell", [solved.reduce(&conservation::divergence(sys, &dj))?]));
    r.push(Check::zero("j_Fq - j_Fq~ - j_F~q = 0", split.full.sub(&split.frozen_q).sub(&split.frozen_f).0));
    r.push(Check::zero("j_F~q = 0 on shell", split.frozen_f.try_map(|e| solved.reduce(e))?.0));
    r.output("j_Fq", &split.full);
    r.output("j_F~q", &split.frozen_f);
    r.output("j_Fq~", &split.frozen_q);
    Ok(r)
}

/// Current bilinear in `v` and `ρ` for the linearized system, with the
/// signature extended by both.
pub fn linearization_current(
    sys: &DESystem,
    v_names: &BTreeMap<Symbol, String>,
    rho_vals: Option<&Multiplier>,
) -> Result<(SystemSignature, Current)> {
    let mut ext = sys.clone();
    let mut delta = Characteristic::new();
    for (f, v) in v_names {
        ext.sig = ext.sig.with_field(v)?;
        delta.insert(f.clone(), Expr::field(v));
    }
    ext.solved = None;
    let cur = embedding_current(&ext, rho_vals, &delta)?;
    let (sig, _) = auxiliary_lagrangian(&ext, &rho_names(&ext))?;
    Ok((sig, cur))
}

/// `δu = 0, δρ = q` is a symmetry of `L̂` with `K = J`; its Noether current
/// is `-J`.
pub fn multiplier_symmetry_check(sys: &DESystem, q: &Multiplier, j: &Current) -> Result<(Current, Report)> {
    let rho = rho_names(sys);
    let (sig, l) = auxiliary_lagrangian(sys, &rho)?;
    let mut delta = Characteristic::new();
    for (label, name) in &rho {
        if let Some(qa) = q.get(label) {
            delta.insert(name.clone(), qa.clone());
        }
    }
    let w = SymmetryWitness { delta, k: j.clone() };
    let (cur, mut r) = noether::noether_current(&sig, &l, &w, Shell::Off)?;
    r.command = "multiplier-symmetry".into();
    Ok((cur, r))
}
