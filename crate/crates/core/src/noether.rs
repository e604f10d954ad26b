//! Integration by parts, variation splitting and Noether currents.

use std::collections::BTreeMap;

use crate::coefficient::Coefficient;
use crate::conservation::{Current, SolvedForm};
use crate::error::Result;
use crate::expr::{Atom, Expr, MultiIndex};
use crate::jet::{self, Characteristic, SystemSignature};
use crate::report::{Check, Report};
use crate::symbol::Symbol;

/// Coefficients `G^J` of `D_J ε` for one ε.
pub type Slots = BTreeMap<MultiIndex, Expr>;

/// Slot coefficients per ε symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IbpInput(pub BTreeMap<Symbol, Slots>);

/// `∂e/∂f_J` for every jet of `field` that occurs in `e`.
pub fn slots_of(e: &Expr, field: &Symbol) -> Slots {
    e.jets_of(field)
        .into_iter()
        .map(|j| {
            let d = e.partial(&Atom::Jet(field.clone(), j.clone()));
            (j, d)
        })
        .filter(|(_, d)| !d.is_zero())
        .collect()
}

/// `Ĝ = Σ_J (-D)_J G^J`.
pub fn ibp_hat(sig: &SystemSignature, slots: &Slots) -> Expr {
    slots
        .iter()
        .map(|(j, g)| {
            let d = jet::total_derivative_multi(sig, g, j);
            if j.order() % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .sum()
}

/// The boundary current of `Σ_J G^J D_J ε`, symmetric in repeated indices:
///
/// `𝒢^μ = Σ_{J ∋ μ} (1/m(J)) Σ_{A+B=J-μ} (-1)^|A| m(A) m(B) D_A G^J D_B ε`
///
/// where `m` counts the distinct orderings of a multi-index.
pub fn ibp_current(sig: &SystemSignature, slots: &Slots, eps: &Expr) -> Current {
    let mut dg: BTreeMap<(MultiIndex, MultiIndex), Expr> = BTreeMap::new();
    let mut de: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
    let mut out = Vec::with_capacity(sig.dimension());
    for mu in &sig.independents {
        let unit = MultiIndex::from_directions([mu.clone()]);
        let mut acc = Expr::zero();
        for (j, g) in slots {
            let Some(rest) = j.checked_sub(&unit) else { continue };
            let mj = j.multinomial() as i64;
            for (a, b) in rest.splits() {
                let sign = if a.order() % 2 == 0 { 1 } else { -1 };
                let weight = Coefficient::ratio(sign * (a.multinomial() * b.multinomial()) as i64, mj);
                let ga =
                    dg.entry((j.clone(), a.clone())).or_insert_with(|| jet::total_derivative_multi(sig, g, &a)).clone();
                if ga.is_zero() {
                    continue;
                }
                let eb = de.entry(b.clone()).or_insert_with(|| jet::total_derivative_multi(sig, eps, &b));
                acc = acc + (&ga * &*eb).scale(&weight);
            }
        }
        out.push(acc);
    }
    Current(out)
}

/// `(Ĝ_α, 𝒢)` with `Σ_α Σ_J G_α^J D_J ε^α = Σ_α Ĝ_α ε^α + D_μ 𝒢^μ`.
pub fn ibp_split(sig: &SystemSignature, input: &IbpInput) -> (BTreeMap<Symbol, Expr>, Current) {
    let mut hats = BTreeMap::new();
    let mut cur = Current::zero(sig.dimension());
    for (eps, slots) in &input.0 {
        hats.insert(eps.clone(), ibp_hat(sig, slots));
        let e = Expr::atom(Atom::Jet(eps.clone(), MultiIndex::empty()));
        cur = cur.add(&ibp_current(sig, slots, &e));
    }
    (hats, cur)
}

/// `δL = Σ_i E^i(L) δu_i + D_μ j^μ`; returns the Euler-Lagrange part and `j`.
pub fn variation_split(sig: &SystemSignature, l: &Expr, delta: &Characteristic) -> (Expr, Current) {
    let mut el = Expr::zero();
    let mut j = Current::zero(sig.dimension());
    for (f, d) in delta.iter() {
        let slots = slots_of(l, f);
        if slots.is_empty() {
            continue;
        }
        el = el + ibp_hat(sig, &slots) * d;
        j = j.add(&ibp_current(sig, &slots, d));
    }
    (el, j)
}

/// A transformation together with its `K` in `δL = D_μ K^μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryWitness {
    pub delta: Characteristic,
    pub k: Current,
}

#[derive(Clone, Copy, Debug)]
pub enum Shell<'a> {
    Off,
    /// Reduction by a solved form of the Euler-Lagrange equations.
    On(&'a SolvedForm),
}

pub fn check_lagrangian_symmetry(
    sig: &SystemSignature,
    l: &Expr,
    w: &SymmetryWitness,
    shell: Shell<'_>,
) -> Result<Report> {
    let residual = jet::variation(sig, l, &w.delta) - jet::divergence(sig, &w.k.0);
    let mut r = Report::new("lagrangian-symmetry");
    match shell {
        Shell::Off => r.push(Check::zero("δL - D_mu K^mu = 0", [residual])),
        Shell::On(s) => r.push(Check::zero("δL - D_mu K^mu = 0 on shell", [s.reduce(&residual)?])),
    }
    Ok(r)
}

/// `J = j - K` after checking the symmetry; in off-shell mode also
/// certifies `D_μ J^μ + Σ E^i(L) δu_i = 0`.
pub fn noether_current(
    sig: &SystemSignature,
    l: &Expr,
    w: &SymmetryWitness,
    shell: Shell<'_>,
) -> Result<(Current, Report)> {
    let mut r = check_lagrangian_symmetry(sig, l, w, shell)?;
    r.command = "noether".into();
    let (el, j) = variation_split(sig, l, &w.delta);
    let current = j.sub(&w.k);
    if let Shell::Off = shell {
        let res = jet::divergence(sig, &current.0) + el;
        r.push(Check::zero("D_mu J^mu + E(L) δu = 0", [res]));
    }
    r.output("J", &current);
    Ok((current, r))
}
