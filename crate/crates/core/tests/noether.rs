mod common;

use conslaw::conservation::Current;
use conslaw::frontend::document::Document;
use conslaw::frontend::registry;
use conslaw::jet::{self, Characteristic, SystemSignature};
use conslaw::noether::{self, IbpInput, Shell, Slots, SymmetryWitness};
use conslaw::report::Verdict;
use conslaw::{Coefficient, Expr, MultiIndex, Symbol};

fn sig() -> SystemSignature {
    SystemSignature::new(&["t", "x"], &["u", "a", "b", "eps"])
}

fn mi(dirs: &[&str]) -> MultiIndex {
    MultiIndex::from_directions(dirs.iter().copied())
}

#[test]
fn first_order_integration_by_parts() {
    let s = sig();
    let slots = Slots::from([(mi(&[]), Expr::field("a")), (mi(&["x"]), Expr::field("b"))]);
    let input = IbpInput([(Symbol::new("eps"), slots)].into());
    let (hats, cur) = noether::ibp_split(&s, &input);
    assert_eq!(hats[&Symbol::new("eps")], Expr::field("a") - Expr::jet("b", &["x"]));
    assert_eq!(cur, Current(vec![Expr::zero(), Expr::field("b") * Expr::field("eps")]));
}

#[test]
fn single_slot_in_x() {
    let s = sig();
    let slots = Slots::from([(mi(&["x"]), Expr::from(1))]);
    let (hats, cur) = noether::ibp_split(&s, &IbpInput([(Symbol::new("eps"), slots)].into()));
    assert!(hats[&Symbol::new("eps")].is_zero());
    assert_eq!(cur, Current(vec![Expr::zero(), Expr::field("eps")]));
}

#[test]
fn second_order_slot_is_symmetric() {
    let s = sig();
    let slots = Slots::from([(mi(&["t", "x"]), Expr::field("a"))]);
    let cur = noether::ibp_current(&s, &slots, &Expr::field("eps"));
    let half = Coefficient::ratio(1, 2);
    let expected_t =
        (Expr::field("a") * Expr::jet("eps", &["x"]) - Expr::jet("a", &["x"]) * Expr::field("eps")).scale(&half);
    let expected_x =
        (Expr::field("a") * Expr::jet("eps", &["t"]) - Expr::jet("a", &["t"]) * Expr::field("eps")).scale(&half);
    assert_eq!(cur, Current(vec![expected_t, expected_x]));
}

#[test]
fn quadratic_gradient_lagrangian() {
    let s = sig();
    let l = Expr::jet("u", &["x"]).pow_int(2).scale(&Coefficient::ratio(1, 2));
    let d = Characteristic::new().with("u", Expr::field("eps"));
    let (el, j) = noether::variation_split(&s, &l, &d);
    assert_eq!(el, -(Expr::jet("u", &["x", "x"]) * Expr::field("eps")));
    assert_eq!(j, Current(vec![Expr::zero(), Expr::jet("u", &["x"]) * Expr::field("eps")]));
    let lhs = jet::variation(&s, &l, &d);
    assert!((lhs - el - jet::divergence(&s, &j.0)).is_zero());
}

fn kg() -> Document {
    registry::load("kg-phi-n").unwrap()
}

#[test]
fn klein_gordon_euler_lagrange() {
    let d = kg();
    let el = jet::euler_lagrange(&d.system.sig, d.lagrangian("L").unwrap(), &Symbol::new("phi"));
    assert_eq!(el, d.system.equations[0].1);
}

#[test]
fn klein_gordon_time_translation() {
    let d = kg();
    let w = SymmetryWitness { delta: d.characteristic("mt").unwrap().clone(), k: d.current("K").unwrap().clone() };
    let l = d.lagrangian("L").unwrap();
    assert!(noether::check_lagrangian_symmetry(&d.system.sig, l, &w, Shell::Off).unwrap().passed());
    let (j, r) = noether::noether_current(&d.system.sig, l, &w, Shell::Off).unwrap();
    assert!(r.passed(), "{:?}", r.failures());
    assert_eq!(&j, d.current("JN").unwrap());
}

#[test]
fn on_shell_lagrangian_symmetry() {
    let d = kg();
    let w = SymmetryWitness { delta: d.characteristic("mt").unwrap().clone(), k: d.current("K").unwrap().clone() };
    let solved = d.system.solved().unwrap();
    let (j, r) = noether::noether_current(&d.system.sig, d.lagrangian("L").unwrap(), &w, Shell::On(solved)).unwrap();
    assert!(r.passed());
    assert_eq!(&j, d.current("JN").unwrap());
}

#[test]
fn wrong_witness_fails() {
    let d = kg();
    let w = SymmetryWitness { delta: d.characteristic("mt").unwrap().clone(), k: Current::zero(2) };
    let r = noether::check_lagrangian_symmetry(&d.system.sig, d.lagrangian("L").unwrap(), &w, Shell::Off).unwrap();
    assert_eq!(r.verdict(), Verdict::Fail);
}

#[test]
fn boundary_term_equal_to_variation_current_gives_zero() {
    let d = kg();
    let l = d.lagrangian("L").unwrap();
    let delta = d.characteristic("mt").unwrap().clone();
    let (_, j) = noether::variation_split(&d.system.sig, l, &delta);
    let k = j.clone();
    let w = SymmetryWitness { delta, k };
    let (cur, _) = noether::noether_current(&d.system.sig, l, &w, Shell::Off).unwrap();
    assert!(cur.is_zero());
}

#[test]
fn slots_of_a_lagrangian() {
    let d = kg();
    let slots = noether::slots_of(d.lagrangian("L").unwrap(), &Symbol::new("phi"));
    assert_eq!(slots.len(), 3);
    assert_eq!(slots[&mi(&["t"])], d.expr("phi[t]").unwrap());
    assert_eq!(slots[&mi(&["x"])], d.expr("-phi[x]").unwrap());
}
