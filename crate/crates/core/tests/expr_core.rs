mod common;

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::rat;
use conslaw::expr::{Atom, ExpVec, Expr, MultiIndex, Point};
use conslaw::frontend::parser::parse_expr;
use conslaw::jet::SystemSignature;
use conslaw::{Error, Symbol};

fn sig() -> SystemSignature {
    SystemSignature::new(&["t", "x"], &["u", "phi", "rho", "Ft"])
        .with_parameters(&["g", "g2"])
        .with_exponent_constants(&["p"])
        .with_functions(&["V"])
}

fn e(s: &str) -> Expr {
    parse_expr(s, &sig()).unwrap()
}

fn atom(s: &str) -> Atom {
    let x = e(s);
    x.atoms().into_iter().next().unwrap()
}

fn p_is(v: i64) -> BTreeMap<Symbol, BigRational> {
    BTreeMap::from([(Symbol::new("p"), BigRational::from_integer(v.into()))])
}

#[test]
fn ring_identities_normalize() {
    assert!((e("u*u") - e("u^2")).is_zero());
    assert_eq!(e("u^p*u"), e("u^(p+1)"));
    assert_eq!(e("(1/(p+1))*(p+1)*u"), e("u"));
}

#[test]
fn reciprocal_cancellation_confirmed_by_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lhs = e("(1/(p+1))*(p+1)*u");
    for p in [0, 1, 2, 3, 5, -2, -3] {
        common::confirm_equal(&mut rng, &lhs, &e("u"), &p_is(p));
    }
}

#[test]
fn partial_derivatives() {
    assert_eq!(e("u[x]^2").partial(&atom("u[x]")), e("2*u[x]"));
    assert_eq!(e("g*u^(p+1)/(p+1)").partial(&atom("u")), e("g*u^p"));
    assert_eq!(e("V(g2*phi)").partial(&atom("phi")), e("g2*V'(g2*phi)"));
}

#[test]
fn substitution() {
    let one = |k: &str, v: &str| BTreeMap::from([(atom(k), e(v))]);
    assert_eq!(e("rho*u").substitute(&one("rho", "u")).unwrap(), e("u^2"));
    assert_eq!(e("Ft*u[x]").substitute(&one("Ft", "u[t] + u[x,x,x]")).unwrap(), e("u[t]*u[x] + u[x,x,x]*u[x]"));
    let rule = one("u[t]", "-g*u^p*u[x] - u[x,x,x]");
    assert_eq!(e("u[t]").substitute(&rule).unwrap(), e("-g*u^p*u[x] - u[x,x,x]"));
}

#[test]
fn specialization() {
    let any = |_: &Atom| false;
    let params = |a: &Atom| matches!(a, Atom::Jet(f, j) if f.as_str() == "g" && j.is_empty());
    assert_eq!(e("u^(p+1)").specialize_constants(&p_is(2), &any).unwrap(), e("u^3"));
    assert!(matches!(e("1/(p+1)*u^(p+1)").specialize_constants(&p_is(-1), &any), Err(Error::Pole(_))));
    assert_eq!(e("g^(-p)*u^p").specialize_constants(&p_is(2), &params).unwrap(), e("g^(-2)*u^2"));
}

#[test]
fn evaluation() {
    let pt = |pairs: &[(&str, BigRational)], p: Option<i64>| Point {
        atoms: pairs.iter().map(|(k, v)| (atom(k), v.clone())).collect(),
        constants: p.map(p_is).unwrap_or_default(),
        functions: None,
    };
    assert_eq!(e("u^2").eval(&pt(&[("u", rat(3, 2))], None)).unwrap(), rat(9, 4));
    assert_eq!(Expr::zero().eval(&pt(&[], None)).unwrap(), rat(0, 1));
    let f = e("u[t] + g*u^p*u[x] + u[x,x,x]");
    let at = pt(
        &[("u[t]", rat(1, 1)), ("u[x]", rat(2, 1)), ("u[x,x,x]", rat(5, 1)), ("u", rat(3, 1)), ("g", rat(1, 1))],
        Some(2),
    );
    assert_eq!(f.eval(&at).unwrap(), rat(24, 1));
}

#[test]
fn zero_tests() {
    assert!((e("u*u") - e("u^2")).is_zero());
    assert!((e("u[x,t]") - e("u[t,x]")).is_zero());
    let sig = sig();
    let j1 = [e("u"), e("g*u^(p+1)/(p+1) + u[x,x]")];
    let div = conslaw::jet::divergence(&sig, &j1);
    assert!((div - e("u[t] + g*u^p*u[x] + u[x,x,x]")).is_zero());
}

#[test]
fn multi_index_is_symmetric() {
    let a = MultiIndex::from_directions(["x", "t", "x"]);
    let b = MultiIndex::from_directions(["x", "x", "t"]);
    assert_eq!(a, b);
    assert_eq!(a.order(), 3);
    assert_eq!(a.count(&Symbol::new("x")), 2);
}

#[test]
fn division_by_field_is_rejected() {
    assert!(matches!(parse_expr("1/u", &sig()), Err(Error::DivisionByExpr(_))));
    assert!(matches!(parse_expr("u/0", &sig()), Err(Error::Pole(_))));
}

#[test]
fn symbolic_power_of_a_sum_is_rejected() {
    assert!(matches!(parse_expr("(u + 1)^p", &sig()), Err(Error::Exponent(_))));
    assert_eq!(e("(u + 1)^2"), e("u^2 + 2*u + 1"));
}

#[test]
fn exponent_forms() {
    let p = Symbol::new("p");
    let x = ExpVec::from_parts(1, [(p.clone(), 1)]);
    assert_eq!(x.to_string(), "p+1");
    assert_eq!(x.add(&ExpVec::int(-1)), ExpVec::symbol(&p));
    assert!(x.mul(&x).is_none());
    assert_eq!(x.eval(&p_is(4)).unwrap(), 5);
}
