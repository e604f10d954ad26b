use super::*;

fn u() -> Expr {
    Expr::field("u")
}

fn p() -> Symbol {
    Symbol::new("p")
}

#[test]
fn ring_identity_cancels() {
    assert!((&u() * &u() - u().pow_int(2)).is_zero());
}

#[test]
fn symbolic_exponents_add() {
    let up = Expr::atom_pow(Atom::field("u"), ExpVec::symbol(&p()));
    let lhs = &up * &u();
    let rhs = Expr::atom_pow(Atom::field("u"), ExpVec::symbol(&p()).add(&ExpVec::int(1)));
    assert_eq!(lhs, rhs);
}

#[test]
fn mixed_partials_share_an_index() {
    assert_eq!(Expr::jet("u", &["x", "t"]), Expr::jet("u", &["t", "x"]));
}

#[test]
fn partial_of_power() {
    let e = Expr::jet("u", &["x"]).pow_int(2);
    assert_eq!(e.partial(&Atom::jet("u", &["x"])), Expr::jet("u", &["x"]).scale_int(2));
}

#[test]
fn partial_through_function() {
    let arg = Expr::field("g2") * Expr::field("phi");
    let e = Expr::func("V", 0, arg.clone());
    let d = e.partial(&Atom::field("phi"));
    assert_eq!(d, Expr::field("g2") * Expr::func("V", 1, arg));
}

#[test]
fn symbolic_power_rule() {
    // d/du (u^(p+1)/(p+1)) = u^p
    let pp1 = ExpVec::symbol(&p()).add(&ExpVec::int(1));
    let inv = pp1.to_coefficient().inv().unwrap();
    let e = Expr::atom_pow(Atom::field("u"), pp1).scale(&inv);
    let d = e.partial(&Atom::field("u"));
    assert_eq!(d, Expr::atom_pow(Atom::field("u"), ExpVec::symbol(&p())));
}

#[test]
fn substitution_is_simultaneous() {
    let mut rules = BTreeMap::new();
    rules.insert(Atom::field("u"), Expr::field("v"));
    rules.insert(Atom::field("v"), Expr::field("u"));
    let e = Expr::field("u") - Expr::field("v").pow_int(2);
    assert_eq!(e.substitute(&rules).unwrap(), Expr::field("v") - Expr::field("u").pow_int(2));
}

#[test]
fn specialization_checks_signs() {
    let g = Atom::field("g");
    let e =
        Expr::atom_pow(g.clone(), ExpVec::symbol(&p()).neg()) * Expr::atom_pow(Atom::field("u"), ExpVec::symbol(&p()));
    let mut vals = BTreeMap::new();
    vals.insert(p(), BigRational::from_integer(2.into()));
    let ok = e.specialize_constants(&vals, &|a: &Atom| a == &g).unwrap();
    assert_eq!(ok, Expr::atom_pow(g.clone(), ExpVec::int(-2)) * u().pow_int(2));
    let bad = e.specialize_constants(&vals, &|_: &Atom| false);
    assert!(matches!(bad, Err(Error::Exponent(_))));
}

#[test]
fn evaluation_is_exact() {
    let mut pt = Point::default();
    pt.atoms.insert(Atom::field("u"), BigRational::new(3.into(), 2.into()));
    assert_eq!(u().pow_int(2).eval(&pt).unwrap(), BigRational::new(9.into(), 4.into()));
    assert_eq!(Expr::zero().eval(&pt).unwrap(), BigRational::zero());
}

#[test]
fn display_forms() {
    let e = Expr::jet("u", &["x", "x"]) - Expr::field("u").scale(&Coefficient::ratio(1, 2));
    assert_eq!(e.to_string(), "-1/2*u + u[x,x]");
    let pp1 = ExpVec::symbol(&p()).add(&ExpVec::int(1));
    assert_eq!(Expr::atom_pow(Atom::field("u"), pp1).to_string(), "u^(p+1)");
    assert_eq!(Expr::atom_pow(Atom::field("g"), ExpVec::int(-1)).to_string(), "g^(-1)");
}

#[test]
fn multi_index_helpers() {
    let j = MultiIndex::from_directions(["x", "x", "t"]);
    assert_eq!(j.order(), 3);
    assert_eq!(j.multinomial(), 3);
    assert_eq!(j.splits().len(), 6);
    let x = MultiIndex::from_directions(["x"]);
    assert_eq!(j.checked_sub(&x), Some(MultiIndex::from_directions(["x", "t"])));
    assert_eq!(x.checked_sub(&j), None);
}
