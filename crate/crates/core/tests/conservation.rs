mod common;

use conslaw::conservation::{self, Current, EquivalenceWitness, Multiplier, Rule, SolvedForm};
use conslaw::frontend::document::Document;
use conslaw::frontend::registry;
use conslaw::report::Verdict;
use conslaw::{Coefficient, Error, Symbol};

fn gkdv() -> Document {
    registry::load("gkdv").unwrap()
}

fn cur(d: &Document, parts: [&str; 2]) -> Current {
    Current(parts.iter().map(|s| d.expr(s).unwrap()).collect())
}

fn mult(d: &Document, s: &str) -> Multiplier {
    Multiplier::single(&Symbol::new("F"), d.expr(s).unwrap())
}

#[test]
fn divergence_of_first_current_is_the_equation() {
    let d = gkdv();
    let div = conservation::divergence(&d.system, d.current("J1").unwrap());
    assert_eq!(div, d.system.equations[0].1);
}

#[test]
fn identically_conserved_current() {
    let d = gkdv();
    let j = cur(&d, ["u[x]", "-u[t]"]);
    assert!(conservation::divergence(&d.system, &j).is_zero());
}

#[test]
fn non_multiplier_has_nonzero_determining_expression() {
    let d = gkdv();
    let det = conservation::multiplier_determining(&d.system, &mult(&d, "u[x]^2")).unwrap();
    assert!(!det[&Symbol::new("u")].is_zero());
    let r = conservation::determining_report(&d.system, &mult(&d, "u[x]^2")).unwrap();
    assert_eq!(r.verdict(), Verdict::Fail);
}

#[test]
fn registry_pairs_verify() {
    let d = gkdv();
    for (q, j) in [("q1", "J1"), ("q2", "J2"), ("q3", "J3")] {
        let r =
            conservation::verify_multiplier_current_pair(&d.system, d.multiplier(q).unwrap(), d.current(j).unwrap())
                .unwrap();
        assert!(r.passed(), "{q}/{j}");
    }
}

#[test]
fn mismatched_pair_fails() {
    let d = gkdv();
    let r =
        conservation::verify_multiplier_current_pair(&d.system, d.multiplier("q1").unwrap(), d.current("J2").unwrap())
            .unwrap();
    assert_eq!(r.verdict(), Verdict::Fail);
}

#[test]
fn klein_gordon_noether_pair() {
    let d = registry::load("kg-phi-n").unwrap();
    let jn = d.current("JN").unwrap().scale(&Coefficient::from_int(-1));
    let q = mult(&d, "-phi[t]");
    assert!(conservation::verify_multiplier_current_pair(&d.system, &q, &jn).unwrap().passed());
}

#[test]
fn on_shell_reduction() {
    let d = gkdv();
    let red = |s: &str| conservation::on_shell_reduce(&d.system, &d.expr(s).unwrap()).unwrap();
    assert_eq!(red("u[t]"), d.expr("-g*u^p*u[x] - u[x,x,x]").unwrap());
    assert_eq!(red("u[t,x]"), d.expr("-p*g*u^(p-1)*u[x]^2 - g*u^p*u[x,x] - u[x,x,x,x]").unwrap());
    assert_eq!(red("u[x,x]*x"), d.expr("x*u[x,x]").unwrap());
    assert!(red("u[t] + g*u^p*u[x] + u[x,x,x]").is_zero());
}

#[test]
fn on_shell_reduction_is_idempotent() {
    let d = gkdv();
    let once = conservation::on_shell_reduce(&d.system, &d.expr("u[t,t]*u + u[t,x,x]").unwrap()).unwrap();
    let solved = d.system.solved().unwrap();
    assert!(solved.is_reduced(&once));
    assert_eq!(solved.reduce(&once).unwrap(), once);
}

#[test]
fn overlapping_rules_are_rejected() {
    let d = gkdv();
    let sig = &d.system.sig;
    let a = Rule::new("u", &["t"], d.expr("u[x]").unwrap());
    let b = Rule::new("u", &["t", "x"], d.expr("u").unwrap());
    assert!(matches!(SolvedForm::new(sig, vec![a, b]), Err(Error::NonTerminatingRule(_))));
    let c = Rule::new("u", &["x"], d.expr("u[x,x]").unwrap());
    assert!(matches!(SolvedForm::new(sig, vec![c]), Err(Error::NonTerminatingRule(_))));
}

#[test]
fn conservation_on_shell() {
    let d = gkdv();
    for j in ["J1", "J2", "J3"] {
        assert!(conservation::is_conserved_on_shell(&d.system, d.current(j).unwrap()).unwrap().passed());
    }
    let r = conservation::is_conserved_on_shell(&d.system, &cur(&d, ["u", "0"])).unwrap();
    assert_eq!(r.verdict(), Verdict::Fail);
}

#[test]
fn equivalence_with_witness() {
    let d = registry::load("kg-phi-n").unwrap();
    let t2 = &d.theorem2[0];
    let j = t2.j.as_ref().unwrap();
    let twice = d.current("J").unwrap().scale(&Coefficient::from_int(2));
    let neg = Coefficient::from_int(-1);
    let w =
        EquivalenceWitness { bar: t2.bar.clone().unwrap().scale(&neg), hat: t2.frozen.clone().unwrap().scale(&neg) };
    let r = conservation::currents_equivalent(&d.system, j, &twice, Some(&w)).unwrap();
    assert!(r.passed(), "{:?}", r.failures());
}

#[test]
fn equivalence_without_witness_is_necessary_only() {
    let d = gkdv();
    let j = d.current("J3").unwrap();
    let moved = j.add(&cur(&d, ["u[x]", "-u[t]"]));
    let r = conservation::currents_equivalent(&d.system, &moved, j, None).unwrap();
    assert_eq!(r.verdict(), Verdict::NecessaryOnly);
}

#[test]
fn equivalence_with_on_shell_trivial_part() {
    let d = gkdv();
    let j = d.current("J1").unwrap();
    let hat = cur(&d, ["u[t] + g*u^p*u[x] + u[x,x,x]", "0"]);
    let w = EquivalenceWitness { bar: Current::zero(2), hat: hat.clone() };
    let r = conservation::currents_equivalent(&d.system, &j.add(&hat), j, Some(&w)).unwrap();
    assert!(r.passed());
}

const HEAT: &str = r#"
[system]
independents = ["t", "x"]
fields = ["u"]

[equations]
F = "u[t] - u[x,x]"

[solved]
"u[t]" = "u[x,x]"

[multipliers]
q = "1"

[characteristics]
sc = { u = "u" }
"#;

#[test]
fn current_from_scaling_homogeneity() {
    let d = Document::parse(HEAT).unwrap();
    let sc = d.characteristic("sc").unwrap();
    let q = d.multiplier("q").unwrap();
    let j = conservation::current_from_homogeneity(&d.system, q, sc, &Coefficient::from_int(1)).unwrap();
    assert!(conservation::verify_multiplier_current_pair(&d.system, q, &j).unwrap().passed());
    assert_eq!(j, cur(&d, ["u", "-u[x]"]));
    let wrong = conservation::current_from_homogeneity(&d.system, q, sc, &Coefficient::from_int(2));
    assert!(matches!(wrong, Err(Error::NotHomogeneous(_))));
    let zero = conservation::current_from_homogeneity(&d.system, q, sc, &Coefficient::zero());
    assert!(matches!(zero, Err(Error::ZeroWeight(_))));
}

#[test]
fn homogeneity_with_parameter_scaling_is_a_precondition_error() {
    let d = gkdv();
    let r = conservation::current_from_homogeneity(
        &d.system,
        d.multiplier("q2").unwrap(),
        d.characteristic("sc").unwrap(),
        &Coefficient::from_int(2),
    );
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn current_weights() {
    let d = gkdv();
    let sc = d.characteristic("sc").unwrap();
    let w: Vec<_> =
        ["J1", "J2", "J3"].iter().map(|j| conservation::current_weight(&d.system, d.current(j).unwrap(), sc)).collect();
    assert_eq!(w, vec![Some(Coefficient::from_int(1)), Some(Coefficient::from_int(2)), Some(Coefficient::from_int(2))]);
}
