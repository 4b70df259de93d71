use std::collections::BTreeMap;

use nsakit::lang::{parse, parse_term, FinType, Term};
use nsakit::rewrite::{normalize, Direction, MonotoneAnnotation};
use nsakit::tstar::{apply, assemble_witness, eval_closed, eval_with_fuel, obligations, TValue, WitnessError};
use proptest::prelude::*;

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn anns(name: &str) -> Vec<MonotoneAnnotation> {
    serde_json::from_str(&corpus(name)).unwrap()
}

fn value_of(w: &nsakit::tstar::Witness, args: Vec<TValue>) -> TValue {
    apply(&eval_closed(&w.term).unwrap(), args).unwrap()
}

#[test]
fn continuity_witness_is_the_maximum_of_the_supplied_sequence() {
    let out = normalize(&parse(&corpus("eq4.nsa")).unwrap(), &anns("eq4.ann.json")).unwrap();
    let obs = obligations(&out.trace).unwrap();
    assert_eq!(obs.len(), 1);
    assert_eq!(obs[0].expected.to_string(), "0->0*");
    let base = BTreeMap::from([(obs[0].name.clone(), parse_term("\\k:0. <k, 3, 1>").unwrap())]);
    let ws = assemble_witness(&out.trace, &base).unwrap();
    assert_eq!(ws.len(), 1);
    assert_eq!(value_of(&ws[0], vec![TValue::nat(2)]), TValue::nat(3));
    assert_eq!(value_of(&ws[0], vec![TValue::nat(9)]), TValue::nat(9));
}

#[test]
fn cri_witness_doubles_then_applies_the_modulus() {
    let out = normalize(&parse(&corpus("cri.nsa")).unwrap(), &anns("cri.ann.json")).unwrap();
    let obs = obligations(&out.trace).unwrap();
    assert_eq!(obs.len(), 1, "{obs:?}");
    let twice = "rec(0, \\i:0. \\a:0. succ(succ(a)))";
    let base = BTreeMap::from([(obs[0].name.clone(), parse_term(&format!("\\g:1. \\c:0. <g ({twice} c)>")).unwrap())]);
    let ws = assemble_witness(&out.trace, &base).unwrap();
    let g = eval_closed(&parse_term(&format!("\\k:0. {twice} k")).unwrap()).unwrap();
    for n in 0..12u64 {
        assert_eq!(value_of(&ws[0], vec![g.clone(), TValue::nat(n)]), TValue::nat(4 * n));
    }
}

#[test]
fn normal_input_keeps_its_direct_witness() {
    let f = parse("(forall^st k:0)(exists^st N:0)(forall x:0)le(k, N)").unwrap();
    let out = normalize(&f, &[]).unwrap();
    assert!(out.trace.steps.is_empty());
    let direct = parse_term("\\k:0. succ(k)").unwrap();
    let ws = assemble_witness(&out.trace, &BTreeMap::from([("N".to_string(), direct.clone())])).unwrap();
    assert_eq!(ws[0].term.free_vars().len(), 0);
    assert_eq!(value_of(&ws[0], vec![TValue::nat(4)]), TValue::nat(5));
}

#[test]
fn missing_or_mistyped_base_is_reported() {
    let out = normalize(&parse(&corpus("eq4.nsa")).unwrap(), &anns("eq4.ann.json")).unwrap();
    let name = obligations(&out.trace).unwrap()[0].name.clone();
    assert_eq!(assemble_witness(&out.trace, &BTreeMap::new()), Err(WitnessError::MissingBase(name.clone())));
    let wrong = BTreeMap::from([(name, parse_term("\\k:0. k").unwrap())]);
    assert!(matches!(assemble_witness(&out.trace, &wrong), Err(WitnessError::BaseType { .. })));
}

#[test]
fn downward_collapse_picks_zero() {
    let f = parse("(forall^st k:0)(forall x:0)(exists^st y:0)le(y, k)").unwrap();
    let out = normalize(&f, &[MonotoneAnnotation::new("y", Direction::Downward)]).unwrap();
    let ws = assemble_witness(&out.trace, &BTreeMap::new()).unwrap();
    assert_eq!(value_of(&ws[0], vec![TValue::nat(7)]), TValue::nat(0));
}

proptest! {
    // le(k, y) is upward in y: the maximum works exactly when some member does
    #[test]
    fn monotone_collapse_law(k in 0u64..20, w in proptest::collection::vec(0u64..20, 0..6)) {
        let f = parse("(forall^st k:0)(forall x:0)(exists^st y:0)le(k, y)").unwrap();
        let out = normalize(&f, &[MonotoneAnnotation::new("y", Direction::Upward)]).unwrap();
        let obs = obligations(&out.trace).unwrap();
        let items: Vec<Term> = w.iter().map(|x| Term::num(*x)).collect();
        let lit = Term::lam("k", FinType::Nat, Term::SeqLit(FinType::Nat, items));
        let ws = assemble_witness(&out.trace, &BTreeMap::from([(obs[0].name.clone(), lit)])).unwrap();
        let m = value_of(&ws[0], vec![TValue::nat(k)]).as_u64().unwrap();
        prop_assert_eq!(k <= m && !w.is_empty(), w.iter().any(|y| k <= *y));
    }

    #[test]
    fn maximum_agrees_with_brute_force(w in proptest::collection::vec(0u64..1000, 0..12)) {
        let t = Term::max_of(Term::SeqLit(FinType::Nat, w.iter().map(|x| Term::num(*x)).collect()));
        prop_assert_eq!(eval_closed(&t).unwrap(), TValue::nat(w.iter().copied().max().unwrap_or(0)));
    }

    #[test]
    fn small_terms_terminate_well_within_fuel(t in arb_nat_term(4)) {
        let (v, steps) = eval_with_fuel(&t, Some(1_000_000)).unwrap();
        prop_assert!(steps < 1_000_000);
        prop_assert_eq!(eval_closed(&t).unwrap(), v);
    }
}

/// Closed terms of type 0 built from numerals, successor, addition and
/// multiplication by recursion, and beta-redexes.
fn arb_nat_term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = (0u64..5).prop_map(Term::num);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        let add = |a: Term, b: Term| {
            let step = Term::lam("i", FinType::Nat, Term::lam("acc", FinType::Nat, Term::succ(Term::var("acc", FinType::Nat))));
            Term::app(Term::rec(a, step), b)
        };
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| add(a, b)),
            inner.clone().prop_map(|a| Term::app(Term::lam("z", FinType::Nat, Term::succ(Term::var("z", FinType::Nat))), a)),
            proptest::collection::vec(inner, 0..4).prop_map(|xs| Term::max_of(Term::SeqLit(FinType::Nat, xs))),
        ]
    })
}
