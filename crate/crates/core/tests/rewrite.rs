#![allow(clippy::result_large_err)]

use nsakit::lang::{parse, Formula};
use nsakit::model::random_formula;
use nsakit::rewrite::{
    is_normal_form, normalize, Direction, MonotoneAnnotation, RewriteError, RewriteTrace, Rule,
};
use proptest::prelude::*;

fn ups(vars: &[&str]) -> Vec<MonotoneAnnotation> {
    vars.iter().map(|v| MonotoneAnnotation::new(*v, Direction::Upward)).collect()
}

fn outcome(f: &Formula) -> Result<(Formula, RewriteTrace), RewriteTrace> {
    match normalize(f, &[]) {
        Ok(out) => Ok((out.formula, out.trace)),
        Err(RewriteError::Stuck { trace, .. }) => Err(*trace),
        Err(e) => panic!("{e} on {f}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_is_idempotent_and_replayable(seed in any::<u64>(), size in 0usize..5) {
        let f = random_formula(seed, size);
        match outcome(&f) {
            Ok((nf, trace)) => {
                prop_assert!(is_normal_form(&nf));
                trace.replay().unwrap();
                let again = normalize(&nf, &[]).unwrap();
                prop_assert_eq!(again.formula, nf);
                prop_assert!(again.trace.steps.is_empty());
                let json = trace.to_json();
                prop_assert_eq!(RewriteTrace::from_json(&json).unwrap(), trace);
            }
            Err(trace) => trace.replay().unwrap(),
        }
    }
}

#[test]
fn internal_formulas_are_untouched() {
    let f = parse("(forall x:0)(exists y:0)lt(x, y)").unwrap();
    let out = normalize(&f, &[]).unwrap();
    assert_eq!(out.formula, f);
    assert!(out.trace.steps.is_empty());
}

#[test]
fn standard_prefix_is_pulled_through_internal_universals() {
    let f = parse("(forall x:0)(forall^st k:0)(exists^st m:0)le(k, m)").unwrap();
    let out = normalize(&f, &ups(&["m"])).unwrap();
    assert!(is_normal_form(&out.formula));
    assert_eq!(out.trace.rules(), vec![Rule::R2, Rule::R5, Rule::R6]);
}

#[test]
fn annotations_must_name_number_variables() {
    let f = parse("(forall^st h:0->0)(exists^st m:0)le(h 0, m)").unwrap();
    assert!(matches!(normalize(&f, &ups(&["h"])), Err(RewriteError::BadAnnotation { .. })));
    let dup = vec![MonotoneAnnotation::new("m", Direction::Upward), MonotoneAnnotation::new("m", Direction::Downward)];
    assert!(matches!(normalize(&f, &dup), Err(RewriteError::BadAnnotation { .. })));
}

#[test]
fn tampered_traces_fail_replay() {
    let f = parse(include_str!("../corpus/eq4.nsa")).unwrap();
    let ann: Vec<MonotoneAnnotation> = serde_json::from_str(include_str!("../corpus/eq4.ann.json")).unwrap();
    let mut trace = normalize(&f, &ann).unwrap().trace;
    trace.steps.swap(1, 2);
    assert!(trace.replay().is_err());
}
