//! Checks a golden trace and a handful of random rule instances against
//! finite two-level models.

use nsakit::lang::parse;
use nsakit::model::{check_step, check_trace, random_model, random_suite, sweep_models, ModelBounds, Verdict};
use nsakit::rewrite::{normalize, Direction, MonotoneAnnotation};

fn main() {
    let f = parse(include_str!("../corpus/eq4.nsa")).unwrap();
    let trace = normalize(&f, &[MonotoneAnnotation::new("n", Direction::Upward)]).unwrap().trace;
    let fs: Vec<_> = trace.steps.iter().flat_map(|s| [&s.before, &s.after]).collect();
    for m in sweep_models(3, 2, &[0], fs) {
        let verdicts: Vec<String> = check_trace(&m, &trace)
            .unwrap()
            .iter()
            .map(|r| format!("{}:{}", r.rule, matches!(r.verdict, Verdict::Holds)))
            .collect();
        println!("U={} S={}  {}", m.u, m.s, verdicts.join(" "));
    }

    for (i, step) in random_suite(1, 6).iter().enumerate() {
        let mut m = random_model(i as u64, ModelBounds::default());
        m.interpret_defaults([&step.before, &step.after]);
        println!("{}  {}\n    => {}\n    {:?}", step.rule, step.before, step.after, check_step(&m, step).unwrap());
    }
}
