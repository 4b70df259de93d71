//! Drives uniform continuity to its normal form and prints each rewrite step.

use nsakit::lang::parse;
use nsakit::rewrite::{normalize, Direction, MonotoneAnnotation};

fn main() {
    let f = parse("(forall x:0)(forall y:0)(approxR(x, y) -> approxR(f x, f y))").unwrap();
    // the modulus variable introduced by unfolding approxR is upward monotone
    let anns = [MonotoneAnnotation::new("n", Direction::Upward)];
    let out = normalize(&f, &anns).unwrap();
    println!("input:  {f}");
    for (i, step) in out.trace.steps.iter().enumerate() {
        println!("{i}: {} at {:?} [{}]\n   {}", step.rule, step.path, step.witness_op.id(), step.after);
    }
    println!("normal form: {}", out.formula);
    out.trace.replay().expect("trace replays");
}
