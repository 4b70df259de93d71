//! Evaluates closed terms with the call-by-value machine and shows the
//! maximum collapse a monotone existential gets.

use std::collections::BTreeMap;

use nsakit::lang::{parse, parse_term};
use nsakit::rewrite::{normalize, Direction, MonotoneAnnotation};
use nsakit::tstar::{apply, assemble_witness, eval_closed, eval_with_fuel, obligations, TValue};

fn main() {
    let add = parse_term("\\x:0. \\y:0. rec(x, \\i:0. \\a:0. succ(a)) y").unwrap();
    let (v, steps) = eval_with_fuel(&parse_term("(\\x:0. \\y:0. rec(x, \\i:0. \\a:0. succ(a)) y) 20 22").unwrap(), None).unwrap();
    println!("{add}\n  20 + 22 = {v} in {steps} steps");

    let f = parse("(forall^st k:0)(forall x:0)(exists^st y:0)le(k, y)").unwrap();
    let out = normalize(&f, &[MonotoneAnnotation::new("y", Direction::Upward)]).unwrap();
    println!("{f}\n  => {}", out.formula);
    let ob = &obligations(&out.trace).unwrap()[0];
    println!("base obligation {} : {}", ob.name, ob.expected);
    let base = BTreeMap::from([(ob.name.clone(), parse_term("\\k:0. <1, k, 3>").unwrap())]);
    let w = &assemble_witness(&out.trace, &base).unwrap()[0];
    let t = eval_closed(&w.term).unwrap();
    for k in [0, 2, 7] {
        println!("  {} ({k}) = {}", w.var, apply(&t, [TValue::nat(k)]).unwrap());
    }
}
