//! From the nonstandard integration theorem to an executable mesh bound:
//! normalize, assemble the witness, and compare it with the numeric sweep.

use std::collections::BTreeMap;

use nsakit::analysis::{cri_sweep, RealFunction};
use nsakit::lang::{parse, parse_term};
use nsakit::rewrite::{normalize, MonotoneAnnotation};
use nsakit::tstar::{apply, assemble_witness, eval_closed, obligations, TValue};

fn main() {
    let f = parse(include_str!("../corpus/cri.nsa")).unwrap();
    let anns: Vec<MonotoneAnnotation> = serde_json::from_str(include_str!("../corpus/cri.ann.json")).unwrap();
    let out = normalize(&f, &anns).unwrap();
    println!("normal form:\n  {}", out.formula);

    let obs = obligations(&out.trace).unwrap();
    let base = parse_term("\\g:1. \\c:0. <g (rec(0, \\i:0. \\a:0. succ(succ(a))) c)>").unwrap();
    let base: BTreeMap<_, _> = obs.iter().map(|o| (o.name.clone(), base.clone())).collect();
    let w = &assemble_witness(&out.trace, &base).unwrap()[0];
    println!("witness for {}: {}", w.var, w.term);

    let t = eval_closed(&w.term).unwrap();
    let g = eval_closed(&parse_term("\\k:0. rec(0, \\i:0. \\a:0. succ(succ(a))) k").unwrap()).unwrap();
    for n in [1, 5, 10] {
        println!("t(2k, {n}) = {}", apply(&t, [g.clone(), TValue::nat(n)]).unwrap());
    }

    let sweep = cri_sweep(&[RealFunction::square()], 10, 50, 0).unwrap();
    for c in &sweep.cells {
        println!("n={:2} mesh<1/{:2}: worst |S-S'| = {:.5} (tolerance {})", c.n, c.mesh_bound, c.max_deviation_approx, c.tolerance);
    }
}
