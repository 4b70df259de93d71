//! Capped search and the two translations between it and convergence moduli.

use nsakit::analysis::{check_mct_window, mct_modulus, mu_from_mct, mu_search, NatFn, RealSequence, SearchOperator};

fn main() {
    let op = SearchOperator::default();
    for (name, c, k) in [("1 - 1/(n+1)", RealSequence::harmonic(), 10), ("1 - 2^-n", RealSequence::dyadic(), 8)] {
        let n = mct_modulus(&c, op, k).unwrap();
        let w = check_mct_window(&c, n, k, op.cap, 200, 0);
        println!("{name}: k={k} N={n}, window {} pairs, {} failures", w.pairs, w.failures);
    }
    let t = |c: &RealSequence, k| mct_modulus(c, op, k);
    for f in [NatFn::FirstZero { at: 7 }, NatFn::Square { t: 300 }, NatFn::Never, NatFn::FirstZero { at: 20_000 }] {
        println!("{f:?}: search {:?}, via modulus {:?}", mu_search(|n| f.eval(n), op), mu_from_mct(t, f.as_rc(), op.cap).unwrap());
    }
}
