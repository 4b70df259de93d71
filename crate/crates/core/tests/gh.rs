use std::time::Instant;

use nsakit::gh::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn library_suite_passes() {
    let lib = Library::bundled();
    let t = Instant::now();
    let report = gh_suite(&lib.gh, 3, 3, 16, 8);
    assert!(report.passed, "{:#?}", report.cells.iter().filter(|c| !c.passed()).collect::<Vec<_>>());
    assert!(!report.cap_hit);
    assert_eq!(report.cells.len(), lib.gh.len() * 40);
    for c in &report.cells {
        assert!(c.threshold.unwrap() <= c.s.len() as u64 + 5, "{c:?}");
    }
    eprintln!("gh suite: {:?}", t.elapsed());
}

#[test]
fn sum01_at_the_empty_sequence_is_one() {
    let y = Library::bundled().get("sum01").unwrap().clone();
    let v = gh_value(&y, &[], 16).unwrap();
    assert_eq!(v.value, 1);
    assert!(v.certified_at <= 3);
    for n in v.certified_at..=v.certified_at + 8 {
        assert_eq!(gh_approx(&y, &[], n), 1);
    }
}

#[test]
fn bounded_hop_matches_deep_reference() {
    let y = Library::bundled().get("hop").unwrap().clone();
    let v = gh_value(&y, &[], 16).unwrap();
    assert_eq!(v.value, gh_approx_reference(&y, &[], 6));
    assert_eq!(v.value, gh_approx(&y, &[], 10));
}

#[test]
fn fan_contract_on_the_library() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in Library::bundled().fan {
        let m = fan_modulus(&g, 12).unwrap();
        assert!(m.n <= 3, "{}", g.name);
        for bits in 0..1u64 << m.n {
            let sigma: Vec<u64> = (0..m.n).map(|i| (bits >> i) & 1).collect();
            let base = g.eval(&FinitePrefix::zeros(sigma.clone()));
            assert!(base <= m.b);
            for _ in 0..20 {
                let tail: Vec<u64> = (0..10).map(|_| rng.gen_range(0..2)).collect();
                let alpha = FinitePrefix::zeros(sigma.iter().chain(&tail).copied().collect());
                assert_eq!(g.eval(&alpha), base, "{}", g.name);
            }
        }
    }
}

#[test]
fn fan_suite_with_exhaustive_constants() {
    let mut gs = Library::bundled().fan;
    gs.extend((0..=12).map(Functional::constant));
    let t = Instant::now();
    let report = fan_suite(&gs, 100, 8, 12, 7);
    assert!(report.passed && !report.cap_hit);
    assert!(report.cells.iter().any(|c| c.antecedent_held > 0));
    assert!(t.elapsed().as_secs() < 30);
}

#[test]
fn forced_cap_is_reported() {
    let g = Library::bundled().get("sum01").unwrap().clone();
    let report = fan_suite(&[g], 5, 8, 1, 0);
    assert!(report.cap_hit && !report.passed);
}

#[test]
fn suites_are_deterministic() {
    let lib = Library::bundled();
    let a = serde_json::to_string(&fan_suite(&lib.fan, 30, 8, 12, 3)).unwrap();
    let b = serde_json::to_string(&fan_suite(&lib.fan, 30, 8, 12, 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn library_json_round_trip() {
    let lib = Library::bundled();
    let f = &lib.gh[0];
    let back: Functional = serde_json::from_str(&serde_json::to_string(f).unwrap()).unwrap();
    assert_eq!(&back, f);
}

proptest! {
    #[test]
    fn instrumented_evaluation_agrees(seq in proptest::collection::vec(0u64..5, 0..8), fill in 0u64..3) {
        let p = FinitePrefix { seq, fill };
        for y in Library::bundled().gh {
            let (v, reach) = y.eval_instrumented(&p);
            prop_assert_eq!(v, y.eval(&p));
            let cut: Vec<u64> = (0..reach).map(|i| p.query(i)).collect();
            prop_assert_eq!(y.eval(&FinitePrefix { seq: cut, fill: fill + 1 }), v);
        }
    }

    #[test]
    fn gh_memo_matches_reference(s in proptest::collection::vec(0u64..3, 0..3), m in 0u64..5) {
        for y in Library::bundled().gh {
            prop_assert_eq!(gh_approx(&y, &s, m), gh_approx_reference(&y, &s, m));
        }
    }
}
