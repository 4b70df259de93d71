use nsakit::analysis::*;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn library_codes_meet_their_modulus() {
    let xs = [RealCode::sqrt(q(1, 2)), RealCode::rational(q(2, 3)), RealCode::sqrt(q(1, 5))];
    for f in RealFunction::library() {
        for x in &xs {
            let y = f.apply(x);
            for n in 0..=32 {
                for m in n..=32 {
                    assert!((y.at(n) - y.at(m)).abs() <= dyadic(n), "{} at {n},{m}", f.name);
                }
            }
        }
    }
}

#[test]
fn declared_moduli_hold_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in RealFunction::library() {
        let g = f.modulus.unwrap();
        for k in 1..=20u64 {
            for _ in 0..100 {
                use rand::Rng;
                let x = q(rng.gen_range(0..=1 << 20), 1 << 20);
                let d = q(rng.gen_range(0..1 << 20), (g.at(k) as i64) << 20);
                let y = clamp01(&x + d);
                assert!((f.exact(&x) - f.exact(&y)).abs() <= q(1, k as i64) + dyadic(20), "{} k={k}", f.name);
            }
        }
    }
}

#[test]
fn refinement_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in RealFunction::library() {
        let g = f.modulus.unwrap();
        for k in 1..=8 {
            for _ in 0..20 {
                let (p, p2) = (Partition::random(&mut rng, g.at(k)), Partition::random(&mut rng, g.at(k)));
                let r = p.common_refinement(&p2);
                let d = (riemann_sum(&f, &p, 24) - riemann_sum(&f, &r, 24)).abs();
                assert!(d <= q(1, k as i64), "{} k={k}", f.name);
            }
        }
    }
}

#[test]
fn cri_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (p, p2) = (Partition::random(&mut rng, 12), Partition::random(&mut rng, 12));
    assert!(check_cri(&RealFunction::square(), 3, &p, &p2).unwrap().holds);
    let c = RealFunction::constant(q(5, 9));
    for n in 1..10 {
        let out = check_cri(&c, n, &Partition::uniform(3, Tag::Right), &Partition::uniform(7, Tag::Mid)).unwrap();
        assert!(out.holds && out.deviation == q(0, 1));
    }
}

#[test]
fn sweep_is_deterministic_and_passes() {
    let a = cri_sweep(&RealFunction::library(), 4, 20, 9).unwrap();
    let b = cri_sweep(&RealFunction::library(), 4, 20, 9).unwrap();
    assert!(a.passed);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn mct_window_and_round_trip() {
    let op = SearchOperator::default();
    for (c, k) in [(RealSequence::harmonic(), 10), (RealSequence::dyadic(), 8), (RealSequence::harmonic(), 3)] {
        let n = mct_modulus(&c, op, k).unwrap();
        assert_eq!(check_mct_window(&c, n, k, op.cap, 500, 1).failures, 0);
    }
    let t = |c: &RealSequence, k| mct_modulus(c, op, k);
    for f in NatFn::corpus(42, 50, op.cap) {
        let direct = mu_search(|n| f.eval(n), op);
        let via = mu_from_mct(t, f.as_rc(), op.cap).unwrap();
        assert_eq!(direct, via, "{f:?}");
        assert_eq!(direct.found(), f.first_zero().filter(|z| *z <= op.cap));
    }
}

#[test]
fn mct_sequences_are_monotone_and_bounded() {
    for c in [RealSequence::harmonic(), RealSequence::dyadic()] {
        for n in 0..200 {
            let (a, b) = (c.at(n).at(30), c.at(n + 1).at(30));
            assert!(a <= b && b <= q(1, 1));
        }
    }
}

proptest! {
    #[test]
    fn mesh_is_the_widest_cell(seed in any::<u64>(), m in 1u64..30) {
        let p = Partition::random(&mut ChaCha8Rng::seed_from_u64(seed), m);
        let brute = p.points().windows(2).map(|w| &w[1] - &w[0]).fold(q(0, 1), |a, b| if b > a { b } else { a });
        prop_assert_eq!(mesh(&p), brute.clone());
        prop_assert!(brute < q(1, m as i64));
        prop_assert!(Partition::new(p.points().to_vec(), p.tags().to_vec()).is_ok());
    }

    #[test]
    fn integration_modulus_is_monotone(a in 1u64..50, n in 1u64..100, d in 0u64..100) {
        let g = |k| a * k;
        prop_assert!(integration_modulus(g, n) <= integration_modulus(g, n + d));
    }
}
