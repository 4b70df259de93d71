use std::cell::RefCell;
use std::rc::Rc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::real::{dyadic, q, RealCode, RealSequence, Q};
use super::AnalysisError;

/// Bounded stand-in for the unbounded search operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOperator {
    pub cap: u64,
}

impl Default for SearchOperator {
    fn default() -> SearchOperator {
        SearchOperator { cap: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Search {
    Found { index: u64 },
    /// No zero at or below the cap; says nothing beyond it.
    NotFound { cap: u64 },
}

impl Search {
    pub fn found(&self) -> Option<u64> {
        match *self {
            Search::Found { index } => Some(index),
            Search::NotFound { .. } => None,
        }
    }
}

/// Least `n <= cap` with `f(n) = 0`.
pub fn mu_search(f: impl Fn(u64) -> u64, op: SearchOperator) -> Search {
    match (0..=op.cap).find(|&n| f(n) == 0) {
        Some(index) => Search::Found { index },
        None => Search::NotFound { cap: op.cap },
    }
}

/// Convergence modulus of a monotone bounded sequence: the least `N` with
/// `c_cap - c_N <= 1/(2k)` at precision `2^-(k+2)`, so that any two terms
/// between `N` and the cap lie within `1/k`.
///
/// `N = cap` always qualifies, so an answer equal to the cap means the
/// window is trivial and callers should treat it as a cap hit.
pub fn mct_modulus(c: &RealSequence, op: SearchOperator, k: u64) -> Result<u64, AnalysisError> {
    assert!(k > 0, "k must be positive");
    let p = (k + 2).min(u32::MAX as u64 - 64) as u32;
    let top = c.at(op.cap).at(p);
    let tol = q(1, 2 * k as i64);
    let hit = mu_search(|n| u64::from(&top - c.at(n).at(p) > tol), op);
    hit.found().ok_or(AnalysisError::CapExceeded { cap: op.cap })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub pairs: usize,
    pub failures: usize,
}

/// Checks `|c_M - c_M'| <= 1/k` for `M = n` against every index up to the
/// cap, plus `extra` random pairs in the window.
pub fn check_mct_window(c: &RealSequence, n: u64, k: u64, cap: u64, extra: usize, seed: u64) -> WindowCheck {
    let p = (k + 8).min(u32::MAX as u64 - 64) as u32;
    let slack = dyadic(p - 1);
    let tol = q(1, k as i64);
    let ok = |a: u64, b: u64| (c.at(a).at(p) - c.at(b).at(p)).abs() + &slack <= tol;
    let mut failures = 0;
    let mut pairs = 0;
    for m in n..=cap {
        pairs += 1;
        failures += usize::from(!ok(n, m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(n..=cap), rng.gen_range(n..=cap));
        pairs += 1;
        failures += usize::from(!ok(a, b));
    }
    WindowCheck { pairs, failures }
}

/// Recovers a zero of `f` from a convergence-modulus functional `t`.
///
/// `c_n` is 1 once `f` has had a zero at or below `n`, else 0. A zero past
/// `t(c)(2)` would make `c` jump by more than `1/2` inside the window.
pub fn mu_from_mct(
    t: impl Fn(&RealSequence, u64) -> Result<u64, AnalysisError>,
    f: Rc<dyn Fn(u64) -> u64>,
    cap: u64,
) -> Result<Search, AnalysisError> {
    let c = zero_indicator(f.clone());
    let n = t(&c, 2)?;
    Ok(mu_search(|i| f(i), SearchOperator { cap: n.min(cap) }).found().map_or(Search::NotFound { cap }, |index| {
        Search::Found { index }
    }))
}

/// `c_n = 1` iff some `i <= n` has `f(i) = 0`. Scans incrementally.
fn zero_indicator(f: Rc<dyn Fn(u64) -> u64>) -> RealSequence {
    // (next index to scan, first zero)
    let state = Rc::new(RefCell::new((0u64, None::<u64>)));
    RealSequence::new(move |n| {
        let mut s = state.borrow_mut();
        while s.1.is_none() && s.0 <= n {
            if f(s.0) == 0 {
                s.1 = Some(s.0);
            }
            s.0 += 1;
        }
        let hit = s.1.is_some_and(|z| z <= n);
        RealCode::rational(if hit { Q::one() } else { Q::zero() })
    })
}

/// Test functions `N -> N` with known first zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NatFn {
    /// Counts down to a zero at `at`, zero afterwards.
    FirstZero { at: u64 },
    Never,
    /// Zero exactly on `n = r mod m`.
    Residue { m: u64, r: u64 },
    /// Zero once `n^2 >= t`.
    Square { t: u64 },
}

impl NatFn {
    pub fn eval(&self, n: u64) -> u64 {
        match *self {
            NatFn::FirstZero { at } => at.saturating_sub(n),
            NatFn::Never => 1,
            NatFn::Residue { m, r } => u64::from(n % m != r),
            NatFn::Square { t } => t.saturating_sub(n.saturating_mul(n)),
        }
    }

    pub fn first_zero(&self) -> Option<u64> {
        match *self {
            NatFn::FirstZero { at } => Some(at),
            NatFn::Never => None,
            NatFn::Residue { m, r } => (r < m).then_some(r),
            NatFn::Square { t } => Some((0..).find(|n: &u64| n * n >= t).unwrap()),
        }
    }

    pub fn as_rc(self) -> Rc<dyn Fn(u64) -> u64> {
        Rc::new(move |n| self.eval(n))
    }

    /// Boundary cases around `cap` followed by seeded random members.
    pub fn corpus(seed: u64, size: usize, cap: u64) -> Vec<NatFn> {
        let mut out = vec![
            NatFn::FirstZero { at: 0 },
            NatFn::FirstZero { at: 7 },
            NatFn::FirstZero { at: cap },
            NatFn::FirstZero { at: cap + 1 },
            NatFn::Never,
            NatFn::Residue { m: 5, r: 7 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < size {
            out.push(match rng.gen_range(0..3) {
                0 => NatFn::FirstZero { at: rng.gen_range(0..=2 * cap) },
                1 => {
                    let m = rng.gen_range(1..=3 * cap);
                    NatFn::Residue { m, r: rng.gen_range(0..m) }
                }
                _ => NatFn::Square { t: rng.gen_range(0..=cap * cap) },
            });
        }
        out.truncate(size);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_examples() {
        let op = SearchOperator { cap: 100 };
        assert_eq!(mu_search(|n| u64::from(n != 5), op), Search::Found { index: 5 });
        assert_eq!(mu_search(|_| 1, op), Search::NotFound { cap: 100 });
        assert_eq!(mu_search(|n| u64::from(n != 100), op), Search::Found { index: 100 });
    }

    #[test]
    fn modulus_examples() {
        let op = SearchOperator::default();
        let n = mct_modulus(&RealSequence::harmonic(), op, 10).unwrap();
        assert!(n <= 20, "{n}");
        assert_eq!(mct_modulus(&RealSequence::constant(q(1, 3)), op, 7).unwrap(), 0);
        assert!(mct_modulus(&RealSequence::dyadic(), op, 8).unwrap() <= 9);
    }

    #[test]
    fn slow_sequences_are_pushed_to_the_cap() {
        // 1 - 1/(n+1) needs N around 2k; with a cap of 10 only the trivial window is left
        let n = mct_modulus(&RealSequence::harmonic(), SearchOperator { cap: 10 }, 100).unwrap();
        assert_eq!(n, 10);
    }

    #[test]
    fn round_trip_examples() {
        let op = SearchOperator { cap: 1000 };
        let t = |c: &RealSequence, k| mct_modulus(c, op, k);
        let at7 = NatFn::FirstZero { at: 7 };
        assert_eq!(mu_from_mct(t, at7.as_rc(), op.cap).unwrap(), Search::Found { index: 7 });
        assert_eq!(mu_from_mct(t, NatFn::Never.as_rc(), op.cap).unwrap(), Search::NotFound { cap: 1000 });
        assert_eq!(mu_from_mct(t, NatFn::FirstZero { at: 0 }.as_rc(), op.cap).unwrap(), Search::Found { index: 0 });
    }
}
