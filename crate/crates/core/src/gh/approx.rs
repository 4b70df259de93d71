use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use serde::Serialize;

use super::{BaireOracle, FinitePrefix, Functional, GhError};

/// One canonical-approximation call tree, memoized per sequence.
///
/// A node is certified when no stopping leaf below it let the functional
/// read into the zero fill.
struct Approx<'a> {
    y: &'a Functional,
    m: u64,
    memo: RefCell<HashMap<Vec<u64>, (u64, bool)>>,
}

/// `s`, then 0, then the approximation at each one-step extension.
struct Unfolded<'a, 'b> {
    ctx: &'b Approx<'a>,
    s: &'b [u64],
    clean: Cell<bool>,
}

impl BaireOracle for Unfolded<'_, '_> {
    fn query(&self, i: u64) -> u64 {
        let len = self.s.len() as u64;
        if i < len {
            return self.s[i as usize];
        }
        if i == len {
            return 0;
        }
        let mut child = self.s.to_vec();
        child.push(i - len);
        let (v, ok) = self.ctx.node(&child);
        self.clean.set(self.clean.get() && ok);
        v
    }
}

impl Approx<'_> {
    fn node(&self, s: &[u64]) -> (u64, bool) {
        if let Some(&hit) = self.memo.borrow().get(s) {
            return hit;
        }
        let out = if s.len() as u64 >= self.m {
            let (v, reach) = self.y.eval_instrumented(&FinitePrefix::zeros(s.to_vec()));
            (v, reach <= s.len() as u64)
        } else {
            let h = Unfolded { ctx: self, s, clean: Cell::new(true) };
            let v = self.y.eval(&h);
            (v, h.clean.get())
        };
        self.memo.borrow_mut().insert(s.to_vec(), out);
        out
    }
}

fn approx_certified(y: &Functional, s: &[u64], m: u64) -> (u64, bool) {
    Approx { y, m, memo: RefCell::new(HashMap::new()) }.node(s)
}

/// Canonical approximation stopping at sequences of length `m`.
pub fn gh_approx(y: &Functional, s: &[u64], m: u64) -> u64 {
    approx_certified(y, s, m).0
}

/// Unmemoized, uninstrumented unfolding of the same recursion, for
/// cross-checks at small depth.
pub fn gh_approx_reference(y: &Functional, s: &[u64], m: u64) -> u64 {
    struct H<'a> {
        y: &'a Functional,
        s: &'a [u64],
        m: u64,
    }
    impl BaireOracle for H<'_> {
        fn query(&self, i: u64) -> u64 {
            let len = self.s.len() as u64;
            match i {
                i if i < len => self.s[i as usize],
                i if i == len => 0,
                i => {
                    let mut t = self.s.to_vec();
                    t.push(i - len);
                    gh_approx_reference(self.y, &t, self.m)
                }
            }
        }
    }
    if s.len() as u64 >= m {
        y.eval(&FinitePrefix::zeros(s.to_vec()))
    } else {
        y.eval(&H { y, s, m })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GhValue {
    pub value: u64,
    /// Least depth whose approximation is certified; every deeper one agrees.
    pub certified_at: u64,
}

/// Value of the Gandy-Hyland functional at `s`, read off the first
/// certified approximation.
pub fn gh_value(y: &Functional, s: &[u64], max_depth: u64) -> Result<GhValue, GhError> {
    (0..=max_depth)
        .find_map(|m| match approx_certified(y, s, m) {
            (value, true) => Some(GhValue { value, certified_at: m }),
            _ => None,
        })
        .ok_or(GhError::DepthExceeded { max_depth })
}

pub fn gh_threshold(y: &Functional, s: &[u64], max_depth: u64) -> Result<u64, GhError> {
    gh_value(y, s, max_depth).map(|v| v.certified_at)
}

/// Checks `gamma(s) = Y(s * 0 * (n -> gamma(s * (n+1))))` exactly.
pub fn check_gh_equation(y: &Functional, s: &[u64], gamma: impl Fn(&[u64]) -> Option<u64>) -> Result<bool, GhError> {
    struct G<'a, F> {
        s: &'a [u64],
        gamma: &'a F,
        missing: RefCell<Option<Vec<u64>>>,
    }
    impl<F: Fn(&[u64]) -> Option<u64>> BaireOracle for G<'_, F> {
        fn query(&self, i: u64) -> u64 {
            let len = self.s.len() as u64;
            if i < len {
                return self.s[i as usize];
            }
            if i == len {
                return 0;
            }
            let mut t = self.s.to_vec();
            t.push(i - len);
            (self.gamma)(&t).unwrap_or_else(|| {
                self.missing.borrow_mut().get_or_insert(t);
                0
            })
        }
    }
    let lhs = gamma(s).ok_or_else(|| GhError::GammaUndefined { seq: s.to_vec() })?;
    let h = G { s, gamma: &gamma, missing: RefCell::new(None) };
    let rhs = y.eval(&h);
    match h.missing.into_inner() {
        Some(seq) => Err(GhError::GammaUndefined { seq }),
        None => Ok(lhs == rhs),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhCell {
    pub functional: String,
    pub s: Vec<u64>,
    pub value: Option<u64>,
    pub threshold: Option<u64>,
    /// Approximations agree on `[threshold, threshold + window]`.
    pub stable: bool,
    pub equation: bool,
    /// An off-by-one gamma at `s` fails the equation.
    pub fault_rejected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl GhCell {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.stable && self.equation && self.fault_rejected
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhReport {
    pub max_depth: u64,
    pub window: u64,
    pub max_len: usize,
    pub alphabet: u64,
    pub cells: Vec<GhCell>,
    pub cap_hit: bool,
    pub passed: bool,
}

/// All sequences over `0..alphabet` of length at most `max_len`, shortest first.
fn sequences(max_len: usize, alphabet: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<u64>| (0..alphabet).map(move |a| s.iter().copied().chain([a]).collect::<Vec<_>>()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Stabilization, fixed-point and fault-injection checks for every
/// functional and every short sequence.
pub fn gh_suite(ys: &[Functional], max_len: usize, alphabet: u64, max_depth: u64, window: u64) -> GhReport {
    let mut cells = Vec::new();
    for y in ys {
        let cache: RefCell<HashMap<Vec<u64>, Option<u64>>> = RefCell::new(HashMap::new());
        let gamma = |t: &[u64]| -> Option<u64> {
            if let Some(&v) = cache.borrow().get(t) {
                return v;
            }
            let v = gh_value(y, t, max_depth).ok().map(|v| v.value);
            cache.borrow_mut().insert(t.to_vec(), v);
            v
        };
        for s in sequences(max_len, alphabet) {
            let mut cell = GhCell {
                functional: y.name.clone(),
                s: s.clone(),
                value: None,
                threshold: None,
                stable: false,
                equation: false,
                fault_rejected: false,
                error: None,
            };
            match gh_value(y, &s, max_depth) {
                Err(e) => cell.error = Some(e.to_string()),
                Ok(v) => {
                    cell.value = Some(v.value);
                    cell.threshold = Some(v.certified_at);
                    let top = v.certified_at + window;
                    cell.stable = (v.certified_at..=top).all(|m| gh_approx(y, &s, m) == v.value);
                    match check_gh_equation(y, &s, gamma) {
                        Ok(ok) => cell.equation = ok,
                        Err(e) => cell.error = Some(e.to_string()),
                    }
                    let faulty = |t: &[u64]| gamma(t).map(|g| if t == s.as_slice() { g + 1 } else { g });
                    cell.fault_rejected = check_gh_equation(y, &s, faulty) == Ok(false);
                }
            }
            cells.push(cell);
        }
    }
    let cap_hit = cells.iter().any(|c| c.error.as_deref().is_some_and(|e| e.starts_with("no certified")));
    let passed = cells.iter().all(GhCell::passed);
    GhReport { max_depth, window, max_len, alphabet, cells, cap_hit, passed }
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Library};
    use super::*;

    fn sum01() -> Functional {
        Library::bundled().get("sum01").unwrap().clone()
    }

    #[test]
    fn worked_example() {
        let y = sum01();
        assert_eq!(gh_approx(&y, &[], 3), 1);
        assert_eq!(gh_approx(&y, &[1], 3), 1);
        assert_eq!(gh_approx_reference(&y, &[], 3), 1);
        let v = gh_value(&y, &[], 16).unwrap();
        assert_eq!(v.value, 1);
        assert!(v.certified_at <= 3);
    }

    #[test]
    fn stopping_clause_and_constants() {
        let f0 = Functional::new("f0", Expr::Proj { at: 0 });
        assert_eq!(gh_approx(&f0, &[], 0), 0);
        let c = Functional::constant(4);
        for m in 0..5 {
            assert_eq!(gh_approx(&c, &[2, 2], m), 4);
        }
        assert_eq!(gh_value(&c, &[], 16).unwrap(), GhValue { value: 4, certified_at: 0 });
        assert_eq!(gh_threshold(&c, &[], 16), Ok(0));
    }

    #[test]
    fn memo_agrees_with_reference() {
        for y in Library::bundled().gh {
            for s in sequences(2, 3) {
                for m in 0..6 {
                    assert_eq!(gh_approx(&y, &s, m), gh_approx_reference(&y, &s, m), "{} {s:?} {m}", y.name);
                }
            }
        }
    }

    #[test]
    fn unbounded_lookahead_exceeds_the_depth() {
        // reads position f(0)+1 with no bound: each level looks one further
        let y = Functional::new(
            "far",
            Expr::Lookup {
                index: Box::new(Expr::Sum { terms: vec![Expr::Proj { at: 0 }, Expr::Const { value: 7 }] }),
                bound: u64::MAX,
            },
        );
        assert_eq!(gh_value(&y, &[], 5), Err(GhError::DepthExceeded { max_depth: 5 }));
    }

    #[test]
    fn equation_and_fault() {
        let c = Functional::constant(2);
        assert_eq!(check_gh_equation(&c, &[1], |_| Some(2)), Ok(true));
        assert_eq!(check_gh_equation(&c, &[1], |_| Some(3)), Ok(false));
        let y = sum01();
        let e = check_gh_equation(&y, &[], |t| t.is_empty().then_some(1));
        assert_eq!(e, Err(GhError::GammaUndefined { seq: vec![1] }));
    }
}
