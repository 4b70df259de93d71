//! Type-two functionals over instrumented oracles: the canonical
//! approximation of the Gandy-Hyland functional, and uniform moduli
//! and the special fan construction on Cantor space.

mod approx;
mod fan;

pub use approx::{
    check_gh_equation, gh_approx, gh_approx_reference, gh_suite, gh_threshold, gh_value, GhCell, GhReport, GhValue,
};
pub use fan::{fan_modulus, fan_suite, special_fan, verify_scf, BinaryTree, FanCell, FanModulus, FanReport, SpecialFanOutput};

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GhError {
    #[error("no certified value up to depth {max_depth}")]
    DepthExceeded { max_depth: u64 },
    #[error("gamma is undefined on {seq:?}")]
    GammaUndefined { seq: Vec<u64> },
}

/// A point of Baire space, queried position by position.
pub trait BaireOracle {
    fn query(&self, i: u64) -> u64;
}

/// `seq` followed by `fill` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePrefix {
    pub seq: Vec<u64>,
    pub fill: u64,
}

impl FinitePrefix {
    pub fn zeros(seq: Vec<u64>) -> FinitePrefix {
        FinitePrefix { seq, fill: 0 }
    }
}

impl BaireOracle for FinitePrefix {
    fn query(&self, i: u64) -> u64 {
        usize::try_from(i).ok().and_then(|i| self.seq.get(i)).copied().unwrap_or(self.fill)
    }
}

pub struct Computed(pub Rc<dyn Fn(u64) -> u64>);

impl BaireOracle for Computed {
    fn query(&self, i: u64) -> u64 {
        (self.0)(i)
    }
}

/// Records how far into the oracle an evaluation looked.
struct Recording<'a> {
    inner: &'a dyn BaireOracle,
    reach: Cell<u64>,
}

impl BaireOracle for Recording<'_> {
    fn query(&self, i: u64) -> u64 {
        self.reach.set(self.reach.get().max(i + 1));
        self.inner.query(i)
    }
}

/// Expression language for the functionals; `f` is the oracle argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const { value: u64 },
    /// `f(at)`
    Proj { at: u64 },
    Sum { terms: Vec<Expr> },
    /// `f(min(index, bound))`
    Lookup { index: Box<Expr>, bound: u64 },
    /// Least `i < cap` with `f(i) = 1`, or `cap`.
    FirstOne { cap: u64 },
}

impl Expr {
    fn eval(&self, f: &dyn BaireOracle) -> u64 {
        match self {
            Expr::Const { value } => *value,
            Expr::Proj { at } => f.query(*at),
            Expr::Sum { terms } => terms.iter().map(|t| t.eval(f)).sum(),
            Expr::Lookup { index, bound } => f.query(index.eval(f).min(*bound)),
            Expr::FirstOne { cap } => (0..*cap).find(|&i| f.query(i) == 1).unwrap_or(*cap),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const { value } => write!(f, "{value}"),
            Expr::Proj { at } => write!(f, "f({at})"),
            Expr::Sum { terms } if terms.is_empty() => f.write_str("0"),
            Expr::Sum { terms } => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                f.write_str(&parts.join(" + "))
            }
            Expr::Lookup { index, bound } => write!(f, "f(min({index}, {bound}))"),
            Expr::FirstOne { cap } => write!(f, "first1(f, {cap})"),
        }
    }
}

/// A named type-two functional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional {
    pub name: String,
    pub expr: Expr,
}

impl Functional {
    pub fn new(name: impl Into<String>, expr: Expr) -> Functional {
        Functional { name: name.into(), expr }
    }

    pub fn constant(c: u64) -> Functional {
        Functional::new(format!("const{c}"), Expr::Const { value: c })
    }

    pub fn eval(&self, f: &dyn BaireOracle) -> u64 {
        self.expr.eval(f)
    }

    /// Value together with one past the largest queried position.
    pub fn eval_instrumented(&self, f: &dyn BaireOracle) -> (u64, u64) {
        let rec = Recording { inner: f, reach: Cell::new(0) };
        let v = self.expr.eval(&rec);
        (v, rec.reach.get())
    }
}

/// Named functionals loaded from the bundled JSON library.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Library {
    /// Continuous functionals on Baire space for the Gandy-Hyland suite.
    pub gh: Vec<Functional>,
    /// Functionals on Cantor space for the fan suite.
    pub fan: Vec<Functional>,
}

impl Library {
    pub fn bundled() -> Library {
        Library::from_json(include_str!("../../corpus/functionals.json")).expect("bundled library parses")
    }

    pub fn from_json(src: &str) -> Result<Library, serde_json::Error> {
        let raw: BTreeMap<String, BTreeMap<String, Expr>> = serde_json::from_str(src)?;
        let section = |k: &str| {
            raw.get(k)
                .map(|m| m.iter().map(|(n, e)| Functional::new(n.clone(), e.clone())).collect())
                .unwrap_or_default()
        };
        Ok(Library { gh: section("gh"), fan: section("fan") })
    }

    pub fn get(&self, name: &str) -> Option<&Functional> {
        self.gh.iter().chain(&self.fan).find(|f| f.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instrumentation_matches_plain_evaluation() {
        let lib = Library::bundled();
        let points = [FinitePrefix::zeros(vec![]), FinitePrefix::zeros(vec![3, 1, 4, 1, 5]), FinitePrefix {
            seq: vec![1],
            fill: 2,
        }];
        for y in lib.gh.iter().chain(&lib.fan) {
            for p in &points {
                assert_eq!(y.eval_instrumented(p).0, y.eval(p), "{}", y.name);
            }
        }
    }

    #[test]
    fn values_depend_only_on_the_queried_prefix() {
        let lib = Library::bundled();
        let p = FinitePrefix { seq: vec![2, 0, 1, 3, 1, 0], fill: 7 };
        for y in &lib.gh {
            let (v, reach) = y.eval_instrumented(&p);
            let cut = FinitePrefix::zeros(p.seq.iter().copied().chain(std::iter::repeat(7)).take(reach as usize).collect());
            assert_eq!(y.eval(&cut), v, "{}", y.name);
        }
    }

    #[test]
    fn first_one() {
        let y = Functional::new("first", Expr::FirstOne { cap: 5 });
        assert_eq!(y.eval_instrumented(&FinitePrefix::zeros(vec![0, 0, 1])), (2, 3));
        assert_eq!(y.eval_instrumented(&FinitePrefix::zeros(vec![])), (5, 5));
    }
}
