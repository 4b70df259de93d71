//! Finite two-level models: a small type-0 universe with a designated
//! standard fragment, used as a brute-force oracle for rewrite soundness.

mod check;
mod eval;
mod random;

pub use check::{check_step, check_trace, sweep_models, Counterexample, StepReport, Verdict};
pub use eval::{eval_formula, Env, Evaluator, Value};
pub use random::{random_formula, random_model, random_rule_instance, random_suite, ModelBounds};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lang::formula::is_builtin_relation;
use crate::lang::Formula;
use crate::rewrite::RewriteError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoLevelModel {
    #[serde(rename = "U")]
    pub u: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "seqBound")]
    pub seq_bound: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Relation>,
    /// Seeds the fixed interpretation of free function symbols of unenumerable type.
    #[serde(default)]
    pub salt: u64,
}

/// Interpretation of a relation symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Relation {
    /// Truth table over type-0 arguments, index `a0 + a1*U + a2*U^2 + ...`.
    Table(Vec<bool>),
    Named(NamedRelation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NamedRelation {
    /// `R(x, y, n)` iff `n * |x - y| < U`: reals `x/U` closer than `1/n`.
    DistLt,
    /// `R(p, a)` iff `a * p < U`: a mesh `p/U` below `1/a`.
    ScaledLt,
    /// Pseudo-random but fixed table over arguments of any type.
    Hashed { salt: u64 },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("uninterpreted symbol `{0}`")]
    Uninterpreted(String),
    #[error("quantifier type {0} is outside the checkable fragment (0, 0*, 0->0)")]
    UnsupportedType(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition: {0}")]
    Precondition(#[from] RewriteError),
}

impl TwoLevelModel {
    /// Validates `1 <= S <= U <= 6` and `seqBound >= S`.
    pub fn new(u: usize, s: usize, seq_bound: usize) -> Result<TwoLevelModel, ModelError> {
        let m = TwoLevelModel { u, s, seq_bound, relations: BTreeMap::new(), salt: 0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(1 <= self.s && self.s <= self.u && self.u <= 6) {
            return Err(ModelError::Invalid(format!("need 1 <= S <= U <= 6, got U={} S={}", self.u, self.s)));
        }
        if self.seq_bound < self.s {
            return Err(ModelError::Invalid(format!("seqBound {} is below S {}", self.seq_bound, self.s)));
        }
        for (name, rel) in &self.relations {
            if let Relation::Table(t) = rel {
                let mut size = 1;
                while size < t.len() {
                    size *= self.u;
                }
                if size != t.len() || t.is_empty() {
                    return Err(ModelError::Invalid(format!("table for `{name}` has length {}, not a power of U", t.len())));
                }
            }
        }
        Ok(())
    }

    pub fn with_salt(mut self, salt: u64) -> TwoLevelModel {
        self.salt = salt;
        self
    }

    pub fn with_relation(mut self, name: impl Into<String>, rel: Relation) -> TwoLevelModel {
        self.relations.insert(name.into(), rel);
        self
    }

    /// Interprets every undeclared relation symbol of `formulas`: `closeR` as
    /// [`NamedRelation::DistLt`], `meshLt` as [`NamedRelation::ScaledLt`], the rest hashed.
    pub fn interpret_defaults<'a>(&mut self, formulas: impl IntoIterator<Item = &'a Formula>) {
        for f in formulas {
            let mut syms = f.relation_symbols();
            if f.paths().iter().any(|p| matches!(f.at(p), Some(Formula::ApproxReal(..)))) {
                syms.insert("closeR".to_string());
            }
            for sym in syms {
                if is_builtin_relation(&sym) || self.relations.contains_key(&sym) {
                    continue;
                }
                let rel = match sym.as_str() {
                    "closeR" => NamedRelation::DistLt,
                    "meshLt" => NamedRelation::ScaledLt,
                    _ => NamedRelation::Hashed { salt: self.salt },
                };
                self.relations.insert(sym, Relation::Named(rel));
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(src: &str) -> Result<TwoLevelModel, ModelError> {
        let m: TwoLevelModel = serde_json::from_str(src).map_err(|e| ModelError::Invalid(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}

/// Streaming 64-bit digest; stable across runs and platforms.
#[derive(Clone, Copy)]
pub(crate) struct Mix(u64);

impl Mix {
    pub(crate) fn new(seed: u64) -> Mix {
        Mix(seed ^ 0x9e37_79b9_7f4a_7c15)
    }

    pub(crate) fn push(&mut self, w: u64) {
        let mut h = self.0 ^ w.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(self.0 << 6).wrapping_add(self.0 >> 2);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        self.0 = h ^ (h >> 31);
    }

    pub(crate) fn push_str(&mut self, s: &str) {
        s.bytes().for_each(|b| self.push(u64::from(b)));
    }

    pub(crate) fn finish(self) -> u64 {
        self.0
    }
}
