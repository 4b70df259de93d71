//! Rewrite rules R1-R6 that drive an external formula to the shape
//! `(forall^st x)(exists^st y) internal`, recording a replayable trace.

mod normalize;
mod rules;
mod trace;

pub use normalize::{is_normal_form, normalize, normal_prefix, Normalized};
pub use rules::{
    apply_rule, drop_st, expand_definitions, herbrandize_antecedent, idealise, idealise_groups, max_collapse,
    pull_at, pull_standard_quantifiers, r5_redexes, StdBinder,
};
pub(crate) use rules::expand_with_bindings;
pub use trace::{Abstraction, ReplayError, RewriteStep, RewriteTrace, SeqGroup, StBinding, WitnessOp};

use serde::{Deserialize, Serialize};

use crate::lang::{Formula, Path};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The matrix stays true when the variable grows.
    Upward,
    /// The matrix stays true when the variable shrinks.
    Downward,
}

/// User-supplied monotonicity claim about a `0`-typed variable.
///
/// Never inferred. On an antecedent universal it also licenses R4.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneAnnotation {
    pub var: String,
    pub direction: Direction,
}

impl MonotoneAnnotation {
    pub fn new(var: impl Into<String>, direction: Direction) -> MonotoneAnnotation {
        MonotoneAnnotation { var: var.into(), direction }
    }
}

pub(crate) fn annotation_of<'a>(anns: &'a [MonotoneAnnotation], var: &str) -> Option<&'a MonotoneAnnotation> {
    anns.iter().find(|a| a.var == var)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RewriteError {
    #[error("{rule} does not apply at {path:?}: {reason}")]
    Precondition { rule: Rule, path: Path, reason: String },
    #[error("annotation on `{var}`: {reason}")]
    BadAnnotation { var: String, reason: String },
    #[error("stuck at {path:?}: {formula}")]
    Stuck { formula: Formula, path: Path, trace: Box<RewriteTrace> },
}

impl RewriteError {
    pub(crate) fn pre(rule: Rule, path: &[usize], reason: impl Into<String>) -> RewriteError {
        RewriteError::Precondition { rule, path: path.to_vec(), reason: reason.into() }
    }
}
