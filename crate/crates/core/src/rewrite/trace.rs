use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{apply_rule, Direction, RewriteError, Rule};
use crate::lang::{parse, print, Formula, Path};

/// Term-level action a rule leaves for the witness extractor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum WitnessOp {
    /// Definition unfolding; `st(t)` expansions record `v := t`.
    Expand { bindings: Vec<StBinding> },
    Prenex,
    /// Antecedent existentials replaced by applications of fresh standard functions.
    Abstract { functions: Vec<Abstraction> },
    DropSt { var: String },
    /// Standard existentials gathered into standard finite sequences.
    Sequence { groups: Vec<SeqGroup> },
    /// `var := max(seq)` (upward) or `var := 0` (downward).
    Max { seq: String, var: String, direction: Direction, collapsed: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StBinding {
    pub var: String,
    pub term: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abstraction {
    pub fun: String,
    pub replaces: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqGroup {
    pub seq: String,
    pub vars: Vec<String>,
    pub direction: Option<Direction>,
}

impl WitnessOp {
    pub fn id(&self) -> &'static str {
        match self {
            WitnessOp::Expand { .. } => "expand",
            WitnessOp::Prenex => "prenex",
            WitnessOp::Abstract { .. } => "abstract",
            WitnessOp::DropSt { .. } => "drop_st",
            WitnessOp::Sequence { .. } => "sequence",
            WitnessOp::Max { .. } => "max",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: Rule,
    pub path: Path,
    #[serde(serialize_with = "ser_formula", deserialize_with = "de_formula")]
    pub before: Formula,
    #[serde(serialize_with = "ser_formula", deserialize_with = "de_formula")]
    pub after: Formula,
    pub witness_op: WitnessOp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteTrace {
    #[serde(serialize_with = "ser_formula", deserialize_with = "de_formula")]
    pub initial: Formula,
    #[serde(rename = "final", serialize_with = "ser_formula", deserialize_with = "de_formula")]
    pub final_formula: Formula,
    pub steps: Vec<RewriteStep>,
}

fn ser_formula<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&print(f))
}

fn de_formula<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
    let src = String::deserialize(d)?;
    parse(&src).map_err(serde::de::Error::custom)
}

impl RewriteTrace {
    pub fn empty(f: Formula) -> RewriteTrace {
        RewriteTrace { initial: f.clone(), final_formula: f, steps: Vec::new() }
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(src: &str) -> Result<RewriteTrace, serde_json::Error> {
        serde_json::from_str(src)
    }

    /// Re-applies every step to its `before` and checks the chain:
    /// each result equals the recorded `after`, each `before` equals the
    /// previous `after`, and the last `after` is `final`.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let mut cur = self.initial.clone();
        for (i, step) in self.steps.iter().enumerate() {
            if step.before != cur {
                return Err(ReplayError::Chain { step: i });
            }
            let out = apply_rule(&step.before, step.rule, &step.path, &step.witness_op)
                .map_err(|e| ReplayError::Rule { step: i, error: e })?;
            if out != step.after {
                return Err(ReplayError::Mismatch { step: i });
            }
            cur = out;
        }
        if cur != self.final_formula {
            return Err(ReplayError::Final);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("step {step}: `before` differs from the previous formula")]
    Chain { step: usize },
    #[error("step {step}: {error}")]
    Rule { step: usize, error: RewriteError },
    #[error("step {step}: replay result differs from `after`")]
    Mismatch { step: usize },
    #[error("last step does not produce the final formula")]
    Final,
}
