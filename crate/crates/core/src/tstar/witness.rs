use std::collections::BTreeMap;

use serde::Serialize;

use crate::lang::{parse_term, FinType, Term};
use crate::rewrite::{normal_prefix, Direction, RewriteTrace, WitnessOp};

/// A standard existential whose witness the trace cannot compute by itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub name: String,
    pub ty: FinType,
    /// Type a base witness must have: curried over the final standard universals.
    pub expected: FinType,
}

/// Closed term computing one standard existential of the final normal form
/// from its standard universals, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub var: String,
    pub ty: FinType,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("final formula is not in normal form")]
    NotNormal,
    #[error("no base witness for obligation `{0}`")]
    MissingBase(String),
    #[error("base witness for `{obligation}` has type {found}, expected {expected}")]
    BaseType { obligation: String, expected: FinType, found: FinType },
    #[error("base witness for `{0}` is not closed")]
    NotClosed(String),
    #[error("recorded binding for `{var}` does not parse: {message}")]
    Binding { var: String, message: String },
}

enum Origin {
    Base,
    Max { seq: String, direction: Direction },
    Bound(String),
}

fn origin(trace: &RewriteTrace, var: &str) -> Origin {
    for step in trace.steps.iter().rev() {
        match &step.witness_op {
            WitnessOp::Max { seq, var: v, direction, .. } if v == var => {
                return Origin::Max { seq: seq.clone(), direction: *direction };
            }
            WitnessOp::Sequence { groups } if groups.iter().any(|g| g.seq == var) => return Origin::Base,
            WitnessOp::Expand { bindings } => {
                if let Some(b) = bindings.iter().find(|b| b.var == var) {
                    return Origin::Bound(b.term.clone());
                }
            }
            _ => {}
        }
    }
    Origin::Base
}

struct Ctx<'a> {
    trace: &'a RewriteTrace,
    alls: Vec<(String, FinType)>,
    base: Option<&'a BTreeMap<String, Term>>,
    found: Vec<Obligation>,
}

impl Ctx<'_> {
    fn expected(&self, ty: &FinType) -> FinType {
        let args: Vec<FinType> = self.alls.iter().map(|(_, t)| t.clone()).collect();
        FinType::curried(&args, ty.clone())
    }

    fn body(&mut self, var: &str, ty: &FinType) -> Result<Term, WitnessError> {
        match origin(self.trace, var) {
            Origin::Max { direction: Direction::Downward, .. } => Ok(Term::Zero),
            Origin::Max { seq, direction: Direction::Upward } => {
                Ok(Term::max_of(self.body(&seq, &FinType::seq(FinType::Nat))?))
            }
            Origin::Bound(src) => {
                parse_term(&src).map_err(|e| WitnessError::Binding { var: var.to_string(), message: e.to_string() })
            }
            Origin::Base => {
                let expected = self.expected(ty);
                if !self.found.iter().any(|o| o.name == var) {
                    self.found.push(Obligation { name: var.to_string(), ty: ty.clone(), expected: expected.clone() });
                }
                let Some(base) = self.base else { return Ok(Term::Zero) };
                let b = base.get(var).ok_or_else(|| WitnessError::MissingBase(var.to_string()))?;
                if !b.free_vars().is_empty() {
                    return Err(WitnessError::NotClosed(var.to_string()));
                }
                let found = b.type_of().map_err(|_| WitnessError::NotClosed(var.to_string()))?;
                if found != expected {
                    return Err(WitnessError::BaseType { obligation: var.to_string(), expected, found });
                }
                let args = self.alls.iter().map(|(x, t)| Term::var(x.clone(), t.clone()));
                Ok(Term::apps(b.clone(), args))
            }
        }
    }
}

fn run(trace: &RewriteTrace, base: Option<&BTreeMap<String, Term>>) -> Result<(Vec<Witness>, Vec<Obligation>), WitnessError> {
    let (alls, exs, matrix) = normal_prefix(&trace.final_formula);
    if !matrix.is_internal() {
        return Err(WitnessError::NotNormal);
    }
    let mut ctx = Ctx { trace, alls: alls.iter().map(|q| (q.var.clone(), q.ty.clone())).collect(), base, found: Vec::new() };
    let mut out = Vec::new();
    for y in &exs {
        let body = ctx.body(&y.var, &y.ty)?;
        let term = ctx.alls.iter().rev().fold(body, |acc, (x, t)| Term::lam(x.clone(), t.clone(), acc));
        out.push(Witness { var: y.var.clone(), ty: y.ty.clone(), term });
    }
    Ok((out, ctx.found))
}

/// Base witnesses `assemble_witness` needs for this trace.
pub fn obligations(trace: &RewriteTrace) -> Result<Vec<Obligation>, WitnessError> {
    run(trace, None).map(|(_, o)| o)
}

/// Witnesses for the final standard existentials, one per variable, composed
/// from the recorded transformers (`max`, `0`, `st` bindings) and `base`.
pub fn assemble_witness(trace: &RewriteTrace, base: &BTreeMap<String, Term>) -> Result<Vec<Witness>, WitnessError> {
    run(trace, Some(base)).map(|(w, _)| w)
}
