use std::collections::BTreeMap;

use serde::Serialize;

use super::eval::{Env, Evaluator, Value};
use super::{ModelError, TwoLevelModel};
use crate::lang::{FinType, Formula, QuantKind, Term};
use crate::rewrite::{idealise_groups, Direction, RewriteStep, RewriteTrace, Rule, WitnessOp};

/// Environments beyond this many are refused rather than silently sampled.
const MAX_ENVS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    /// An R6 step failed only because its monotonicity annotation is false in this model.
    Vacuous { reason: String },
    Counterexample(Counterexample),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// `after` true but `before` false (for rules checked as equivalences).
    pub converse: bool,
    pub env: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub rule: Rule,
    #[serde(flatten)]
    pub verdict: Verdict,
}

fn equivalence(rule: Rule) -> bool {
    matches!(rule, Rule::R1 | Rule::R2 | Rule::R6)
}

fn structural_precondition(step: &RewriteStep) -> Result<(), ModelError> {
    match (&step.rule, &step.witness_op) {
        (Rule::R5, WitnessOp::Sequence { groups }) => {
            idealise_groups(&step.before, &step.path, groups)?;
        }
        (Rule::R6, _) => match step.before.at(&step.path) {
            Some(Formula::Quant { kind: QuantKind::Exists, standard: true, ty: FinType::Seq(el), .. })
                if **el == FinType::Nat => {}
            _ => {
                return Err(crate::rewrite::RewriteError::Precondition {
                    rule: Rule::R6,
                    path: step.path.clone(),
                    reason: "not a standard existential over 0*".into(),
                }
                .into())
            }
        },
        _ => {}
    }
    Ok(())
}

/// Every assignment to the free variables of `fs`; unenumerable types get their fixed
/// opaque interpretation.
fn environments(ev: &Evaluator, fs: &[&Formula]) -> Result<Vec<Env>, ModelError> {
    let mut free: BTreeMap<String, FinType> = BTreeMap::new();
    for f in fs {
        free.extend(f.free_vars());
    }
    let mut envs: Vec<Env> = vec![Vec::new()];
    for (name, ty) in free {
        match ev.domain(&ty, false) {
            Ok(dom) => {
                if envs.len() * dom.len() > MAX_ENVS {
                    return Err(ModelError::Unsupported(format!("too many environments at `{name}`")));
                }
                let mut next = Vec::with_capacity(envs.len() * dom.len());
                for e in &envs {
                    for v in dom.iter() {
                        let mut e = e.clone();
                        e.push((name.clone(), v.clone()));
                        next.push(e);
                    }
                }
                envs = next;
            }
            Err(ModelError::UnsupportedType(_)) => {
                let v = ev.opaque(&name, &ty);
                envs.iter_mut().for_each(|e| e.push((name.clone(), v.clone())));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(envs)
}

fn show(env: &Env) -> Vec<(String, String)> {
    env.iter().map(|(n, v)| (n.clone(), v.to_string())).collect()
}

/// Checks `before -> after` (and the converse for R1, R2, R6) under every
/// assignment to the free variables.
pub fn check_step(m: &TwoLevelModel, step: &RewriteStep) -> Result<Verdict, ModelError> {
    structural_precondition(step)?;
    let ev = Evaluator::new(m);
    for mut env in environments(&ev, &[&step.before, &step.after])? {
        let b = ev.formula(&step.before, &mut env)?;
        let a = ev.formula(&step.after, &mut env)?;
        let converse = if b && !a {
            false
        } else if a && !b && equivalence(step.rule) {
            true
        } else {
            continue;
        };
        if step.rule == Rule::R6 {
            if let Some(reason) = annotation_failure(&ev, step)? {
                return Ok(Verdict::Vacuous { reason });
            }
        }
        return Ok(Verdict::Counterexample(Counterexample { converse, env: show(&env) }));
    }
    Ok(Verdict::Holds)
}

/// Looks for a pair `a < b` violating the recorded direction of some collapsed variable.
fn annotation_failure(ev: &Evaluator, step: &RewriteStep) -> Result<Option<String>, ModelError> {
    let WitnessOp::Max { seq, direction, collapsed, .. } = &step.witness_op else { return Ok(None) };
    let Some(node) = step.before.at(&step.path) else { return Ok(None) };
    for p in node.paths() {
        let Some(Formula::ElemOfSeq { var, seq: Term::Var(s, _), body, .. }) = node.at(&p) else { continue };
        if s != seq || !collapsed.contains(var) {
            continue;
        }
        let probe = Formula::forall(var.clone(), FinType::Nat, (**body).clone());
        let envs = environments(ev, &[&probe])?;
        for mut env in envs {
            let mut truth = Vec::with_capacity(ev.model.u);
            for y in 0..ev.model.u {
                env.push((var.clone(), Value::Nat(y)));
                truth.push(ev.formula(body, &mut env)?);
                env.pop();
            }
            let broken = match direction {
                Direction::Upward => truth.windows(2).any(|w| w[0] && !w[1]),
                Direction::Downward => truth.windows(2).any(|w| !w[0] && w[1]),
            };
            if broken {
                return Ok(Some(format!("`{var}` is not {direction:?} monotone in this model")));
            }
        }
    }
    Ok(None)
}

/// Runs [`check_step`] on every step of `trace`.
pub fn check_trace(m: &TwoLevelModel, trace: &RewriteTrace) -> Result<Vec<StepReport>, ModelError> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(StepReport { step: i, rule: s.rule, verdict: check_step(m, s)? }))
        .collect()
}

/// Every model with `S <= s_max <= U <= u_max`, `seqBound = S`, once per salt,
/// with default interpretations for the symbols of `formulas`.
pub fn sweep_models<'a>(
    u_max: usize,
    s_max: usize,
    salts: &[u64],
    formulas: impl IntoIterator<Item = &'a Formula> + Clone,
) -> Vec<TwoLevelModel> {
    let mut out = Vec::new();
    for u in 1..=u_max.min(6) {
        for s in 1..=s_max.min(u) {
            for &salt in salts {
                let mut m = TwoLevelModel::new(u, s, s).expect("bounds valid").with_salt(salt);
                m.interpret_defaults(formulas.clone());
                out.push(m);
            }
        }
    }
    out
}
