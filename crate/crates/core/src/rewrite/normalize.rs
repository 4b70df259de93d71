use super::rules::{
    drop_st, expand_with_bindings, herbrandize_antecedent, idealise, max_collapse, pull_at, r5_redexes, split_normal,
    StdBinder,
};
use super::trace::{RewriteStep, RewriteTrace, WitnessOp};
use super::{annotation_of, MonotoneAnnotation, RewriteError, Rule};
use crate::lang::{FinType, Formula, Path, QuantKind};

/// `(forall^st ..)(exists^st ..)` prefix of a formula and the rest.
pub fn normal_prefix(f: &Formula) -> (Vec<StdBinder>, Vec<StdBinder>, &Formula) {
    split_normal(f)
}

/// `(forall^st x)(exists^st y) A` with `A` internal. Either block may be empty.
pub fn is_normal_form(f: &Formula) -> bool {
    normal_prefix(f).2.is_internal()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub formula: Formula,
    pub trace: RewriteTrace,
}

/// Drives `f` to normal form.
///
/// Annotation names refer to variables after definition unfolding (R1).
/// Fails with [`RewriteError::Stuck`] when no rule makes further progress.
pub fn normalize(f: &Formula, anns: &[MonotoneAnnotation]) -> Result<Normalized, RewriteError> {
    if is_normal_form(f) {
        validate_annotations(f, anns)?;
        return Ok(Normalized { formula: f.clone(), trace: RewriteTrace::empty(f.clone()) });
    }
    let mut d = Driver { cur: f.clone(), steps: Vec::new(), anns };
    let (expanded, bindings) = expand_with_bindings(f);
    d.record(Rule::R1, Vec::new(), expanded, WitnessOp::Expand { bindings });
    validate_annotations(&d.cur, anns)?;
    d.nf_region(Vec::new())?;
    let trace = RewriteTrace { initial: f.clone(), final_formula: d.cur.clone(), steps: d.steps };
    if !is_normal_form(&d.cur) {
        return Err(RewriteError::Stuck { path: stuck_path(&d.cur), formula: d.cur, trace: Box::new(trace) });
    }
    Ok(Normalized { formula: trace.final_formula.clone(), trace })
}

fn validate_annotations(f: &Formula, anns: &[MonotoneAnnotation]) -> Result<(), RewriteError> {
    for (i, a) in anns.iter().enumerate() {
        if anns[..i].iter().any(|b| b.var == a.var) {
            return Err(RewriteError::BadAnnotation { var: a.var.clone(), reason: "annotated twice".into() });
        }
        let bound = f.paths().into_iter().find_map(|p| match f.at(&p) {
            Some(Formula::Quant { var, ty, .. }) | Some(Formula::ElemOfSeq { var, elem: ty, .. }) if *var == a.var => {
                Some(ty.clone())
            }
            _ => None,
        });
        match bound {
            None => {
                return Err(RewriteError::BadAnnotation { var: a.var.clone(), reason: "no such bound variable".into() })
            }
            Some(ty) if ty != FinType::Nat => {
                return Err(RewriteError::BadAnnotation {
                    var: a.var.clone(),
                    reason: format!("bound at type {ty}, annotations need type 0"),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// First node past the normal prefix that keeps the formula external.
fn stuck_path(f: &Formula) -> Path {
    let (a, e, matrix) = normal_prefix(f);
    let prefix = vec![0; a.len() + e.len()];
    let inner = matrix
        .paths()
        .into_iter()
        .find(|p| {
            let g = matrix.at(p).expect("own path");
            matches!(g, Formula::St(_) | Formula::Quant { standard: true, .. }) || g.is_sugar()
        })
        .unwrap_or_default();
    prefix.into_iter().chain(inner).collect()
}

struct Driver<'a> {
    cur: Formula,
    steps: Vec<RewriteStep>,
    anns: &'a [MonotoneAnnotation],
}

fn child(path: &[usize], i: usize) -> Path {
    path.iter().copied().chain([i]).collect()
}

impl Driver<'_> {
    fn record(&mut self, rule: Rule, path: Path, after: Formula, witness_op: WitnessOp) {
        if after == self.cur {
            return;
        }
        let before = std::mem::replace(&mut self.cur, after.clone());
        self.steps.push(RewriteStep { rule, path, before, after, witness_op });
    }

    fn r2(&mut self, path: &Path) -> Result<(), RewriteError> {
        let out = pull_at(&self.cur, path)?;
        self.record(Rule::R2, path.clone(), out, WitnessOp::Prenex);
        Ok(())
    }

    fn nf_region(&mut self, path: Path) -> Result<(), RewriteError> {
        self.prepare(&path)?;
        self.r2(&path)?;
        while let Some(p) = r5_redexes(&self.cur, &path).into_iter().next() {
            let (out, op) = idealise(&self.cur, &p, self.anns)?;
            self.record(Rule::R5, p, out, op);
            self.r2(&path)?;
        }
        while let Some((p, out, op)) = self.next_collapse(&path) {
            self.record(Rule::R6, p, out, op);
        }
        Ok(())
    }

    fn next_collapse(&self, region: &[usize]) -> Option<(Path, Formula, WitnessOp)> {
        let sub = self.cur.at(region)?;
        sub.paths().into_iter().find_map(|p| {
            let g = sub.at(&p).expect("own path");
            if !matches!(g, Formula::Quant { kind: QuantKind::Exists, standard: true, ty: FinType::Seq(_), .. }) {
                return None;
            }
            let full: Path = region.iter().copied().chain(p).collect();
            let (out, op) = max_collapse(&self.cur, &full, self.anns).ok()?;
            Some((full, out, op))
        })
    }

    /// Normalizes both sides of every outermost implication below `path`,
    /// then abstracts antecedent existentials (R3) and drops licensed `st` (R4).
    fn prepare(&mut self, path: &Path) -> Result<(), RewriteError> {
        let Some(node) = self.cur.at(path) else { return Ok(()) };
        if !matches!(node, Formula::Implies(..)) {
            for i in 0..node.children().len() {
                self.prepare(&child(path, i))?;
            }
            return Ok(());
        }
        self.nf_region(child(path, 0))?;
        self.nf_region(child(path, 1))?;
        let Ok((out, op)) = herbrandize_antecedent(&self.cur, path) else { return Ok(()) };
        let funs = match &op {
            WitnessOp::Abstract { functions } => functions.len(),
            _ => 0,
        };
        self.record(Rule::R3, path.clone(), out, op);
        let mut ante: Path = path.iter().copied().chain(std::iter::repeat_n(0, funs)).collect();
        ante.push(0);
        let mut q = ante;
        while let Some(Formula::Quant { kind: QuantKind::Forall, standard: true, var, .. }) = self.cur.at(&q) {
            if annotation_of(self.anns, var).is_some() {
                let var = var.clone();
                let out = drop_st(&self.cur, &q, annotation_of(self.anns, &var))?;
                self.record(Rule::R4, q.clone(), out, WitnessOp::DropSt { var });
            }
            q.push(0);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn load(src: &str) -> Formula {
        parse(src).unwrap_or_else(|e| panic!("{e}"))
    }

    fn anns(src: &str) -> Vec<MonotoneAnnotation> {
        serde_json::from_str(src).unwrap()
    }

    #[test]
    fn continuity_reaches_its_normal_form() {
        let f = load(include_str!("../../corpus/eq4.nsa"));
        let out = normalize(&f, &anns(include_str!("../../corpus/eq4.ann.json"))).unwrap();
        let want = load(include_str!("../../corpus/eq7.nsa"));
        assert!(out.formula.alpha_eq(&want), "{}", out.formula);
        assert_eq!(out.trace.rules(), vec![Rule::R1, Rule::R2, Rule::R5, Rule::R6]);
        out.trace.replay().unwrap();
    }

    #[test]
    fn integrability_reaches_its_normal_form() {
        let f = load(include_str!("../../corpus/eq5.nsa"));
        let out = normalize(&f, &anns(include_str!("../../corpus/eq5.ann.json"))).unwrap();
        let want = load(include_str!("../../corpus/eq8.nsa"));
        assert!(out.formula.alpha_eq(&want), "{}", out.formula);
        out.trace.replay().unwrap();
    }

    #[test]
    fn cri_with_dropped_st() {
        let f = load(include_str!("../../corpus/cri.nsa"));
        let out = normalize(&f, &anns(include_str!("../../corpus/cri.ann.json"))).unwrap();
        let want = load(include_str!("../../corpus/eq12.nsa"));
        assert!(out.formula.alpha_eq(&want), "{}", out.formula);
        let rules = out.trace.rules();
        assert!(rules.contains(&Rule::R3) && rules.contains(&Rule::R4));
        out.trace.replay().unwrap();
    }

    #[test]
    fn cri_keeping_st_gives_a_sequence_bound() {
        let f = load(include_str!("../../corpus/cri.nsa"));
        let out = normalize(&f, &anns(include_str!("../../corpus/cri_her.ann.json"))).unwrap();
        assert!(!out.trace.rules().contains(&Rule::R4));
        let (alls, exs, matrix) = normal_prefix(&out.formula);
        let tys: Vec<String> = alls.iter().chain(&exs).map(|q| q.ty.to_string()).collect();
        assert_eq!(tys, ["1", "0", "0*", "0"], "{}", out.formula);
        assert!(matches!(matrix, Formula::Quant { standard: false, .. }));
        out.trace.replay().unwrap();
    }

    #[test]
    fn normal_forms_are_fixed_points() {
        let f = load(include_str!("../../corpus/eq4.nsa"));
        let once = normalize(&f, &anns(include_str!("../../corpus/eq4.ann.json"))).unwrap();
        let twice = normalize(&once.formula, &[]).unwrap();
        assert_eq!(twice.formula, once.formula);
        assert!(twice.trace.steps.is_empty());
        let internal = load("(forall x:0)le(x, x)");
        assert!(normalize(&internal, &[]).unwrap().trace.steps.is_empty());
    }

    #[test]
    fn unannotated_existentials_stay_sequences() {
        let f = load(include_str!("../../corpus/eq4.nsa"));
        let out = normalize(&f, &[]).unwrap();
        assert_eq!(out.trace.rules(), vec![Rule::R1, Rule::R2, Rule::R5]);
        let (_, exs, _) = normal_prefix(&out.formula);
        assert_eq!(exs[0].ty, FinType::seq(FinType::Nat));
    }

    #[test]
    fn standard_universal_under_internal_existential_is_stuck() {
        let f = load("(exists x:0)(forall^st y:0)le(x, y)");
        let err = normalize(&f, &[]).unwrap_err();
        let RewriteError::Stuck { formula, trace, .. } = err else { panic!("{err}") };
        assert!(!is_normal_form(&formula));
        trace.replay().unwrap();
    }

    #[test]
    fn bad_annotations() {
        let f = load(include_str!("../../corpus/eq4.nsa"));
        let e = normalize(&f, &[MonotoneAnnotation::new("zz", crate::rewrite::Direction::Upward)]);
        assert!(matches!(e, Err(RewriteError::BadAnnotation { .. })));
    }

    #[test]
    fn trace_json_round_trip() {
        let f = load(include_str!("../../corpus/cri.nsa"));
        let out = normalize(&f, &anns(include_str!("../../corpus/cri.ann.json"))).unwrap();
        let back = RewriteTrace::from_json(&out.trace.to_json()).unwrap();
        assert_eq!(back, out.trace);
    }
}
