use std::collections::BTreeSet;

use super::trace::{Abstraction, SeqGroup, StBinding, WitnessOp};
use super::{annotation_of, MonotoneAnnotation, RewriteError, Rule};
use crate::lang::{fresh_name, FinType, Formula, Polarity, QuantKind, Term};

/// A standard quantifier detached from its body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdBinder {
    pub kind: QuantKind,
    pub var: String,
    pub ty: FinType,
}

impl StdBinder {
    fn dual(&self) -> StdBinder {
        StdBinder { kind: self.kind.dual(), ..self.clone() }
    }
}

pub(crate) fn wrap(prefix: &[StdBinder], matrix: Formula) -> Formula {
    prefix
        .iter()
        .rev()
        .fold(matrix, |acc, q| Formula::quant(q.kind, true, q.var.clone(), q.ty.clone(), acc))
}

// R1

/// R1: unfolds `approxR`, `approx1`, `inOmega` and `st(t)`.
///
/// Fresh names come from the bases `n`, `m` and `v`, allocated in pre-order.
pub fn expand_definitions(f: &Formula) -> Formula {
    expand_with_bindings(f).0
}

pub(crate) fn expand_with_bindings(f: &Formula) -> (Formula, Vec<StBinding>) {
    let mut taken = f.all_names();
    let mut binds = Vec::new();
    let out = expand(f, &mut taken, &mut binds);
    (out, binds)
}

fn take_fresh(base: &str, taken: &mut BTreeSet<String>) -> String {
    let n = fresh_name(base, taken);
    taken.insert(n.clone());
    n
}

fn expand(f: &Formula, taken: &mut BTreeSet<String>, binds: &mut Vec<StBinding>) -> Formula {
    let nat = FinType::Nat;
    match f {
        Formula::ApproxReal(x, y) => {
            let n = take_fresh("n", taken);
            let close = Formula::rel("closeR", vec![x.clone(), y.clone(), Term::var(n.clone(), nat.clone())]);
            Formula::forall_st(n, nat, close)
        }
        Formula::ApproxBaire(a, b) => {
            let n = take_fresh("n", taken);
            let nv = Term::var(n.clone(), nat.clone());
            Formula::forall_st(n, nat, Formula::eq(Term::app(a.clone(), nv.clone()), Term::app(b.clone(), nv)))
        }
        Formula::InfiniteNat(big, body) => {
            let m = take_fresh("m", taken);
            let above = Formula::rel("lt", vec![Term::var(m.clone(), nat.clone()), Term::var(big.clone(), nat.clone())]);
            let inner = expand(body, taken, binds);
            Formula::forall(big.clone(), nat.clone(), Formula::implies(Formula::forall_st(m, nat, above), inner))
        }
        Formula::St(t) => {
            let v = take_fresh("v", taken);
            let ty = t.type_of().unwrap_or(FinType::Nat);
            binds.push(StBinding { var: v.clone(), term: t.to_string() });
            Formula::exists_st(v.clone(), ty.clone(), Formula::eq(Term::var(v, ty), t.clone()))
        }
        other => other.map_children(|c| expand(c, taken, binds)),
    }
}

// R2

fn merge(a: Vec<StdBinder>, b: Vec<StdBinder>) -> Vec<StdBinder> {
    let (mut a, mut b) = (a.into_iter().peekable(), b.into_iter().peekable());
    let mut out = Vec::new();
    loop {
        let forall = |q: Option<&StdBinder>| q.is_some_and(|q| q.kind == QuantKind::Forall);
        let next = if forall(a.peek()) {
            a.next()
        } else if forall(b.peek()) {
            b.next()
        } else {
            a.next().or_else(|| b.next())
        };
        match next {
            Some(q) => out.push(q),
            None => return out,
        }
    }
}

fn dual_all(p: Vec<StdBinder>) -> Vec<StdBinder> {
    p.iter().map(StdBinder::dual).collect()
}

fn lift_through(kind: QuantKind, p: Vec<StdBinder>) -> (Vec<StdBinder>, Vec<StdBinder>) {
    let split = p.iter().take_while(|q| q.kind == kind).count();
    let mut lifted = p;
    let rest = lifted.split_off(split);
    (lifted, rest)
}

/// Splits `g` into standard quantifiers movable to its front and the remainder.
fn pull(g: &Formula) -> (Vec<StdBinder>, Formula) {
    match g {
        Formula::Quant { kind, standard: true, var, ty, body } => {
            let (mut p, m) = pull(body);
            p.insert(0, StdBinder { kind: *kind, var: var.clone(), ty: ty.clone() });
            (p, m)
        }
        Formula::Quant { kind, standard: false, var, ty, body } => {
            let (p, m) = pull(body);
            let (lifted, rest) = lift_through(*kind, p);
            (lifted, Formula::quant(*kind, false, var.clone(), ty.clone(), wrap(&rest, m)))
        }
        Formula::ElemOfSeq { var, elem, seq, body } => {
            let (p, m) = pull(body);
            let (lifted, rest) = lift_through(QuantKind::Exists, p);
            (lifted, Formula::elem_of(var.clone(), elem.clone(), seq.clone(), wrap(&rest, m)))
        }
        Formula::Not(a) => {
            let (p, m) = pull(a);
            (dual_all(p), Formula::not(m))
        }
        Formula::And(a, b) => {
            let ((pa, ma), (pb, mb)) = (pull(a), pull(b));
            (merge(pa, pb), Formula::and(ma, mb))
        }
        Formula::Or(a, b) => {
            let ((pa, ma), (pb, mb)) = (pull(a), pull(b));
            (merge(pa, pb), Formula::or(ma, mb))
        }
        Formula::Implies(a, b) => {
            let ((pa, ma), (pb, mb)) = (pull(a), pull(b));
            (merge(dual_all(pa), pb), Formula::implies(ma, mb))
        }
        other => (Vec::new(), other.clone()),
    }
}

/// R2 on the whole formula.
pub fn pull_standard_quantifiers(f: &Formula) -> Formula {
    let (p, m) = pull(f);
    wrap(&p, m)
}

/// R2 on the subformula at `path`.
pub fn pull_at(f: &Formula, path: &[usize]) -> Result<Formula, RewriteError> {
    let sub = f.at(path).ok_or_else(|| RewriteError::pre(Rule::R2, path, "no subformula at path"))?;
    Ok(f.replace_at(path, pull_standard_quantifiers(sub)).expect("path checked"))
}

// normal-form prefix

/// `(forall^st ..)(exists^st ..) rest`: the two blocks and the remainder.
pub(crate) fn split_normal(f: &Formula) -> (Vec<StdBinder>, Vec<StdBinder>, &Formula) {
    let mut cur = f;
    let mut foralls = Vec::new();
    let mut exists = Vec::new();
    while let Formula::Quant { kind: QuantKind::Forall, standard: true, var, ty, body } = cur {
        foralls.push(StdBinder { kind: QuantKind::Forall, var: var.clone(), ty: ty.clone() });
        cur = body;
    }
    while let Formula::Quant { kind: QuantKind::Exists, standard: true, var, ty, body } = cur {
        exists.push(StdBinder { kind: QuantKind::Exists, var: var.clone(), ty: ty.clone() });
        cur = body;
    }
    (foralls, exists, cur)
}

// R3

/// R3: replaces the antecedent's standard existentials by applications of
/// fresh standard functions of its standard universals.
pub fn herbrandize_antecedent(f: &Formula, path: &[usize]) -> Result<(Formula, WitnessOp), RewriteError> {
    let err = |r: &str| RewriteError::pre(Rule::R3, path, r);
    let Some(Formula::Implies(ante, cons)) = f.at(path) else {
        return Err(err("not an implication"));
    };
    let (alls, exs, matrix) = split_normal(ante);
    if !matrix.is_internal() {
        return Err(err("antecedent is not in normal form"));
    }
    if exs.is_empty() {
        return Err(err("antecedent has no standard existential"));
    }
    let mut taken = f.all_names();
    let arg_types: Vec<FinType> = alls.iter().map(|q| q.ty.clone()).collect();
    let args: Vec<Term> = alls.iter().map(|q| Term::var(q.var.clone(), q.ty.clone())).collect();
    let mut matrix = matrix.clone();
    let mut funs = Vec::new();
    let mut binders = Vec::new();
    for b in &exs {
        let g = take_fresh("g", &mut taken);
        let gty = FinType::curried(&arg_types, b.ty.clone());
        matrix = matrix.substitute(&b.var, &Term::apps(Term::var(g.clone(), gty.clone()), args.clone()));
        funs.push(Abstraction {
            fun: g.clone(),
            replaces: b.var.clone(),
            args: alls.iter().map(|q| q.var.clone()).collect(),
        });
        binders.push(StdBinder { kind: QuantKind::Forall, var: g, ty: gty });
    }
    let implication = Formula::implies(wrap(&alls, matrix), (**cons).clone());
    let out = f.replace_at(path, wrap(&binders, implication)).expect("path checked");
    Ok((out, WitnessOp::Abstract { functions: funs }))
}

// R4

/// R4: a standard universal in negative position loses its qualifier.
pub fn drop_st(f: &Formula, path: &[usize], ann: Option<&MonotoneAnnotation>) -> Result<Formula, RewriteError> {
    let err = |r: &str| RewriteError::pre(Rule::R4, path, r);
    let Some(Formula::Quant { kind: QuantKind::Forall, standard: true, var, ty, body }) = f.at(path) else {
        return Err(err("not a standard universal"));
    };
    if f.polarity_at(path) != Some(Polarity::Negative) {
        return Err(err("quantifier occurs positively; dropping `st` there is unsound"));
    }
    if let Some(a) = ann {
        if &a.var != var {
            return Err(err("annotation names a different variable"));
        }
    }
    let out = Formula::forall(var.clone(), ty.clone(), (**body).clone());
    Ok(f.replace_at(path, out).expect("path checked"))
}

// R5

pub(crate) struct R5Shape<'a> {
    pub foralls: Vec<(String, FinType)>,
    pub exists: Vec<(String, FinType)>,
    pub matrix: &'a Formula,
}

/// `(forall x..)(exists^st y..) matrix` with at least one of each.
pub(crate) fn r5_shape(g: &Formula) -> Option<R5Shape<'_>> {
    let mut cur = g;
    let mut foralls = Vec::new();
    while let Formula::Quant { kind: QuantKind::Forall, standard: false, var, ty, body } = cur {
        foralls.push((var.clone(), ty.clone()));
        cur = body;
    }
    let mut exists = Vec::new();
    while let Formula::Quant { kind: QuantKind::Exists, standard: true, var, ty, body } = cur {
        exists.push((var.clone(), ty.clone()));
        cur = body;
    }
    if foralls.is_empty() || exists.is_empty() {
        return None;
    }
    Some(R5Shape { foralls, exists, matrix: cur })
}

/// Pre-order paths below `region` where R5 applies (internal matrix).
pub fn r5_redexes(f: &Formula, region: &[usize]) -> Vec<Vec<usize>> {
    let Some(sub) = f.at(region) else { return Vec::new() };
    sub.paths()
        .into_iter()
        .filter(|p| {
            let g = sub.at(p).expect("own path");
            r5_shape(g).is_some_and(|s| s.matrix.is_internal())
        })
        .map(|p| region.iter().copied().chain(p).collect())
        .collect()
}

/// R5: `(forall x)(exists^st y) A` becomes `(exists^st w)(forall x)(exists y in w) A`.
///
/// Existentials of equal type and equal annotation share one sequence.
pub fn idealise(
    f: &Formula,
    path: &[usize],
    anns: &[MonotoneAnnotation],
) -> Result<(Formula, WitnessOp), RewriteError> {
    let g = f.at(path).ok_or_else(|| RewriteError::pre(Rule::R5, path, "no subformula at path"))?;
    let shape = r5_shape(g).ok_or_else(|| {
        RewriteError::pre(Rule::R5, path, "expected (forall x)(exists^st y) followed by a matrix")
    })?;
    let mut taken = f.all_names();
    let mut groups: Vec<(FinType, SeqGroup)> = Vec::new();
    for (y, ty) in &shape.exists {
        let dir = annotation_of(anns, y).map(|a| a.direction);
        match groups.iter_mut().find(|(t, gr)| t == ty && gr.direction == dir) {
            Some((_, gr)) => gr.vars.push(y.clone()),
            None => {
                let seq = take_fresh("w", &mut taken);
                groups.push((ty.clone(), SeqGroup { seq, vars: vec![y.clone()], direction: dir }));
            }
        }
    }
    let groups: Vec<SeqGroup> = groups.into_iter().map(|(_, g)| g).collect();
    let out = idealise_groups(f, path, &groups)?;
    Ok((out, WitnessOp::Sequence { groups }))
}

/// R5 with explicit grouping, as recorded in a trace.
pub fn idealise_groups(f: &Formula, path: &[usize], groups: &[SeqGroup]) -> Result<Formula, RewriteError> {
    let err = |r: String| RewriteError::pre(Rule::R5, path, r);
    let g = f.at(path).ok_or_else(|| err("no subformula at path".into()))?;
    let shape = r5_shape(g).ok_or_else(|| err("expected (forall x)(exists^st y) followed by a matrix".into()))?;
    if !shape.matrix.is_internal() {
        return Err(err("matrix is not internal".into()));
    }
    let mut covered: Vec<&str> = groups.iter().flat_map(|g| g.vars.iter().map(String::as_str)).collect();
    covered.sort();
    let mut ys: Vec<&str> = shape.exists.iter().map(|(y, _)| y.as_str()).collect();
    ys.sort();
    if covered != ys {
        return Err(err("groups do not cover the standard existentials exactly".into()));
    }
    let names = f.all_names();
    let seq_of = |y: &str| groups.iter().find(|g| g.vars.iter().any(|v| v == y)).expect("covered");
    let mut seq_types: Vec<(String, FinType)> = Vec::new();
    for gr in groups {
        if names.contains(&gr.seq) {
            return Err(err(format!("sequence name `{}` is already in use", gr.seq)));
        }
        let tys: BTreeSet<&FinType> = shape
            .exists
            .iter()
            .filter(|(y, _)| gr.vars.contains(y))
            .map(|(_, t)| t)
            .collect();
        if tys.len() != 1 {
            return Err(err(format!("group `{}` mixes element types", gr.seq)));
        }
        seq_types.push((gr.seq.clone(), FinType::seq((*tys.first().unwrap()).clone())));
    }
    let mut body = shape.matrix.clone();
    for (y, ty) in shape.exists.iter().rev() {
        let gr = seq_of(y);
        body = Formula::elem_of(y.clone(), ty.clone(), Term::var(gr.seq.clone(), FinType::seq(ty.clone())), body);
    }
    for (x, ty) in shape.foralls.iter().rev() {
        body = Formula::forall(x.clone(), ty.clone(), body);
    }
    for (w, ty) in seq_types.iter().rev() {
        body = Formula::exists_st(w.clone(), ty.clone(), body);
    }
    Ok(f.replace_at(path, body).expect("path checked"))
}

// R6

fn mentions(t: &Term, w: &str) -> bool {
    t.free_vars().contains_key(w)
}

/// Variables bound by `(exists y in w)` below, checking every occurrence of `w`
/// is such a bound in positive position.
fn collect_members(g: &Formula, w: &str, positive: bool, out: &mut Vec<String>) -> Result<(), String> {
    if let Formula::ElemOfSeq { var, seq, body, .. } = g {
        if matches!(seq, Term::Var(s, _) if s == w) {
            if !positive {
                return Err(format!("`(exists {var} in {w})` occurs negatively"));
            }
            out.push(var.clone());
            return collect_members(body, w, positive, out);
        }
    }
    if g.node_terms().into_iter().any(|t| mentions(t, w)) {
        return Err(format!("`{w}` occurs outside a bounded quantifier"));
    }
    match g {
        Formula::Not(a) => collect_members(a, w, !positive, out),
        Formula::Implies(a, b) => {
            collect_members(a, w, !positive, out)?;
            collect_members(b, w, positive, out)
        }
        _ => g.children().into_iter().try_for_each(|c| collect_members(c, w, positive, out)),
    }
}

fn collapse_members(g: &Formula, w: &str, target: &Term) -> Formula {
    if let Formula::ElemOfSeq { var, seq, body, .. } = g {
        if matches!(seq, Term::Var(s, _) if s == w) {
            let inner = collapse_members(body, w, target);
            return inner.substitute(var, target);
        }
    }
    g.map_children(|c| collapse_members(c, w, target))
}

/// R6: `(exists^st w:0*) .. (exists y in w) A(y)` becomes `(exists^st y:0) .. A(y)`
/// when every member variable carries the same monotonicity annotation.
pub fn max_collapse(
    f: &Formula,
    path: &[usize],
    anns: &[MonotoneAnnotation],
) -> Result<(Formula, WitnessOp), RewriteError> {
    let err = |r: String| RewriteError::pre(Rule::R6, path, r);
    let Some(Formula::Quant { kind: QuantKind::Exists, standard: true, var: w, ty, body }) = f.at(path) else {
        return Err(err("not a standard existential".into()));
    };
    match ty {
        FinType::Seq(el) if **el == FinType::Nat => {}
        FinType::Seq(el) => return Err(err(format!("element type {el} is not 0"))),
        other => return Err(err(format!("type {other} is not a sequence type"))),
    }
    let mut members = Vec::new();
    collect_members(body, w, true, &mut members).map_err(err)?;
    if members.is_empty() {
        return Err(err(format!("no bounded quantifier over `{w}`")));
    }
    let mut direction = None;
    for y in &members {
        let a = annotation_of(anns, y).ok_or_else(|| err(format!("annotation missing for `{y}`")))?;
        if direction.is_some_and(|d| d != a.direction) {
            return Err(err("members carry different directions".into()));
        }
        direction = Some(a.direction);
    }
    let direction = direction.expect("members nonempty");
    let m = members[0].clone();
    let target = Term::var(m.clone(), FinType::Nat);
    let out = Formula::exists_st(m.clone(), FinType::Nat, collapse_members(body, w, &target));
    let op = WitnessOp::Max { seq: w.clone(), var: m, direction, collapsed: members };
    Ok((f.replace_at(path, out).expect("path checked"), op))
}

/// Re-applies a recorded rule; recorded parameters must match what the rule produces.
pub fn apply_rule(before: &Formula, rule: Rule, path: &[usize], op: &WitnessOp) -> Result<Formula, RewriteError> {
    let mismatch = || RewriteError::pre(rule, path, "recorded witness operation does not match");
    match (rule, op) {
        (Rule::R1, WitnessOp::Expand { bindings }) => {
            if !path.is_empty() {
                return Err(RewriteError::pre(rule, path, "R1 applies to the whole formula"));
            }
            let (out, binds) = expand_with_bindings(before);
            if &binds != bindings {
                return Err(mismatch());
            }
            Ok(out)
        }
        (Rule::R2, WitnessOp::Prenex) => pull_at(before, path),
        (Rule::R3, _) => {
            let (out, produced) = herbrandize_antecedent(before, path)?;
            if &produced != op {
                return Err(mismatch());
            }
            Ok(out)
        }
        (Rule::R4, WitnessOp::DropSt { var }) => {
            let out = drop_st(before, path, None)?;
            match before.at(path) {
                Some(Formula::Quant { var: v, .. }) if v == var => Ok(out),
                _ => Err(mismatch()),
            }
        }
        (Rule::R5, WitnessOp::Sequence { groups }) => idealise_groups(before, path, groups),
        (Rule::R6, WitnessOp::Max { direction, collapsed, .. }) => {
            let anns: Vec<MonotoneAnnotation> =
                collapsed.iter().map(|v| MonotoneAnnotation::new(v.clone(), *direction)).collect();
            let (out, produced) = max_collapse(before, path, &anns)?;
            if &produced != op {
                return Err(mismatch());
            }
            Ok(out)
        }
        _ => Err(mismatch()),
    }
}
