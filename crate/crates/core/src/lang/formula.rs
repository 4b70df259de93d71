use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::term::Term;
use super::types::FinType;
use super::{fresh_name, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantKind {
    Forall,
    Exists,
}

impl QuantKind {
    pub fn dual(self) -> QuantKind {
        match self {
            QuantKind::Forall => QuantKind::Exists,
            QuantKind::Exists => QuantKind::Forall,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaClass {
    Internal,
    External,
}

/// Formulas with standardness-qualified quantifiers.
///
/// `ApproxReal`, `ApproxBaire` and `InfiniteNat` are sugar: they are expanded
/// by the definition-unfolding rewrite. `ElemOfSeq` is the bounded quantifier
/// `(exists y in w)` and counts as internal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant {
        kind: QuantKind,
        standard: bool,
        var: String,
        ty: FinType,
        body: Box<Formula>,
    },
    St(Term),
    ApproxReal(Term, Term),
    ApproxBaire(Term, Term),
    InfiniteNat(String, Box<Formula>),
    ElemOfSeq {
        var: String,
        elem: FinType,
        seq: Term,
        body: Box<Formula>,
    },
}

/// Position of a subformula: child indices from the root.
pub type Path = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl Formula {
    pub fn rel(sym: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel(sym.into(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn quant(kind: QuantKind, standard: bool, var: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::Quant { kind, standard, var: var.into(), ty, body: Box::new(body) }
    }

    pub fn forall(var: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(QuantKind::Forall, false, var, ty, body)
    }

    pub fn exists(var: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(QuantKind::Exists, false, var, ty, body)
    }

    pub fn forall_st(var: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(QuantKind::Forall, true, var, ty, body)
    }

    pub fn exists_st(var: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(QuantKind::Exists, true, var, ty, body)
    }

    pub fn elem_of(var: impl Into<String>, elem: FinType, seq: Term, body: Formula) -> Formula {
        Formula::ElemOfSeq { var: var.into(), elem, seq, body: Box::new(body) }
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Rel("eq".into(), vec![a, b])
    }

    pub fn is_sugar(&self) -> bool {
        matches!(
            self,
            Formula::ApproxReal(..) | Formula::ApproxBaire(..) | Formula::InfiniteNat(..)
        )
    }

    /// Internal iff no `st`, no standard quantifier and no sugar node occurs.
    pub fn classify(&self) -> FormulaClass {
        if self.is_internal() {
            FormulaClass::Internal
        } else {
            FormulaClass::External
        }
    }

    pub fn is_internal(&self) -> bool {
        match self {
            Formula::Rel(..) => true,
            Formula::St(_) => false,
            f if f.is_sugar() => false,
            Formula::Quant { standard: true, .. } => false,
            _ => self.children().into_iter().all(Formula::is_internal),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Rel(..) | Formula::St(_) | Formula::ApproxReal(..) | Formula::ApproxBaire(..) => vec![],
            Formula::Not(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
            Formula::Quant { body, .. } | Formula::InfiniteNat(_, body) | Formula::ElemOfSeq { body, .. } => {
                vec![body]
            }
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Formula> {
        match (self, i) {
            (Formula::Not(a), 0) => Some(a),
            (Formula::And(a, _) | Formula::Or(a, _) | Formula::Implies(a, _), 0) => Some(a),
            (Formula::And(_, b) | Formula::Or(_, b) | Formula::Implies(_, b), 1) => Some(b),
            (Formula::Quant { body, .. } | Formula::InfiniteNat(_, body) | Formula::ElemOfSeq { body, .. }, 0) => {
                Some(body)
            }
            _ => None,
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        let mut cur = self;
        for &i in path {
            cur = cur.child_mut(i)?;
        }
        Some(cur)
    }

    pub fn replace_at(&self, path: &[usize], with: Formula) -> Option<Formula> {
        let mut out = self.clone();
        *out.at_mut(path)? = with;
        Some(out)
    }

    /// Polarity of the subformula at `path`; `None` if the path is invalid.
    pub fn polarity_at(&self, path: &[usize]) -> Option<Polarity> {
        let mut cur = self;
        let mut pol = Polarity::Positive;
        for &i in path {
            match cur {
                Formula::Not(_) => pol = pol.flip(),
                Formula::Implies(..) if i == 0 => pol = pol.flip(),
                _ => {}
            }
            cur = *cur.children().get(i)?;
        }
        Some(pol)
    }

    /// Pre-order list of paths to every subformula.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn go(f: &Formula, cur: &mut Path, out: &mut Vec<Path>) {
            out.push(cur.clone());
            for (i, c) in f.children().into_iter().enumerate() {
                cur.push(i);
                go(c, cur, out);
                cur.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Terms appearing directly in this node (not in children).
    pub fn node_terms(&self) -> Vec<&Term> {
        match self {
            Formula::Rel(_, args) => args.iter().collect(),
            Formula::St(t) => vec![t],
            Formula::ApproxReal(a, b) | Formula::ApproxBaire(a, b) => vec![a, b],
            Formula::ElemOfSeq { seq, .. } => vec![seq],
            _ => vec![],
        }
    }

    fn binder(&self) -> Option<(&str, FinType)> {
        match self {
            Formula::Quant { var, ty, .. } => Some((var, ty.clone())),
            Formula::InfiniteNat(v, _) => Some((v, FinType::Nat)),
            Formula::ElemOfSeq { var, elem, .. } => Some((var, elem.clone())),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeMap<String, FinType> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeMap<String, FinType>) {
        for t in self.node_terms() {
            t.collect_free(bound, out);
        }
        if let Some((v, _)) = self.binder() {
            let fresh = bound.insert(v.to_string());
            for c in self.children() {
                c.collect_free(bound, out);
            }
            if fresh {
                bound.remove(v);
            }
        } else {
            for c in self.children() {
                c.collect_free(bound, out);
            }
        }
    }

    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        for t in self.node_terms() {
            t.all_names(out);
        }
        if let Some((v, _)) = self.binder() {
            out.insert(v.to_string());
        }
        for c in self.children() {
            c.collect_names(out);
        }
    }

    pub fn relation_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            if let Formula::Rel(s, _) = f {
                out.insert(s.clone());
            }
            for c in f.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Rel(s, args) => Formula::Rel(s.clone(), args.iter().map(&mut *f).collect()),
            Formula::St(t) => Formula::St(f(t)),
            Formula::ApproxReal(a, b) => Formula::ApproxReal(f(a), f(b)),
            Formula::ApproxBaire(a, b) => Formula::ApproxBaire(f(a), f(b)),
            Formula::Not(a) => Formula::not(a.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Quant { kind, standard, var, ty, body } => {
                Formula::quant(*kind, *standard, var.clone(), ty.clone(), body.map_terms(f))
            }
            Formula::InfiniteNat(v, body) => Formula::InfiniteNat(v.clone(), Box::new(body.map_terms(f))),
            Formula::ElemOfSeq { var, elem, seq, body } => {
                Formula::elem_of(var.clone(), elem.clone(), f(seq), body.map_terms(f))
            }
        }
    }

    /// Substitutes the free variable `name` by `with`, renaming binders that would capture.
    pub fn substitute(&self, name: &str, with: &Term) -> Formula {
        let avoid: BTreeSet<String> = with.free_vars().into_keys().collect();
        self.subst_inner(name, with, &avoid)
    }

    fn subst_inner(&self, name: &str, with: &Term, avoid: &BTreeSet<String>) -> Formula {
        if let Some((v, ty)) = self.binder() {
            if v == name {
                // only the bound-term part of ElemOfSeq sees the outer binding
                if let Formula::ElemOfSeq { var, elem, seq, body } = self {
                    return Formula::elem_of(var.clone(), elem.clone(), seq.substitute(name, with), (**body).clone());
                }
                return self.clone();
            }
            if avoid.contains(v) {
                let mut taken = avoid.clone();
                taken.extend(self.all_names());
                taken.insert(name.to_string());
                let fresh = fresh_name(v, &taken);
                let renamed = self.rename_binder(&fresh, &Term::Var(fresh.clone(), ty));
                return renamed.subst_inner(name, with, avoid);
            }
        }
        match self {
            Formula::Rel(s, args) => Formula::Rel(s.clone(), args.iter().map(|t| t.substitute(name, with)).collect()),
            Formula::St(t) => Formula::St(t.substitute(name, with)),
            Formula::ApproxReal(a, b) => Formula::ApproxReal(a.substitute(name, with), b.substitute(name, with)),
            Formula::ApproxBaire(a, b) => Formula::ApproxBaire(a.substitute(name, with), b.substitute(name, with)),
            Formula::Not(a) => Formula::not(a.subst_inner(name, with, avoid)),
            Formula::And(a, b) => Formula::and(a.subst_inner(name, with, avoid), b.subst_inner(name, with, avoid)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(name, with, avoid), b.subst_inner(name, with, avoid)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_inner(name, with, avoid), b.subst_inner(name, with, avoid))
            }
            Formula::Quant { kind, standard, var, ty, body } => {
                Formula::quant(*kind, *standard, var.clone(), ty.clone(), body.subst_inner(name, with, avoid))
            }
            Formula::InfiniteNat(v, body) => Formula::InfiniteNat(v.clone(), Box::new(body.subst_inner(name, with, avoid))),
            Formula::ElemOfSeq { var, elem, seq, body } => Formula::elem_of(
                var.clone(),
                elem.clone(),
                seq.substitute(name, with),
                body.subst_inner(name, with, avoid),
            ),
        }
    }

    /// Renames the binder of this node to `fresh`, substituting `as_term` in the body.
    fn rename_binder(&self, fresh: &str, as_term: &Term) -> Formula {
        let empty = BTreeSet::new();
        match self {
            Formula::Quant { kind, standard, var, ty, body } => Formula::quant(
                *kind,
                *standard,
                fresh,
                ty.clone(),
                body.subst_inner(var, as_term, &empty),
            ),
            Formula::InfiniteNat(v, body) => {
                Formula::InfiniteNat(fresh.to_string(), Box::new(body.subst_inner(v, as_term, &empty)))
            }
            Formula::ElemOfSeq { var, elem, seq, body } => Formula::elem_of(
                fresh,
                elem.clone(),
                seq.clone(),
                body.subst_inner(var, as_term, &empty),
            ),
            _ => self.clone(),
        }
    }

    /// Renames binders so that every bound name is unique and distinct from free names.
    /// Names already unique are kept; the operation is idempotent.
    pub fn alpha_normalize(&self) -> Formula {
        let mut taken: BTreeSet<String> = self.free_vars().into_keys().collect();
        self.normalize_binders(&mut taken)
    }

    fn normalize_binders(&self, taken: &mut BTreeSet<String>) -> Formula {
        let fix_terms = |f: &Formula, taken: &mut BTreeSet<String>| -> Formula {
            f.map_terms_shallow(&mut |t: &Term| t.freshen_binders(taken))
        };
        let node = fix_terms(self, taken);
        if let Some((v, ty)) = node.binder() {
            let renamed = if taken.contains(v) {
                let fresh = fresh_name(v, taken);
                node.rename_binder(&fresh, &Term::Var(fresh.clone(), ty))
            } else {
                node.clone()
            };
            let (v, _) = renamed.binder().unwrap();
            taken.insert(v.to_string());
            return renamed.map_children(|c| c.normalize_binders(taken));
        }
        node.map_children(|c| c.normalize_binders(taken))
    }

    fn map_terms_shallow(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Rel(s, args) => Formula::Rel(s.clone(), args.iter().map(&mut *f).collect()),
            Formula::St(t) => Formula::St(f(t)),
            Formula::ApproxReal(a, b) => Formula::ApproxReal(f(a), f(b)),
            Formula::ApproxBaire(a, b) => Formula::ApproxBaire(f(a), f(b)),
            Formula::ElemOfSeq { var, elem, seq, body } => {
                Formula::elem_of(var.clone(), elem.clone(), f(seq), (**body).clone())
            }
            _ => self.clone(),
        }
    }

    pub fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Rel(..) | Formula::St(_) | Formula::ApproxReal(..) | Formula::ApproxBaire(..) => self.clone(),
            Formula::Not(a) => Formula::not(f(a)),
            Formula::And(a, b) => {
                let a = f(a);
                Formula::and(a, f(b))
            }
            Formula::Or(a, b) => {
                let a = f(a);
                Formula::or(a, f(b))
            }
            Formula::Implies(a, b) => {
                let a = f(a);
                Formula::implies(a, f(b))
            }
            Formula::Quant { kind, standard, var, ty, body } => {
                Formula::quant(*kind, *standard, var.clone(), ty.clone(), f(body))
            }
            Formula::InfiniteNat(v, body) => Formula::InfiniteNat(v.clone(), Box::new(f(body))),
            Formula::ElemOfSeq { var, elem, seq, body } => Formula::elem_of(var.clone(), elem.clone(), seq.clone(), f(body)),
        }
    }

    /// True when every binder (formula- and term-level) is uniquely named and
    /// no bound name clashes with a free name.
    pub fn has_unique_binders(&self) -> bool {
        let free: BTreeSet<String> = self.free_vars().into_keys().collect();
        let mut seen = BTreeSet::new();
        fn term_binders(t: &Term, seen: &mut BTreeSet<String>, free: &BTreeSet<String>) -> bool {
            match t {
                Term::Lam(v, _, body) => {
                    !free.contains(v) && seen.insert(v.clone()) && term_binders(body, seen, free)
                }
                Term::App(a, b) | Term::Rec(a, b) | Term::SeqGet(a, b) | Term::SeqAppend(a, b) => {
                    term_binders(a, seen, free) && term_binders(b, seen, free)
                }
                Term::Succ(a) | Term::SeqLen(a) | Term::MaxOf(a) => term_binders(a, seen, free),
                Term::SeqLit(_, items) => items.iter().all(|i| term_binders(i, seen, free)),
                Term::Var(..) | Term::Zero | Term::Num(_) => true,
            }
        }
        fn go(f: &Formula, seen: &mut BTreeSet<String>, free: &BTreeSet<String>) -> bool {
            for t in f.node_terms() {
                if !term_binders(t, seen, free) {
                    return false;
                }
            }
            if let Some((v, _)) = f.binder() {
                if free.contains(v) || !seen.insert(v.to_string()) {
                    return false;
                }
            }
            f.children().into_iter().all(|c| go(c, seen, free))
        }
        go(self, &mut seen, &free)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.alpha_eq_in(other, &mut Vec::new())
    }

    fn alpha_eq_in(&self, other: &Formula, env: &mut Vec<(String, String)>) -> bool {
        let terms_eq = |a: &Term, b: &Term, env: &mut Vec<(String, String)>| a.alpha_eq_in(b, env);
        match (self, other) {
            (Formula::Rel(s, xs), Formula::Rel(t, ys)) => {
                s == t && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| terms_eq(x, y, env))
            }
            (Formula::St(a), Formula::St(b)) => terms_eq(a, b, env),
            (Formula::ApproxReal(a1, a2), Formula::ApproxReal(b1, b2))
            | (Formula::ApproxBaire(a1, a2), Formula::ApproxBaire(b1, b2)) => {
                terms_eq(a1, b1, env) && terms_eq(a2, b2, env)
            }
            (Formula::Not(a), Formula::Not(b)) => a.alpha_eq_in(b, env),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Implies(a1, a2), Formula::Implies(b1, b2)) => {
                a1.alpha_eq_in(b1, env) && a2.alpha_eq_in(b2, env)
            }
            (
                Formula::Quant { kind: k1, standard: s1, var: v1, ty: t1, body: b1 },
                Formula::Quant { kind: k2, standard: s2, var: v2, ty: t2, body: b2 },
            ) => {
                if k1 != k2 || s1 != s2 || t1 != t2 {
                    return false;
                }
                env.push((v1.clone(), v2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.pop();
                r
            }
            (Formula::InfiniteNat(v1, b1), Formula::InfiniteNat(v2, b2)) => {
                env.push((v1.clone(), v2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.pop();
                r
            }
            (
                Formula::ElemOfSeq { var: v1, elem: e1, seq: s1, body: b1 },
                Formula::ElemOfSeq { var: v2, elem: e2, seq: s2, body: b2 },
            ) => {
                if e1 != e2 || !terms_eq(s1, s2, env) {
                    return false;
                }
                env.push((v1.clone(), v2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }

    /// Checks binder consistency, relation signatures and sugar argument types.
    pub fn check(&self) -> Result<(), TypeError> {
        let mut sigs: BTreeMap<String, Vec<FinType>> = BTreeMap::new();
        let mut ctx = BTreeMap::new();
        self.check_in(&mut ctx, &mut sigs)
    }

    fn check_in(
        &self,
        ctx: &mut BTreeMap<String, FinType>,
        sigs: &mut BTreeMap<String, Vec<FinType>>,
    ) -> Result<(), TypeError> {
        let err = |msg: String| TypeError::new(msg, super::print::print(self));
        match self {
            Formula::Rel(sym, args) => {
                let tys = args.iter().map(|a| a.check(ctx)).collect::<Result<Vec<_>, _>>()?;
                if let Some(expected) = builtin_signature(sym, &tys) {
                    if expected != tys {
                        return Err(err(format!(
                            "relation `{sym}` expects ({}), got ({})",
                            join_types(&expected),
                            join_types(&tys)
                        )));
                    }
                    return Ok(());
                }
                match sigs.get(sym) {
                    Some(prev) if *prev != tys => Err(err(format!(
                        "relation `{sym}` used with ({}) and ({})",
                        join_types(prev),
                        join_types(&tys)
                    ))),
                    Some(_) => Ok(()),
                    None => {
                        sigs.insert(sym.clone(), tys);
                        Ok(())
                    }
                }
            }
            Formula::St(t) => t.check(ctx).map(|_| ()),
            Formula::ApproxReal(a, b) => {
                let ta = a.check(ctx)?;
                let tb = b.check(ctx)?;
                if ta != tb {
                    return Err(err(format!("approxR compares {ta} with {tb}")));
                }
                Ok(())
            }
            Formula::ApproxBaire(a, b) => {
                for t in [a, b] {
                    let ty = t.check(ctx)?;
                    if ty != FinType::pure(1) {
                        return Err(TypeError::new(format!("approx1 expects type 1, found {ty}"), t.to_string()));
                    }
                }
                Ok(())
            }
            Formula::ElemOfSeq { var, elem, seq, body } => {
                let sty = seq.check(ctx)?;
                if sty != FinType::seq(elem.clone()) {
                    return Err(err(format!("bounded quantifier over {sty} binds {var} at {elem}")));
                }
                with_binding(ctx, var, elem.clone(), |ctx| body.check_in(ctx, sigs))
            }
            Formula::Quant { var, ty, body, .. } => with_binding(ctx, var, ty.clone(), |ctx| body.check_in(ctx, sigs)),
            Formula::InfiniteNat(v, body) => with_binding(ctx, v, FinType::Nat, |ctx| body.check_in(ctx, sigs)),
            _ => {
                for c in self.children() {
                    c.check_in(ctx, sigs)?;
                }
                Ok(())
            }
        }
    }
}

fn with_binding<R>(
    ctx: &mut BTreeMap<String, FinType>,
    var: &str,
    ty: FinType,
    f: impl FnOnce(&mut BTreeMap<String, FinType>) -> R,
) -> R {
    let saved = ctx.insert(var.to_string(), ty);
    let r = f(ctx);
    match saved {
        Some(prev) => ctx.insert(var.to_string(), prev),
        None => ctx.remove(var),
    };
    r
}

fn join_types(tys: &[FinType]) -> String {
    tys.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

/// Built-in relation symbols with a fixed meaning in every model.
///
/// `eq` is equality at any type; `le`/`lt` compare naturals; `le1` is the
/// pointwise order on type-1 objects.
pub fn builtin_signature(sym: &str, actual: &[FinType]) -> Option<Vec<FinType>> {
    match sym {
        "eq" => {
            let ty = actual.first().cloned().unwrap_or(FinType::Nat);
            Some(vec![ty.clone(), ty])
        }
        "le" | "lt" => Some(vec![FinType::Nat, FinType::Nat]),
        "le1" => Some(vec![FinType::pure(1), FinType::pure(1)]),
        _ => None,
    }
}

pub fn is_builtin_relation(sym: &str) -> bool {
    matches!(sym, "eq" | "le" | "lt" | "le1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: &str) -> Term {
        Term::var(v, FinType::Nat)
    }

    #[test]
    fn classification() {
        let atom = Formula::rel("A", vec![n("k")]);
        assert_eq!(atom.classify(), FormulaClass::Internal);
        let st = Formula::forall_st("k", FinType::Nat, atom.clone());
        assert_eq!(st.classify(), FormulaClass::External);
        let sugar = Formula::ApproxReal(n("x"), n("y"));
        assert_eq!(sugar.classify(), FormulaClass::External);
        let bounded = Formula::elem_of("y", FinType::Nat, Term::var("w", FinType::seq(FinType::Nat)), atom.clone());
        assert_eq!(bounded.classify(), FormulaClass::Internal);
    }

    #[test]
    fn polarity_tracks_antecedents_and_negation() {
        let a = Formula::rel("A", vec![]);
        let f = Formula::implies(Formula::not(a.clone()), a.clone());
        assert_eq!(f.polarity_at(&[0]), Some(Polarity::Negative));
        assert_eq!(f.polarity_at(&[0, 0]), Some(Polarity::Positive));
        assert_eq!(f.polarity_at(&[1]), Some(Polarity::Positive));
        assert_eq!(f.polarity_at(&[2]), None);
    }

    #[test]
    fn alpha_normalize_renames_clashing_binders() {
        let body = Formula::rel("A", vec![n("x")]);
        let f = Formula::and(
            Formula::forall("x", FinType::Nat, body.clone()),
            Formula::forall("x", FinType::Nat, body.clone()),
        );
        assert!(!f.has_unique_binders());
        let g = f.alpha_normalize();
        assert!(g.has_unique_binders());
        assert!(f.alpha_eq(&g));
        assert_eq!(g.alpha_normalize(), g);
    }

    #[test]
    fn free_variable_is_not_captured_by_substitution() {
        let f = Formula::forall("y", FinType::Nat, Formula::rel("R", vec![n("x"), n("y")]));
        let g = f.substitute("x", &n("y"));
        assert!(g.free_vars().contains_key("y"));
        let Formula::Quant { var, .. } = &g else { panic!() };
        assert_ne!(var, "y");
    }

    #[test]
    fn relation_arity_must_be_consistent() {
        let f = Formula::and(Formula::rel("R", vec![n("x")]), Formula::rel("R", vec![n("x"), n("x")]));
        assert!(f.check().is_err());
    }
}
