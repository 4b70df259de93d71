use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::types::FinType;
use super::TypeError;

/// Terms of the finite-type primitive-recursive calculus with finite sequences.
///
/// Variables carry their type; the parser resolves these by inference.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String, FinType),
    App(Box<Term>, Box<Term>),
    Lam(String, FinType, Box<Term>),
    Zero,
    Succ(Box<Term>),
    Num(BigUint),
    /// Primitive recursor: `Rec(base, step) n` unfolds `step` `n` times over `base`.
    Rec(Box<Term>, Box<Term>),
    SeqLit(FinType, Vec<Term>),
    SeqLen(Box<Term>),
    SeqGet(Box<Term>, Box<Term>),
    SeqAppend(Box<Term>, Box<Term>),
    MaxOf(Box<Term>),
}

pub type TypeContext = BTreeMap<String, FinType>;

impl Term {
    pub fn var(name: impl Into<String>, ty: FinType) -> Term {
        Term::Var(name.into(), ty)
    }

    pub fn num(n: u64) -> Term {
        Term::Num(BigUint::from(n))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn lam(var: impl Into<String>, ty: FinType, body: Term) -> Term {
        Term::Lam(var.into(), ty, Box::new(body))
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn rec(base: Term, step: Term) -> Term {
        Term::Rec(Box::new(base), Box::new(step))
    }

    pub fn max_of(t: Term) -> Term {
        Term::MaxOf(Box::new(t))
    }

    pub fn seq_get(s: Term, i: Term) -> Term {
        Term::SeqGet(Box::new(s), Box::new(i))
    }

    pub fn seq_len(s: Term) -> Term {
        Term::SeqLen(Box::new(s))
    }

    pub fn seq_append(s: Term, e: Term) -> Term {
        Term::SeqAppend(Box::new(s), Box::new(e))
    }

    /// Type of a term whose variables carry their own types.
    ///
    /// Bound variables must agree with their binder; free variables are
    /// taken at their annotated type.
    pub fn type_of(&self) -> Result<FinType, TypeError> {
        self.check(&mut TypeContext::new())
    }

    pub fn check(&self, ctx: &mut TypeContext) -> Result<FinType, TypeError> {
        let err = |msg: String| TypeError::new(msg, self.to_string());
        match self {
            Term::Var(name, ty) => {
                if let Some(bound) = ctx.get(name) {
                    if bound != ty {
                        return Err(err(format!(
                            "variable `{name}` used at type {ty} but bound at type {bound}"
                        )));
                    }
                }
                Ok(ty.clone())
            }
            Term::App(fun, arg) => {
                let fty = fun.check(ctx)?;
                let aty = arg.check(ctx)?;
                match fty {
                    FinType::Arrow(dom, cod) if *dom == aty => Ok(*cod),
                    FinType::Arrow(dom, _) => Err(err(format!(
                        "argument of type {aty} where {dom} was expected"
                    ))),
                    other => Err(err(format!("applying a non-function of type {other}"))),
                }
            }
            Term::Lam(var, ty, body) => {
                let saved = ctx.insert(var.clone(), ty.clone());
                let bty = body.check(ctx);
                match saved {
                    Some(prev) => ctx.insert(var.clone(), prev),
                    None => ctx.remove(var),
                };
                Ok(FinType::arrow(ty.clone(), bty?))
            }
            Term::Zero | Term::Num(_) => Ok(FinType::Nat),
            Term::Succ(t) => expect(ctx, t, &FinType::Nat).map(|_| FinType::Nat),
            Term::Rec(base, step) => {
                let sigma = base.check(ctx)?;
                let want = FinType::arrow(FinType::Nat, FinType::arrow(sigma.clone(), sigma.clone()));
                expect(ctx, step, &want)?;
                Ok(FinType::arrow(FinType::Nat, sigma))
            }
            Term::SeqLit(elem, items) => {
                for it in items {
                    expect(ctx, it, elem)?;
                }
                Ok(FinType::seq(elem.clone()))
            }
            Term::SeqLen(s) => {
                seq_elem(ctx, s)?;
                Ok(FinType::Nat)
            }
            Term::SeqGet(s, i) => {
                let el = seq_elem(ctx, s)?;
                expect(ctx, i, &FinType::Nat)?;
                Ok(el)
            }
            Term::SeqAppend(s, e) => {
                let el = seq_elem(ctx, s)?;
                expect(ctx, e, &el)?;
                Ok(FinType::seq(el))
            }
            Term::MaxOf(s) => {
                let el = seq_elem(ctx, s)?;
                if el != FinType::Nat {
                    return Err(err(format!("max applies to 0* only, found {el}*")));
                }
                Ok(FinType::Nat)
            }
        }
    }

    pub fn free_vars(&self) -> BTreeMap<String, FinType> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(
        &self,
        bound: &mut BTreeSet<String>,
        out: &mut BTreeMap<String, FinType>,
    ) {
        match self {
            Term::Var(n, ty) => {
                if !bound.contains(n) {
                    out.entry(n.clone()).or_insert_with(|| ty.clone());
                }
            }
            Term::Lam(v, _, body) => {
                let fresh = bound.insert(v.clone());
                body.collect_free(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
            _ => self.for_each_child(|c| c.collect_free(bound, out)),
        }
    }

    fn for_each_child(&self, mut f: impl FnMut(&Term)) {
        match self {
            Term::Var(..) | Term::Zero | Term::Num(_) => {}
            Term::App(a, b)
            | Term::Rec(a, b)
            | Term::SeqGet(a, b)
            | Term::SeqAppend(a, b) => {
                f(a);
                f(b);
            }
            Term::Lam(_, _, a) | Term::Succ(a) | Term::SeqLen(a) | Term::MaxOf(a) => f(a),
            Term::SeqLit(_, items) => items.iter().for_each(f),
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(n, _) => {
                out.insert(n.clone());
            }
            Term::Lam(v, _, body) => {
                out.insert(v.clone());
                body.all_names(out);
            }
            _ => self.for_each_child(|c| c.all_names(out)),
        }
    }

    /// Capture-avoiding substitution of `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Term) -> Term {
        let avoid: BTreeSet<String> = with.free_vars().into_keys().collect();
        self.subst_inner(name, with, &avoid)
    }

    fn subst_inner(&self, name: &str, with: &Term, avoid: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(n, _) if n == name => with.clone(),
            Term::Lam(v, ty, body) => {
                if v == name {
                    return self.clone();
                }
                if avoid.contains(v) {
                    let mut taken = avoid.clone();
                    body.all_names(&mut taken);
                    taken.insert(name.to_string());
                    let fresh = super::fresh_name(v, &taken);
                    let renamed = body.subst_inner(v, &Term::Var(fresh.clone(), ty.clone()), &BTreeSet::new());
                    Term::lam(fresh, ty.clone(), renamed.subst_inner(name, with, avoid))
                } else {
                    Term::lam(v.clone(), ty.clone(), body.subst_inner(name, with, avoid))
                }
            }
            _ => self.map_children(|c| c.subst_inner(name, with, avoid)),
        }
    }

    fn map_children(&self, mut f: impl FnMut(&Term) -> Term) -> Term {
        match self {
            Term::Var(..) | Term::Zero | Term::Num(_) => self.clone(),
            Term::App(a, b) => Term::App(Box::new(f(a)), Box::new(f(b))),
            Term::Rec(a, b) => Term::Rec(Box::new(f(a)), Box::new(f(b))),
            Term::SeqGet(a, b) => Term::SeqGet(Box::new(f(a)), Box::new(f(b))),
            Term::SeqAppend(a, b) => Term::SeqAppend(Box::new(f(a)), Box::new(f(b))),
            Term::Lam(v, ty, a) => Term::Lam(v.clone(), ty.clone(), Box::new(f(a))),
            Term::Succ(a) => Term::Succ(Box::new(f(a))),
            Term::SeqLen(a) => Term::SeqLen(Box::new(f(a))),
            Term::MaxOf(a) => Term::MaxOf(Box::new(f(a))),
            Term::SeqLit(ty, items) => Term::SeqLit(ty.clone(), items.iter().map(f).collect()),
        }
    }

    /// Alpha-equivalence, with `env` pairing bound names of `self` and `other`.
    pub(crate) fn alpha_eq_in(&self, other: &Term, env: &mut Vec<(String, String)>) -> bool {
        match (self, other) {
            (Term::Var(a, ta), Term::Var(b, tb)) => {
                if ta != tb {
                    return false;
                }
                for (x, y) in env.iter().rev() {
                    if x == a || y == b {
                        return x == a && y == b;
                    }
                }
                a == b
            }
            (Term::Lam(va, ta, ba), Term::Lam(vb, tb, bb)) => {
                if ta != tb {
                    return false;
                }
                env.push((va.clone(), vb.clone()));
                let r = ba.alpha_eq_in(bb, env);
                env.pop();
                r
            }
            (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::Rec(a1, a2), Term::Rec(b1, b2))
            | (Term::SeqGet(a1, a2), Term::SeqGet(b1, b2))
            | (Term::SeqAppend(a1, a2), Term::SeqAppend(b1, b2)) => {
                a1.alpha_eq_in(b1, env) && a2.alpha_eq_in(b2, env)
            }
            (Term::Succ(a), Term::Succ(b))
            | (Term::SeqLen(a), Term::SeqLen(b))
            | (Term::MaxOf(a), Term::MaxOf(b)) => a.alpha_eq_in(b, env),
            (Term::SeqLit(ta, xs), Term::SeqLit(tb, ys)) => {
                ta == tb
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| x.alpha_eq_in(y, env))
            }
            (Term::Zero, Term::Zero) => true,
            (Term::Num(a), Term::Num(b)) => a == b,
            _ => false,
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.alpha_eq_in(other, &mut Vec::new())
    }

    /// Renames every binder to a name not in `taken`, recording new names in `taken`.
    pub(crate) fn freshen_binders(&self, taken: &mut BTreeSet<String>) -> Term {
        match self {
            Term::Lam(v, ty, body) => {
                let fresh = if taken.contains(v) { super::fresh_name(v, taken) } else { v.clone() };
                taken.insert(fresh.clone());
                let body = if &fresh != v {
                    body.subst_inner(v, &Term::Var(fresh.clone(), ty.clone()), &BTreeSet::new())
                } else {
                    (**body).clone()
                };
                Term::lam(fresh, ty.clone(), body.freshen_binders(taken))
            }
            _ => self.map_children(|c| c.freshen_binders(taken)),
        }
    }
}

fn expect(ctx: &mut TypeContext, t: &Term, want: &FinType) -> Result<(), TypeError> {
    let got = t.check(ctx)?;
    if &got != want {
        return Err(TypeError::new(
            format!("expected type {want}, found {got}"),
            t.to_string(),
        ));
    }
    Ok(())
}

fn seq_elem(ctx: &mut TypeContext, s: &Term) -> Result<FinType, TypeError> {
    match s.check(ctx)? {
        FinType::Seq(el) => Ok(*el),
        other => Err(TypeError::new(
            format!("expected a finite sequence, found {other}"),
            s.to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: &str) -> Term {
        Term::var(n, FinType::Nat)
    }

    #[test]
    fn rec_has_function_type() {
        let step = Term::lam("k", FinType::Nat, Term::lam("acc", FinType::Nat, Term::succ(nat("acc"))));
        let t = Term::rec(Term::num(3), step);
        assert_eq!(t.type_of().unwrap(), FinType::pure(1));
    }

    #[test]
    fn max_rejects_non_nat_sequences() {
        let s = Term::SeqLit(FinType::pure(1), vec![]);
        assert!(Term::max_of(s).type_of().is_err());
        let s = Term::SeqLit(FinType::Nat, vec![Term::num(3), Term::num(1)]);
        assert_eq!(Term::max_of(s).type_of().unwrap(), FinType::Nat);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\y. x y)[x := y]  must not capture the free y
        let f = Term::var("x", FinType::pure(1));
        let body = Term::app(f, nat("y"));
        let lam = Term::lam("y", FinType::Nat, body);
        let out = lam.substitute("x", &Term::var("y", FinType::pure(1)));
        let Term::Lam(v, _, _) = &out else { panic!() };
        assert_ne!(v, "y");
        assert!(out.free_vars().contains_key("y"));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Term::lam("x", FinType::Nat, Term::succ(nat("x")));
        let b = Term::lam("z", FinType::Nat, Term::succ(nat("z")));
        let c = Term::lam("z", FinType::Nat, Term::succ(nat("x")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn ill_typed_application_is_rejected() {
        let t = Term::app(nat("x"), nat("y"));
        let e = t.type_of().unwrap_err();
        assert!(e.subterm.contains('x'));
    }
}
