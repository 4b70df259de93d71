//! Surface-syntax printer.
//!
//! Output re-parses to an alpha-equivalent formula. Free variables whose type
//! is not `0` carry an ascription `(f:T)` at their first occurrence so the
//! parser does not have to guess their type.

use std::collections::BTreeSet;

use super::formula::{Formula, QuantKind};
use super::term::Term;
use super::types::FinType;

struct Printer {
    out: String,
    bound: Vec<String>,
    ascribed: BTreeSet<String>,
}

pub fn print(f: &Formula) -> String {
    let mut p = Printer::new();
    p.formula(f, 0);
    p.out
}

pub fn print_term(t: &Term) -> String {
    let mut p = Printer::new();
    p.term(t, TermCtx::Top);
    p.out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TermCtx {
    Top,
    Fun,
    Arg,
}

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl Printer {
    fn new() -> Printer {
        Printer { out: String::new(), bound: Vec::new(), ascribed: BTreeSet::new() }
    }

    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn bracketed(&mut self, wrap: bool, body: impl FnOnce(&mut Printer)) {
        if wrap {
            self.push("[");
        }
        body(self);
        if wrap {
            self.push("]");
        }
    }

    fn with_bound(&mut self, var: &str, body: impl FnOnce(&mut Printer)) {
        self.bound.push(var.to_string());
        body(self);
        self.bound.pop();
    }

    fn formula(&mut self, f: &Formula, prec: u8) {
        match f {
            Formula::Implies(a, b) => self.bracketed(prec > IMP, |p| {
                p.formula(a, OR);
                p.push(" -> ");
                p.formula(b, IMP);
            }),
            Formula::Or(a, b) => self.bracketed(prec > OR, |p| {
                p.formula(a, OR);
                p.push(" | ");
                p.formula(b, AND);
            }),
            Formula::And(a, b) => self.bracketed(prec > AND, |p| {
                p.formula(a, AND);
                p.push(" & ");
                p.formula(b, UNARY);
            }),
            Formula::Not(a) => {
                self.push("~");
                self.formula(a, UNARY);
            }
            Formula::Quant { kind, standard, var, ty, body } => {
                let k = match kind {
                    QuantKind::Forall => "forall",
                    QuantKind::Exists => "exists",
                };
                let st = if *standard { "^st" } else { "" };
                self.push(&format!("({k}{st} {var}:{ty})"));
                self.with_bound(var, |p| p.formula(body, UNARY));
            }
            Formula::InfiniteNat(var, body) => {
                self.push(&format!("inOmega({var})"));
                self.with_bound(var, |p| p.formula(body, UNARY));
            }
            Formula::ElemOfSeq { var, seq, body, .. } => {
                self.push(&format!("(exists {var} in "));
                self.term(seq, TermCtx::Top);
                self.push(")");
                self.with_bound(var, |p| p.formula(body, UNARY));
            }
            Formula::Rel(sym, args) => {
                self.push(sym);
                self.args(args);
            }
            Formula::St(t) => {
                self.push("st");
                self.args(std::slice::from_ref(t));
            }
            Formula::ApproxReal(a, b) => {
                self.push("approxR");
                self.args(&[a.clone(), b.clone()]);
            }
            Formula::ApproxBaire(a, b) => {
                self.push("approx1");
                self.args(&[a.clone(), b.clone()]);
            }
        }
    }

    fn args(&mut self, args: &[Term]) {
        self.push("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.term(a, TermCtx::Top);
        }
        self.push(")");
    }

    fn term(&mut self, t: &Term, ctx: TermCtx) {
        match t {
            Term::Var(name, ty) => {
                let free = !self.bound.iter().any(|b| b == name);
                if free && *ty != FinType::Nat && self.ascribed.insert(name.clone()) {
                    self.push(&format!("({name}:{ty})"));
                } else {
                    self.push(name);
                }
            }
            Term::App(fun, arg) => {
                let wrap = ctx == TermCtx::Arg;
                if wrap {
                    self.push("(");
                }
                self.term(fun, TermCtx::Fun);
                self.push(" ");
                self.term(arg, TermCtx::Arg);
                if wrap {
                    self.push(")");
                }
            }
            Term::Lam(var, ty, body) => {
                let wrap = ctx != TermCtx::Top;
                if wrap {
                    self.push("(");
                }
                self.push(&format!("\\{var}:{ty}. "));
                self.with_bound(var, |p| p.term(body, TermCtx::Top));
                if wrap {
                    self.push(")");
                }
            }
            Term::Zero => self.push("zero"),
            Term::Num(n) => self.push(&n.to_string()),
            Term::Succ(a) => self.call("succ", &[a]),
            Term::Rec(a, b) => self.call("rec", &[a, b]),
            Term::SeqLen(a) => self.call("len", &[a]),
            Term::SeqGet(a, b) => self.call("get", &[a, b]),
            Term::SeqAppend(a, b) => self.call("append", &[a, b]),
            Term::MaxOf(a) => self.call("max", &[a]),
            Term::SeqLit(elem, items) => {
                let ascribe = items.is_empty() && *elem != FinType::Nat;
                if ascribe {
                    self.push("(");
                }
                self.push("<");
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        self.push(", ");
                    }
                    self.term(it, TermCtx::Top);
                }
                self.push(">");
                if ascribe {
                    self.push(&format!(":{})", FinType::seq(elem.clone())));
                }
            }
        }
    }

    fn call(&mut self, name: &str, args: &[&Term]) {
        self.push(name);
        self.push("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.term(a, TermCtx::Top);
        }
        self.push(")");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_marker_and_brackets() {
        let k = Term::var("k", FinType::Nat);
        let f = Formula::forall_st(
            "k",
            FinType::Nat,
            Formula::implies(Formula::rel("A", vec![k.clone()]), Formula::rel("B", vec![k])),
        );
        assert_eq!(print(&f), "(forall^st k:0)[A(k) -> B(k)]");
    }

    #[test]
    fn free_function_is_ascribed_once() {
        let f = Term::var("f", FinType::pure(1));
        let x = Term::var("x", FinType::Nat);
        let phi = Formula::eq(Term::app(f.clone(), x.clone()), Term::app(f, x));
        assert_eq!(print(&phi), "eq((f:1) x, f x)");
    }

    #[test]
    fn application_arguments_are_parenthesized() {
        let f = Term::var("f", FinType::pure(1));
        let g = Term::var("g", FinType::pure(1));
        let t = Term::app(f, Term::app(g, Term::Zero));
        assert_eq!(print_term(&t), "(f:1) ((g:1) zero)");
    }
}
