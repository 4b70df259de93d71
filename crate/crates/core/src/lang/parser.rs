//! Tokenizer, recursive-descent parser and type inference for the surface syntax.
//!
//! Precedence, loosest first: `->` (right associative), `|`, `&`, then the
//! prefix forms `~`, quantifier prefixes and `inOmega(N)`. A quantifier prefix
//! binds like negation, so `(forall x:0)A(x) -> B` is an implication.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigUint;

use super::formula::{Formula, QuantKind};
use super::term::Term;
use super::types::FinType;
use super::{ParseError, TypeError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigUint),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Comma,
    Colon,
    Dot,
    Backslash,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Star,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::Lt => "<",
                    Tok::Gt => ">",
                    Tok::Comma => ",",
                    Tok::Colon => ":",
                    Tok::Dot => ".",
                    Tok::Backslash => "\\",
                    Tok::Tilde => "~",
                    Tok::Amp => "&",
                    Tok::Bar => "|",
                    Tok::Arrow => "->",
                    Tok::Star => "*",
                    Tok::Caret => "^",
                    _ => unreachable!(),
                };
                format!("`{s}`")
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn syntax(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = line_col(src, offset);
    ParseError::Syntax { line, column, message: message.into() }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            let n: BigUint = src[i..end].parse().expect("digits");
            out.push(Token { tok: Tok::Num(n), start: i, end });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_' || d == '\'') {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(Token { tok: Tok::Ident(src[i..end].to_string()), start: i, end });
            continue;
        }
        chars.next();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '\\' => Tok::Backslash,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '-' => match chars.peek() {
                Some(&(_, '>')) => {
                    chars.next();
                    Tok::Arrow
                }
                _ => return Err(syntax(src, i, "expected `->`")),
            },
            other => return Err(syntax(src, i, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, start: i, end: i + c.len_utf8() });
    }
    out.push(Token { tok: Tok::Eof, start: src.len(), end: src.len() });
    Ok(out)
}

// Untyped syntax trees, carrying source spans for error reporting.

#[derive(Clone, Debug)]
struct PTerm {
    kind: PTermKind,
    span: Range<usize>,
}

#[derive(Clone, Debug)]
enum PTermKind {
    Var(String),
    App(Box<PTerm>, Box<PTerm>),
    Lam(String, Option<FinType>, Box<PTerm>),
    Zero,
    Num(BigUint),
    Succ(Box<PTerm>),
    Rec(Box<PTerm>, Box<PTerm>),
    Len(Box<PTerm>),
    Get(Box<PTerm>, Box<PTerm>),
    Append(Box<PTerm>, Box<PTerm>),
    Max(Box<PTerm>),
    SeqLit(Vec<PTerm>),
    Ascribe(Box<PTerm>, FinType),
}

#[derive(Clone, Debug)]
enum PFormula {
    Rel(String, Vec<PTerm>, Range<usize>),
    Not(Box<PFormula>),
    And(Box<PFormula>, Box<PFormula>),
    Or(Box<PFormula>, Box<PFormula>),
    Implies(Box<PFormula>, Box<PFormula>),
    Quant(QuantKind, bool, String, Option<FinType>, Box<PFormula>),
    St(PTerm),
    ApproxR(PTerm, PTerm, Range<usize>),
    Approx1(PTerm, PTerm),
    InOmega(String, Box<PFormula>),
    ElemOf(String, PTerm, Box<PFormula>),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

const TERM_BUILTINS: &[&str] = &["succ", "rec", "len", "get", "append", "max"];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser { src, toks: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn start(&self) -> usize {
        self.toks[self.pos].start
    }

    fn last_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(syntax(self.src, self.start(), message))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn is_ident(&self, k: usize, name: &str) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if s == name)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {} after end of formula", self.peek().describe()));
        }
        Ok(())
    }

    // types

    fn ty(&mut self) -> Result<FinType, ParseError> {
        let lhs = self.ty_postfix()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            return Ok(FinType::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ty_postfix(&mut self) -> Result<FinType, ParseError> {
        let mut t = match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                let level: usize = n
                    .try_into()
                    .ok()
                    .filter(|l: &usize| *l <= 16)
                    .map_or_else(|| self.error("type level too large"), Ok)?;
                FinType::pure(level)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            other => return self.error(format!("expected a type, found {}", other.describe())),
        };
        while *self.peek() == Tok::Star {
            self.bump();
            t = FinType::seq(t);
        }
        Ok(t)
    }

    // formulas

    fn formula(&mut self) -> Result<PFormula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(PFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<PFormula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = PFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<PFormula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = PFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PFormula, ParseError> {
        let start = self.start();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(PFormula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen if self.is_ident(1, "forall") || self.is_ident(1, "exists") => self.quantified(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrack => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RBrack)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "inOmega" => {
                        self.expect(Tok::LParen)?;
                        let v = self.ident()?;
                        self.expect(Tok::RParen)?;
                        Ok(PFormula::InOmega(v, Box::new(self.unary()?)))
                    }
                    "st" => {
                        let mut args = self.arg_list()?;
                        if args.len() != 1 {
                            return Err(syntax(self.src, start, "st takes exactly one argument"));
                        }
                        Ok(PFormula::St(args.remove(0)))
                    }
                    "approxR" | "approx1" => {
                        let args = self.arg_list()?;
                        let [a, b]: [PTerm; 2] = args
                            .try_into()
                            .map_err(|_| syntax(self.src, start, format!("{name} takes two arguments")))?;
                        if name == "approxR" {
                            Ok(PFormula::ApproxR(a, b, start..self.last_end()))
                        } else {
                            Ok(PFormula::Approx1(a, b))
                        }
                    }
                    "forall" | "exists" => Err(syntax(self.src, start, "quantifier must be written `(forall x:T)`")),
                    _ => {
                        let args = self.arg_list()?;
                        Ok(PFormula::Rel(name, args, start..self.last_end()))
                    }
                }
            }
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn quantified(&mut self) -> Result<PFormula, ParseError> {
        self.expect(Tok::LParen)?;
        let kind = match self.ident()?.as_str() {
            "forall" => QuantKind::Forall,
            _ => QuantKind::Exists,
        };
        let mut standard = false;
        if *self.peek() == Tok::Caret {
            self.bump();
            if self.ident()? != "st" {
                return self.error("expected `st` after `^`");
            }
            standard = true;
        }
        let var = self.ident()?;
        if !standard && kind == QuantKind::Exists && self.is_ident(0, "in") {
            self.bump();
            let seq = self.term()?;
            self.expect(Tok::RParen)?;
            let body = self.quant_body()?;
            return Ok(PFormula::ElemOf(var, seq, Box::new(body)));
        }
        let ty = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.ty()?)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        let body = self.quant_body()?;
        Ok(PFormula::Quant(kind, standard, var, ty, Box::new(body)))
    }

    fn quant_body(&mut self) -> Result<PFormula, ParseError> {
        match self.peek() {
            Tok::Eof | Tok::RParen | Tok::RBrack | Tok::Amp | Tok::Bar | Tok::Arrow => {
                self.error("quantifier is missing its body")
            }
            _ => self.unary(),
        }
    }

    fn arg_list(&mut self) -> Result<Vec<PTerm>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.bump() {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                other => {
                    self.pos -= 1;
                    return self.error(format!("expected `,` or `)`, found {}", other.describe()));
                }
            }
        }
    }

    // terms

    fn term(&mut self) -> Result<PTerm, ParseError> {
        let start = self.start();
        if *self.peek() == Tok::Backslash {
            self.bump();
            let var = self.ident()?;
            let ty = if *self.peek() == Tok::Colon {
                self.bump();
                Some(self.ty()?)
            } else {
                None
            };
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(PTerm { kind: PTermKind::Lam(var, ty, Box::new(body)), span: start..self.last_end() });
        }
        let mut t = self.term_atom()?;
        while self.starts_atom() {
            let arg = self.term_atom()?;
            t = PTerm { kind: PTermKind::App(Box::new(t), Box::new(arg)), span: start..self.last_end() };
        }
        Ok(t)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Num(_) | Tok::LParen | Tok::Lt)
    }

    fn term_atom(&mut self) -> Result<PTerm, ParseError> {
        let start = self.start();
        let kind = match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                PTermKind::Num(n)
            }
            Tok::Ident(name) if name == "zero" => {
                self.bump();
                PTermKind::Zero
            }
            Tok::Ident(name) if TERM_BUILTINS.contains(&name.as_str()) && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                let args = self.arg_list()?;
                let arity = if matches!(name.as_str(), "rec" | "get" | "append") { 2 } else { 1 };
                if args.len() != arity {
                    return Err(syntax(self.src, start, format!("`{name}` takes {arity} argument(s)")));
                }
                let mut it = args.into_iter().map(Box::new);
                let mut next = || it.next().unwrap();
                match name.as_str() {
                    "succ" => PTermKind::Succ(next()),
                    "len" => PTermKind::Len(next()),
                    "max" => PTermKind::Max(next()),
                    "rec" => PTermKind::Rec(next(), next()),
                    "get" => PTermKind::Get(next(), next()),
                    _ => PTermKind::Append(next(), next()),
                }
            }
            Tok::Ident(name) => {
                self.bump();
                PTermKind::Var(name)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                let kind = if *self.peek() == Tok::Colon {
                    self.bump();
                    PTermKind::Ascribe(Box::new(inner), self.ty()?)
                } else {
                    self.expect(Tok::RParen)?;
                    return Ok(PTerm { span: start..self.last_end(), ..inner });
                };
                self.expect(Tok::RParen)?;
                kind
            }
            Tok::Lt => {
                self.bump();
                let mut items = Vec::new();
                if *self.peek() != Tok::Gt {
                    loop {
                        items.push(self.term()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::Gt)?;
                PTermKind::SeqLit(items)
            }
            other => return self.error(format!("expected a term, found {}", other.describe())),
        };
        Ok(PTerm { kind, span: start..self.last_end() })
    }
}

// Type inference: monomorphic unification with metavariables.

#[derive(Clone, Debug)]
enum IType {
    Nat,
    Arrow(Box<IType>, Box<IType>),
    Seq(Box<IType>),
    Meta(usize),
}

impl IType {
    fn from_fin(t: &FinType) -> IType {
        match t {
            FinType::Nat => IType::Nat,
            FinType::Arrow(a, b) => IType::Arrow(Box::new(IType::from_fin(a)), Box::new(IType::from_fin(b))),
            FinType::Seq(a) => IType::Seq(Box::new(IType::from_fin(a))),
        }
    }
}

#[derive(Clone, Debug)]
enum ITerm {
    Var(String, IType),
    App(Box<ITerm>, Box<ITerm>),
    Lam(String, IType, Box<ITerm>),
    Zero,
    Num(BigUint),
    Succ(Box<ITerm>),
    Rec(Box<ITerm>, Box<ITerm>),
    Len(Box<ITerm>),
    Get(Box<ITerm>, Box<ITerm>),
    Append(Box<ITerm>, Box<ITerm>),
    Max(Box<ITerm>),
    SeqLit(IType, Vec<ITerm>),
}

#[derive(Clone, Debug)]
enum IFormula {
    Rel(String, Vec<ITerm>),
    Not(Box<IFormula>),
    And(Box<IFormula>, Box<IFormula>),
    Or(Box<IFormula>, Box<IFormula>),
    Implies(Box<IFormula>, Box<IFormula>),
    Quant(QuantKind, bool, String, IType, Box<IFormula>),
    St(ITerm),
    ApproxR(ITerm, ITerm),
    Approx1(ITerm, ITerm),
    InOmega(String, Box<IFormula>),
    ElemOf(String, IType, ITerm, Box<IFormula>),
}

struct Infer<'a> {
    src: &'a str,
    subst: Vec<Option<IType>>,
    scope: Vec<(String, IType)>,
    free: BTreeMap<String, IType>,
    sigs: BTreeMap<String, Vec<IType>>,
}

impl<'a> Infer<'a> {
    fn new(src: &'a str) -> Infer<'a> {
        Infer { src, subst: Vec::new(), scope: Vec::new(), free: BTreeMap::new(), sigs: BTreeMap::new() }
    }

    fn fresh(&mut self) -> IType {
        self.subst.push(None);
        IType::Meta(self.subst.len() - 1)
    }

    fn resolve(&self, t: &IType) -> IType {
        let mut t = t.clone();
        while let IType::Meta(m) = t {
            match &self.subst[m] {
                Some(s) => t = s.clone(),
                None => return IType::Meta(m),
            }
        }
        t
    }

    fn occurs(&self, m: usize, t: &IType) -> bool {
        match self.resolve(t) {
            IType::Meta(k) => k == m,
            IType::Nat => false,
            IType::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            IType::Seq(a) => self.occurs(m, &a),
        }
    }

    fn unify(&mut self, a: &IType, b: &IType) -> bool {
        match (self.resolve(a), self.resolve(b)) {
            (IType::Meta(x), IType::Meta(y)) if x == y => true,
            (IType::Meta(x), t) | (t, IType::Meta(x)) => {
                if self.occurs(x, &t) {
                    return false;
                }
                self.subst[x] = Some(t);
                true
            }
            (IType::Nat, IType::Nat) => true,
            (IType::Arrow(a1, b1), IType::Arrow(a2, b2)) => self.unify(&a1, &a2) && self.unify(&b1, &b2),
            (IType::Seq(a1), IType::Seq(a2)) => self.unify(&a1, &a2),
            _ => false,
        }
    }

    fn zonk(&self, t: &IType) -> FinType {
        match self.resolve(t) {
            IType::Nat | IType::Meta(_) => FinType::Nat,
            IType::Arrow(a, b) => FinType::arrow(self.zonk(&a), self.zonk(&b)),
            IType::Seq(a) => FinType::seq(self.zonk(&a)),
        }
    }

    fn show(&self, t: &IType) -> String {
        match self.resolve(t) {
            IType::Meta(_) => "?".into(),
            _ => self.zonk(t).to_string(),
        }
    }

    fn mismatch(&self, span: &Range<usize>, want: &IType, got: &IType) -> ParseError {
        TypeError::new(
            format!("expected type {}, found {}", self.show(want), self.show(got)),
            self.src[span.clone()].to_string(),
        )
        .into()
    }

    fn require(&mut self, span: &Range<usize>, want: &IType, got: &IType) -> Result<(), ParseError> {
        if self.unify(want, got) {
            Ok(())
        } else {
            Err(self.mismatch(span, want, got))
        }
    }

    fn bind<R>(&mut self, var: &str, ty: IType, f: impl FnOnce(&mut Self) -> R) -> R {
        self.scope.push((var.to_string(), ty));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn term(&mut self, t: &PTerm) -> Result<(ITerm, IType), ParseError> {
        let nat = IType::Nat;
        Ok(match &t.kind {
            PTermKind::Var(name) => {
                let ty = match self.scope.iter().rev().find(|(n, _)| n == name) {
                    Some((_, ty)) => ty.clone(),
                    None => match self.free.get(name) {
                        Some(ty) => ty.clone(),
                        None => {
                            let ty = self.fresh();
                            self.free.insert(name.clone(), ty.clone());
                            ty
                        }
                    },
                };
                (ITerm::Var(name.clone(), ty.clone()), ty)
            }
            PTermKind::App(f, a) => {
                let (fi, ft) = self.term(f)?;
                let (ai, at) = self.term(a)?;
                let r = self.fresh();
                let want = IType::Arrow(Box::new(at.clone()), Box::new(r.clone()));
                if !self.unify(&ft, &want) {
                    let msg = match self.resolve(&ft) {
                        IType::Arrow(dom, _) => {
                            format!("argument of type {} where {} was expected", self.show(&at), self.show(&dom))
                        }
                        other => format!("applying a non-function of type {}", self.show(&other)),
                    };
                    return Err(TypeError::new(msg, self.src[t.span.clone()].to_string()).into());
                }
                (ITerm::App(Box::new(fi), Box::new(ai)), r)
            }
            PTermKind::Lam(v, ann, body) => {
                let vt = match ann {
                    Some(ty) => IType::from_fin(ty),
                    None => self.fresh(),
                };
                let (bi, bt) = self.bind(v, vt.clone(), |s| s.term(body))?;
                (ITerm::Lam(v.clone(), vt.clone(), Box::new(bi)), IType::Arrow(Box::new(vt), Box::new(bt)))
            }
            PTermKind::Zero => (ITerm::Zero, nat),
            PTermKind::Num(n) => (ITerm::Num(n.clone()), nat),
            PTermKind::Succ(a) => {
                let (ai, at) = self.term(a)?;
                self.require(&a.span, &nat, &at)?;
                (ITerm::Succ(Box::new(ai)), nat)
            }
            PTermKind::Rec(b, s) => {
                let (bi, bt) = self.term(b)?;
                let (si, st) = self.term(s)?;
                let step = IType::Arrow(
                    Box::new(IType::Nat),
                    Box::new(IType::Arrow(Box::new(bt.clone()), Box::new(bt.clone()))),
                );
                self.require(&s.span, &step, &st)?;
                (ITerm::Rec(Box::new(bi), Box::new(si)), IType::Arrow(Box::new(nat), Box::new(bt)))
            }
            PTermKind::Len(s) => {
                let (si, _) = self.seq_term(s)?;
                (ITerm::Len(Box::new(si)), nat)
            }
            PTermKind::Get(s, i) => {
                let (si, el) = self.seq_term(s)?;
                let (ii, it) = self.term(i)?;
                self.require(&i.span, &nat, &it)?;
                (ITerm::Get(Box::new(si), Box::new(ii)), el)
            }
            PTermKind::Append(s, e) => {
                let (si, el) = self.seq_term(s)?;
                let (ei, et) = self.term(e)?;
                self.require(&e.span, &el, &et)?;
                (ITerm::Append(Box::new(si), Box::new(ei)), IType::Seq(Box::new(el)))
            }
            PTermKind::Max(s) => {
                let (si, el) = self.seq_term(s)?;
                if !self.unify(&el, &nat) {
                    return Err(TypeError::new(
                        format!("max applies to 0* only, found {}*", self.show(&el)),
                        self.src[t.span.clone()].to_string(),
                    )
                    .into());
                }
                (ITerm::Max(Box::new(si)), nat)
            }
            PTermKind::SeqLit(items) => {
                let el = self.fresh();
                let mut out = Vec::new();
                for it in items {
                    let (ii, ity) = self.term(it)?;
                    self.require(&it.span, &el, &ity)?;
                    out.push(ii);
                }
                (ITerm::SeqLit(el.clone(), out), IType::Seq(Box::new(el)))
            }
            PTermKind::Ascribe(inner, ty) => {
                let (ii, it) = self.term(inner)?;
                let want = IType::from_fin(ty);
                self.require(&inner.span, &want, &it)?;
                (ii, want)
            }
        })
    }

    fn seq_term(&mut self, s: &PTerm) -> Result<(ITerm, IType), ParseError> {
        let (si, st) = self.term(s)?;
        let el = self.fresh();
        let want = IType::Seq(Box::new(el.clone()));
        if !self.unify(&st, &want) {
            return Err(TypeError::new(
                format!("expected a finite sequence, found {}", self.show(&st)),
                self.src[s.span.clone()].to_string(),
            )
            .into());
        }
        Ok((si, el))
    }

    fn formula(&mut self, f: &PFormula) -> Result<IFormula, ParseError> {
        Ok(match f {
            PFormula::Rel(sym, args, span) => {
                let mut items = Vec::new();
                let mut tys = Vec::new();
                for a in args {
                    let (ai, at) = self.term(a)?;
                    items.push(ai);
                    tys.push(at);
                }
                let sig: Option<Vec<IType>> = match sym.as_str() {
                    "eq" => {
                        let t = self.fresh();
                        Some(vec![t.clone(), t])
                    }
                    "le" | "lt" => Some(vec![IType::Nat, IType::Nat]),
                    "le1" => {
                        let one = IType::from_fin(&FinType::pure(1));
                        Some(vec![one.clone(), one])
                    }
                    _ => self.sigs.get(sym).cloned(),
                };
                match sig {
                    Some(sig) => {
                        if sig.len() != tys.len() {
                            return Err(TypeError::new(
                                format!("relation `{sym}` takes {} argument(s), given {}", sig.len(), tys.len()),
                                self.src[span.clone()].to_string(),
                            )
                            .into());
                        }
                        for ((want, got), a) in sig.iter().zip(&tys).zip(args) {
                            self.require(&a.span, want, got)?;
                        }
                    }
                    None => {
                        self.sigs.insert(sym.clone(), tys);
                    }
                }
                IFormula::Rel(sym.clone(), items)
            }
            PFormula::Not(a) => IFormula::Not(Box::new(self.formula(a)?)),
            PFormula::And(a, b) => IFormula::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            PFormula::Or(a, b) => IFormula::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            PFormula::Implies(a, b) => IFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            PFormula::Quant(kind, standard, var, ann, body) => {
                let vt = match ann {
                    Some(ty) => IType::from_fin(ty),
                    None => self.fresh(),
                };
                let b = self.bind(var, vt.clone(), |s| s.formula(body))?;
                IFormula::Quant(*kind, *standard, var.clone(), vt, Box::new(b))
            }
            PFormula::St(t) => IFormula::St(self.term(t)?.0),
            PFormula::ApproxR(a, b, span) => {
                let (ai, at) = self.term(a)?;
                let (bi, bt) = self.term(b)?;
                if !self.unify(&at, &bt) {
                    return Err(TypeError::new(
                        format!("approxR compares {} with {}", self.show(&at), self.show(&bt)),
                        self.src[span.clone()].to_string(),
                    )
                    .into());
                }
                IFormula::ApproxR(ai, bi)
            }
            PFormula::Approx1(a, b) => {
                let one = IType::from_fin(&FinType::pure(1));
                let (ai, at) = self.term(a)?;
                self.require(&a.span, &one, &at)?;
                let (bi, bt) = self.term(b)?;
                self.require(&b.span, &one, &bt)?;
                IFormula::Approx1(ai, bi)
            }
            PFormula::InOmega(v, body) => {
                let b = self.bind(v, IType::Nat, |s| s.formula(body))?;
                IFormula::InOmega(v.clone(), Box::new(b))
            }
            PFormula::ElemOf(v, seq, body) => {
                let (si, el) = self.seq_term(seq)?;
                let b = self.bind(v, el.clone(), |s| s.formula(body))?;
                IFormula::ElemOf(v.clone(), el, si, Box::new(b))
            }
        })
    }

    fn finish_term(&self, t: &ITerm) -> Term {
        let b = |t: &ITerm| Box::new(self.finish_term(t));
        match t {
            ITerm::Var(n, ty) => Term::Var(n.clone(), self.zonk(ty)),
            ITerm::App(f, a) => Term::App(b(f), b(a)),
            ITerm::Lam(v, ty, body) => Term::Lam(v.clone(), self.zonk(ty), b(body)),
            ITerm::Zero => Term::Zero,
            ITerm::Num(n) => Term::Num(n.clone()),
            ITerm::Succ(a) => Term::Succ(b(a)),
            ITerm::Rec(x, y) => Term::Rec(b(x), b(y)),
            ITerm::Len(a) => Term::SeqLen(b(a)),
            ITerm::Get(x, y) => Term::SeqGet(b(x), b(y)),
            ITerm::Append(x, y) => Term::SeqAppend(b(x), b(y)),
            ITerm::Max(a) => Term::MaxOf(b(a)),
            ITerm::SeqLit(el, items) => Term::SeqLit(self.zonk(el), items.iter().map(|i| self.finish_term(i)).collect()),
        }
    }

    fn finish(&self, f: &IFormula) -> Formula {
        let b = |f: &IFormula| self.finish(f);
        match f {
            IFormula::Rel(s, args) => Formula::Rel(s.clone(), args.iter().map(|a| self.finish_term(a)).collect()),
            IFormula::Not(a) => Formula::not(b(a)),
            IFormula::And(x, y) => Formula::and(b(x), b(y)),
            IFormula::Or(x, y) => Formula::or(b(x), b(y)),
            IFormula::Implies(x, y) => Formula::implies(b(x), b(y)),
            IFormula::Quant(k, s, v, ty, body) => Formula::quant(*k, *s, v.clone(), self.zonk(ty), b(body)),
            IFormula::St(t) => Formula::St(self.finish_term(t)),
            IFormula::ApproxR(x, y) => Formula::ApproxReal(self.finish_term(x), self.finish_term(y)),
            IFormula::Approx1(x, y) => Formula::ApproxBaire(self.finish_term(x), self.finish_term(y)),
            IFormula::InOmega(v, body) => Formula::InfiniteNat(v.clone(), Box::new(b(body))),
            IFormula::ElemOf(v, el, seq, body) => Formula::elem_of(v.clone(), self.zonk(el), self.finish_term(seq), b(body)),
        }
    }
}

/// Rewrites `(forall x)(st(x) -> A)` and `(exists x)(st(x) & A)` into qualified quantifiers.
pub fn absorb_guards(f: &Formula) -> Formula {
    let f = f.map_children(absorb_guards);
    if let Formula::Quant { kind, standard: false, var, ty, body } = &f {
        let guarded = match (kind, &**body) {
            (QuantKind::Forall, Formula::Implies(g, rest)) | (QuantKind::Exists, Formula::And(g, rest)) => {
                matches!(&**g, Formula::St(Term::Var(v, _)) if v == var).then(|| (**rest).clone())
            }
            _ => None,
        };
        if let Some(rest) = guarded {
            return Formula::quant(*kind, true, var.clone(), ty.clone(), rest);
        }
    }
    f
}

/// Parses a formula: syntax, type inference, guard absorption, alpha-normalization.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let pf = p.formula()?;
    p.finish()?;
    let mut inf = Infer::new(src);
    let inferred = inf.formula(&pf)?;
    let f = absorb_guards(&inf.finish(&inferred)).alpha_normalize();
    f.check()?;
    Ok(f)
}

/// Parses a term; free variables may carry ascriptions `(x:T)`.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let pt = p.term()?;
    p.finish()?;
    let mut inf = Infer::new(src);
    let (it, _) = inf.term(&pt)?;
    let t = inf.finish_term(&it);
    t.type_of()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<FinType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::print::print;
    use crate::lang::FormulaClass;

    #[test]
    fn uniform_continuity_parses() {
        let f = parse("(forall x:0->1)(forall y:0->1)(approxR(x,y) -> approxR(f x, f y))").unwrap();
        let s = print(&f);
        assert_eq!(s.matches("approxR").count(), 2);
        assert!(!s.contains("forall^st"));
        assert_eq!(f.classify(), FormulaClass::External);
        let free = f.free_vars();
        let fx = FinType::arrow(FinType::Nat, FinType::pure(1));
        // the codomain is unconstrained and defaults to 0
        assert_eq!(free["f"], FinType::arrow(fx, FinType::Nat));
    }

    #[test]
    fn smallest_external_formula() {
        let f = parse("(forall^st k:0) Rel0(k)").unwrap();
        let Formula::Quant { standard: true, body, .. } = &f else { panic!("{f:?}") };
        assert!(matches!(&**body, Formula::Rel(s, _) if s == "Rel0"));
    }

    #[test]
    fn missing_body_is_a_syntax_error() {
        let e = parse("(forall x:0)(exists y)").unwrap_err();
        let ParseError::Syntax { line, column, .. } = e else { panic!("{e:?}") };
        assert_eq!((line, column), (1, 23));
    }

    #[test]
    fn type_errors_name_the_subterm() {
        let e = parse("(forall x:0) eq(x x, x)").unwrap_err();
        let ParseError::Type(t) = e else { panic!() };
        assert_eq!(t.subterm, "x x");
    }

    #[test]
    fn guards_become_qualified_quantifiers() {
        let f = parse("(forall x:0)(st(x) -> (exists y:0)(st(y) & eq(x,y)))").unwrap();
        let g = parse("(forall^st x:0)(exists^st y:0)eq(x,y)").unwrap();
        assert!(f.alpha_eq(&g));
    }

    #[test]
    fn precedence_and_comments() {
        let f = parse("# header\n(forall x:0)A(x) -> B() | C() & ~D()").unwrap();
        let Formula::Implies(a, b) = &f else { panic!() };
        assert!(matches!(&**a, Formula::Quant { .. }));
        assert!(matches!(&**b, Formula::Or(..)));
    }

    #[test]
    fn bounded_quantifier_and_sequences() {
        let f = parse("(exists^st w:0*)(forall x:0)(exists y in w) le(x, max(append(w, y)))").unwrap();
        assert!(f.check().is_ok());
        let back = parse(&print(&f)).unwrap();
        assert!(f.alpha_eq(&back));
    }

    #[test]
    fn shadowed_binders_are_renamed() {
        let f = parse("(forall x:0)A(x) & (forall x:0)B(x)").unwrap();
        assert!(f.has_unique_binders());
    }

    #[test]
    fn terms_and_types() {
        let t = parse_term("rec(0, \\k:0. \\a:0. succ(succ(a)))").unwrap();
        assert_eq!(t.type_of().unwrap(), FinType::pure(1));
        assert_eq!(parse_type("(0->1)*").unwrap().to_string(), "(0->1)*");
        assert_eq!(parse_type("0->0->0").unwrap(), FinType::curried(&[FinType::Nat, FinType::Nat], FinType::Nat));
    }
}
