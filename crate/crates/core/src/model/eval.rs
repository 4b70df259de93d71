use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_traits::ToPrimitive;

use super::{Mix, ModelError, NamedRelation, Relation, TwoLevelModel};
use crate::lang::{FinType, Formula, QuantKind, Term};

/// Objects of a finite model. Type `0->0` objects are always tabulated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Nat(usize),
    Seq(Vec<usize>),
    Fun(Rc<Vec<usize>>),
    /// A free function symbol of a type that is not enumerated, partially applied.
    /// `digest` covers the symbol, the model salt and the arguments so far.
    Opaque { sym: Rc<str>, digest: u64, arity: usize, ty: FinType },
    Closure { var: String, ty: FinType, body: Rc<Term>, env: Env },
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Seq(s) => write!(f, "<{}>", list(s)),
            Value::Fun(t) => write!(f, "[{}]", list(t)),
            Value::Opaque { sym, arity, .. } => write!(f, "{sym}/{arity}"),
            Value::Closure { var, body, .. } => write!(f, "\\{var}. {body}"),
        }
    }
}

pub type Env = Vec<(String, Value)>;

fn lookup<'a>(env: &'a Env, name: &str) -> Option<&'a Value> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
}

/// Evaluates formulas in one model, caching quantifier domains.
pub struct Evaluator<'m> {
    pub model: &'m TwoLevelModel,
    domains: RefCell<HashMap<(FinType, bool), Rc<Vec<Value>>>>,
}

/// Truth of `f` in `m` under `env`, which must bind every free variable.
pub fn eval_formula(m: &TwoLevelModel, f: &Formula, env: &Env) -> Result<bool, ModelError> {
    Evaluator::new(m).formula(f, &mut env.clone())
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m TwoLevelModel) -> Evaluator<'m> {
        Evaluator { model, domains: RefCell::new(HashMap::new()) }
    }

    fn clamp(&self, n: usize) -> usize {
        n.min(self.model.u - 1)
    }

    /// All objects of `ty` (only the standard ones when `standard`).
    pub fn domain(&self, ty: &FinType, standard: bool) -> Result<Rc<Vec<Value>>, ModelError> {
        let key = (ty.clone(), standard);
        if let Some(d) = self.domains.borrow().get(&key) {
            return Ok(d.clone());
        }
        let (u, s) = (self.model.u, self.model.s);
        let bound = if standard { s } else { u };
        let vals: Vec<Value> = match ty {
            FinType::Nat => (0..bound).map(Value::Nat).collect(),
            FinType::Seq(el) if **el == FinType::Nat => {
                let mut out = vec![Vec::new()];
                let mut layer = vec![Vec::new()];
                for _ in 0..self.model.seq_bound {
                    layer = layer
                        .iter()
                        .flat_map(|p: &Vec<usize>| (0..bound).map(move |x| [p.as_slice(), &[x]].concat()))
                        .collect();
                    out.extend(layer.iter().cloned());
                }
                out.into_iter().map(Value::Seq).collect()
            }
            FinType::Arrow(d, c) if **d == FinType::Nat && **c == FinType::Nat => {
                let mut tables = vec![Vec::new()];
                for i in 0..u {
                    let range = if standard && i < s { s } else { u };
                    tables = tables
                        .iter()
                        .flat_map(|p: &Vec<usize>| (0..range).map(move |x| [p.as_slice(), &[x]].concat()))
                        .collect();
                }
                tables.into_iter().map(|t| Value::Fun(Rc::new(t))).collect()
            }
            other => return Err(ModelError::UnsupportedType(other.to_string())),
        };
        let vals = Rc::new(vals);
        self.domains.borrow_mut().insert(key, vals.clone());
        Ok(vals)
    }

    pub fn is_standard(&self, v: &Value) -> bool {
        let s = self.model.s;
        match v {
            Value::Nat(n) => *n < s,
            Value::Seq(xs) => xs.len() <= self.model.seq_bound && xs.iter().all(|x| *x < s),
            Value::Fun(t) => t.iter().take(s).all(|x| *x < s),
            // free symbols are fixed constants of the language
            Value::Opaque { .. } | Value::Closure { .. } => true,
        }
    }

    /// Value for a free variable that is not enumerated.
    pub fn opaque(&self, name: &str, ty: &FinType) -> Value {
        let mut h = Mix::new(self.model.salt);
        h.push_str(name);
        match ty {
            FinType::Nat => Value::Nat((h.finish() % self.model.u as u64) as usize),
            FinType::Seq(_) => Value::Seq(Vec::new()),
            _ => {
                let v = Value::Opaque { sym: name.into(), digest: h.finish(), arity: 0, ty: ty.clone() };
                self.normalize_value(v.clone()).unwrap_or(v)
            }
        }
    }

    /// Tabulates `0->0` functions so that equal functions compare equal.
    fn normalize_value(&self, v: Value) -> Result<Value, ModelError> {
        let is_unary = |ty: &FinType| matches!(ty, FinType::Arrow(d, c) if **d == FinType::Nat && **c == FinType::Nat);
        match &v {
            Value::Opaque { ty, .. } | Value::Closure { ty, .. } if is_unary(ty) => {
                let table = (0..self.model.u)
                    .map(|i| self.apply(&v, Value::Nat(i)).and_then(|r| self.nat(&r)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Fun(Rc::new(table)))
            }
            _ => Ok(v),
        }
    }

    fn nat(&self, v: &Value) -> Result<usize, ModelError> {
        match v {
            Value::Nat(n) => Ok(*n),
            other => Err(ModelError::Unsupported(format!("expected a number, got {other}"))),
        }
    }

    pub fn apply(&self, f: &Value, arg: Value) -> Result<Value, ModelError> {
        match f {
            Value::Fun(t) => Ok(Value::Nat(t[self.nat(&arg)?.min(t.len() - 1)])),
            Value::Opaque { sym, digest, arity, ty } => {
                let FinType::Arrow(_, cod) = ty else {
                    return Err(ModelError::Unsupported(format!("`{sym}` applied beyond its arity")));
                };
                let mut h = Mix::new(*digest);
                self.feed(&arg, &mut h)?;
                match &**cod {
                    FinType::Nat => Ok(Value::Nat((h.finish() % self.model.u as u64) as usize)),
                    FinType::Arrow(..) => Ok(Value::Opaque {
                        sym: sym.clone(),
                        digest: h.finish(),
                        arity: arity + 1,
                        ty: (**cod).clone(),
                    }),
                    other => Err(ModelError::UnsupportedType(other.to_string())),
                }
            }
            Value::Closure { var, body, env, .. } => {
                let mut env = env.clone();
                env.push((var.clone(), arg));
                self.term(body, &env)
            }
            other => Err(ModelError::Unsupported(format!("{other} is not a function"))),
        }
    }

    fn feed(&self, v: &Value, h: &mut Mix) -> Result<(), ModelError> {
        match v {
            Value::Nat(n) => h.push(*n as u64),
            Value::Seq(xs) => {
                h.push(1000 + xs.len() as u64);
                xs.iter().for_each(|x| h.push(*x as u64));
            }
            Value::Fun(t) => {
                h.push(2000);
                t.iter().for_each(|x| h.push(*x as u64));
            }
            other => return Err(ModelError::Unsupported(format!("cannot compare {other}"))),
        }
        Ok(())
    }

    fn same(&self, a: &Value, b: &Value) -> Result<bool, ModelError> {
        match (a, b) {
            (Value::Nat(_) | Value::Seq(_) | Value::Fun(_), Value::Nat(_) | Value::Seq(_) | Value::Fun(_)) => Ok(a == b),
            _ => Err(ModelError::Unsupported(format!("cannot compare {a} with {b}"))),
        }
    }

    pub fn term(&self, t: &Term, env: &Env) -> Result<Value, ModelError> {
        Ok(match t {
            Term::Var(n, ty) => match lookup(env, n) {
                Some(v) => v.clone(),
                None => self.opaque(n, ty),
            },
            Term::App(f, a) => {
                let fv = self.term(f, env)?;
                let av = self.term(a, env)?;
                self.apply(&fv, av)?
            }
            Term::Lam(x, _, body) => {
                let whole = t.type_of().map_err(|e| ModelError::Unsupported(e.to_string()))?;
                let c = Value::Closure { var: x.clone(), ty: whole, body: Rc::new((**body).clone()), env: env.clone() };
                self.normalize_value(c)?
            }
            Term::Zero => Value::Nat(0),
            Term::Succ(a) => Value::Nat(self.clamp(self.nat(&self.term(a, env)?)? + 1)),
            Term::Num(n) => Value::Nat(self.clamp(n.to_usize().unwrap_or(usize::MAX))),
            Term::Rec(..) => return Err(ModelError::Unsupported("recursor in a model formula".into())),
            Term::SeqLit(_, xs) => {
                Value::Seq(xs.iter().map(|x| self.term(x, env).and_then(|v| self.nat(&v))).collect::<Result<_, _>>()?)
            }
            Term::SeqLen(s) => Value::Nat(self.clamp(self.seq(&self.term(s, env)?)?.len())),
            Term::SeqGet(s, i) => {
                let xs = self.seq(&self.term(s, env)?)?;
                let i = self.nat(&self.term(i, env)?)?;
                Value::Nat(xs.get(i).copied().unwrap_or(0))
            }
            Term::SeqAppend(s, e) => {
                let mut xs = self.seq(&self.term(s, env)?)?;
                xs.push(self.nat(&self.term(e, env)?)?);
                Value::Seq(xs)
            }
            Term::MaxOf(s) => Value::Nat(self.seq(&self.term(s, env)?)?.into_iter().max().unwrap_or(0)),
        })
    }

    fn seq(&self, v: &Value) -> Result<Vec<usize>, ModelError> {
        match v {
            Value::Seq(xs) => Ok(xs.clone()),
            other => Err(ModelError::Unsupported(format!("expected a sequence of numbers, got {other}"))),
        }
    }

    fn relation(&self, sym: &str, args: &[Value]) -> Result<bool, ModelError> {
        let u = self.model.u;
        match sym {
            "eq" => {
                let [a, b] = args else { return Err(ModelError::Unsupported("eq arity".into())) };
                return self.same(a, b);
            }
            "le" | "lt" => {
                let (a, b) = (self.nat(&args[0])?, self.nat(&args[1])?);
                return Ok(if sym == "le" { a <= b } else { a < b });
            }
            "le1" => {
                for i in 0..u {
                    let a = self.nat(&self.apply(&args[0], Value::Nat(i))?)?;
                    let b = self.nat(&self.apply(&args[1], Value::Nat(i))?)?;
                    if a > b {
                        return Ok(false);
                    }
                }
                return Ok(true);
            }
            _ => {}
        }
        let rel = self.model.relations.get(sym).ok_or_else(|| ModelError::Uninterpreted(sym.to_string()))?;
        match rel {
            Relation::Table(t) => {
                let mut idx = 0;
                for a in args.iter().rev() {
                    idx = idx * u + self.nat(a)?;
                }
                t.get(idx).copied().ok_or_else(|| ModelError::Invalid(format!("table for `{sym}` too short")))
            }
            Relation::Named(NamedRelation::DistLt) => match args {
                [x, y, n] => {
                    let (x, y, n) = (self.nat(x)?, self.nat(y)?, self.nat(n)?);
                    Ok(n * x.abs_diff(y) < u)
                }
                _ => Err(ModelError::Unsupported(format!("`{sym}` interpreted as dist_lt needs 3 arguments"))),
            },
            Relation::Named(NamedRelation::ScaledLt) => match args {
                [p, a] => Ok(self.nat(a)? * self.nat(p)? < u),
                _ => Err(ModelError::Unsupported(format!("`{sym}` interpreted as scaled_lt needs 2 arguments"))),
            },
            Relation::Named(NamedRelation::Hashed { salt }) => {
                let mut h = Mix::new(*salt);
                h.push_str(sym);
                for a in args {
                    self.feed(a, &mut h)?;
                }
                Ok(h.finish() & 1 == 1)
            }
        }
    }

    /// Sugar and `st` are read through their definitions.
    pub fn formula(&self, f: &Formula, env: &mut Env) -> Result<bool, ModelError> {
        match f {
            Formula::Rel(sym, args) => {
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                self.relation(sym, &vals)
            }
            Formula::Not(a) => Ok(!self.formula(a, env)?),
            Formula::And(a, b) => Ok(self.formula(a, env)? && self.formula(b, env)?),
            Formula::Or(a, b) => Ok(self.formula(a, env)? || self.formula(b, env)?),
            Formula::Implies(a, b) => Ok(!self.formula(a, env)? || self.formula(b, env)?),
            Formula::Quant { kind, standard, var, ty, body } => {
                let dom = self.domain(ty, *standard)?;
                let want = *kind == QuantKind::Exists;
                for v in dom.iter() {
                    env.push((var.clone(), v.clone()));
                    let r = self.formula(body, env);
                    env.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
            Formula::ElemOfSeq { var, elem, seq, body } => {
                if *elem != FinType::Nat {
                    return Err(ModelError::UnsupportedType(FinType::seq(elem.clone()).to_string()));
                }
                let xs = self.seq(&self.term(seq, env)?)?;
                for x in xs {
                    env.push((var.clone(), Value::Nat(x)));
                    let r = self.formula(body, env);
                    env.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::St(t) => Ok(self.is_standard(&self.term(t, env)?)),
            Formula::ApproxReal(x, y) => {
                let (x, y) = (self.term(x, env)?, self.term(y, env)?);
                for n in 0..self.model.s {
                    if !self.relation("closeR", &[x.clone(), y.clone(), Value::Nat(n)])? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::ApproxBaire(a, b) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                for n in 0..self.model.s {
                    if self.apply(&a, Value::Nat(n))? != self.apply(&b, Value::Nat(n))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::InfiniteNat(big, body) => {
                // N is infinite iff it exceeds every standard number
                for n in self.model.s..self.model.u {
                    env.push((big.clone(), Value::Nat(n)));
                    let r = self.formula(body, env);
                    env.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}
