//! Call-by-value evaluator for closed terms of the finite-type
//! primitive-recursive calculus, and witness assembly from rewrite traces.

mod witness;

pub use witness::{assemble_witness, obligations, Obligation, Witness, WitnessError};

use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::lang::{FinType, Term, TypeError};

#[derive(Clone, Debug)]
pub enum TValue {
    Nat(BigUint),
    Seq(FinType, Vec<TValue>),
    Closure { var: String, body: Rc<Term>, env: Env },
    /// `rec(base, step)` awaiting its numeric argument.
    Rec { base: Box<TValue>, step: Box<TValue> },
    /// Ignores its argument; the default element of arrow types.
    Const(Box<TValue>),
}

impl TValue {
    pub fn nat(n: u64) -> TValue {
        TValue::Nat(BigUint::from(n))
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            TValue::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_nat().and_then(|n| n.to_u64())
    }

    /// Default object of a type: `0`, the empty sequence, constant functions.
    pub fn zero_of(ty: &FinType) -> TValue {
        match ty {
            FinType::Nat => TValue::Nat(BigUint::zero()),
            FinType::Seq(el) => TValue::Seq((**el).clone(), Vec::new()),
            FinType::Arrow(_, cod) => TValue::Const(Box::new(TValue::zero_of(cod))),
        }
    }
}

/// Naturals and sequences compare structurally; functions never compare equal.
impl PartialEq for TValue {
    fn eq(&self, other: &TValue) -> bool {
        match (self, other) {
            (TValue::Nat(a), TValue::Nat(b)) => a == b,
            (TValue::Seq(_, a), TValue::Seq(_, b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for TValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TValue::Nat(n) => write!(f, "{n}"),
            TValue::Seq(_, xs) => {
                let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "<{}>", items.join(", "))
            }
            _ => f.write_str("<function>"),
        }
    }
}

/// Persistent environment shared between closures.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Rc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: String,
    value: TValue,
    next: Env,
}

impl Env {
    pub fn extend(&self, name: impl Into<String>, value: TValue) -> Env {
        Env(Some(Rc::new(EnvNode { name: name.into(), value, next: self.clone() })))
    }

    fn get(&self, name: &str) -> Option<&TValue> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("term has free variables: {0:?}")]
    NotClosed(Vec<String>),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("cannot apply {0}")]
    NotAFunction(String),
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: &'static str, found: String },
    #[error("fuel exhausted after {0} steps")]
    OutOfFuel(u64),
}

/// Counts reduction steps and stops at a fuel bound.
pub struct Machine {
    pub steps: u64,
    pub fuel: Option<u64>,
}

impl Machine {
    pub fn new(fuel: Option<u64>) -> Machine {
        Machine { steps: 0, fuel }
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        match self.fuel {
            Some(f) if self.steps > f => Err(EvalError::OutOfFuel(f)),
            _ => Ok(()),
        }
    }

    fn nat(&mut self, t: &Term, env: &Env) -> Result<BigUint, EvalError> {
        match self.eval(t, env)? {
            TValue::Nat(n) => Ok(n),
            other => Err(EvalError::Mismatch { expected: "a number", found: other.to_string() }),
        }
    }

    fn seq(&mut self, t: &Term, env: &Env) -> Result<(FinType, Vec<TValue>), EvalError> {
        match self.eval(t, env)? {
            TValue::Seq(ty, xs) => Ok((ty, xs)),
            other => Err(EvalError::Mismatch { expected: "a sequence", found: other.to_string() }),
        }
    }

    pub fn eval(&mut self, t: &Term, env: &Env) -> Result<TValue, EvalError> {
        self.tick()?;
        Ok(match t {
            Term::Var(n, _) => env.get(n).cloned().ok_or_else(|| EvalError::NotClosed(vec![n.clone()]))?,
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(fv, av)?
            }
            Term::Lam(x, _, body) => TValue::Closure { var: x.clone(), body: Rc::new((**body).clone()), env: env.clone() },
            Term::Zero => TValue::Nat(BigUint::zero()),
            Term::Num(n) => TValue::Nat(n.clone()),
            Term::Succ(a) => TValue::Nat(self.nat(a, env)? + 1u32),
            Term::Rec(base, step) => {
                let base = self.eval(base, env)?;
                let step = self.eval(step, env)?;
                TValue::Rec { base: Box::new(base), step: Box::new(step) }
            }
            Term::SeqLit(ty, items) => {
                TValue::Seq(ty.clone(), items.iter().map(|i| self.eval(i, env)).collect::<Result<_, _>>()?)
            }
            Term::SeqLen(s) => TValue::Nat(BigUint::from(self.seq(s, env)?.1.len())),
            Term::SeqGet(s, i) => {
                let (ty, xs) = self.seq(s, env)?;
                let i = self.nat(i, env)?;
                i.to_usize().and_then(|i| xs.get(i).cloned()).unwrap_or_else(|| TValue::zero_of(&ty))
            }
            Term::SeqAppend(s, e) => {
                let (ty, mut xs) = self.seq(s, env)?;
                xs.push(self.eval(e, env)?);
                TValue::Seq(ty, xs)
            }
            Term::MaxOf(s) => {
                let (_, xs) = self.seq(s, env)?;
                let mut best = BigUint::zero();
                for x in xs {
                    match x {
                        TValue::Nat(n) if n > best => best = n,
                        TValue::Nat(_) => {}
                        other => return Err(EvalError::Mismatch { expected: "a number", found: other.to_string() }),
                    }
                }
                TValue::Nat(best)
            }
        })
    }

    pub fn apply(&mut self, f: TValue, arg: TValue) -> Result<TValue, EvalError> {
        self.tick()?;
        match f {
            TValue::Closure { var, body, env } => self.eval(&body, &env.extend(var, arg)),
            TValue::Const(v) => Ok(*v),
            TValue::Rec { base, step } => {
                let n = match arg {
                    TValue::Nat(n) => n,
                    other => return Err(EvalError::Mismatch { expected: "a number", found: other.to_string() }),
                };
                let mut acc = *base;
                let mut i = BigUint::zero();
                while i < n {
                    let partial = self.apply((*step).clone(), TValue::Nat(i.clone()))?;
                    acc = self.apply(partial, acc)?;
                    i += BigUint::one();
                }
                Ok(acc)
            }
            other => Err(EvalError::NotAFunction(other.to_string())),
        }
    }
}

/// Evaluates a closed, well-typed term.
pub fn eval_closed(t: &Term) -> Result<TValue, EvalError> {
    eval_with_fuel(t, None).map(|(v, _)| v)
}

/// Like [`eval_closed`], also returning the number of steps taken.
pub fn eval_with_fuel(t: &Term, fuel: Option<u64>) -> Result<(TValue, u64), EvalError> {
    let free: Vec<String> = t.free_vars().into_keys().collect();
    if !free.is_empty() {
        return Err(EvalError::NotClosed(free));
    }
    t.type_of()?;
    let mut m = Machine::new(fuel);
    let v = m.eval(t, &Env::default())?;
    Ok((v, m.steps))
}

/// Applies a function value to arguments in turn.
pub fn apply(f: &TValue, args: impl IntoIterator<Item = TValue>) -> Result<TValue, EvalError> {
    let mut m = Machine::new(None);
    args.into_iter().try_fold(f.clone(), |acc, a| m.apply(acc, a))
}
