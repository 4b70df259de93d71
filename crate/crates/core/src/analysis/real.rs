use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `2^-n`.
pub fn dyadic(n: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << n)
}

/// A real given by rational approximations `q(n)` with
/// `|q(n) - q(m)| <= 2^-n` for `m >= n`.
#[derive(Clone)]
pub struct RealCode(Rc<dyn Fn(u32) -> Q>);

impl RealCode {
    pub fn new(f: impl Fn(u32) -> Q + 'static) -> RealCode {
        RealCode(Rc::new(f))
    }

    pub fn rational(x: Q) -> RealCode {
        RealCode::new(move |_| x.clone())
    }

    /// Square root of a non-negative rational by bisection; `q(n)` is
    /// within `2^-(n+1)` of the root.
    pub fn sqrt(x: Q) -> RealCode {
        assert!(!x.is_negative(), "sqrt of a negative rational");
        RealCode::new(move |n| {
            let mut lo = Q::zero();
            let mut hi = if x > Q::one() { x.clone() } else { Q::one() };
            let eps = dyadic(n + 1);
            while &hi - &lo > eps {
                let mid = (&lo + &hi) / Q::from_integer(2.into());
                if &mid * &mid <= x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        })
    }

    pub fn at(&self, n: u32) -> Q {
        (self.0)(n)
    }

    /// Projects every approximation into `[0, 1]`. Distances to any
    /// point of the interval only shrink, so the modulus survives.
    pub fn clamp01(&self) -> RealCode {
        let inner = self.clone();
        RealCode::new(move |n| clamp01(inner.at(n)))
    }

    /// Strict comparison at precision `2^-p`, raising `p` up to `retries`
    /// times while the answer is undecided.
    pub fn lt(&self, other: &RealCode, p: u32, retries: u32) -> Comparison {
        for p in p..=p + retries {
            let (a, b, e) = (self.at(p), other.at(p), dyadic(p));
            if &a + &e < &b - &e {
                return Comparison::Less;
            }
            if &b + &e <= &a - &e {
                return Comparison::NotLess;
            }
        }
        Comparison::Indeterminate
    }
}

impl fmt::Debug for RealCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealCode(~{})", self.at(20))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    NotLess,
    Indeterminate,
}

pub fn clamp01(x: Q) -> Q {
    if x.is_negative() {
        Q::zero()
    } else if x > Q::one() {
        Q::one()
    } else {
        x
    }
}

/// Modulus of uniform continuity: `|x - y| < 1/g(k)` forces `|f x - f y| <= 1/k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modulus {
    /// `g(k) = a*k`
    Linear(u64),
    Const(u64),
}

impl Modulus {
    pub fn at(&self, k: u64) -> u64 {
        match *self {
            Modulus::Linear(a) => a * k,
            Modulus::Const(c) => c,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Linear(a) => write!(f, "k -> {a}k"),
            Modulus::Const(c) => write!(f, "k -> {c}"),
        }
    }
}

/// A function on `[0, 1]` with a Lipschitz bound `2^shift`, exact on
/// rationals.
#[derive(Clone)]
pub struct RealFunction {
    pub name: &'static str,
    exact: Rc<dyn Fn(&Q) -> Q>,
    shift: u32,
    pub modulus: Option<Modulus>,
}

impl RealFunction {
    pub fn new(name: &'static str, shift: u32, modulus: Option<Modulus>, f: impl Fn(&Q) -> Q + 'static) -> RealFunction {
        RealFunction { name, exact: Rc::new(f), shift, modulus }
    }

    pub fn square() -> RealFunction {
        RealFunction::new("square", 1, Some(Modulus::Linear(2)), |x| x * x)
    }

    pub fn tent() -> RealFunction {
        RealFunction::new("tent", 0, Some(Modulus::Linear(1)), |x| (x - q(1, 2)).abs())
    }

    /// `x - x^3/6 + x^5/120`, the degree-5 Taylor polynomial of sine.
    pub fn sine5() -> RealFunction {
        RealFunction::new("sine5", 0, Some(Modulus::Linear(1)), |x| {
            let x3 = x * x * x;
            let x5 = &x3 * x * x;
            x - x3 / q(6, 1) + x5 / q(120, 1)
        })
    }

    pub fn constant(c: Q) -> RealFunction {
        RealFunction::new("constant", 0, Some(Modulus::Const(1)), move |_| c.clone())
    }

    pub fn identity() -> RealFunction {
        RealFunction::new("identity", 0, Some(Modulus::Linear(1)), |x| x.clone())
    }

    /// Functions the numeric sweeps run over.
    pub fn library() -> Vec<RealFunction> {
        vec![RealFunction::square(), RealFunction::tent(), RealFunction::sine5()]
    }

    pub fn exact(&self, x: &Q) -> Q {
        (self.exact)(x)
    }

    pub fn apply(&self, x: &RealCode) -> RealCode {
        let (f, x, s) = (self.exact.clone(), x.clamp01(), self.shift);
        RealCode::new(move |n| f(&x.at(n + s + 1)))
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction({})", self.name)
    }
}

/// `n -> c_n`.
#[derive(Clone)]
pub struct RealSequence(Rc<dyn Fn(u64) -> RealCode>);

impl RealSequence {
    pub fn new(f: impl Fn(u64) -> RealCode + 'static) -> RealSequence {
        RealSequence(Rc::new(f))
    }

    pub fn at(&self, n: u64) -> RealCode {
        (self.0)(n)
    }

    /// `1 - 1/(n+1)`
    pub fn harmonic() -> RealSequence {
        RealSequence::new(|n| RealCode::rational(Q::one() - q(1, n as i64 + 1)))
    }

    /// `1 - 2^-n`, truncated at each precision to keep denominators small.
    pub fn dyadic() -> RealSequence {
        RealSequence::new(|n| RealCode::new(move |p| Q::one() - dyadic(n.min(p as u64 + 1) as u32)))
    }

    pub fn constant(c: Q) -> RealSequence {
        RealSequence::new(move |_| RealCode::rational(c.clone()))
    }
}
