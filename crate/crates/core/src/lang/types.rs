use std::fmt;

/// Finite types over the naturals: `0`, arrows, and finite sequences `σ*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FinType {
    Nat,
    Arrow(Box<FinType>, Box<FinType>),
    Seq(Box<FinType>),
}

impl FinType {
    pub fn arrow(domain: FinType, codomain: FinType) -> FinType {
        FinType::Arrow(Box::new(domain), Box::new(codomain))
    }

    pub fn seq(element: FinType) -> FinType {
        FinType::Seq(Box::new(element))
    }

    /// The pure type of level `n`: `0`, `0->0`, `(0->0)->0`, ...
    pub fn pure(n: usize) -> FinType {
        let mut ty = FinType::Nat;
        for _ in 0..n {
            ty = FinType::arrow(ty, FinType::Nat);
        }
        ty
    }

    /// `Some(n)` when `self` is the pure type of level `n`.
    pub fn pure_level(&self) -> Option<usize> {
        match self {
            FinType::Nat => Some(0),
            FinType::Arrow(dom, cod) if **cod == FinType::Nat => dom.pure_level().map(|n| n + 1),
            _ => None,
        }
    }

    pub fn is_nat(&self) -> bool {
        matches!(self, FinType::Nat)
    }

    pub fn depth(&self) -> usize {
        match self {
            FinType::Nat => 0,
            FinType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
            FinType::Seq(a) => 1 + a.depth(),
        }
    }

    /// Builds `a1 -> a2 -> ... -> result`.
    pub fn curried(args: &[FinType], result: FinType) -> FinType {
        args.iter()
            .rev()
            .fold(result, |acc, a| FinType::arrow(a.clone(), acc))
    }
}

impl fmt::Display for FinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.pure_level() {
            return write!(f, "{n}");
        }
        match self {
            FinType::Nat => write!(f, "0"),
            FinType::Arrow(dom, cod) => {
                if matches!(**dom, FinType::Arrow(..)) && dom.pure_level().is_none() {
                    write!(f, "({dom})->{cod}")
                } else {
                    write!(f, "{dom}->{cod}")
                }
            }
            FinType::Seq(el) => {
                if matches!(**el, FinType::Arrow(..)) && el.pure_level().is_none() {
                    write!(f, "({el})*")
                } else {
                    write!(f, "{el}*")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_levels_round_trip() {
        for n in 0..5 {
            assert_eq!(FinType::pure(n).pure_level(), Some(n));
        }
        assert_eq!(FinType::pure(2).to_string(), "2");
    }

    #[test]
    fn seq_is_not_arrow_from_nat() {
        let s = FinType::seq(FinType::Nat);
        let a = FinType::arrow(FinType::Nat, FinType::Nat);
        assert_ne!(s, a);
        assert_eq!(s.to_string(), "0*");
        assert_eq!(a.to_string(), "1");
    }

    #[test]
    fn display_of_mixed_types() {
        let t = FinType::arrow(FinType::Nat, FinType::pure(1));
        assert_eq!(t.to_string(), "0->1");
        let t = FinType::arrow(FinType::arrow(FinType::Nat, FinType::pure(1)), FinType::Nat);
        assert_eq!(t.to_string(), "(0->1)->0");
        let t = FinType::seq(FinType::pure(1));
        assert_eq!(t.to_string(), "1*");
        let t = FinType::seq(FinType::arrow(FinType::Nat, FinType::pure(1)));
        assert_eq!(t.to_string(), "(0->1)*");
    }
}
