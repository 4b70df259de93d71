//! Named axiom and definition schemas with typed holes.
//!
//! A template is ordinary surface syntax in which each hole appears as a free
//! variable. Symbols without a fixed meaning (`initSeg`, `inTree`, `ext`, ...)
//! are free variables or declared internal relations.

use super::formula::Formula;
use super::parser::{parse, parse_type};
use super::term::Term;
use super::types::FinType;
use super::{ParseError, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// Hole terms stay free.
    None,
    /// Free variables of the hole terms are bound by `forall^st`.
    Standard,
    /// Free variables of the hole terms are bound by plain `forall`.
    Internal,
}

#[derive(Clone, Debug)]
pub struct Schema {
    pub name: &'static str,
    pub holes: &'static [(&'static str, &'static str)],
    pub template: &'static str,
    pub closure: Closure,
}

const ONE: &str = "\\n:0. 1";

pub const LIBRARY: &[Schema] = &[
    Schema {
        name: "UniformContinuity",
        holes: &[("f", "(0->1)->0->1")],
        template: "(forall x:0->1)(forall y:0->1)(approxR(x, y) -> approxR(f x, f y))",
        closure: Closure::None,
    },
    Schema {
        name: "PointwiseContinuity",
        holes: &[("f", "(0->1)->0->1")],
        template: "(forall^st x:0->1)(forall y:0->1)(approxR(x, y) -> approxR(f x, f y))",
        closure: Closure::None,
    },
    Schema {
        name: "NSIntegrable",
        holes: &[("f", "(0->1)->0->1")],
        template: "(forall p:1)(forall q:1)(approxR(mesh p, zeroR) & approxR(mesh q, zeroR) \
                   -> approxR(rsum f p, rsum f q))",
        closure: Closure::None,
    },
    Schema {
        name: "MCT_ns",
        holes: &[],
        template: "(forall^st c:0->0->1)[(forall n:0)(leR(c n, c succ(n)) & leR(c succ(n), oneR)) \
                   -> inOmega(N) inOmega(M) approxR(c M, c N)]",
        closure: Closure::None,
    },
    Schema {
        name: "Pi01-TRANS",
        holes: &[("f", "1")],
        template: "(forall^st n:0)~eq(f n, 0) -> (forall m:0)~eq(f m, 0)",
        closure: Closure::Standard,
    },
    Schema {
        name: "Sigma02-TRANS",
        holes: &[("f", "0->0->0")],
        template: "(exists m:0)(forall n:0)eq(f m n, 0) -> (exists^st k:0)(forall l:0)eq(f k l, 0)",
        closure: Closure::Standard,
    },
    Schema {
        name: "Pi11-TRANS",
        holes: &[("f", "1")],
        template: "(exists g:1)(forall x:0)~eq(f (initSeg g x), 0) \
                   -> (exists^st g2:1)(forall^st x2:0)~eq(f (initSeg g2 x2), 0)",
        closure: Closure::Internal,
    },
    Schema {
        name: "STP",
        holes: &[],
        template: "(forall f:1)(le1(f, ONE) -> (exists^st g:1)(le1(g, ONE) & approx1(f, g)))",
        closure: Closure::None,
    },
    Schema {
        name: "GH_st",
        holes: &[("G", "2->0->0")],
        template: "(forall^st Y:2)(forall^st s:0)(inC(Y) -> eq(G Y s, Y (ext s (\\n:0. G Y (push s succ(n))))))",
        closure: Closure::None,
    },
    Schema {
        name: "SCF",
        holes: &[("bound", "2->0"), ("points", "2->1*")],
        template: "(forall g:2)(forall T:1)(le1(T, ONE) \
                   -> [~(exists a in points g)~(le1(a, ONE) -> ~inTree(T, initSeg a (g a))) \
                   -> (forall b:1)(le1(b, ONE) -> (exists i:0)(le(i, bound g) & ~inTree(T, initSeg b i)))])",
        closure: Closure::None,
    },
    Schema {
        name: "MUC",
        holes: &[("Phi", "2->0")],
        template: "(forall Y:2)(forall f:1)(forall g:1)(le1(f, ONE) & le1(g, ONE) \
                   & eq(initSeg f (Phi Y), initSeg g (Phi Y)) -> eq(Y f, Y g))",
        closure: Closure::None,
    },
    Schema {
        name: "MU",
        holes: &[("mu", "2")],
        template: "(forall f:1)((exists n:0)eq(f n, 0) -> eq(f (mu f), 0))",
        closure: Closure::None,
    },
    Schema {
        name: "MPC",
        holes: &[("Psi", "2->1->0")],
        template: "(forall Y:2)(forall f:1)(forall g:1)(inC(Y) \
                   & eq(initSeg f (Psi Y f), initSeg g (Psi Y f)) -> eq(Y f, Y g))",
        closure: Closure::None,
    },
    Schema {
        name: "PCM",
        holes: &[("Y", "2"), ("Z", "2")],
        template: "(forall f:1)(forall g:1)(eq(initSeg f (Z f), initSeg g (Z f)) -> eq(Y f, Y g))",
        closure: Closure::None,
    },
    Schema {
        name: "GHU",
        holes: &[("G", "2->0->0"), ("Y", "2"), ("H", "2->0->0")],
        template: "(forall s:0)(eq(G Y s, Y (ext s (\\n:0. G Y (push s succ(n))))) & le(G Y s, H Y s))",
        closure: Closure::None,
    },
];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("unknown schema `{0}`")]
    Unknown(String),
    #[error("schema `{name}` takes {expected} hole(s), given {given}")]
    Arity { name: String, expected: usize, given: usize },
    #[error("hole `{hole}` expects type {expected}, given a term of type {found}")]
    HoleType { hole: String, expected: FinType, found: FinType },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("template does not parse: {0}")]
    Template(#[from] ParseError),
}

pub fn schema_names() -> Vec<&'static str> {
    LIBRARY.iter().map(|s| s.name).collect()
}

pub fn schema(name: &str) -> Option<&'static Schema> {
    LIBRARY.iter().find(|s| s.name == name)
}

impl Schema {
    pub fn hole_types(&self) -> Vec<(&'static str, FinType)> {
        self.holes
            .iter()
            .map(|(n, t)| (*n, parse_type(t).expect("library hole types are well formed")))
            .collect()
    }

    /// Parses the template with holes left as free variables.
    pub fn template_formula(&self) -> Result<Formula, SchemaError> {
        // bind the holes while parsing so their declared types are pinned
        let mut src = format!("[{}]", self.template.replace("ONE", ONE));
        for (hole, ty) in self.holes.iter().rev() {
            src = format!("(forall {hole}:{ty}){src}");
        }
        let mut f = parse(&src)?;
        for _ in self.holes {
            f = match f {
                Formula::Quant { body, .. } => *body,
                other => other,
            };
        }
        Ok(f)
    }
}

/// Instantiates a library schema; the result is alpha-normalized and type-checked.
pub fn instantiate_schema(name: &str, holes: &[Term]) -> Result<Formula, SchemaError> {
    let schema = schema(name).ok_or_else(|| SchemaError::Unknown(name.to_string()))?;
    let declared = schema.hole_types();
    if declared.len() != holes.len() {
        return Err(SchemaError::Arity { name: name.to_string(), expected: declared.len(), given: holes.len() });
    }
    let template = schema.template_formula()?;
    let free = template.free_vars();
    let mut out = template;
    for ((hole, ty), term) in declared.iter().zip(holes) {
        let found = term.type_of()?;
        if &found != ty {
            return Err(SchemaError::HoleType { hole: hole.to_string(), expected: ty.clone(), found });
        }
        if let Some(inferred) = free.get(*hole) {
            if inferred != ty {
                return Err(SchemaError::HoleType { hole: hole.to_string(), expected: inferred.clone(), found: ty.clone() });
            }
        }
        out = out.substitute(hole, term);
    }
    if schema.closure != Closure::None {
        let mut vars: Vec<(String, FinType)> = Vec::new();
        for t in holes {
            for (v, ty) in t.free_vars() {
                if !vars.iter().any(|(n, _)| *n == v) {
                    vars.push((v, ty));
                }
            }
        }
        for (v, ty) in vars.into_iter().rev() {
            out = match schema.closure {
                Closure::Standard => Formula::forall_st(v, ty, out),
                _ => Formula::forall(v, ty, out),
            };
        }
    }
    let out = out.alpha_normalize();
    out.check()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::print::print;

    fn canonical_holes(s: &Schema) -> Vec<Term> {
        s.hole_types().into_iter().map(|(n, ty)| Term::var(n, ty)).collect()
    }

    #[test]
    fn every_entry_instantiates() {
        assert_eq!(LIBRARY.len(), 15);
        for s in LIBRARY {
            let f = instantiate_schema(s.name, &canonical_holes(s))
                .unwrap_or_else(|e| panic!("{}: {e}", s.name));
            assert!(f.has_unique_binders(), "{}", s.name);
        }
    }

    #[test]
    fn transfer_instance_is_standard_universal() {
        let f = instantiate_schema("Pi01-TRANS", &[Term::var("f", FinType::pure(1))]).unwrap();
        let s = print(&f);
        assert!(s.starts_with("(forall^st f:1)"), "{s}");
        assert!(f.free_vars().is_empty());
    }

    #[test]
    fn standard_part_shape() {
        let f = instantiate_schema("STP", &[]).unwrap();
        let Formula::Quant { standard: false, body, .. } = &f else { panic!() };
        let Formula::Implies(_, rhs) = &**body else { panic!() };
        assert!(matches!(&**rhs, Formula::Quant { standard: true, .. }));
    }

    #[test]
    fn hole_errors() {
        assert!(matches!(instantiate_schema("Nope", &[]), Err(SchemaError::Unknown(_))));
        assert!(matches!(instantiate_schema("MU", &[]), Err(SchemaError::Arity { .. })));
        let bad = instantiate_schema("MU", &[Term::var("mu", FinType::pure(1))]);
        assert!(matches!(bad, Err(SchemaError::HoleType { .. })));
    }
}
