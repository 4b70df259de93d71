//! Finite-type language with a standardness predicate.

use std::collections::BTreeSet;
use std::fmt;

pub mod formula;
pub mod parser;
pub mod print;
pub mod schema;
pub mod term;
pub mod types;

pub use formula::{Formula, FormulaClass, Path, Polarity, QuantKind};
pub use parser::{parse, parse_term, parse_type};
pub use print::{print, print_term};
pub use schema::{instantiate_schema, schema_names, SchemaError};
pub use term::Term;
pub use types::FinType;

/// A typing failure, naming the offending subterm in surface syntax.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("type error: {message} in `{subterm}`")]
pub struct TypeError {
    pub message: String,
    pub subterm: String,
}

impl TypeError {
    pub fn new(message: String, subterm: String) -> TypeError {
        TypeError { message, subterm }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Returns `base` if unused, otherwise the first of `stem1`, `stem2`, ... not in `taken`,
/// where `stem` is `base` without trailing digits.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded counter")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

// Types and terms travel as surface syntax.
impl serde::Serialize for FinType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for FinType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = <String as serde::Deserialize>::deserialize(d)?;
        parse_type(&src).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = <String as serde::Deserialize>::deserialize(d)?;
        parse_term(&src).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_count_up_from_the_stem() {
        let mut taken = BTreeSet::new();
        assert_eq!(fresh_name("n", &taken), "n");
        taken.insert("n".to_string());
        assert_eq!(fresh_name("n", &taken), "n1");
        taken.insert("n1".to_string());
        assert_eq!(fresh_name("n1", &taken), "n2");
    }
}
