//! Command drivers behind the `nsakit` binary. Each command returns a
//! versioned JSON report, a short text summary and an exit code.

mod commands;

pub use commands::{cmd_case_study, cmd_model_check, cmd_normalize, CaseStudy, CheckInput};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub const SCHEMA: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[repr(i32)]
pub enum Exit {
    Ok = 0,
    /// Parse, type, or unsupported-fragment errors.
    Input = 1,
    Stuck = 2,
    CapExceeded = 3,
    Counterexample = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Resource bounds, echoed in every report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub search_cap: u64,
    pub depth_cap: u64,
    pub max_depth: u64,
    pub max_u: usize,
    pub max_s: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { search_cap: 10_000, depth_cap: 12, max_depth: 16, max_u: 4, max_s: 3 }
    }
}

impl Caps {
    /// Applies `key=value` pairs separated by commas, e.g. `depth=4,u=3`.
    pub fn with_overrides(mut self, list: &str) -> Result<Caps, String> {
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let v: u64 = v.trim().parse().map_err(|_| format!("cap `{k}` needs a positive integer"))?;
            if v == 0 {
                return Err(format!("cap `{k}` must be positive"));
            }
            match k.trim() {
                "search" | "search-cap" => self.search_cap = v,
                "depth" | "depth-cap" => self.depth_cap = v,
                "max-depth" => self.max_depth = v,
                "u" | "max-u" => self.max_u = v as usize,
                "s" | "max-s" => self.max_s = v as usize,
                other => return Err(format!("unknown cap `{other}`")),
            }
        }
        if self.max_u > 6 || self.max_s > self.max_u {
            return Err("model bounds need S <= U <= 6".into());
        }
        Ok(self)
    }
}

impl FromStr for Caps {
    type Err = String;

    fn from_str(s: &str) -> Result<Caps, String> {
        Caps::default().with_overrides(s)
    }
}

impl fmt::Display for Caps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "search={} depth={} max-depth={} u={} s={}",
            self.search_cap, self.depth_cap, self.max_depth, self.max_u, self.max_s
        )
    }
}

/// Report, summary and exit status of one command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub report: serde_json::Value,
    pub summary: String,
}

impl Outcome {
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize")
    }
}

/// Seed from `NSAKIT_SEED` if set and numeric, else `flag`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    std::env::var("NSAKIT_SEED").ok().and_then(|s| s.trim().parse().ok()).or(flag).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_overrides() {
        let c: Caps = "depth=1, search=50".parse().unwrap();
        assert_eq!((c.depth_cap, c.search_cap, c.max_depth), (1, 50, 16));
        assert!("depth=0".parse::<Caps>().is_err());
        assert!("bogus=3".parse::<Caps>().is_err());
        assert!("s=5".parse::<Caps>().is_err());
        assert_eq!("".parse::<Caps>().unwrap(), Caps::default());
    }
}
