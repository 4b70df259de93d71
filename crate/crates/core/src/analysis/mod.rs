//! Numeric side of the case studies: Cauchy-coded reals, tagged partitions
//! and Riemann sums, the integration modulus, and capped search with the
//! two convergence-modulus translations.

mod real;
mod riemann;
mod search;

pub use real::{clamp01, dyadic, q, Comparison, Modulus, RealCode, RealFunction, RealSequence, Q};
pub use riemann::{
    check_cri, cri_sweep, integration_modulus, mesh, riemann_sum, CriCell, CriCheck, CriSweep, Partition, Tag,
    CRI_PRECISION,
};
pub use search::{check_mct_window, mct_modulus, mu_from_mct, mu_search, NatFn, Search, SearchOperator, WindowCheck};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("mesh {mesh} is not below 1/{bound}")]
    Precondition { mesh: String, bound: u64 },
    #[error("function `{0}` has no declared modulus")]
    NoModulus(String),
    #[error("no index up to the cap {cap} qualifies")]
    CapExceeded { cap: u64 },
}
