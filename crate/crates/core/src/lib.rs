#![allow(clippy::result_large_err, clippy::should_implement_trait, clippy::type_complexity)]

pub mod lang;
pub mod rewrite;
pub mod model;
pub mod tstar;
pub mod analysis;
pub mod gh;
pub mod cli;
