//! Canonical approximations of the Gandy-Hyland functional, their
//! certified thresholds, and the fixed-point equation.

use nsakit::gh::{check_gh_equation, gh_approx, gh_value, Library};

fn main() {
    let lib = Library::bundled();
    for y in &lib.gh {
        let v = gh_value(y, &[], 16).unwrap();
        let approx: Vec<u64> = (0..=v.certified_at + 3).map(|m| gh_approx(y, &[], m)).collect();
        let gamma = |s: &[u64]| gh_value(y, s, 16).ok().map(|v| v.value);
        let eq = check_gh_equation(y, &[], gamma).unwrap();
        println!(
            "{:7} {:24} Gamma(<>) = {} certified at {}, G(M) for M = 0.. : {approx:?}, equation {eq}",
            y.name, y.expr.to_string(), v.value, v.certified_at
        );
    }
}
