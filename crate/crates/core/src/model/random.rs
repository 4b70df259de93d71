use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TwoLevelModel;
use crate::lang::{FinType, Formula, QuantKind, Term};
use crate::rewrite::{
    drop_st, expand_definitions, herbrandize_antecedent, idealise, max_collapse, pull_standard_quantifiers, Direction,
    MonotoneAnnotation, RewriteStep, Rule, WitnessOp,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelBounds {
    pub max_u: usize,
    pub max_s: usize,
}

impl Default for ModelBounds {
    fn default() -> Self {
        ModelBounds { max_u: 4, max_s: 3 }
    }
}

/// Deterministic in `seed`; unary `R`, binary `P` and `closeR` get default meanings.
pub fn random_model(seed: u64, bounds: ModelBounds) -> TwoLevelModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rng.gen_range(1..=bounds.max_u.clamp(1, 6));
    let s = rng.gen_range(1..=bounds.max_s.clamp(1, u));
    let seq_bound = s + rng.gen_range(0..=1);
    TwoLevelModel::new(u, s, seq_bound).expect("bounds valid").with_salt(rng.gen())
}

fn nat() -> FinType {
    FinType::Nat
}

fn v(name: &str) -> Term {
    Term::var(name, nat())
}

struct Gen {
    rng: ChaCha8Rng,
    next: usize,
    prefix: &'static str,
}

impl Gen {
    fn new(seed: u64, prefix: &'static str) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), next: 0, prefix }
    }

    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("{}{}", self.prefix, self.next - 1)
    }

    fn term(&mut self, scope: &[String]) -> Term {
        let k = self.rng.gen_range(0..10);
        match k {
            0 => Term::num(self.rng.gen_range(0..3)),
            1 => v("z"),
            2 if !scope.is_empty() => Term::succ(v(&scope[self.rng.gen_range(0..scope.len())])),
            _ if !scope.is_empty() => v(&scope[self.rng.gen_range(0..scope.len())]),
            _ => Term::Zero,
        }
    }

    fn atom(&mut self, scope: &[String], external: bool) -> Formula {
        let a = self.term(scope);
        let b = self.term(scope);
        let k = self.rng.gen_range(0..if external { 8 } else { 6 });
        match k {
            0 => Formula::rel("le", vec![a, b]),
            1 => Formula::rel("lt", vec![a, b]),
            2 => Formula::eq(a, b),
            3 => Formula::rel("R", vec![a]),
            4 | 5 => Formula::rel("P", vec![a, b]),
            6 => Formula::St(a),
            _ => Formula::ApproxReal(a, b),
        }
    }

    /// `size` counts connectives and quantifiers.
    fn formula(&mut self, size: usize, scope: &mut Vec<String>, external: bool) -> Formula {
        if size == 0 {
            return self.atom(scope, external);
        }
        let k = self.rng.gen_range(0..if external { 8 } else { 6 });
        let split = |g: &mut Gen| {
            let left = g.rng.gen_range(0..size);
            (left, size - 1 - left)
        };
        match k {
            0 => Formula::not(self.formula(size - 1, scope, external)),
            1..=3 => {
                let (l, r) = split(self);
                let a = self.formula(l, scope, external);
                let b = self.formula(r, scope, external);
                match k {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            _ => {
                let kind = if self.rng.gen_bool(0.5) { QuantKind::Forall } else { QuantKind::Exists };
                let standard = k >= 6;
                let x = self.fresh();
                scope.push(x.clone());
                let body = self.formula(size - 1, scope, external);
                scope.pop();
                Formula::quant(kind, standard, x, nat(), body)
            }
        }
    }
}

/// Well-typed formula over type `0` with at most `size` connectives and quantifiers.
///
/// Uses `le`, `lt`, `eq`, unary `R`, binary `P`, `st`, `approxR` and free `z`.
pub fn random_formula(seed: u64, size: usize) -> Formula {
    Gen::new(seed, "v").formula(size, &mut Vec::new(), true)
}

fn internal(g: &mut Gen, size: usize, scope: &[String]) -> Formula {
    g.formula(size, &mut scope.to_vec(), false)
}

/// Monotone in `y` (upward: built from `le(t, y)`, `lt(t, y)` and `y`-free atoms).
fn monotone(g: &mut Gen, size: usize, scope: &[String], y: &str, dir: Direction) -> Formula {
    if size == 0 {
        let t = g.term(scope);
        let yv = v(y);
        return match (g.rng.gen_range(0..3), dir) {
            (0, _) => internal(g, 0, &scope.iter().filter(|s| *s != y).cloned().collect::<Vec<_>>()),
            (1, Direction::Upward) => Formula::rel("le", vec![t, yv]),
            (_, Direction::Upward) => Formula::rel("lt", vec![t, yv]),
            (1, Direction::Downward) => Formula::rel("le", vec![yv, t]),
            (_, Direction::Downward) => Formula::rel("lt", vec![yv, t]),
        };
    }
    let left = g.rng.gen_range(0..size);
    let a = monotone(g, left, scope, y, dir);
    let b = monotone(g, size - 1 - left, scope, y, dir);
    if g.rng.gen_bool(0.5) {
        Formula::and(a, b)
    } else {
        Formula::or(a, b)
    }
}

fn step(rule: Rule, path: Vec<usize>, before: Formula, after: Formula, op: WitnessOp) -> RewriteStep {
    RewriteStep { rule, path, before, after, witness_op: op }
}

/// One rule application on a random formula shaped for that rule; the rule is `seed % 6`.
pub fn random_rule_instance(seed: u64) -> RewriteStep {
    let mut g = Gen::new(seed, "u");
    let size = g.rng.gen_range(0..4);
    match seed % 6 {
        0 => {
            let x = g.fresh();
            let inner = internal(&mut g, size, std::slice::from_ref(&x));
            let sugar = if g.rng.gen_bool(0.5) { Formula::St(v(&x)) } else { Formula::ApproxReal(v(&x), v("z")) };
            let before = Formula::forall(x, nat(), Formula::implies(sugar, inner));
            let after = expand_definitions(&before);
            let (_, binds) = crate::rewrite::expand_with_bindings(&before);
            step(Rule::R1, vec![], before, after, WitnessOp::Expand { bindings: binds })
        }
        1 => {
            let mut before = random_formula(seed, size + 2);
            for bump in 1..50 {
                if pull_standard_quantifiers(&before) != before {
                    break;
                }
                before = random_formula(seed.wrapping_add(bump * 7919), size + 2);
            }
            let after = pull_standard_quantifiers(&before);
            step(Rule::R2, vec![], before, after, WitnessOp::Prenex)
        }
        2 => {
            let (a, b) = (g.fresh(), g.fresh());
            let psi = internal(&mut g, size, &[a.clone(), b.clone()]);
            let cons = g.formula(size, &mut vec![], true);
            let ante = Formula::forall_st(a, nat(), Formula::exists_st(b, nat(), psi));
            let before = Formula::implies(ante, cons);
            let (after, op) = herbrandize_antecedent(&before, &[]).expect("shaped for R3");
            step(Rule::R3, vec![], before, after, op)
        }
        3 => {
            let a = g.fresh();
            let psi = internal(&mut g, size, std::slice::from_ref(&a));
            let cons = g.formula(size, &mut vec![], true);
            let q = Formula::forall_st(a, nat(), psi);
            let (before, path) = if g.rng.gen_bool(0.5) {
                (Formula::implies(q, cons), vec![0])
            } else {
                (Formula::or(Formula::not(q), cons), vec![0, 0])
            };
            let after = drop_st(&before, &path, None).expect("negative position");
            let var = match before.at(&path) {
                Some(Formula::Quant { var, .. }) => var.clone(),
                _ => unreachable!(),
            };
            step(Rule::R4, path, before, after, WitnessOp::DropSt { var })
        }
        4 => {
            let x = g.fresh();
            let ys: Vec<String> = (0..g.rng.gen_range(1..=2)).map(|_| g.fresh()).collect();
            let mut scope = vec![x.clone()];
            scope.extend(ys.iter().cloned());
            let mut body = internal(&mut g, size, &scope);
            for y in ys.iter().rev() {
                body = Formula::exists_st(y.clone(), nat(), body);
            }
            let before = Formula::forall(x, nat(), body);
            let anns: Vec<MonotoneAnnotation> = ys
                .iter()
                .filter(|_| g.rng.gen_bool(0.5))
                .map(|y| MonotoneAnnotation::new(y.clone(), Direction::Upward))
                .collect();
            let (after, op) = idealise(&before, &[], &anns).expect("shaped for R5");
            step(Rule::R5, vec![], before, after, op)
        }
        _ => {
            let (w, x, y) = (g.fresh(), g.fresh(), g.fresh());
            let dir = if g.rng.gen_bool(0.5) { Direction::Upward } else { Direction::Downward };
            let phi = monotone(&mut g, size, &[x.clone(), y.clone()], &y, dir);
            let seq = Term::var(w.clone(), FinType::seq(nat()));
            let before = Formula::exists_st(
                w,
                FinType::seq(nat()),
                Formula::forall(x, nat(), Formula::elem_of(y.clone(), nat(), seq, phi)),
            );
            let (after, op) = max_collapse(&before, &[], &[MonotoneAnnotation::new(y, dir)]).expect("shaped for R6");
            step(Rule::R6, vec![], before, after, op)
        }
    }
}

/// `n` rule instances from consecutive seeds starting at `seed`.
pub fn random_suite(seed: u64, n: usize) -> Vec<RewriteStep> {
    (0..n as u64).map(|i| random_rule_instance(seed.wrapping_add(i))).collect()
}
