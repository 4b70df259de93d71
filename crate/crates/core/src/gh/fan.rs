use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::{BaireOracle, FinitePrefix, Functional, GhError};

/// All binary strings of length `d`, in lexicographic order.
pub(crate) fn binary_strings(d: u64) -> impl Iterator<Item = Vec<u8>> {
    (0..1u64 << d).map(move |bits| (0..d).map(|i| ((bits >> (d - 1 - i)) & 1) as u8).collect())
}

fn cantor_point(sigma: &[u8]) -> FinitePrefix {
    FinitePrefix::zeros(sigma.iter().map(|&b| b as u64).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FanModulus {
    /// Values are determined by the first `n` bits.
    pub n: u64,
    /// Upper bound on all values.
    pub b: u64,
}

/// Least depth `d <= depth_cap` at which every zero-tailed binary point
/// with a length-`d` prefix is evaluated without looking past `d`.
pub fn fan_modulus(g: &Functional, depth_cap: u64) -> Result<FanModulus, GhError> {
    'depth: for d in 0..=depth_cap {
        let mut b = 0;
        for sigma in binary_strings(d) {
            let (v, reach) = g.eval_instrumented(&cantor_point(&sigma));
            if reach > d {
                continue 'depth;
            }
            b = b.max(v);
        }
        return Ok(FanModulus { n: d, b });
    }
    Err(GhError::DepthExceeded { max_depth: depth_cap })
}

/// Bound and finite test set for the special fan functional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialFanOutput {
    pub bound: u64,
    /// Prefixes of the zero-tailed witness points, all of length `bound`.
    #[serde(serialize_with = "ser_strings")]
    pub witnesses: Vec<Vec<u8>>,
}

fn bits(s: &[u8]) -> String {
    s.iter().map(|b| char::from(b'0' + b)).collect()
}

fn ser_strings<S: Serializer>(ws: &[Vec<u8>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ws.iter().map(|w| bits(w)))
}

/// `K = max(N, B)` and every zero-tailed point with a length-`K` prefix.
///
/// Any binary `beta` shares its first `K` bits with some witness `alpha`,
/// and `g(alpha) <= B <= K`, so `alpha`'s escape from a tree is `beta`'s.
/// Refuses `K` above `depth_cap` since the witness set has `2^K` points.
pub fn special_fan(g: &Functional, depth_cap: u64) -> Result<SpecialFanOutput, GhError> {
    let m = fan_modulus(g, depth_cap)?;
    let k = m.n.max(m.b);
    if k > depth_cap {
        return Err(GhError::DepthExceeded { max_depth: depth_cap });
    }
    Ok(SpecialFanOutput { bound: k, witnesses: binary_strings(k).collect() })
}

/// Finite prefix-closed set of binary strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTree(BTreeSet<Vec<u8>>);

impl BinaryTree {
    pub fn new(nodes: impl IntoIterator<Item = Vec<u8>>) -> Option<BinaryTree> {
        let set: BTreeSet<Vec<u8>> = nodes.into_iter().collect();
        let closed = set.iter().all(|s| s.iter().all(|&b| b <= 1) && (s.is_empty() || set.contains(&s[..s.len() - 1])));
        closed.then_some(BinaryTree(set))
    }

    pub fn empty() -> BinaryTree {
        BinaryTree(BTreeSet::new())
    }

    /// Every string of length at most `depth`.
    pub fn full(depth: u64) -> BinaryTree {
        BinaryTree((0..=depth).flat_map(binary_strings).collect())
    }

    /// Grows children with a per-tree probability, never past `depth`.
    pub fn random(rng: &mut impl Rng, depth: u64) -> BinaryTree {
        let mut set = BTreeSet::new();
        if rng.gen_bool(0.05) {
            return BinaryTree(set);
        }
        let p = rng.gen_range(0.3..0.95);
        let mut frontier = vec![Vec::new()];
        while let Some(s) = frontier.pop() {
            if (s.len() as u64) < depth {
                for b in [0u8, 1] {
                    if rng.gen_bool(p) {
                        let mut c = s.clone();
                        c.push(b);
                        frontier.push(c);
                    }
                }
            }
            set.insert(s);
        }
        BinaryTree(set)
    }

    pub fn contains(&self, s: &[u8]) -> bool {
        self.0.contains(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> Option<usize> {
        self.0.iter().map(Vec::len).max()
    }
}

/// Truth of: if every witness `alpha` leaves `t` by position `g(alpha)`,
/// every binary `beta` leaves `t` by position `out.bound`.
pub fn verify_scf(out: &SpecialFanOutput, g: &Functional, t: &BinaryTree) -> bool {
    if !antecedent(out, g, t) {
        return true;
    }
    let n = out.bound;
    binary_strings(n).all(|beta| (0..=n as usize).any(|i| !t.contains(&beta[..i])))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanCell {
    pub functional: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<FanModulus>,
    pub bound: Option<u64>,
    pub witnesses: usize,
    pub trees: usize,
    /// Trees on which the antecedent held, so the consequent was checked.
    pub antecedent_held: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanReport {
    pub seed: u64,
    pub depth_cap: u64,
    pub tree_depth: u64,
    pub cells: Vec<FanCell>,
    pub cap_hit: bool,
    pub passed: bool,
}

/// Runs the special fan construction for each functional and checks it
/// against `trees` random trees of depth at most `tree_depth`.
pub fn fan_suite(gs: &[Functional], trees: usize, tree_depth: u64, depth_cap: u64, seed: u64) -> FanReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forest: Vec<BinaryTree> = (0..trees).map(|_| BinaryTree::random(&mut rng, tree_depth)).collect();
    let cells: Vec<FanCell> = gs
        .iter()
        .map(|g| {
            let mut cell = FanCell {
                functional: g.name.clone(),
                modulus: None,
                bound: None,
                witnesses: 0,
                trees,
                antecedent_held: 0,
                failures: 0,
                error: None,
            };
            match fan_modulus(g, depth_cap).and_then(|m| special_fan(g, depth_cap).map(|o| (m, o))) {
                Err(e) => cell.error = Some(e.to_string()),
                Ok((m, out)) => {
                    cell.modulus = Some(m);
                    cell.bound = Some(out.bound);
                    cell.witnesses = out.witnesses.len();
                    for t in &forest {
                        cell.antecedent_held += usize::from(antecedent(&out, g, t));
                        cell.failures += usize::from(!verify_scf(&out, g, t));
                    }
                }
            }
            cell
        })
        .collect();
    let cap_hit = cells.iter().any(|c| c.error.is_some());
    let passed = !cap_hit && cells.iter().all(|c| c.failures == 0);
    FanReport { seed, depth_cap, tree_depth, cells, cap_hit, passed }
}

/// Every witness leaves `t` within its own `g`-value.
fn antecedent(out: &SpecialFanOutput, g: &Functional, t: &BinaryTree) -> bool {
    out.witnesses.iter().all(|sigma| {
        let alpha = cantor_point(sigma);
        let prefix: Vec<u8> = (0..g.eval(&alpha)).map(|i| alpha.query(i) as u8).collect();
        !t.contains(&prefix)
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Library};
    use super::*;

    fn lib(name: &str) -> Functional {
        Library::bundled().get(name).unwrap().clone()
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(fan_modulus(&Functional::constant(4), 12), Ok(FanModulus { n: 0, b: 4 }));
        assert_eq!(fan_modulus(&lib("sum01"), 12), Ok(FanModulus { n: 2, b: 2 }));
        let first = Functional::new("first5", Expr::FirstOne { cap: 5 });
        assert_eq!(fan_modulus(&first, 12), Ok(FanModulus { n: 5, b: 5 }));
        assert_eq!(fan_modulus(&first, 4), Err(GhError::DepthExceeded { max_depth: 4 }));
    }

    #[test]
    fn special_fan_examples() {
        let two = special_fan(&Functional::constant(2), 12).unwrap();
        assert_eq!(two.bound, 2);
        assert_eq!(two.witnesses, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let zero = special_fan(&Functional::constant(0), 12).unwrap();
        assert_eq!((zero.bound, zero.witnesses.len()), (0, 1));
        let s = special_fan(&lib("sum01"), 12).unwrap();
        assert_eq!((s.bound, s.witnesses.len()), (2, 4));
    }

    #[test]
    fn verify_examples() {
        let g2 = Functional::constant(2);
        let out2 = special_fan(&g2, 12).unwrap();
        assert!(!antecedent(&out2, &g2, &BinaryTree::full(2)));
        assert!(verify_scf(&out2, &g2, &BinaryTree::full(2)));
        assert!(verify_scf(&out2, &g2, &BinaryTree::full(4)));
        let g5 = Functional::constant(5);
        let out5 = special_fan(&g5, 12).unwrap();
        assert!(antecedent(&out5, &g5, &BinaryTree::full(4)));
        assert!(verify_scf(&out5, &g5, &BinaryTree::full(4)));
        assert!(verify_scf(&out2, &g2, &BinaryTree::empty()));
    }

    #[test]
    fn a_short_bound_would_be_caught() {
        // claim bound 1 for g = 2: trees of depth 1 defeat it
        let g = Functional::constant(2);
        let bad = SpecialFanOutput { bound: 1, witnesses: vec![vec![0], vec![1]] };
        assert!(!verify_scf(&bad, &g, &BinaryTree::full(1)));
    }

    #[test]
    fn trees_are_prefix_closed() {
        assert!(BinaryTree::new([vec![], vec![0], vec![0, 1]]).is_some());
        assert!(BinaryTree::new([vec![], vec![0, 1]]).is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let t = BinaryTree::random(&mut rng, 8);
            assert!(t.depth().unwrap_or(0) <= 8);
            assert!(BinaryTree::new(t.0.iter().cloned()).is_some());
        }
    }
}
