use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::real::{dyadic, q, RealCode, RealFunction, Q};
use super::AnalysisError;

/// Working precision of the integration sweeps, as a power of two.
pub const CRI_PRECISION: u32 = 24;

/// Tagged partition `0 = x_0 < ... < x_M = 1` with `t_i` in `[x_i, x_{i+1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    points: Vec<Q>,
    tags: Vec<Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Left,
    Mid,
    Right,
}

impl Partition {
    pub fn new(points: Vec<Q>, tags: Vec<Q>) -> Result<Partition, AnalysisError> {
        let bad = |why: &str| Err(AnalysisError::InvalidPartition(why.to_string()));
        if points.len() < 2 || !points[0].is_zero() || !points[points.len() - 1].is_one() {
            return bad("points must run from 0 to 1");
        }
        if tags.len() + 1 != points.len() {
            return bad("one tag per cell");
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0] >= w[1] {
                return bad("points must increase strictly");
            }
            if tags[i] < w[0] || tags[i] > w[1] {
                return bad("tag outside its cell");
            }
        }
        Ok(Partition { points, tags })
    }

    pub fn uniform(cells: u64, tag: Tag) -> Partition {
        assert!(cells > 0);
        let points: Vec<Q> = (0..=cells).map(|i| q(i as i64, cells as i64)).collect();
        let tags = points
            .windows(2)
            .map(|w| match tag {
                Tag::Left => w[0].clone(),
                Tag::Mid => (&w[0] + &w[1]) / q(2, 1),
                Tag::Right => w[1].clone(),
            })
            .collect();
        Partition { points, tags }
    }

    /// Random partition with mesh strictly below `1/m`. Widths and tag
    /// offsets are multiples of `1/(64m)`.
    pub fn random(rng: &mut impl Rng, m: u64) -> Partition {
        const D: i64 = 64;
        let bound = q(1, m as i64);
        let mut points = vec![Q::zero()];
        loop {
            let x = points.last().unwrap().clone();
            if Q::one() - &x < bound {
                points.push(Q::one());
                break;
            }
            points.push(x + q(rng.gen_range(1..D), m as i64 * D));
        }
        let tags = points.windows(2).map(|w| &w[0] + (&w[1] - &w[0]) * q(rng.gen_range(0..=D), D)).collect();
        Partition { points, tags }
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    pub fn tags(&self) -> &[Q] {
        &self.tags
    }

    pub fn cells(&self) -> usize {
        self.tags.len()
    }

    /// Union of both point sets, tagged at left endpoints.
    pub fn common_refinement(&self, other: &Partition) -> Partition {
        let mut points: Vec<Q> = self.points.iter().chain(&other.points).cloned().collect();
        points.sort();
        points.dedup();
        let tags = points.windows(2).map(|w| w[0].clone()).collect();
        Partition { points, tags }
    }
}

pub fn mesh(p: &Partition) -> Q {
    p.points.windows(2).map(|w| &w[1] - &w[0]).max().expect("at least one cell")
}

/// `sum f(t_i) (x_{i+1} - x_i)`, each term within `2^-k / M` of its true value.
pub fn riemann_sum(f: &RealFunction, p: &Partition, k: u32) -> Q {
    let extra = usize::BITS - p.cells().leading_zeros();
    p.tags
        .iter()
        .zip(p.points.windows(2))
        .map(|(t, w)| f.apply(&RealCode::rational(t.clone())).at(k + extra) * (&w[1] - &w[0]))
        .fold(Q::zero(), |acc, x| acc + x)
}

/// Mesh bound `g(2n)`: partitions finer than `1/g(2n)` give sums within `1/n`.
pub fn integration_modulus(g: impl Fn(u64) -> u64, n: u64) -> u64 {
    g(2 * n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriCheck {
    pub holds: bool,
    pub deviation: Q,
}

/// Compares the two Riemann sums of `f` against `1/n`, charging both
/// evaluation errors against the tolerance.
pub fn check_cri(f: &RealFunction, n: u64, p: &Partition, p2: &Partition) -> Result<CriCheck, AnalysisError> {
    let g = f.modulus.ok_or_else(|| AnalysisError::NoModulus(f.name.to_string()))?;
    let bound = integration_modulus(|k| g.at(k), n);
    for part in [p, p2] {
        let m = mesh(part);
        if m * q(bound as i64, 1) >= Q::one() {
            return Err(AnalysisError::Precondition { mesh: mesh(part).to_string(), bound });
        }
    }
    let deviation = (riemann_sum(f, p, CRI_PRECISION) - riemann_sum(f, p2, CRI_PRECISION)).abs();
    let holds = &deviation + dyadic(CRI_PRECISION - 1) <= q(1, n as i64);
    Ok(CriCheck { holds, deviation })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriCell {
    pub function: String,
    pub modulus: String,
    pub n: u64,
    pub mesh_bound: u64,
    pub pairs: usize,
    pub failures: usize,
    /// Largest `|S - S'|` seen, as an exact rational.
    pub max_deviation: String,
    /// Same, rounded for reading.
    pub max_deviation_approx: f64,
    pub tolerance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriSweep {
    pub seed: u64,
    pub precision: u32,
    pub cells: Vec<CriCell>,
    pub passed: bool,
}

/// `pairs` random admissible partition pairs for each `n` in `1..=n_max`
/// and each function.
pub fn cri_sweep(fs: &[RealFunction], n_max: u64, pairs: usize, seed: u64) -> Result<CriSweep, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = Vec::new();
    for f in fs {
        let g = f.modulus.ok_or_else(|| AnalysisError::NoModulus(f.name.to_string()))?;
        for n in 1..=n_max {
            let bound = integration_modulus(|k| g.at(k), n);
            let (mut failures, mut worst) = (0, Q::zero());
            for _ in 0..pairs {
                let (p, p2) = (Partition::random(&mut rng, bound), Partition::random(&mut rng, bound));
                let c = check_cri(f, n, &p, &p2)?;
                failures += usize::from(!c.holds);
                worst = worst.max(c.deviation);
            }
            cells.push(CriCell {
                function: f.name.to_string(),
                modulus: g.to_string(),
                n,
                mesh_bound: bound,
                pairs,
                failures,
                max_deviation_approx: to_f64(&worst),
                max_deviation: worst.to_string(),
                tolerance: q(1, n as i64).to_string(),
            });
        }
    }
    let passed = cells.iter().all(|c| c.failures == 0);
    Ok(CriSweep { seed, precision: CRI_PRECISION, cells, passed })
}

pub(crate) fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_examples() {
        assert_eq!(mesh(&Partition::uniform(4, Tag::Left)), q(1, 4));
        let p = Partition::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(mesh(&p), q(1, 2));
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(vec![q(0, 1), q(1, 1)], vec![q(2, 1)]).is_err());
        assert!(Partition::new(vec![q(0, 1), q(1, 2), q(1, 2), q(1, 1)], vec![q(0, 1); 3]).is_err());
        assert!(Partition::new(vec![q(0, 1), q(1, 2)], vec![q(0, 1)]).is_err());
    }

    #[test]
    fn closed_form_sums() {
        for n in 1..20 {
            let s = riemann_sum(&RealFunction::identity(), &Partition::uniform(n, Tag::Left), 10);
            assert_eq!(s, q(n as i64 - 1, 2 * n as i64));
        }
        let s = riemann_sum(&RealFunction::square(), &Partition::uniform(1000, Tag::Mid), 10);
        assert!((s - q(1, 3)).abs() <= q(1, 1000));
        let c = RealFunction::constant(q(3, 7));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(riemann_sum(&c, &Partition::random(&mut rng, 5), 10), q(3, 7));
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(integration_modulus(|k| 2 * k, 5), 20);
        assert_eq!(integration_modulus(|k| k, 1), 2);
    }

    #[test]
    fn coarse_partitions_violate_the_precondition() {
        let p = Partition::uniform(2, Tag::Left);
        let e = check_cri(&RealFunction::square(), 3, &p, &p).unwrap_err();
        assert!(matches!(e, AnalysisError::Precondition { bound: 12, .. }));
    }
}
