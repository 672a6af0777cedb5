//! Random metric generators and seed derivation.
//!
//! Every generator draws points in a space from the relevant hypothesis
//! class and returns exact dyadic distances, so the same instance can be
//! fed to either backend.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metric::MetricSpace;
use crate::scalar::{Rational, Scalar};

/// Seed of trial `index` under `master`: one SplitMix64 step applied to
/// `master + (index + 1) * 0x9E3779B97F4A7C15`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random dyadic in `[0, 1)` with 32 bits.
pub fn unit_dyadic<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    let k: u32 = rng.gen();
    S::from_rational(&dyadic(k.into(), 32))
}

fn dyadic(k: i64, bits: u32) -> Rational {
    Rational::new(BigInt::from(k), BigInt::from(1u64) << bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Distinct points on the cycle of length one.
    Cycle,
    /// Points in three-dimensional Euclidean space.
    Euclidean,
    /// A subset of the vertices of a random weighted tree.
    Tree,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [GeneratorKind::Cycle, GeneratorKind::Euclidean, GeneratorKind::Tree];
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Cycle => "cycle",
            GeneratorKind::Euclidean => "euclidean",
            GeneratorKind::Tree => "tree",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle" => Ok(GeneratorKind::Cycle),
            "euclidean" | "l2" => Ok(GeneratorKind::Euclidean),
            "tree" => Ok(GeneratorKind::Tree),
            other => Err(format!("unknown generator {other:?}")),
        }
    }
}

/// Cycle distance `min(|a - b|, 1 - |a - b|)` for positions in `[0, 1)`.
pub fn cycle_distance<S: Scalar>(a: &S, b: &S) -> S {
    let diff = (a.clone() - b.clone()).abs();
    crate::scalar::smin(diff.clone(), S::one() - diff)
}

/// `n` distinct cycle positions `k / 2^16`, in random order.
pub fn cycle_positions<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    let ks = rand::seq::index::sample(rng, 1 << 16, n);
    ks.into_iter().map(|k| dyadic(k as i64, 16)).collect()
}

pub fn cycle_metric<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricSpace<S> {
    let pos = cycle_positions(rng, n);
    let matrix = pos
        .iter()
        .map(|a| pos.iter().map(|b| S::from_rational(&cycle_distance(a, b))).collect())
        .collect();
    MetricSpace::from_matrix(matrix).expect("cycle distances form a metric")
}

/// Points uniform in the unit cube of `R^3`; distances rounded to the
/// `2^-30` grid and shifted up by `2^-20` so rounding can never break the
/// triangle inequality.
pub fn euclidean_metric<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricSpace<S> {
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
    let shift = dyadic(1, 20);
    let mut matrix = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = (0..3).map(|c| (pts[i][c] - pts[j][c]).powi(2)).sum();
            let k = (d2.sqrt() * (1u64 << 30) as f64).round() as i64;
            let d = S::from_rational(&(dyadic(k, 30) + shift.clone()));
            matrix[i][j] = d.clone();
            matrix[j][i] = d;
        }
    }
    MetricSpace::from_matrix(matrix).expect("shifted Euclidean distances form a metric")
}

/// A random tree on `n..=2n` vertices with integer weights in `1..=16`.
/// `n` distinct vertices are exposed in random order.
pub fn tree_metric<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricSpace<S> {
    let m = rng.gen_range(n..=2 * n.max(1));
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); m];
    for v in 1..m {
        let p = rng.gen_range(0..v);
        let w = rng.gen_range(1..=16u64);
        adj[v].push((p, w));
        adj[p].push((v, w));
    }
    let mut chosen: Vec<usize> = (0..m).collect();
    chosen.shuffle(rng);
    chosen.truncate(n);
    let dist_from = |src: usize| {
        let mut d = vec![u64::MAX; m];
        d[src] = 0;
        let mut stack = vec![src];
        while let Some(u) = stack.pop() {
            for &(v, w) in &adj[u] {
                if d[v] == u64::MAX {
                    d[v] = d[u] + w;
                    stack.push(v);
                }
            }
        }
        d
    };
    let matrix = chosen
        .iter()
        .map(|&a| {
            let d = dist_from(a);
            chosen.iter().map(|&b| S::from_count(d[b] as usize)).collect()
        })
        .collect();
    MetricSpace::from_matrix(matrix).expect("tree distances form a metric")
}

pub fn random_metric<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, kind: GeneratorKind) -> MetricSpace<S> {
    match kind {
        GeneratorKind::Cycle => cycle_metric(rng, n),
        GeneratorKind::Euclidean => euclidean_metric(rng, n),
        GeneratorKind::Tree => tree_metric(rng, n),
    }
}
