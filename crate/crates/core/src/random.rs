//! Seeded random instances for self-checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{int, DenseMatrix};
use crate::partition::{compositions, ShapeFamily};
use crate::problem::Problem;
use crate::solver::Objective;

/// Size ranges of generated instances. Fixed values override the ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceConfig {
    pub max_k: usize,
    pub max_n: usize,
    pub max_p: usize,
    /// Entries are drawn from `[-entry_bound, entry_bound]`.
    pub entry_bound: i64,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub p: Option<usize>,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            max_k: 2,
            max_n: 7,
            max_p: 3,
            entry_bound: 5,
            k: None,
            n: None,
            p: None,
        }
    }
}

/// The `index`-th instance of the stream selected by `seed`.
pub fn random_problem(seed: u64, index: u64, config: &InstanceConfig) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let k = config.k.unwrap_or_else(|| rng.gen_range(1..=config.max_k.max(1)));
    let n = config.n.unwrap_or_else(|| rng.gen_range(2..=config.max_n.max(2)));
    let p = config.p.unwrap_or_else(|| rng.gen_range(2..=config.max_p.max(2)));
    let bound = config.entry_bound;
    let rows: Vec<Vec<i64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    let matrix = DenseMatrix::from_integers(&rows);
    let shapes = random_family(&mut rng, n, p);
    let objective = if rng.gen_bool(0.5) {
        let cost: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..p).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        Objective::Linear(DenseMatrix::from_integers(&cost))
    } else {
        Objective::SumColumnNormPow(*[2, 4].choose(&mut rng).expect("nonempty"))
    };
    Problem {
        matrix,
        p,
        shapes,
        objective: Some(objective),
    }
}

fn random_family(rng: &mut ChaCha8Rng, n: usize, p: usize) -> ShapeFamily {
    let all = compositions(n, p);
    match rng.gen_range(0..3) {
        0 => ShapeFamily::all(n, p).expect("p > 0"),
        1 => {
            let count = rng.gen_range(1..=3.min(all.len()));
            let picked = all.choose_multiple(rng, count).cloned();
            ShapeFamily::explicit(n, p, picked).expect("compositions of n")
        }
        _ => {
            let base = all.choose(rng).expect("at least one composition");
            let lower = base.counts().iter().map(|&c| c - rng.gen_range(0..=c.min(1))).collect();
            let upper = base.counts().iter().map(|&c| c + rng.gen_range(0..=1)).collect();
            ShapeFamily::bounds(n, p, lower, upper).expect("bounds bracket the base shape")
        }
    }
}

/// Scales every column by `factor` and then adds `shift` to it; `shift` has one entry per row.
pub fn transform_columns(a: &DenseMatrix, factor: i64, shift: &[i64]) -> DenseMatrix {
    let mut out = a.clone();
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            out.set(r, c, a.get(r, c) * int(factor) + int(shift[r]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let config = InstanceConfig::default();
        for i in 0..40 {
            let a = random_problem(7, i, &config);
            assert_eq!(a, random_problem(7, i, &config));
            assert!(a.k() <= 2 && a.n() <= 7 && a.p <= 3);
            assert!(a.matrix.entries().iter().all(|v| *v >= int(-5) && *v <= int(5)));
            assert!(!a.shapes.enumerate_shapes().is_empty());
        }
        assert_ne!(random_problem(7, 0, &config), random_problem(8, 0, &config));
    }

    #[test]
    fn fixed_sizes() {
        let config = InstanceConfig {
            k: Some(2),
            n: Some(6),
            p: Some(3),
            ..InstanceConfig::default()
        };
        let a = random_problem(1, 3, &config);
        assert_eq!((a.k(), a.n(), a.p), (2, 6, 3));
    }
}
