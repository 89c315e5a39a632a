//! Extreme-point tests for finite point sets.
//!
//! Points are handled in homogenized form: a leading 1 followed by the coordinates, so that
//! affine combinations become linear ones and a point is a convex combination of others
//! exactly when its lifted vector is a nonnegative combination of theirs.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::generic::binomial;
use crate::linalg::simplex::{nonnegative_combination, Feasibility};
use crate::linalg::{rank_of_vectors, solve_in_span, Rational, SpanSolution};

/// How to decide whether a point is a vertex of the hull of a finite set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VertexTest {
    /// Exhaustive affine bases while their number stays within the budget, otherwise simplex.
    #[default]
    Auto,
    /// Carathéodory: try every affine basis of the remaining points.
    Exhaustive,
    /// Exact phase-one simplex on the convex-combination system.
    Simplex,
}

/// Largest number of affine bases [`VertexTest::Auto`] will try per point.
pub const EXHAUSTIVE_BASIS_BUDGET: u128 = 500;

/// Number of candidate bases the exhaustive test examines for `others` points spanning a
/// lifted rank of `rank`.
pub fn basis_count(others: usize, rank: usize) -> u128 {
    binomial(others, rank)
}

/// Whether `point` is *not* a convex combination of `others` (all lifted).
pub fn is_extreme(point: &[Rational], others: &[&[Rational]], test: VertexTest) -> bool {
    if others.is_empty() {
        return true;
    }
    match test {
        VertexTest::Exhaustive => caratheodory_is_extreme(point, others),
        VertexTest::Simplex => simplex_is_extreme(point, others),
        VertexTest::Auto => {
            let rank = rank_of_vectors(&others.iter().map(|o| o.to_vec()).collect::<Vec<_>>());
            if basis_count(others.len(), rank) <= EXHAUSTIVE_BASIS_BUDGET {
                caratheodory_with_rank(point, others, rank)
            } else {
                simplex_is_extreme(point, others)
            }
        }
    }
}

/// Let `d` be the rank of the lifted `others`. The point is a non-vertex iff some `d`-subset
/// of linearly independent lifted vectors expresses it with nonnegative coefficients.
pub fn caratheodory_is_extreme(point: &[Rational], others: &[&[Rational]]) -> bool {
    let rank = rank_of_vectors(&others.iter().map(|o| o.to_vec()).collect::<Vec<_>>());
    caratheodory_with_rank(point, others, rank)
}

fn caratheodory_with_rank(point: &[Rational], others: &[&[Rational]], rank: usize) -> bool {
    for subset in others.iter().combinations(rank) {
        let columns: Vec<Vec<Rational>> = subset.iter().map(|c| c.to_vec()).collect();
        if let SpanSolution::Coefficients(mu) = solve_in_span(&columns, point).expect("equal lengths") {
            if mu.iter().all(|m| !m.is_negative()) {
                return false;
            }
        }
    }
    true
}

pub fn simplex_is_extreme(point: &[Rational], others: &[&[Rational]]) -> bool {
    matches!(nonnegative_combination(others, point), Feasibility::Infeasible(_))
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Indices of the extreme points of a set of distinct lifted points.
///
/// Output-sensitive incremental method, run in rounds: every pending point is tested against
/// the extreme points found so far. Points inside their hull are settled. For a point
/// outside, the Farkas certificate is a direction in which it beats all of them, and the
/// lexicographically largest maximizer of that direction over the whole set is a new extreme
/// point. The extreme set does not depend on the processing order. Returned indices are
/// sorted.
pub fn extreme_points(points: &[Vec<Rational>]) -> Vec<usize> {
    let mut extreme: Vec<usize> = Vec::new();
    let mut is_extreme = vec![false; points.len()];
    let mut pending: Vec<usize> = (0..points.len()).collect();
    while !pending.is_empty() {
        let hull: Vec<&[Rational]> = extreme.iter().map(|&e| points[e].as_slice()).collect();
        let test = |&s: &usize| match nonnegative_combination(&hull, &points[s]) {
            Feasibility::Feasible(_) => None,
            Feasibility::Infeasible(y) => Some((s, y)),
        };
        // On one thread, stop at the first outside point so later tests see a larger hull.
        let outside: Vec<(usize, Vec<Rational>)> = if rayon::current_num_threads() > 1 {
            pending.par_iter().filter_map(test).collect()
        } else {
            let mut settled = 0;
            let mut found = Vec::new();
            for s in &pending {
                settled += 1;
                if let Some(hit) = test(s) {
                    found.push(hit);
                    break;
                }
            }
            found.extend(pending[settled..].iter().map(|&s| (s, Vec::new())));
            found
        };
        let before = extreme.len();
        // Untested points carry an empty direction.
        for (_, direction) in outside.iter().filter(|(_, d)| !d.is_empty()) {
            let winner = lex_maximizer(points, direction);
            if !is_extreme[winner] {
                is_extreme[winner] = true;
                extreme.push(winner);
            }
        }
        assert!(outside.is_empty() || extreme.len() > before, "separating direction must expose a new extreme point");
        pending = outside.into_iter().map(|(s, _)| s).filter(|&s| !is_extreme[s]).collect();
    }
    extreme.sort_unstable();
    extreme
}

fn lex_maximizer(points: &[Vec<Rational>], direction: &[Rational]) -> usize {
    let mut best: Option<(Rational, usize)> = None;
    for (t, point) in points.iter().enumerate() {
        let value = dot(direction, point);
        let better = match &best {
            None => true,
            Some((v, b)) => value > *v || (value == *v && point > &points[*b]),
        };
        if better {
            best = Some((value, t));
        }
    }
    best.expect("point set is nonempty").1
}
