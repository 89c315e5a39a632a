//! Brute-force ground truth for small instances.
//!
//! Every ordered partition with an admissible shape is enumerated directly from the element
//! assignments, without going through the generic-partition machinery, so the results can be
//! compared against the fast path.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hull::extreme_points;
use crate::linalg::Rational;
use crate::partition::{partition_matrix, AttributeMatrix, OrderedPartition, PartitionMatrix, Shape, ShapeOracle};
use crate::solver::{evaluate_all, Objective};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteLimits {
    pub max_n: usize,
    pub max_p: usize,
    /// Skip the size guard.
    pub force: bool,
}

impl Default for BruteLimits {
    fn default() -> Self {
        Self {
            max_n: 9,
            max_p: 4,
            force: false,
        }
    }
}

impl BruteLimits {
    pub fn check(&self, n: usize, p: usize) -> Result<()> {
        if self.force {
            return Ok(());
        }
        if n > self.max_n {
            return Err(Error::Capacity {
                what: "element count for brute force",
                limit: self.max_n as u64,
                flag: "--force",
            });
        }
        if p > self.max_p {
            return Err(Error::Capacity {
                what: "part count for brute force",
                limit: self.max_p as u64,
                flag: "--force",
            });
        }
        Ok(())
    }
}

/// All ordered `p`-partitions of `[n]` with admissible shape, in canonical order.
pub fn enumerate_all_partitions(n: usize, p: usize, shapes: &dyn ShapeOracle, limits: &BruteLimits) -> Result<Vec<OrderedPartition>> {
    if p == 0 {
        return Err(Error::invalid("part count p must be positive"));
    }
    limits.check(n, p)?;
    shapes.check_compatible(n, p)?;
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        let mut counts = vec![0usize; p];
        for &b in &assignment {
            counts[b] += 1;
        }
        if shapes.admits(&Shape::new(counts)) {
            out.push(OrderedPartition::from_assignment(p, &assignment));
        }
        // Odometer step, last element fastest.
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < p {
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// Extreme points of the full set of partition matrices, in canonical order.
pub fn brute_vertices(a: &AttributeMatrix, p: usize, shapes: &dyn ShapeOracle, limits: &BruteLimits) -> Result<Vec<PartitionMatrix>> {
    let partitions = enumerate_all_partitions(a.cols(), p, shapes, limits)?;
    Ok(vertices_of(a, &partitions)?.1)
}

fn vertices_of(a: &AttributeMatrix, partitions: &[OrderedPartition]) -> Result<(Vec<PartitionMatrix>, Vec<PartitionMatrix>)> {
    let matrices = partitions
        .par_iter()
        .map(|pi| partition_matrix(a, pi))
        .collect::<Result<Vec<_>>>()?;
    let distinct: Vec<PartitionMatrix> = matrices.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let lifted: Vec<Vec<Rational>> = distinct.iter().map(PartitionMatrix::lifted_point).collect();
    let vertices = extreme_points(&lifted).into_iter().map(|i| distinct[i].clone()).collect();
    Ok((matrices, vertices))
}

pub fn brute_solve(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    objective: &Objective,
    limits: &BruteLimits,
) -> Result<Rational> {
    objective.check_compatible(a, p)?;
    let partitions = enumerate_all_partitions(a.cols(), p, shapes, limits)?;
    let matrices = partitions
        .iter()
        .map(|pi| partition_matrix(a, pi))
        .collect::<Result<Vec<_>>>()?;
    max_value(objective, &matrices)
}

fn max_value(objective: &Objective, matrices: &[PartitionMatrix]) -> Result<Rational> {
    evaluate_all(objective, matrices, 1)?
        .into_iter()
        .max()
        .ok_or_else(|| Error::invalid("the shape family admits no partition"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteResult {
    pub all_partitions: usize,
    pub vertex_set: Vec<PartitionMatrix>,
    /// Present when an objective was supplied.
    pub best_value: Option<Rational>,
}

/// Partitions, vertices and (optionally) the optimum, from one enumeration.
pub fn brute_force(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    objective: Option<&Objective>,
    limits: &BruteLimits,
) -> Result<BruteResult> {
    if let Some(o) = objective {
        o.check_compatible(a, p)?;
    }
    let partitions = enumerate_all_partitions(a.cols(), p, shapes, limits)?;
    let (matrices, vertex_set) = vertices_of(a, &partitions)?;
    let best_value = objective.map(|o| max_value(o, &matrices)).transpose()?;
    Ok(BruteResult {
        all_partitions: partitions.len(),
        vertex_set,
        best_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, int, DenseMatrix};
    use crate::partition::ShapeFamily;

    fn pm(rows: &[&[i64]]) -> PartitionMatrix {
        PartitionMatrix::new(DenseMatrix::from_integers(rows))
    }

    #[test]
    fn partition_counts() {
        let limits = BruteLimits::default();
        assert_eq!(enumerate_all_partitions(2, 2, &ShapeFamily::all(2, 2).unwrap(), &limits).unwrap().len(), 4);
        let ones = ShapeFamily::explicit(3, 3, [Shape::new(vec![1, 1, 1])]).unwrap();
        assert_eq!(enumerate_all_partitions(3, 3, &ones, &limits).unwrap().len(), 6);
        let full = ShapeFamily::explicit(3, 2, [Shape::new(vec![3, 0])]).unwrap();
        let only = enumerate_all_partitions(3, 2, &full, &limits).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].to_one_based(), vec![vec![1, 2, 3], vec![]]);
    }

    #[test]
    fn guard() {
        let err = enumerate_all_partitions(10, 2, &ShapeFamily::all(10, 2).unwrap(), &BruteLimits::default());
        assert!(matches!(err, Err(Error::Capacity { flag: "--force", .. })));
        let err = enumerate_all_partitions(3, 5, &ShapeFamily::all(3, 5).unwrap(), &BruteLimits::default());
        assert!(matches!(err, Err(Error::Capacity { .. })));
        let forced = BruteLimits {
            force: true,
            ..BruteLimits::default()
        };
        assert_eq!(enumerate_all_partitions(3, 5, &ShapeFamily::all(3, 5).unwrap(), &forced).unwrap().len(), 125);
    }

    #[test]
    fn vertex_examples() {
        let limits = BruteLimits::default();
        let square = brute_vertices(&DenseMatrix::identity(2), 2, &ShapeFamily::all(2, 2).unwrap(), &limits).unwrap();
        assert_eq!(square.len(), 4);
        let row = DenseMatrix::from_integers(&[[1, 2, 3]]);
        let ones = ShapeFamily::explicit(3, 3, [Shape::new(vec![1, 1, 1])]).unwrap();
        assert_eq!(brute_vertices(&row, 3, &ones, &limits).unwrap().len(), 6);
        let flat = DenseMatrix::from_integers(&[[1, 1]]);
        let ends = brute_vertices(&flat, 2, &ShapeFamily::all(2, 2).unwrap(), &limits).unwrap();
        assert_eq!(ends, vec![pm(&[&[0, 2]]), pm(&[&[2, 0]])]);
    }

    #[test]
    fn solve_examples() {
        let limits = BruteLimits::default();
        let split = DenseMatrix::from_rows(vec![vec![frac(3, 5), frac(3, 10)], vec![frac(2, 5), frac(7, 10)]]).unwrap();
        let one_each = ShapeFamily::explicit(2, 2, [Shape::new(vec![1, 1])]).unwrap();
        assert_eq!(brute_solve(&split, 2, &one_each, &Objective::SumDiagPow(2), &limits).unwrap(), frac(17, 20));

        let triangle = Objective::MaxCut(vec![(0, 1), (0, 2), (1, 2)]);
        let all = ShapeFamily::all(3, 2).unwrap();
        assert_eq!(brute_solve(&DenseMatrix::identity(3), 2, &all, &triangle, &limits).unwrap(), int(2));

        let a = DenseMatrix::from_integers(&[[1, -4, 2], [0, 3, 3]]);
        let single = ShapeFamily::all(3, 1).unwrap();
        let value = brute_solve(&a, 1, &single, &Objective::SumColumnNormPow(2), &limits).unwrap();
        assert_eq!(value, int(1 + 36));
    }

    #[test]
    fn combined_run() {
        let result = brute_force(
            &DenseMatrix::identity(3),
            2,
            &ShapeFamily::all(3, 2).unwrap(),
            Some(&Objective::MaxCut(vec![(0, 1), (1, 2)])),
            &BruteLimits::default(),
        )
        .unwrap();
        assert_eq!(result.all_partitions, 8);
        assert_eq!(result.vertex_set.len(), 8);
        assert_eq!(result.best_value, Some(int(2)));
    }
}
