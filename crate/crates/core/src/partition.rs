//! Partitions, shapes, admissible-shape families and partition matrices.
//!
//! Element indices are 0-based inside the library; files and reports use 1-based indices
//! and convert at the boundary.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{int, DenseMatrix, Rational};

/// The attribute matrix `A`: one column per ground-set element.
pub type AttributeMatrix = DenseMatrix;

/// An ordered tuple of `p` disjoint (possibly empty) blocks covering `{0, .., n-1}`.
///
/// Blocks are stored as sorted index lists, so equality and the derived order are
/// canonical: partitions compare block by block, lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl OrderedPartition {
    /// Validates 0-based blocks over `{0, .., n-1}`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a partition needs at least one block"));
        }
        let mut seen = vec![false; n];
        let mut blocks = blocks;
        for block in &mut blocks {
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(Error::invalid(format!("element {} outside [1, {n}]", i + 1)));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::invalid(format!("element {} appears twice", i + 1)));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::invalid(format!("element {} is not covered", missing + 1)));
        }
        Ok(Self { blocks, n })
    }

    /// Builds from 1-based blocks as used in files and reports.
    pub fn from_one_based(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let shifted = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| {
                        i.checked_sub(1)
                            .ok_or_else(|| Error::invalid("element indices are 1-based"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, shifted)
    }

    /// `assignment[i]` is the block of element `i`.
    pub fn from_assignment(p: usize, assignment: &[usize]) -> Self {
        let mut blocks = vec![Vec::new(); p];
        for (i, &b) in assignment.iter().enumerate() {
            blocks[b].push(i);
        }
        Self {
            blocks,
            n: assignment.len(),
        }
    }

    /// Trusted constructor for blocks already known to be sorted, disjoint and covering.
    pub(crate) fn from_sorted_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(blocks.iter().map(Vec::len).sum::<usize>(), n);
        Self { blocks, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &[usize] {
        &self.blocks[j]
    }

    pub fn shape(&self) -> Shape {
        Shape(self.blocks.iter().map(Vec::len).collect())
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    /// The partition with every element relabelled through `map` (element `i` becomes
    /// `map[i]`), which must be a permutation of `{0, .., n-1}`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut out: Vec<usize> = b.iter().map(|&i| map[i]).collect();
                out.sort_unstable();
                out
            })
            .collect();
        Self { blocks, n: self.n }
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, block) in self.blocks.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (t, i) in block.iter().enumerate() {
                if t > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, ")")
    }
}

/// Block cardinalities of a partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn parts(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn shape_of(partition: &OrderedPartition) -> Shape {
    partition.shape()
}

/// Membership oracle for an admissible-shape family.
///
/// Implemented by the declarative [`ShapeFamily`] and by any `Fn(&Shape) -> bool`, so code
/// can pass an arbitrary predicate where files only carry declarative families.
pub trait ShapeOracle: Sync {
    fn admits(&self, shape: &Shape) -> bool;

    /// Rejects families declared for a different ground set or part count.
    fn check_compatible(&self, _n: usize, _p: usize) -> Result<()> {
        Ok(())
    }
}

impl<F> ShapeOracle for F
where
    F: Fn(&Shape) -> bool + Sync,
{
    fn admits(&self, shape: &Shape) -> bool {
        self(shape)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    All,
    Explicit(BTreeSet<Shape>),
    Bounds { lower: Vec<usize>, upper: Vec<usize> },
}

/// A nonempty family of `p`-shapes of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeFamily {
    n: usize,
    p: usize,
    kind: ShapeKind,
}

impl ShapeFamily {
    pub fn all(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("part count p must be positive"));
        }
        Ok(Self {
            n,
            p,
            kind: ShapeKind::All,
        })
    }

    pub fn explicit(n: usize, p: usize, shapes: impl IntoIterator<Item = Shape>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("part count p must be positive"));
        }
        let shapes: BTreeSet<Shape> = shapes.into_iter().collect();
        if shapes.is_empty() {
            return Err(Error::invalid("explicit shape list is empty"));
        }
        for shape in &shapes {
            if shape.parts() != p {
                return Err(Error::invalid(format!("shape {shape} has {} parts, expected {p}", shape.parts())));
            }
            if shape.total() != n {
                return Err(Error::invalid(format!("shape {shape} sums to {}, expected {n}", shape.total())));
            }
        }
        Ok(Self {
            n,
            p,
            kind: ShapeKind::Explicit(shapes),
        })
    }

    pub fn bounds(n: usize, p: usize, lower: Vec<usize>, upper: Vec<usize>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("part count p must be positive"));
        }
        if lower.len() != p || upper.len() != p {
            return Err(Error::invalid(format!(
                "bounds need {p} entries each, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..p).find(|&j| lower[j] > upper[j]) {
            return Err(Error::invalid(format!("lower bound exceeds upper bound in part {}", j + 1)));
        }
        let (lo, hi): (usize, usize) = (lower.iter().sum(), upper.iter().sum());
        if lo > n || hi < n {
            return Err(Error::invalid(format!(
                "bounds admit no shape of {n}: lower sums to {lo}, upper to {hi}"
            )));
        }
        Ok(Self {
            n,
            p,
            kind: ShapeKind::Bounds { lower, upper },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    /// Membership of a `p`-shape of `n`.
    pub fn contains(&self, shape: &Shape) -> Result<bool> {
        if shape.parts() != self.p || shape.total() != self.n {
            return Err(Error::dimension(format!(
                "shape {shape} is not a {}-shape of {}",
                self.p, self.n
            )));
        }
        Ok(self.admits(shape))
    }

    /// Admissible shapes in lexicographic order.
    pub fn enumerate_shapes(&self) -> Vec<Shape> {
        match &self.kind {
            ShapeKind::Explicit(shapes) => shapes.iter().cloned().collect(),
            _ => compositions(self.n, self.p)
                .into_iter()
                .filter(|s| self.admits(s))
                .collect(),
        }
    }
}

impl ShapeOracle for ShapeFamily {
    fn admits(&self, shape: &Shape) -> bool {
        match &self.kind {
            ShapeKind::All => true,
            ShapeKind::Explicit(shapes) => shapes.contains(shape),
            ShapeKind::Bounds { lower, upper } => shape
                .counts()
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(c, (l, u))| l <= c && c <= u),
        }
    }

    fn check_compatible(&self, n: usize, p: usize) -> Result<()> {
        if self.n != n || self.p != p {
            return Err(Error::dimension(format!(
                "shape family is declared for n={}, p={} but the instance has n={n}, p={p}",
                self.n, self.p
            )));
        }
        Ok(())
    }
}

pub fn shape_member(family: &ShapeFamily, shape: &Shape) -> Result<bool> {
    family.contains(shape)
}

/// All `p`-shapes of `n` in lexicographic order.
pub fn compositions(n: usize, p: usize) -> Vec<Shape> {
    fn extend(remaining: usize, parts_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Shape>) {
        if parts_left == 1 {
            prefix.push(remaining);
            out.push(Shape(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=remaining {
            prefix.push(first);
            extend(remaining - first, parts_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if p > 0 {
        extend(n, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

/// The `k x p` matrix whose column `j` sums the columns of `A` indexed by block `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionMatrix(DenseMatrix);

impl PartitionMatrix {
    pub fn new(matrix: DenseMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    /// Row-major entries with a leading 1, the homogenized point used by convexity tests.
    pub fn lifted_point(&self) -> Vec<Rational> {
        std::iter::once(int(1))
            .chain(self.0.entries().iter().cloned())
            .collect()
    }
}

impl fmt::Display for PartitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn partition_matrix(a: &AttributeMatrix, partition: &OrderedPartition) -> Result<PartitionMatrix> {
    if partition.n() != a.cols() {
        return Err(Error::dimension(format!(
            "partition of {} elements against a matrix with {} columns",
            partition.n(),
            a.cols()
        )));
    }
    let k = a.rows();
    let p = partition.p();
    let mut data = vec![Rational::zero(); k * p];
    for (j, block) in partition.blocks().iter().enumerate() {
        for &i in block {
            for r in 0..k {
                data[r * p + j] += a.get(r, i);
            }
        }
    }
    Ok(PartitionMatrix(DenseMatrix::new(k, p, data)?))
}

/// Appends the index row `(1, 2, .., n)` to `A`.
pub fn lift(a: &AttributeMatrix) -> AttributeMatrix {
    let n = a.cols();
    let mut data = a.entries().to_vec();
    data.extend((1..=n).map(|i| int(i as i64)));
    DenseMatrix::new(a.rows() + 1, n, data).expect("lifted size is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> OrderedPartition {
        OrderedPartition::from_one_based(n, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn shape(c: &[usize]) -> Shape {
        Shape::new(c.to_vec())
    }

    #[test]
    fn shapes_of_partitions() {
        assert_eq!(shape_of(&part(3, &[&[1, 2, 3], &[]])), shape(&[3, 0]));
        assert_eq!(shape_of(&part(3, &[&[1, 3], &[2]])), shape(&[2, 1]));
        assert_eq!(shape_of(&part(3, &[&[2], &[1], &[3]])), shape(&[1, 1, 1]));
    }

    #[test]
    fn partition_validation() {
        assert!(OrderedPartition::from_one_based(3, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(OrderedPartition::from_one_based(3, &[vec![1], vec![3]]).is_err());
        assert!(OrderedPartition::from_one_based(2, &[vec![0], vec![1, 2]]).is_err());
        assert!(OrderedPartition::from_one_based(2, &[vec![4], vec![1, 2]]).is_err());
        let p = OrderedPartition::from_one_based(3, &[vec![3, 1], vec![2]]).unwrap();
        assert_eq!(p.to_one_based(), vec![vec![1, 3], vec![2]]);
        assert_eq!(p.to_string(), "({1,3},{2})");
        assert_eq!(OrderedPartition::from_assignment(2, &[0, 1, 0]), p);
    }

    #[test]
    fn partition_matrix_examples() {
        let id = DenseMatrix::identity(2);
        assert_eq!(
            partition_matrix(&id, &part(2, &[&[1], &[2]])).unwrap().into_matrix(),
            DenseMatrix::identity(2)
        );
        assert_eq!(
            partition_matrix(&id, &part(2, &[&[1, 2], &[]])).unwrap().into_matrix(),
            DenseMatrix::from_integers(&[[1, 0], [1, 0]])
        );
        let row = DenseMatrix::from_integers(&[[1, 2, 3]]);
        assert_eq!(
            partition_matrix(&row, &part(3, &[&[1, 3], &[2]])).unwrap().into_matrix(),
            DenseMatrix::from_integers(&[[4, 2]])
        );
        assert!(matches!(
            partition_matrix(&row, &part(2, &[&[1], &[2]])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn lift_examples() {
        assert_eq!(
            lift(&DenseMatrix::from_integers(&[[5, 6]])),
            DenseMatrix::from_integers(&[[5, 6], [1, 2]])
        );
        assert_eq!(lift(&DenseMatrix::zeros(0, 3)), DenseMatrix::from_integers(&[[1, 2, 3]]));
        assert_eq!(
            lift(&DenseMatrix::from_integers(&[[7], [8]])),
            DenseMatrix::from_integers(&[[7], [8], [1]])
        );
    }

    #[test]
    fn membership_examples() {
        assert!(shape_member(&ShapeFamily::all(3, 2).unwrap(), &shape(&[2, 1])).unwrap());
        let bounds = ShapeFamily::bounds(3, 2, vec![1, 1], vec![2, 2]).unwrap();
        assert!(!shape_member(&bounds, &shape(&[3, 0])).unwrap());
        let explicit = ShapeFamily::explicit(3, 3, [shape(&[1, 1, 1])]).unwrap();
        assert!(shape_member(&explicit, &shape(&[1, 1, 1])).unwrap());
        assert!(matches!(shape_member(&explicit, &shape(&[1, 2])), Err(Error::Dimension(_))));
        assert!(matches!(shape_member(&explicit, &shape(&[1, 1, 2])), Err(Error::Dimension(_))));
    }

    #[test]
    fn family_validation() {
        assert!(ShapeFamily::explicit(3, 2, []).is_err());
        assert!(ShapeFamily::explicit(3, 2, [shape(&[2, 2])]).is_err());
        assert!(ShapeFamily::explicit(3, 2, [shape(&[1, 1, 1])]).is_err());
        assert!(ShapeFamily::bounds(3, 2, vec![2, 2], vec![3, 3]).is_err());
        assert!(ShapeFamily::bounds(3, 2, vec![0, 0], vec![1, 1]).is_err());
        assert!(ShapeFamily::bounds(3, 2, vec![2, 0], vec![1, 3]).is_err());
        assert!(ShapeFamily::bounds(3, 2, vec![1], vec![3]).is_err());
        assert!(ShapeFamily::all(3, 0).is_err());
    }

    #[test]
    fn enumerate_shapes_examples() {
        let all = ShapeFamily::all(2, 2).unwrap();
        assert_eq!(all.enumerate_shapes(), vec![shape(&[0, 2]), shape(&[1, 1]), shape(&[2, 0])]);
        let one = ShapeFamily::explicit(2, 2, [shape(&[1, 1])]).unwrap();
        assert_eq!(one.enumerate_shapes(), vec![shape(&[1, 1])]);
        let bounds = ShapeFamily::bounds(3, 2, vec![1, 1], vec![2, 2]).unwrap();
        assert_eq!(bounds.enumerate_shapes(), vec![shape(&[1, 2]), shape(&[2, 1])]);
    }

    #[test]
    fn closures_are_oracles() {
        let even_first = |s: &Shape| s.counts()[0] % 2 == 0;
        assert!(even_first.admits(&shape(&[2, 1])));
        assert!(!even_first.admits(&shape(&[1, 2])));
    }
}
