//! Generic partitions under a symbolic moment-curve perturbation.
//!
//! Column `i` (1-based) of a `d x n` matrix is perturbed to `A^i + eps * (i, i^2, .., i^d)`.
//! A partition is *generic* when the convex hulls of its perturbed blocks are pairwise
//! disjoint for every sufficiently small `eps > 0`. The perturbation is never evaluated at a
//! concrete `eps`: each orientation question is a determinant that is a polynomial of degree
//! at most `d` in `eps`, recovered exactly by interpolation at `eps = 0, 1, .., d`, and its
//! sign for small `eps` is the sign of the first nonzero coefficient.
//!
//! Generic 2-partitions come from separator triples `(I, J_below, J_above)`: the hyperplane
//! through the perturbed columns of a sorted `d`-subset `I` splits the remaining columns, and
//! the points of `I` are assigned to either side by `J`. Generic `p`-partitions are assembled
//! from lists of `C(p, 2)` generic 2-partitions, one per pair of parts.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, int, solve_vandermonde, DenseMatrix, Rational};
use crate::partition::{AttributeMatrix, OrderedPartition};

/// Caps that turn runaway enumerations into errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Maximum number of distinct generic 2-partitions.
    pub max_two_partitions: u64,
    /// Maximum number of nodes visited while assembling `p`-partitions.
    pub max_assembly_nodes: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_two_partitions: 1_000_000,
            max_assembly_nodes: 200_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A matrix together with its implicit moment-curve perturbation.
#[derive(Clone, Debug)]
pub struct PerturbedMatrix {
    base: AttributeMatrix,
    // moment[r][i] = (i + 1)^(r + 1)
    moment: Vec<Vec<Rational>>,
}

impl PerturbedMatrix {
    pub fn new(base: AttributeMatrix) -> Self {
        let (d, n) = (base.rows(), base.cols());
        let moment = (0..d)
            .map(|r| {
                (0..n)
                    .map(|i| int(i as i64 + 1).pow(r as i32 + 1))
                    .collect()
            })
            .collect();
        Self { base, moment }
    }

    pub fn base(&self) -> &AttributeMatrix {
        &self.base
    }

    /// Row count `d`, which is also the moment-curve dimension.
    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn n(&self) -> usize {
        self.base.cols()
    }

    /// `det[1-prepended perturbed columns]` at a concrete `eps`.
    fn determinant_at(&self, columns: &[usize], eps: &Rational) -> Rational {
        let size = columns.len();
        let mut m = DenseMatrix::zeros(size, size);
        for (j, &c) in columns.iter().enumerate() {
            m.set(0, j, int(1));
            for r in 0..self.dim() {
                let mut v = self.base.get(r, c).clone();
                if !eps.is_zero() {
                    v += eps * &self.moment[r][c];
                }
                m.set(r + 1, j, v);
            }
        }
        determinant(&m).expect("square by construction")
    }

    /// Coefficients `D_0..D_d` of the determinant polynomial of the given `d + 1` columns,
    /// taken in the given order.
    pub fn determinant_polynomial(&self, columns: &[usize]) -> Vec<Rational> {
        assert_eq!(columns.len(), self.dim() + 1, "need d + 1 columns");
        let values: Vec<Rational> = (0..=self.dim())
            .map(|node| self.determinant_at(columns, &int(node as i64)))
            .collect();
        solve_vandermonde(&values)
    }

    /// Sign for small `eps > 0` of the determinant of the listed `d + 1` columns, in the
    /// given order.
    pub fn orientation(&self, columns: &[usize]) -> Sign {
        let coefficients = self.determinant_polynomial(columns);
        let leading = coefficients
            .iter()
            .find(|c| !c.is_zero())
            .unwrap_or_else(|| {
                panic!("perturbed determinant of columns {columns:?} vanishes identically")
            });
        if leading.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// Generic sign of `det[I, i]` for a sorted `d`-subset `I` and an index `i` outside it.
    pub fn generic_sign(&self, subset: &[usize], i: usize) -> Result<Sign> {
        self.check_subset(subset)?;
        if i >= self.n() {
            return Err(Error::dimension(format!("index {} outside [1, {}]", i + 1, self.n())));
        }
        if subset.contains(&i) {
            return Err(Error::invalid(format!("index {} belongs to the spanning subset", i + 1)));
        }
        let mut columns = subset.to_vec();
        columns.push(i);
        Ok(self.orientation(&columns))
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.len() != self.dim() {
            return Err(Error::dimension(format!(
                "spanning subset has {} indices, expected {}",
                subset.len(),
                self.dim()
            )));
        }
        if !subset.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("spanning subset must be strictly increasing"));
        }
        if subset.last().is_some_and(|&last| last >= self.n()) {
            return Err(Error::dimension("spanning subset index out of range"));
        }
        Ok(())
    }

    /// Splits the indices outside `subset` by the side of the oriented hyperplane they lie on.
    pub fn split_by_hyperplane(&self, subset: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        self.check_subset(subset)?;
        let mut below = Vec::new();
        let mut above = Vec::new();
        let mut columns = subset.to_vec();
        columns.push(0);
        for i in (0..self.n()).filter(|i| !subset.contains(i)) {
            *columns.last_mut().unwrap() = i;
            match self.orientation(&columns) {
                Sign::Negative => below.push(i),
                Sign::Positive => above.push(i),
            }
        }
        Ok((below, above))
    }

    /// The two 2-partitions `(I_below + J_below, I_above + J_above)` and its swap.
    pub fn partitions_from_triple(
        &self,
        triple: &SeparatorTriple,
    ) -> Result<(OrderedPartition, OrderedPartition)> {
        let (below, above) = self.split_by_hyperplane(&triple.subset)?;
        Ok(triple_partitions(self.n(), &below, &above, &triple.below, &triple.above))
    }

    /// All generic 2-partitions, deduplicated and sorted.
    pub fn enumerate_generic_2partitions(&self, limits: &EnumerationLimits) -> Result<GenericPartitionSet> {
        let (d, n) = (self.dim(), self.n());
        let set: BTreeSet<OrderedPartition> = if n <= d {
            all_two_partitions(n)
        } else {
            let subsets: Vec<Vec<usize>> = (0..n).combinations(d).collect();
            subsets
                .par_iter()
                .fold(BTreeSet::new, |mut acc, subset| {
                    let (below, above) = self
                        .split_by_hyperplane(subset)
                        .expect("combinations are valid spanning subsets");
                    for mask in 0u64..(1u64 << d) {
                        let (j_below, j_above): (Vec<usize>, Vec<usize>) =
                            subset.iter().enumerate().partition_map(|(t, &i)| {
                                if mask >> t & 1 == 0 {
                                    itertools::Either::Left(i)
                                } else {
                                    itertools::Either::Right(i)
                                }
                            });
                        let (lo, hi) = triple_partitions(n, &below, &above, &j_below, &j_above);
                        acc.insert(lo);
                        acc.insert(hi);
                    }
                    acc
                })
                .reduce(BTreeSet::new, |mut a, mut b| {
                    if a.len() < b.len() {
                        std::mem::swap(&mut a, &mut b);
                    }
                    a.extend(b);
                    a
                })
        };
        if set.len() as u64 > limits.max_two_partitions {
            return Err(Error::Capacity {
                what: "number of generic 2-partitions",
                limit: limits.max_two_partitions,
                flag: "--max-two-partitions",
            });
        }
        Ok(GenericPartitionSet {
            d,
            n,
            p: 2,
            partitions: set.into_iter().collect(),
        })
    }

    /// All generic `p`-partitions.
    pub fn enumerate_generic_p_partitions(&self, p: usize, limits: &EnumerationLimits) -> Result<GenericPartitionSet> {
        if p == 0 {
            return Err(Error::invalid("part count p must be positive"));
        }
        if p == 1 {
            return Ok(GenericPartitionSet {
                d: self.dim(),
                n: self.n(),
                p: 1,
                partitions: vec![OrderedPartition::from_sorted_blocks(self.n(), vec![(0..self.n()).collect()])],
            });
        }
        let two = self.enumerate_generic_2partitions(limits)?;
        assemble_all(&two, p, limits)
    }
}

/// `2^n` if `n <= d`, otherwise `2^(d+1) * C(n, d)`: the triple-counting bound on the number
/// of generic 2-partitions of a `d`-row matrix with `n` columns.
pub fn two_partition_bound(d: usize, n: usize) -> u128 {
    if n <= d {
        1u128 << n
    } else {
        (1u128 << (d + 1)) * binomial(n, d)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn all_two_partitions(n: usize) -> BTreeSet<OrderedPartition> {
    (0u64..(1u64 << n))
        .map(|mask| {
            let assignment: Vec<usize> = (0..n).map(|i| (mask >> i & 1) as usize).collect();
            OrderedPartition::from_assignment(2, &assignment)
        })
        .collect()
}

fn triple_partitions(
    n: usize,
    below: &[usize],
    above: &[usize],
    j_below: &[usize],
    j_above: &[usize],
) -> (OrderedPartition, OrderedPartition) {
    let merge = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().sorted().collect() };
    let low = merge(below, j_below);
    let high = merge(above, j_above);
    (
        OrderedPartition::from_sorted_blocks(n, vec![low.clone(), high.clone()]),
        OrderedPartition::from_sorted_blocks(n, vec![high, low]),
    )
}

/// A sorted spanning subset together with a split of its points between the two sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorTriple {
    subset: Vec<usize>,
    below: Vec<usize>,
    above: Vec<usize>,
}

impl SeparatorTriple {
    /// `below` must be a subset of `subset`; the remaining indices go above.
    pub fn new(subset: Vec<usize>, below: Vec<usize>) -> Result<Self> {
        if !subset.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("spanning subset must be strictly increasing"));
        }
        let mut below = below;
        below.sort_unstable();
        below.dedup();
        if let Some(stray) = below.iter().find(|i| !subset.contains(i)) {
            return Err(Error::invalid(format!("index {} is not in the spanning subset", stray + 1)));
        }
        let above = subset.iter().copied().filter(|i| !below.contains(i)).collect();
        Ok(Self { subset, below, above })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn below(&self) -> &[usize] {
        &self.below
    }

    pub fn above(&self) -> &[usize] {
        &self.above
    }
}

/// Deduplicated generic partitions in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericPartitionSet {
    d: usize,
    n: usize,
    p: usize,
    partitions: Vec<OrderedPartition>,
}

impl GenericPartitionSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[OrderedPartition] {
        &self.partitions
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OrderedPartition> {
        self.partitions.iter()
    }

    pub fn contains(&self, partition: &OrderedPartition) -> bool {
        self.partitions.binary_search(partition).is_ok()
    }

    pub fn into_partitions(self) -> Vec<OrderedPartition> {
        self.partitions
    }
}

impl fmt::Display for GenericPartitionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Pairs `(r, s)` with `r < s` in lexicographic order.
pub fn part_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).tuple_combinations().collect()
}

fn bitset(n: usize, items: &[usize]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(n);
    for &i in items {
        set.insert(i);
    }
    set
}

fn full_bitset(n: usize) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(n);
    set.insert_range(..);
    set
}

fn partition_from_bitsets(n: usize, blocks: &[FixedBitSet]) -> OrderedPartition {
    OrderedPartition::from_sorted_blocks(n, blocks.iter().map(|b| b.ones().collect()).collect())
}

/// The `p`-tuple associated with a list of 2-partitions indexed by the pairs of
/// [`part_pairs`]: block `i` intersects the first blocks of pairs `(i, j)` and the second
/// blocks of pairs `(j, i)`. Returns `None` when the blocks fail to cover the ground set.
pub fn assemble(pair_partitions: &[OrderedPartition], n: usize, p: usize) -> Result<Option<OrderedPartition>> {
    if p == 0 {
        return Err(Error::invalid("part count p must be positive"));
    }
    let pairs = part_pairs(p);
    if pair_partitions.len() != pairs.len() {
        return Err(Error::dimension(format!(
            "{} 2-partitions given, {} pairs needed for p={p}",
            pair_partitions.len(),
            pairs.len()
        )));
    }
    if let Some(bad) = pair_partitions.iter().find(|q| q.p() != 2 || q.n() != n) {
        return Err(Error::dimension(format!("{bad} is not a 2-partition of {n} elements")));
    }
    let mut blocks = vec![full_bitset(n); p];
    for (&(r, s), q) in pairs.iter().zip(pair_partitions) {
        blocks[r].intersect_with(&bitset(n, q.block(0)));
        blocks[s].intersect_with(&bitset(n, q.block(1)));
    }
    let mut union = FixedBitSet::with_capacity(n);
    for b in &blocks {
        union.union_with(b);
    }
    Ok((union.count_ones(..) == n).then(|| partition_from_bitsets(n, &blocks)))
}

struct Assembler<'a> {
    n: usize,
    pairs: Vec<(usize, usize)>,
    two: &'a [(FixedBitSet, FixedBitSet)],
    nodes: &'a AtomicU64,
    max_nodes: u64,
}

impl Assembler<'_> {
    fn visit(&self) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.max_nodes {
            return Err(Error::Capacity {
                what: "number of assembly nodes",
                limit: self.max_nodes,
                flag: "--max-assembly-nodes",
            });
        }
        Ok(())
    }

    fn covers(&self, blocks: &[FixedBitSet], r: usize, s: usize, new_r: &FixedBitSet, new_s: &FixedBitSet) -> bool {
        let mut union = new_r.clone();
        union.union_with(new_s);
        for (t, b) in blocks.iter().enumerate() {
            if t != r && t != s {
                union.union_with(b);
            }
        }
        union.count_ones(..) == self.n
    }

    /// Applies choice `choice` at `depth`, returning the replaced blocks when the result
    /// still covers the ground set.
    fn apply(&self, blocks: &mut [FixedBitSet], depth: usize, choice: usize) -> Option<(FixedBitSet, FixedBitSet)> {
        let (r, s) = self.pairs[depth];
        let (first, second) = &self.two[choice];
        let mut new_r = blocks[r].clone();
        new_r.intersect_with(first);
        let mut new_s = blocks[s].clone();
        new_s.intersect_with(second);
        if !self.covers(blocks, r, s, &new_r, &new_s) {
            return None;
        }
        let old_r = std::mem::replace(&mut blocks[r], new_r);
        let old_s = std::mem::replace(&mut blocks[s], new_s);
        Some((old_r, old_s))
    }

    fn descend(&self, blocks: &mut [FixedBitSet], depth: usize, out: &mut BTreeSet<OrderedPartition>) -> Result<()> {
        if depth == self.pairs.len() {
            out.insert(partition_from_bitsets(self.n, blocks));
            return Ok(());
        }
        let (r, s) = self.pairs[depth];
        for choice in 0..self.two.len() {
            self.visit()?;
            if let Some((old_r, old_s)) = self.apply(blocks, depth, choice) {
                let result = self.descend(blocks, depth + 1, out);
                blocks[r] = old_r;
                blocks[s] = old_s;
                result?;
            }
        }
        Ok(())
    }
}

/// Every `p`-partition associated with a list of members of `two`, found by depth-first
/// search over the pairs with partial intersections; a branch stops as soon as some element
/// has been excluded from every block.
pub fn assemble_all(two: &GenericPartitionSet, p: usize, limits: &EnumerationLimits) -> Result<GenericPartitionSet> {
    if p < 2 {
        return Err(Error::invalid("assembly needs at least two parts"));
    }
    let n = two.n();
    let encoded: Vec<(FixedBitSet, FixedBitSet)> = two
        .iter()
        .map(|q| (bitset(n, q.block(0)), bitset(n, q.block(1))))
        .collect();
    let nodes = AtomicU64::new(0);
    let assembler = Assembler {
        n,
        pairs: part_pairs(p),
        two: &encoded,
        nodes: &nodes,
        max_nodes: limits.max_assembly_nodes,
    };
    let found = (0..encoded.len())
        .into_par_iter()
        .map(|choice| -> Result<BTreeSet<OrderedPartition>> {
            let mut out = BTreeSet::new();
            assembler.visit()?;
            let mut blocks = vec![full_bitset(n); p];
            if assembler.apply(&mut blocks, 0, choice).is_some() {
                assembler.descend(&mut blocks, 1, &mut out)?;
            }
            Ok(out)
        })
        .try_reduce(BTreeSet::new, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            a.extend(b);
            Ok(a)
        })?;
    Ok(GenericPartitionSet {
        d: two.dim(),
        n,
        p,
        partitions: found.into_iter().collect(),
    })
}
