//! Vertex enumeration of shaped partition polytopes.
//!
//! `A` is lifted by the index row, the generic partitions of the lifted matrix are
//! enumerated and filtered by the shape oracle, and their partition matrices (computed from
//! the original `A`) form a candidate set that contains every vertex. Each candidate is then
//! tested against the others for being a convex combination of them.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generic::{assemble_all, EnumerationLimits, GenericPartitionSet, PerturbedMatrix};
use crate::hull::{extreme_points, is_extreme, VertexTest};
use crate::linalg::Rational;
use crate::partition::{lift, partition_matrix, AttributeMatrix, OrderedPartition, PartitionMatrix, ShapeOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexOptions {
    pub limits: EnumerationLimits,
    /// Cap on the number of distinct candidate matrices entering the vertex test.
    pub max_candidates: u64,
    pub vertex_test: VertexTest,
}

impl Default for VertexOptions {
    fn default() -> Self {
        Self {
            limits: EnumerationLimits::default(),
            max_candidates: 20_000,
            vertex_test: VertexTest::Auto,
        }
    }
}

/// Generic partitions of the lifted matrix and their admissible subset.
#[derive(Clone, Debug)]
pub struct GenericScan {
    /// Number of generic 2-partitions of the lifted matrix.
    pub two_partitions: usize,
    /// Generic `p`-partitions of the lifted matrix.
    pub generic: GenericPartitionSet,
    /// The members of `generic` whose shape the oracle admits, in canonical order.
    pub admissible: Vec<OrderedPartition>,
}

pub fn scan_generic(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    limits: &EnumerationLimits,
) -> Result<GenericScan> {
    if p == 0 {
        return Err(Error::invalid("part count p must be positive"));
    }
    shapes.check_compatible(a.cols(), p)?;
    let lifted = PerturbedMatrix::new(lift(a));
    let two = lifted.enumerate_generic_2partitions(limits)?;
    let generic = match p {
        1 => lifted.enumerate_generic_p_partitions(1, limits)?,
        2 => two.clone(),
        _ => assemble_all(&two, p, limits)?,
    };
    let admissible = generic
        .iter()
        .filter(|pi| shapes.admits(&pi.shape()))
        .cloned()
        .collect();
    Ok(GenericScan {
        two_partitions: two.len(),
        generic,
        admissible,
    })
}

/// Distinct partition matrices of admissible generic partitions, with every generating
/// partition kept as a witness.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    members: Vec<PartitionMatrix>,
    witnesses: Vec<Vec<OrderedPartition>>,
    two_partitions: usize,
    generic_partitions: usize,
    admissible_partitions: usize,
}

impl CandidateSet {
    pub fn members(&self) -> &[PartitionMatrix] {
        &self.members
    }

    pub fn witnesses(&self) -> &[Vec<OrderedPartition>] {
        &self.witnesses
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, matrix: &PartitionMatrix) -> bool {
        self.members.binary_search(matrix).is_ok()
    }
}

pub fn candidate_vertices(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    limits: &EnumerationLimits,
) -> Result<CandidateSet> {
    let scan = scan_generic(a, p, shapes, limits)?;
    let mut grouped: BTreeMap<PartitionMatrix, Vec<OrderedPartition>> = BTreeMap::new();
    for pi in &scan.admissible {
        grouped
            .entry(partition_matrix(a, pi)?)
            .or_default()
            .push(pi.clone());
    }
    let (members, witnesses) = grouped.into_iter().unzip();
    Ok(CandidateSet {
        members,
        witnesses,
        two_partitions: scan.two_partitions,
        generic_partitions: scan.generic.len(),
        admissible_partitions: scan.admissible.len(),
    })
}

/// Whether `u` is not a convex combination of the other members of `set`.
pub fn is_vertex(u: &PartitionMatrix, set: &[PartitionMatrix]) -> bool {
    is_vertex_with(u, set, VertexTest::Auto)
}

pub fn is_vertex_with(u: &PartitionMatrix, set: &[PartitionMatrix], test: VertexTest) -> bool {
    let others: Vec<Vec<Rational>> = set.iter().filter(|m| *m != u).map(PartitionMatrix::lifted_point).collect();
    let refs: Vec<&[Rational]> = others.iter().map(Vec::as_slice).collect();
    is_extreme(&u.lifted_point(), &refs, test)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VertexCounts {
    pub two_partitions: usize,
    pub generic_partitions: usize,
    pub admissible_partitions: usize,
    pub candidates: usize,
    pub vertices: usize,
}

#[derive(Clone, Debug)]
pub struct VertexReport {
    pub vertices: Vec<PartitionMatrix>,
    pub witnesses: Vec<Vec<OrderedPartition>>,
    pub counts: VertexCounts,
}

/// Vertices of the polytope, in canonical (row-major lexicographic) order.
pub fn enumerate_vertices(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    options: &VertexOptions,
) -> Result<VertexReport> {
    let candidates = candidate_vertices(a, p, shapes, &options.limits)?;
    filter_vertices(candidates, options)
}

/// Keeps the members of a candidate set that are vertices of its hull. With
/// [`VertexTest::Auto`] the whole set is processed at once by [`extreme_points`]; the other
/// settings test each member against the rest.
pub fn filter_vertices(candidates: CandidateSet, options: &VertexOptions) -> Result<VertexReport> {
    if candidates.len() as u64 > options.max_candidates {
        return Err(Error::Capacity {
            what: "number of candidate matrices",
            limit: options.max_candidates,
            flag: "--max-candidates",
        });
    }
    let lifted: Vec<Vec<Rational>> = candidates.members.iter().map(PartitionMatrix::lifted_point).collect();
    let keep: Vec<bool> = match options.vertex_test {
        VertexTest::Auto => {
            let mut keep = vec![false; lifted.len()];
            for i in extreme_points(&lifted) {
                keep[i] = true;
            }
            keep
        }
        test => (0..lifted.len())
            .into_par_iter()
            .map(|u| {
                let others: Vec<&[Rational]> = lifted
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != u)
                    .map(|(_, v)| v.as_slice())
                    .collect();
                is_extreme(&lifted[u], &others, test)
            })
            .collect(),
    };
    let mut counts = VertexCounts {
        two_partitions: candidates.two_partitions,
        generic_partitions: candidates.generic_partitions,
        admissible_partitions: candidates.admissible_partitions,
        candidates: candidates.members.len(),
        vertices: 0,
    };
    let (vertices, witnesses): (Vec<_>, Vec<_>) = candidates
        .members
        .into_iter()
        .zip(candidates.witnesses)
        .zip(keep)
        .filter_map(|(pair, k)| k.then_some(pair))
        .unzip();
    counts.vertices = vertices.len();
    Ok(VertexReport {
        vertices,
        witnesses,
        counts,
    })
}
