//! Comparison of the fast path against brute force on one instance.

use crate::error::Result;
use crate::linalg::Rational;
use crate::partition::PartitionMatrix;
use crate::problem::Problem;
use crate::reference::{brute_force, BruteLimits};
use crate::solver::{solve, SolveOptions};
use crate::vertices::{candidate_vertices, filter_vertices, VertexCounts, VertexOptions};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub counts: VertexCounts,
    /// Number of admissible partitions found by brute force.
    pub all_partitions: usize,
    pub fast_vertices: Vec<PartitionMatrix>,
    pub brute_vertices: Vec<PartitionMatrix>,
    /// Brute-force vertices absent from the candidate set.
    pub not_candidates: Vec<PartitionMatrix>,
    pub fast_value: Option<Rational>,
    pub brute_value: Option<Rational>,
}

impl CheckOutcome {
    pub fn vertices_match(&self) -> bool {
        self.fast_vertices == self.brute_vertices
    }

    pub fn superset_holds(&self) -> bool {
        self.not_candidates.is_empty()
    }

    pub fn optimum_matches(&self) -> bool {
        self.fast_value == self.brute_value
    }

    pub fn passed(&self) -> bool {
        self.vertices_match() && self.superset_holds() && self.optimum_matches()
    }

    /// Vertices reported by one side only, as (missing from fast, extra in fast).
    pub fn vertex_diff(&self) -> (Vec<&PartitionMatrix>, Vec<&PartitionMatrix>) {
        let missing = self
            .brute_vertices
            .iter()
            .filter(|v| self.fast_vertices.binary_search(v).is_err())
            .collect();
        let extra = self
            .fast_vertices
            .iter()
            .filter(|v| self.brute_vertices.binary_search(v).is_err())
            .collect();
        (missing, extra)
    }
}

pub fn check_problem(problem: &Problem, vertex_options: &VertexOptions, solve_options: &SolveOptions, brute_limits: &BruteLimits) -> Result<CheckOutcome> {
    let (a, p, shapes) = (&problem.matrix, problem.p, &problem.shapes);
    let brute = brute_force(a, p, shapes, problem.objective.as_ref(), brute_limits)?;
    let candidates = candidate_vertices(a, p, shapes, &vertex_options.limits)?;
    let not_candidates = brute
        .vertex_set
        .iter()
        .filter(|v| !candidates.contains(v))
        .cloned()
        .collect();
    let report = filter_vertices(candidates, vertex_options)?;
    let fast_value = match &problem.objective {
        Some(o) => Some(solve(a, p, shapes, o, solve_options)?.value),
        None => None,
    };
    Ok(CheckOutcome {
        counts: report.counts,
        all_partitions: brute.all_partitions,
        fast_vertices: report.vertices,
        brute_vertices: brute.vertex_set,
        not_candidates,
        fast_value,
        brute_value: brute.best_value,
    })
}
