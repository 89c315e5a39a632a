//! Convex maximization over admissible partitions.
//!
//! For a convex objective some maximizer has a vertex as its partition matrix, and every
//! vertex is the matrix of an admissible generic partition of the lifted attribute matrix.
//! Scanning those partitions and querying the objective at each matrix therefore finds the
//! optimum over all admissible partitions. Convexity of user-supplied objectives is taken on
//! trust; a non-convex objective voids the optimality guarantee.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generic::EnumerationLimits;
use crate::linalg::{abs_pow, format_rational, is_integer, parse_rational, DenseMatrix, Rational};
use crate::partition::{partition_matrix, AttributeMatrix, OrderedPartition, PartitionMatrix, ShapeOracle};
use crate::vertices::scan_generic;

/// Built-in convex objectives and the subprocess oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `<C, X> = sum_ij C_ij X_ij` for a `k x p` cost matrix.
    Linear(DenseMatrix),
    /// `sum_i |X_ii|^q`, for square `X` (`k = p`).
    SumDiagPow(u32),
    /// `sum_ij |X_ij|^q` for even `q`.
    SumColumnNormPow(u32),
    /// Number of edges cut by the first block; `X` must be an indicator matrix (identity
    /// attributes, two parts). Edges are 0-based element pairs.
    MaxCut(Vec<(usize, usize)>),
    /// Line-oriented subprocess oracle.
    External(Vec<String>),
}

impl Objective {
    pub fn validate(&self) -> Result<()> {
        match self {
            Objective::SumDiagPow(q) if *q == 0 => Err(Error::invalid("sum_diag_pow needs q >= 1")),
            Objective::SumColumnNormPow(q) if *q == 0 || q % 2 == 1 => {
                Err(Error::invalid("sum_column_norm_pow needs a positive even q"))
            }
            Objective::External(cmd) if cmd.is_empty() => Err(Error::invalid("external oracle command is empty")),
            _ => Ok(()),
        }
    }

    /// Checks that the objective can be queried on the `k x p` matrices of this instance.
    pub fn check_compatible(&self, a: &AttributeMatrix, p: usize) -> Result<()> {
        self.validate()?;
        let k = a.rows();
        match self {
            Objective::Linear(cost) if cost.rows() != k || cost.cols() != p => Err(Error::dimension(format!(
                "linear cost is {}x{}, partition matrices are {k}x{p}",
                cost.rows(),
                cost.cols()
            ))),
            Objective::SumDiagPow(_) if k != p => Err(Error::dimension(format!(
                "sum_diag_pow needs square partition matrices, got {k}x{p}"
            ))),
            Objective::MaxCut(edges) => {
                if p != 2 {
                    return Err(Error::dimension("max_cut needs p = 2"));
                }
                if *a != DenseMatrix::identity(a.cols()) {
                    return Err(Error::dimension("max_cut needs the identity attribute matrix"));
                }
                if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= k || v >= k) {
                    return Err(Error::dimension(format!("edge ({}, {}) outside [1, {k}]", u + 1, v + 1)));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Objective value at a partition matrix. External oracles are run once per call; use
    /// [`ExternalOracle`] for a persistent session.
    pub fn evaluate(&self, x: &PartitionMatrix) -> Result<Rational> {
        let m = x.matrix();
        match self {
            Objective::Linear(cost) => {
                if cost.rows() != m.rows() || cost.cols() != m.cols() {
                    return Err(Error::dimension(format!(
                        "linear cost is {}x{}, matrix is {}x{}",
                        cost.rows(),
                        cost.cols(),
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(cost.entries().iter().zip(m.entries()).map(|(c, v)| c * v).sum())
            }
            Objective::SumDiagPow(q) => {
                if !m.is_square() {
                    return Err(Error::dimension(format!(
                        "sum_diag_pow needs a square matrix, got {}x{}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok((0..m.rows()).map(|i| abs_pow(m.get(i, i), *q)).sum())
            }
            Objective::SumColumnNormPow(q) => Ok(m.entries().iter().map(|v| abs_pow(v, *q)).sum()),
            Objective::MaxCut(edges) => {
                if m.cols() != 2 {
                    return Err(Error::dimension("max_cut needs two columns"));
                }
                let mut first = Vec::with_capacity(m.rows());
                for r in 0..m.rows() {
                    let (a, b) = (m.get(r, 0), m.get(r, 1));
                    let indicator = (a.is_one() && b.is_zero()) || (a.is_zero() && b.is_one());
                    if !indicator {
                        return Err(Error::dimension(format!("row {} is not an indicator row", r + 1)));
                    }
                    first.push(a.is_one());
                }
                let mut cut = 0i64;
                for &(u, v) in edges {
                    if u >= first.len() || v >= first.len() {
                        return Err(Error::dimension(format!("edge ({}, {}) outside the matrix", u + 1, v + 1)));
                    }
                    if first[u] != first[v] {
                        cut += 1;
                    }
                }
                Ok(Rational::from_integer(cut.into()))
            }
            Objective::External(cmd) => ExternalOracle::spawn(cmd)?.query(x),
        }
    }
}

/// One line per query: the matrix as a JSON array of rows; integers are JSON numbers and
/// other rationals `"a/b"` strings.
pub fn encode_query(x: &PartitionMatrix) -> String {
    let m = x.matrix();
    let rows: Vec<String> = (0..m.rows())
        .map(|r| {
            let entries: Vec<String> = m
                .row(r)
                .iter()
                .map(|v| {
                    if is_integer(v) {
                        format_rational(v)
                    } else {
                        format!("\"{}\"", format_rational(v))
                    }
                })
                .collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Parses a one-line reply: an integer, a decimal, or a (possibly quoted) `a/b` string.
pub fn parse_reply(line: &str) -> Result<Rational> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Err(Error::Oracle("empty reply".into()));
    }
    let text = if trimmed.starts_with('"') {
        serde_json::from_str::<String>(trimmed).map_err(|e| Error::Oracle(format!("malformed reply {trimmed:?}: {e}")))?
    } else {
        trimmed.to_string()
    };
    parse_rational(&text).map_err(|e| Error::Oracle(format!("malformed reply {trimmed:?}: {e}")))
}

/// A running oracle subprocess answering one query per line.
pub struct ExternalOracle {
    command: String,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl ExternalOracle {
    pub fn spawn(cmd: &[String]) -> Result<Self> {
        let (program, args) = cmd
            .split_first()
            .ok_or_else(|| Error::Oracle("empty oracle command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Oracle(format!("cannot start {program:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            command: cmd.join(" "),
            child,
            stdin: Some(stdin),
            stdout,
        })
    }

    pub fn query(&mut self, x: &PartitionMatrix) -> Result<Rational> {
        let stdin = self.stdin.as_mut().expect("stdin open while the session lives");
        writeln!(stdin, "{}", encode_query(x))
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Oracle(format!("writing to {:?}: {e}", self.command)))?;
        let mut line = String::new();
        let read = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| Error::Oracle(format!("reading from {:?}: {e}", self.command)))?;
        if read == 0 {
            return Err(Error::Oracle(format!("{:?} closed its output without replying", self.command)));
        }
        parse_reply(&line)
    }
}

impl Drop for ExternalOracle {
    fn drop(&mut self) {
        drop(self.stdin.take());
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}

/// Evaluates `objective` at every matrix, in order.
pub(crate) fn evaluate_all(objective: &Objective, matrices: &[PartitionMatrix], oracle_processes: usize) -> Result<Vec<Rational>> {
    match objective {
        Objective::External(cmd) => {
            let workers = oracle_processes.max(1).min(matrices.len().max(1));
            let chunk = matrices.len().div_ceil(workers).max(1);
            let parts: Vec<Result<Vec<Rational>>> = matrices
                .par_chunks(chunk)
                .map(|slice| {
                    let mut session = ExternalOracle::spawn(cmd)?;
                    slice.iter().map(|x| session.query(x)).collect()
                })
                .collect();
            let mut values = Vec::with_capacity(matrices.len());
            for part in parts {
                values.extend(part?);
            }
            Ok(values)
        }
        _ => matrices.par_iter().map(|x| objective.evaluate(x)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub limits: EnumerationLimits,
    /// Number of identical oracle subprocesses queried in parallel (external oracles only).
    pub oracle_processes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            limits: EnumerationLimits::default(),
            oracle_processes: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub partition: OrderedPartition,
    pub matrix: PartitionMatrix,
    pub value: Rational,
    /// Objective queries made, one per admissible generic partition.
    pub evaluations: usize,
}

/// First maximizer, in canonical partition order.
fn pick_best(partitions: Vec<OrderedPartition>, matrices: Vec<PartitionMatrix>, values: Vec<Rational>) -> Result<SolveReport> {
    let evaluations = values.len();
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| *v > values[b]) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::invalid("the shape family admits no partition"))?;
    Ok(SolveReport {
        partition: partitions[best].clone(),
        matrix: matrices[best].clone(),
        value: values[best].clone(),
        evaluations,
    })
}

pub fn solve(
    a: &AttributeMatrix,
    p: usize,
    shapes: &dyn ShapeOracle,
    objective: &Objective,
    options: &SolveOptions,
) -> Result<SolveReport> {
    objective.check_compatible(a, p)?;
    let scan = scan_generic(a, p, shapes, &options.limits)?;
    let matrices = scan
        .admissible
        .iter()
        .map(|pi| partition_matrix(a, pi))
        .collect::<Result<Vec<_>>>()?;
    let values = evaluate_all(objective, &matrices, options.oracle_processes)?;
    pick_best(scan.admissible, matrices, values)
}

/// [`solve`] with an arbitrary convex functional given as a closure.
pub fn solve_with<F>(a: &AttributeMatrix, p: usize, shapes: &dyn ShapeOracle, objective: F, limits: &EnumerationLimits) -> Result<SolveReport>
where
    F: Fn(&PartitionMatrix) -> Result<Rational> + Sync,
{
    let scan = scan_generic(a, p, shapes, limits)?;
    let matrices = scan
        .admissible
        .iter()
        .map(|pi| partition_matrix(a, pi))
        .collect::<Result<Vec<_>>>()?;
    let values = matrices.par_iter().map(&objective).collect::<Result<Vec<_>>>()?;
    pick_best(scan.admissible, matrices, values)
}
