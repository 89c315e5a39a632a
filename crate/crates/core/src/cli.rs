//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::crosscheck::{check_problem, CheckOutcome};
use crate::error::{Error, Result};
use crate::generic::EnumerationLimits;
use crate::linalg::{format_rational, DenseMatrix, Rational};
use crate::partition::OrderedPartition;
use crate::problem::Problem;
use crate::random::{random_problem, InstanceConfig};
use crate::reference::BruteLimits;
use crate::solver::{solve, SolveOptions};
use crate::vertices::{enumerate_vertices, VertexCounts, VertexOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "shaped-partition", version, about = "Vertices of shaped partition polytopes and convex maximization over shaped partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the vertices of the polytope.
    Vertices {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also list the partitions producing each vertex.
        #[arg(long)]
        with_partitions: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize the problem's objective over admissible partitions.
    Solve {
        problem: PathBuf,
        /// Number of external oracle processes queried in parallel.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        oracle_processes: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Print partition, candidate and vertex counts.
    Count {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare against brute force, on a problem file or on seeded random instances.
    Check {
        problem: Option<PathBuf>,
        /// Seed of the random instance stream (used when no problem file is given).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        instances: u64,
        /// Fix the number of attribute rows of random instances.
        #[arg(long)]
        k: Option<usize>,
        /// Fix the number of elements of random instances.
        #[arg(long)]
        n: Option<usize>,
        /// Fix the number of parts of random instances.
        #[arg(long)]
        p: Option<usize>,
        /// Run brute force beyond its size guard.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded random problem file.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Position in the seed's instance stream.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[arg(long, default_value_t = 20_000)]
    pub max_candidates: u64,
    #[arg(long, default_value_t = EnumerationLimits::default().max_assembly_nodes)]
    pub max_assembly_nodes: u64,
    #[arg(long, default_value_t = EnumerationLimits::default().max_two_partitions)]
    pub max_two_partitions: u64,
}

impl Common {
    fn limits(&self) -> EnumerationLimits {
        EnumerationLimits {
            max_two_partitions: self.max_two_partitions,
            max_assembly_nodes: self.max_assembly_nodes,
        }
    }

    fn vertex_options(&self) -> VertexOptions {
        VertexOptions {
            limits: self.limits(),
            max_candidates: self.max_candidates,
            ..VertexOptions::default()
        }
    }
}

fn rational_text(value: &Rational) -> String {
    format_rational(value)
}

fn matrix_text(m: &DenseMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(rational_text).collect()).collect()
}

#[derive(Serialize)]
struct CountsOut {
    two_partitions: usize,
    generic_partitions: usize,
    admissible_partitions: usize,
    candidates: usize,
    vertices: usize,
}

impl From<VertexCounts> for CountsOut {
    fn from(c: VertexCounts) -> Self {
        Self {
            two_partitions: c.two_partitions,
            generic_partitions: c.generic_partitions,
            admissible_partitions: c.admissible_partitions,
            candidates: c.candidates,
            vertices: c.vertices,
        }
    }
}

#[derive(Serialize)]
struct VertexOut {
    matrix: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partitions: Option<Vec<Vec<Vec<usize>>>>,
}

#[derive(Serialize)]
struct VerticesOut {
    n: usize,
    k: usize,
    p: usize,
    counts: CountsOut,
    vertices: Vec<VertexOut>,
}

#[derive(Serialize)]
struct SolveOut {
    value: String,
    partition: Vec<Vec<usize>>,
    matrix: Vec<Vec<String>>,
    evaluations: usize,
}

#[derive(Serialize)]
struct CheckOut {
    index: Option<u64>,
    n: usize,
    k: usize,
    p: usize,
    counts: CountsOut,
    brute_partitions: usize,
    brute_vertices: usize,
    vertices_match: bool,
    candidates_contain_vertices: bool,
    fast_value: Option<String>,
    brute_value: Option<String>,
    optimum_match: bool,
}

#[derive(Serialize)]
struct CheckSummary {
    instances: Vec<CheckOut>,
    passed: usize,
    failed: usize,
}

fn partitions_text(ps: &[OrderedPartition]) -> Vec<Vec<Vec<usize>>> {
    ps.iter().map(OrderedPartition::to_one_based).collect()
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn with_threads<T: Send>(threads: Option<u64>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t as usize)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn cmd_vertices(path: &Path, format: Format, with_partitions: bool, common: &Common) -> Result<i32> {
    let problem = Problem::load(path)?;
    let report = with_threads(common.threads, || {
        enumerate_vertices(&problem.matrix, problem.p, &problem.shapes, &common.vertex_options())
    })??;
    let text = match format {
        Format::Json => json_text(&VerticesOut {
            n: problem.n(),
            k: problem.k(),
            p: problem.p,
            counts: report.counts.into(),
            vertices: report
                .vertices
                .iter()
                .zip(&report.witnesses)
                .map(|(v, w)| VertexOut {
                    matrix: matrix_text(v.matrix()),
                    partitions: with_partitions.then(|| partitions_text(w)),
                })
                .collect(),
        }),
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            for v in &report.vertices {
                writer
                    .write_record(v.matrix().entries().iter().map(rational_text))
                    .map_err(|e| Error::invalid(format!("csv: {e}")))?;
            }
            let bytes = writer.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
            String::from_utf8(bytes).expect("rationals are ASCII")
        }
    };
    emit(common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_solve(path: &Path, oracle_processes: u64, common: &Common) -> Result<i32> {
    let problem = Problem::load(path)?;
    let objective = problem
        .objective
        .as_ref()
        .ok_or_else(|| Error::Parse("solve needs an objective in the problem file".into()))?;
    let options = SolveOptions {
        limits: common.limits(),
        oracle_processes: oracle_processes as usize,
    };
    let report = with_threads(common.threads, || solve(&problem.matrix, problem.p, &problem.shapes, objective, &options))??;
    let text = json_text(&SolveOut {
        value: rational_text(&report.value),
        partition: report.partition.to_one_based(),
        matrix: matrix_text(report.matrix.matrix()),
        evaluations: report.evaluations,
    });
    emit(common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_count(path: &Path, common: &Common) -> Result<i32> {
    let problem = Problem::load(path)?;
    let report = with_threads(common.threads, || {
        enumerate_vertices(&problem.matrix, problem.p, &problem.shapes, &common.vertex_options())
    })??;
    emit(common.output.as_deref(), &json_text(&CountsOut::from(report.counts)))?;
    Ok(EXIT_OK)
}

fn check_out(index: Option<u64>, problem: &Problem, outcome: &CheckOutcome) -> CheckOut {
    CheckOut {
        index,
        n: problem.n(),
        k: problem.k(),
        p: problem.p,
        counts: outcome.counts.into(),
        brute_partitions: outcome.all_partitions,
        brute_vertices: outcome.brute_vertices.len(),
        vertices_match: outcome.vertices_match(),
        candidates_contain_vertices: outcome.superset_holds(),
        fast_value: outcome.fast_value.as_ref().map(rational_text),
        brute_value: outcome.brute_value.as_ref().map(rational_text),
        optimum_match: outcome.optimum_matches(),
    }
}

fn print_diff(label: &str, outcome: &CheckOutcome) {
    let (missing, extra) = outcome.vertex_diff();
    for v in missing {
        eprintln!("{label}: vertex {v} missing from the fast path");
    }
    for v in extra {
        eprintln!("{label}: fast path reports non-vertex {v}");
    }
    for v in &outcome.not_candidates {
        eprintln!("{label}: vertex {v} is not a candidate");
    }
    if !outcome.optimum_matches() {
        let show = |v: &Option<Rational>| v.as_ref().map(rational_text).unwrap_or_else(|| "-".into());
        eprintln!(
            "{label}: optimum {} from the fast path, {} from brute force",
            show(&outcome.fast_value),
            show(&outcome.brute_value)
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    path: Option<&Path>,
    seed: u64,
    instances: u64,
    sizes: (Option<usize>, Option<usize>, Option<usize>),
    force: bool,
    common: &Common,
) -> Result<i32> {
    let problems: Vec<(Option<u64>, Problem)> = match path {
        Some(path) => vec![(None, Problem::load(path)?)],
        None => {
            let config = InstanceConfig {
                k: sizes.0,
                n: sizes.1,
                p: sizes.2,
                ..InstanceConfig::default()
            };
            (0..instances).map(|i| (Some(i), random_problem(seed, i, &config))).collect()
        }
    };
    let brute_limits = BruteLimits {
        force,
        ..BruteLimits::default()
    };
    let solve_options = SolveOptions {
        limits: common.limits(),
        oracle_processes: 1,
    };
    let vertex_options = common.vertex_options();
    let mut rows = Vec::with_capacity(problems.len());
    let mut failed = 0;
    for (index, problem) in &problems {
        let outcome = with_threads(common.threads, || check_problem(problem, &vertex_options, &solve_options, &brute_limits))??;
        if !outcome.passed() {
            failed += 1;
            let label = index.map_or_else(|| "problem".to_string(), |i| format!("instance {i}"));
            print_diff(&label, &outcome);
        }
        rows.push(check_out(*index, problem, &outcome));
    }
    let summary = CheckSummary {
        passed: rows.len() - failed,
        failed,
        instances: rows,
    };
    emit(common.output.as_deref(), &json_text(&summary))?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_generate(seed: u64, index: u64, sizes: (Option<usize>, Option<usize>, Option<usize>), output: Option<&Path>) -> Result<i32> {
    let config = InstanceConfig {
        k: sizes.0,
        n: sizes.1,
        p: sizes.2,
        ..InstanceConfig::default()
    };
    let problem = random_problem(seed, index, &config);
    emit(output, &json_text(&problem.to_json()))?;
    Ok(EXIT_OK)
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Oracle(_) => EXIT_ORACLE,
        Error::Dimension(_) | Error::Parse(_) | Error::Invalid(_) | Error::Io(_) => EXIT_INPUT,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Vertices {
            problem,
            format,
            with_partitions,
            common,
        } => cmd_vertices(problem, *format, *with_partitions, common),
        Command::Solve {
            problem,
            oracle_processes,
            common,
        } => cmd_solve(problem, *oracle_processes, common),
        Command::Count { problem, common } => cmd_count(problem, common),
        Command::Check {
            problem,
            seed,
            instances,
            k,
            n,
            p,
            force,
            common,
        } => cmd_check(problem.as_deref(), *seed, *instances, (*k, *n, *p), *force, common),
        Command::Generate {
            seed,
            index,
            k,
            n,
            p,
            output,
        } => cmd_generate(*seed, *index, (*k, *n, *p), output.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            exit_code(&error)
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
