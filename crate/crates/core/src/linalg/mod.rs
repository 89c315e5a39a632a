//! Exact rational scalars and the small dense linear algebra every sign decision rests on.

mod matrix;
mod rational;
pub mod simplex;

pub use matrix::{
    determinant, eval_polynomial, rank, rank_of_vectors, solve_in_span, solve_linear,
    solve_vandermonde, DenseMatrix, LinearSolution, SpanSolution,
};
pub use rational::{format_rational, frac, int, parse_rational, Rational};
pub(crate) use rational::{abs_pow, is_integer};
