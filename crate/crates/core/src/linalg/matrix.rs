use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, int, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
///
/// The derived ordering compares shape first and then entries row-major, which is the
/// canonical order used for every report.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length. An empty row list
    /// gives a `0 x cols` matrix only through [`DenseMatrix::zeros`].
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::dimension(format!(
                "row {} has {} entries, expected {cols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        let nrows = rows.len();
        Ok(Self {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .expect("ragged integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Selects the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c).clone();
            }
        }
        out
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", format_rational(v))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Outcome of a square linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    Singular,
}

/// Outcome of expressing a target vector in a list of columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanSolution {
    /// The columns are linearly dependent.
    Dependent,
    /// The columns are independent and the target lies outside their span.
    Outside,
    /// The unique coefficients with `target = sum coeff[i] * columns[i]`.
    Coefficients(Vec<Rational>),
}

/// Reduces `rows` to row echelon form in place, considering only the first `limit` columns
/// as pivot candidates. Returns the pivot column of each echelon row.
fn row_echelon(rows: &mut [Vec<Rational>], limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..limit {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let (upper, lower) = rows.split_at_mut(next + 1);
        let pivot_row = &upper[next];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for c in col..row.len() {
                if !pivot_row[c].is_zero() {
                    let delta = &factor * &pivot_row[c];
                    row[c] -= delta;
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    pivots
}

/// Solves an upper-triangular system produced by [`row_echelon`] whose pivots are exactly
/// the first `n` columns; the last column holds the right-hand side.
fn back_substitute(rows: &[Vec<Rational>], n: usize) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n].clone();
        for j in i + 1..n {
            if !rows[i][j].is_zero() {
                acc -= &rows[i][j] * &x[j];
            }
        }
        x[i] = acc / &rows[i][i];
    }
    x
}

pub fn determinant(m: &DenseMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::dimension(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut rows = m.to_rows();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(found) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if found != col {
            rows.swap(found, col);
            det = -det;
        }
        let (upper, lower) = rows.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for c in col + 1..n {
                if !pivot_row[c].is_zero() {
                    let delta = &factor * &pivot_row[c];
                    row[c] -= delta;
                }
            }
        }
        det *= &pivot_row[col];
    }
    Ok(det)
}

pub fn rank(m: &DenseMatrix) -> usize {
    let mut rows = m.to_rows();
    row_echelon(&mut rows, m.cols).len()
}

/// Rank of a list of column vectors of equal length.
pub fn rank_of_vectors(vectors: &[Vec<Rational>]) -> usize {
    let mut rows = vectors.to_vec();
    let len = rows.first().map_or(0, Vec::len);
    row_echelon(&mut rows, len).len()
}

pub fn solve_linear(m: &DenseMatrix, b: &[Rational]) -> Result<LinearSolution> {
    if !m.is_square() {
        return Err(Error::dimension(format!(
            "linear solve needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if b.len() != m.rows {
        return Err(Error::dimension(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            m.rows
        )));
    }
    let n = m.rows;
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    if row_echelon(&mut rows, n).len() < n {
        return Ok(LinearSolution::Singular);
    }
    Ok(LinearSolution::Unique(back_substitute(&rows, n)))
}

/// Expresses `target` as a linear combination of `columns`, each of `target.len()` entries.
pub fn solve_in_span(columns: &[Vec<Rational>], target: &[Rational]) -> Result<SpanSolution> {
    let m = target.len();
    let d = columns.len();
    if let Some(bad) = columns.iter().find(|c| c.len() != m) {
        return Err(Error::dimension(format!(
            "column of length {} against target of length {m}",
            bad.len()
        )));
    }
    if d > m {
        return Ok(SpanSolution::Dependent);
    }
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let pivots = row_echelon(&mut rows, d);
    if pivots.len() < d {
        return Ok(SpanSolution::Dependent);
    }
    if rows[d..].iter().any(|row| !row[d].is_zero()) {
        return Ok(SpanSolution::Outside);
    }
    Ok(SpanSolution::Coefficients(back_substitute(&rows, d)))
}

/// Recovers the coefficients `c_0..c_d` of the polynomial of degree at most `d` taking the
/// given values at the nodes `0, 1, ..., d`.
pub fn solve_vandermonde(node_values: &[Rational]) -> Vec<Rational> {
    let size = node_values.len();
    let mut vandermonde = DenseMatrix::zeros(size, size);
    for node in 0..size {
        let x = int(node as i64);
        let mut power = Rational::one();
        for j in 0..size {
            vandermonde.set(node, j, power.clone());
            power *= &x;
        }
    }
    match solve_linear(&vandermonde, node_values).expect("square by construction") {
        LinearSolution::Unique(coefficients) => coefficients,
        LinearSolution::Singular => unreachable!("Vandermonde matrix at distinct nodes is nonsingular"),
    }
}

/// Evaluates `sum coefficients[j] * x^j`.
pub fn eval_polynomial(coefficients: &[Rational], x: &Rational) -> Rational {
    coefficients
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}
