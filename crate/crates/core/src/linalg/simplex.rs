//! Exact phase-one simplex for nonnegative combinations.
//!
//! Decides whether `target = sum mu_j * columns[j]` has a solution with every `mu_j >= 0`.
//! The tableau is kept integral: rows are scaled to integers up front and each pivot divides
//! exactly by the previous pivot element, so a stored entry `t` stands for `t / divisor`.
//! Pricing falls back to Bland's rule on long degenerate runs, which keeps the method finite
//! without any tolerance. When the system is infeasible the final tableau yields a Farkas
//! certificate `y` with `y . target > 0` and `y . column <= 0` for every column.
//!
//! A floating-point run is tried first. Its final basis is only a guess: the basic solution
//! and the dual vector are recomputed exactly from it, and the answer is returned only if they
//! prove feasibility or infeasibility. Otherwise the integral method decides.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use num_traits::ToPrimitive;

use super::matrix::{solve_linear, DenseMatrix, LinearSolution};
use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// Nonnegative coefficients reproducing the target.
    Feasible(Vec<Rational>),
    /// Farkas certificate of infeasibility.
    Infeasible(Vec<Rational>),
}

pub fn nonnegative_combination(columns: &[&[Rational]], target: &[Rational]) -> Feasibility {
    float_basis(columns, target)
        .and_then(|basis| certify(columns, target, &basis))
        .unwrap_or_else(|| exact_phase_one(columns, target))
}

/// The same decision made with exact pivoting only.
pub fn exact_phase_one(columns: &[&[Rational]], target: &[Rational]) -> Feasibility {
    let m = target.len();
    let n = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == m));

    // Row r of the system, times scale[r] (negative when the target entry is), becomes
    // [A'_r | I_r | b'_r] with integer entries and b'_r >= 0.
    let width = n + m + 1;
    let rhs = n + m;
    let mut scale: Vec<BigInt> = Vec::with_capacity(m);
    let mut tableau: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for r in 0..m {
        let lcm = columns
            .iter()
            .map(|c| c[r].denom())
            .chain(std::iter::once(target[r].denom()))
            .fold(BigInt::one(), |acc, d| acc.lcm(d));
        let s = if target[r].is_negative() { -lcm } else { lcm };
        let scaled = |v: &Rational| (v * Rational::from_integer(s.clone())).to_integer();
        let mut row = vec![BigInt::zero(); width];
        for (j, col) in columns.iter().enumerate() {
            row[j] = scaled(&col[r]);
        }
        row[n + r] = BigInt::one();
        row[rhs] = scaled(&target[r]);
        scale.push(s);
        tableau.push(row);
    }
    let mut divisor = BigInt::one();
    // Reduced costs of the phase-one objective (sum of artificials); last entry is -w.
    let mut objective = vec![BigInt::zero(); width];
    for row in &tableau {
        for j in 0..n {
            objective[j] -= &row[j];
        }
        objective[rhs] -= &row[rhs];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Largest-coefficient pricing, switching for good to Bland's rule after a run of
    // degenerate pivots so that cycling is impossible.
    let mut degenerate_run = 0;
    let mut bland = false;
    loop {
        let entering = if bland {
            (0..n + m).find(|&j| objective[j].is_negative())
        } else {
            (0..n + m)
                .filter(|&j| objective[j].is_negative())
                .min_by(|&a, &b| objective[a].cmp(&objective[b]).then(a.cmp(&b)))
        };
        let Some(entering) = entering else {
            break;
        };
        // Ratios b_r / t_r share the divisor, so compare them by cross-multiplication.
        let mut leaving: Option<usize> = None;
        for r in 0..m {
            if !tableau[r][entering].is_positive() {
                continue;
            }
            let better = match leaving {
                None => true,
                Some(best) => {
                    let lhs = &tableau[r][rhs] * &tableau[best][entering];
                    let rhs_value = &tableau[best][rhs] * &tableau[r][entering];
                    lhs < rhs_value || (lhs == rhs_value && basis[r] < basis[best])
                }
            };
            if better {
                leaving = Some(r);
            }
        }
        // The phase-one objective is bounded below by zero.
        let pivot_row = leaving.expect("phase-one simplex cannot be unbounded");
        if tableau[pivot_row][rhs].is_zero() {
            degenerate_run += 1;
            bland |= degenerate_run > 2 * (n + m);
        } else {
            degenerate_run = 0;
        }
        divisor = pivot(&mut tableau, &mut objective, pivot_row, entering, &divisor);
        basis[pivot_row] = entering;
    }

    let value = |t: &BigInt| Rational::new(t.clone(), divisor.clone());
    if objective[rhs].is_zero() {
        let mut mu = vec![Rational::zero(); n];
        for (r, &b) in basis.iter().enumerate() {
            if b < n {
                mu[b] = value(&tableau[r][rhs]);
            }
        }
        Feasibility::Feasible(mu)
    } else {
        // Reduced cost of artificial r is 1 - y'_r for the scaled rows; undo the scaling.
        let y = (0..m)
            .map(|r| (Rational::one() - value(&objective[n + r])) * Rational::from_integer(scale[r].clone()))
            .collect();
        Feasibility::Infeasible(y)
    }
}

/// Integer pivot on `(row, col)`; returns the new divisor (the pivot element, positive).
fn pivot(tableau: &mut [Vec<BigInt>], objective: &mut [BigInt], row: usize, col: usize, divisor: &BigInt) -> BigInt {
    let pivot_row = tableau[row].clone();
    let p = pivot_row[col].clone();
    let eliminate = |target: &mut [BigInt]| {
        let factor = target[col].clone();
        for (t, q) in target.iter_mut().zip(&pivot_row) {
            let updated = &p * &*t - &factor * q;
            *t = updated / divisor;
        }
    };
    for (r, other) in tableau.iter_mut().enumerate() {
        if r != row {
            eliminate(other);
        }
    }
    eliminate(objective);
    p
}

const EPS: f64 = 1e-9;

/// Final basis of a floating-point phase-one run; index `n + r` is the artificial of row `r`.
fn float_basis(columns: &[&[Rational]], target: &[Rational]) -> Option<Vec<usize>> {
    let m = target.len();
    let n = columns.len();
    let width = n + m + 1;
    let rhs = n + m;
    let mut tableau = vec![vec![0.0f64; width]; m];
    for r in 0..m {
        let sign = if target[r].is_negative() { -1.0 } else { 1.0 };
        for (j, col) in columns.iter().enumerate() {
            tableau[r][j] = sign * col[r].to_f64()?;
        }
        tableau[r][n + r] = 1.0;
        tableau[r][rhs] = sign * target[r].to_f64()?;
    }
    let mut objective = vec![0.0f64; width];
    for row in &tableau {
        for j in 0..n {
            objective[j] -= row[j];
        }
        objective[rhs] -= row[rhs];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    for iteration in 0..50 * (n + m + 1) {
        // Bland's rule in the second half of the budget.
        let entering = if iteration < 25 * (n + m + 1) {
            (0..n + m)
                .filter(|&j| objective[j] < -EPS)
                .min_by(|&a, &b| objective[a].total_cmp(&objective[b]))
        } else {
            (0..n + m).find(|&j| objective[j] < -EPS)
        };
        let Some(entering) = entering else {
            return Some(basis);
        };
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..m {
            let t = tableau[r][entering];
            if t <= EPS {
                continue;
            }
            let ratio = tableau[r][rhs] / t;
            if leaving.is_none_or(|(best, best_ratio)| ratio < best_ratio - EPS || (ratio <= best_ratio + EPS && basis[r] < basis[best])) {
                leaving = Some((r, ratio));
            }
        }
        let (row, _) = leaving?;
        let p = tableau[row][entering];
        for v in tableau[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = tableau[row].clone();
        for (r, other) in tableau.iter_mut().enumerate() {
            if r != row {
                let f = other[entering];
                if f != 0.0 {
                    other.iter_mut().zip(&pivot_row).for_each(|(t, q)| *t -= f * q);
                }
            }
        }
        let f = objective[entering];
        objective.iter_mut().zip(&pivot_row).for_each(|(t, q)| *t -= f * q);
        basis[row] = entering;
    }
    None
}

/// Exact verdict from a proposed basis, if the basis proves one.
fn certify(columns: &[&[Rational]], target: &[Rational], basis: &[usize]) -> Option<Feasibility> {
    let m = target.len();
    let n = columns.len();
    let sign = |r: usize| target[r].is_negative();
    let entry = |j: usize, r: usize| -> Rational {
        if j < n {
            if sign(r) {
                -&columns[j][r]
            } else {
                columns[j][r].clone()
            }
        } else if j - n == r {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    let b: Vec<Rational> = target.iter().map(|t| t.abs()).collect();
    let mut data = Vec::with_capacity(m * m);
    for r in 0..m {
        for &j in basis {
            data.push(entry(j, r));
        }
    }
    let matrix = DenseMatrix::new(m, m, data).ok()?;
    let LinearSolution::Unique(x) = solve_linear(&matrix, &b).ok()? else {
        return None;
    };
    if x.iter().any(Signed::is_negative) {
        return None;
    }
    let artificial_weight: Rational = basis.iter().zip(&x).filter(|(&j, _)| j >= n).map(|(_, v)| v.clone()).sum();
    if artificial_weight.is_zero() {
        let mut mu = vec![Rational::zero(); n];
        for (&j, v) in basis.iter().zip(x) {
            if j < n {
                mu[j] = v;
            }
        }
        return Some(Feasibility::Feasible(mu));
    }
    // Phase-one duals: B^T y = c_B with cost 1 on artificials.
    let costs: Vec<Rational> = basis.iter().map(|&j| if j >= n { Rational::one() } else { Rational::zero() }).collect();
    let LinearSolution::Unique(y) = solve_linear(&matrix.transpose(), &costs).ok()? else {
        return None;
    };
    let dot_signed = |j: usize| -> Rational { (0..m).filter(|&r| !y[r].is_zero()).map(|r| &y[r] * entry(j, r)).sum() };
    if (0..n).any(|j| dot_signed(j).is_positive()) {
        return None;
    }
    let certificate: Vec<Rational> = (0..m).map(|r| if sign(r) { -&y[r] } else { y[r].clone() }).collect();
    Some(Feasibility::Infeasible(certificate))
}
