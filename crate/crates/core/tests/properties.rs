//! Property tests over small random instances.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use shaped_partition::generic::{assemble, assemble_all, part_pairs, two_partition_bound, EnumerationLimits, PerturbedMatrix};
use shaped_partition::hull::{extreme_points, is_extreme, VertexTest};
use shaped_partition::linalg::{
    determinant, eval_polynomial, int, rank, solve_linear, solve_vandermonde, DenseMatrix, LinearSolution, Rational,
};
use shaped_partition::partition::{compositions, lift, partition_matrix, OrderedPartition, PartitionMatrix, Shape, ShapeFamily};
use shaped_partition::random::transform_columns;
use shaped_partition::reference::{brute_force, brute_solve, enumerate_all_partitions, BruteLimits};
use shaped_partition::solver::{solve, Objective, SolveOptions};
use shaped_partition::vertices::{enumerate_vertices, scan_generic, VertexOptions};

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(prop::collection::vec(lo..=hi, cols), rows).prop_map(|r| DenseMatrix::from_integers(&r))
}

/// Attribute matrix with `k <= 2`, `n <= max_n`, paired with a part count `p <= max_p`.
fn instance(max_n: usize, max_p: usize) -> impl Strategy<Value = (DenseMatrix, usize)> {
    (1..=2usize, 1..=max_n, 1..=max_p).prop_flat_map(|(k, n, p)| (matrix(k, n, -3, 3), Just(p)))
}

fn family(n: usize, p: usize) -> impl Strategy<Value = ShapeFamily> {
    let all = compositions(n, p);
    let count = all.len();
    prop_oneof![
        Just(ShapeFamily::all(n, p).unwrap()),
        prop::sample::subsequence(all.clone(), 1..=count.min(3)).prop_map(move |s| ShapeFamily::explicit(n, p, s).unwrap()),
        (prop::sample::select(all), prop::collection::vec((0..=1usize, 0..=1usize), p)).prop_map(move |(base, slack)| {
            let lower = base.counts().iter().zip(&slack).map(|(&c, &(d, _))| c.saturating_sub(d)).collect();
            let upper = base.counts().iter().zip(&slack).map(|(&c, &(_, u))| c + u).collect();
            ShapeFamily::bounds(n, p, lower, upper).unwrap()
        }),
    ]
}

fn instance_with_family(max_n: usize, max_p: usize) -> impl Strategy<Value = (DenseMatrix, usize, ShapeFamily)> {
    instance(max_n, max_p).prop_flat_map(|(a, p)| {
        let n = a.cols();
        (Just(a), Just(p), family(n, p))
    })
}

fn generic_partitions(pm: &PerturbedMatrix, p: usize) -> Vec<OrderedPartition> {
    let limits = EnumerationLimits::default();
    let two = pm.enumerate_generic_2partitions(&limits).unwrap();
    match p {
        1 => pm.enumerate_generic_p_partitions(1, &limits).unwrap().into_partitions(),
        2 => two.into_partitions(),
        _ => assemble_all(&two, p, &limits).unwrap().into_partitions(),
    }
}

fn scale_matrix(a: &DenseMatrix, c: i64) -> DenseMatrix {
    let rows: Vec<Vec<Rational>> = a.to_rows().into_iter().map(|r| r.into_iter().map(|v| v * int(c)).collect()).collect();
    DenseMatrix::from_rows(rows).unwrap()
}

// Independent oracle: a point is a non-vertex iff it is a convex combination of an affinely
// independent subset of the others. Subsets of every size are tried; each is solved by a
// local elimination on the lifted vectors.
fn lifted(v: &[Rational]) -> Vec<Rational> {
    std::iter::once(int(1)).chain(v.iter().cloned()).collect()
}

/// Nonnegative solution of sum mu_j cols_j = target when the columns are independent.
fn combination(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let m = target.len();
    let w = cols.len();
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|r| cols.iter().map(|c| c[r].clone()).chain(std::iter::once(target[r].clone())).collect())
        .collect();
    let mut row = 0;
    for col in 0..w {
        let Some(found) = (row..m).find(|&r| !rows[r][col].is_zero()) else {
            return None; // dependent columns
        };
        rows.swap(row, found);
        let inv = int(1) / rows[row][col].clone();
        for v in rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = rows[row].clone();
        for (r, other) in rows.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, y) in other.iter_mut().zip(&pivot) {
                    *x = &*x - &f * y;
                }
            }
        }
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[w].is_zero()) {
        return None;
    }
    let mu: Vec<Rational> = (0..w).map(|c| rows[c][w].clone()).collect();
    mu.iter().all(|v| !v.is_negative()).then_some(mu)
}

fn oracle_is_vertex(point: &[Rational], others: &[Vec<Rational>]) -> bool {
    let target = lifted(point);
    let lifted_others: Vec<Vec<Rational>> = others.iter().map(|o| lifted(o)).collect();
    for size in 1..=lifted_others.len().min(target.len()) {
        for subset in lifted_others.iter().cloned().combinations(size) {
            if combination(&subset, &target).is_some() {
                return false;
            }
        }
    }
    true
}

fn multinomial(n: usize, parts: &[usize]) -> u128 {
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    parts.iter().fold(fact(n), |acc, &c| acc / fact(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_alternates_under_row_swaps(m in (1..=4usize).prop_flat_map(|s| matrix(s, s, -6, 6)), a in 0..4usize, b in 0..4usize) {
        let s = m.rows();
        let (a, b) = (a % s, b % s);
        prop_assume!(a != b);
        let mut rows = m.to_rows();
        rows.swap(a, b);
        let swapped = DenseMatrix::from_rows(rows).unwrap();
        prop_assert_eq!(determinant(&swapped).unwrap(), -determinant(&m).unwrap());
    }

    #[test]
    fn vandermonde_round_trip(coefficients in prop::collection::vec(-20i64..=20, 1..=6)) {
        let coefficients: Vec<Rational> = coefficients.into_iter().map(int).collect();
        let values: Vec<Rational> = (0..coefficients.len()).map(|x| eval_polynomial(&coefficients, &int(x as i64))).collect();
        prop_assert_eq!(solve_vandermonde(&values), coefficients);
    }

    #[test]
    fn linear_solve_recovers_the_solution(m in (1..=4usize).prop_flat_map(|s| matrix(s, s, -5, 5)), x in prop::collection::vec(-9i64..=9, 4)) {
        let x: Vec<Rational> = x[..m.rows()].iter().map(|&v| int(v)).collect();
        let b = m.mul_vec(&x).unwrap();
        match solve_linear(&m, &b).unwrap() {
            LinearSolution::Unique(found) => prop_assert_eq!(found, x),
            LinearSolution::Singular => prop_assert!(determinant(&m).unwrap().is_zero()),
        }
    }

    #[test]
    fn rank_is_transpose_invariant(m in (1..=4usize, 1..=5usize).prop_flat_map(|(r, c)| matrix(r, c, -2, 2))) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn partition_matrices_conserve_column_sums((a, p) in instance(6, 3), seed in any::<u64>()) {
        let n = a.cols();
        let assignment: Vec<usize> = (0..n).map(|i| ((seed >> (2 * i)) as usize) % p).collect();
        let pi = OrderedPartition::from_assignment(p, &assignment);
        prop_assert_eq!(pi.shape().total(), n);
        let x = partition_matrix(&a, &pi).unwrap();
        for r in 0..a.rows() {
            let total: Rational = a.row(r).iter().cloned().sum();
            let split: Rational = x.matrix().row(r).iter().cloned().sum();
            prop_assert_eq!(split, total);
        }
    }

    #[test]
    fn lift_appends_distinct_indices((a, _p) in instance(6, 1)) {
        let l = lift(&a);
        prop_assert_eq!(l.rows(), a.rows() + 1);
        for c in 0..a.cols() {
            prop_assert_eq!(l.get(a.rows(), c), &int(c as i64 + 1));
        }
        let columns: BTreeSet<Vec<Rational>> = (0..l.cols()).map(|c| l.column(c)).collect();
        prop_assert_eq!(columns.len(), a.cols());
    }

    #[test]
    fn enumerated_shapes_are_the_members((_a, p, fam) in instance_with_family(6, 3)) {
        let expected: Vec<Shape> = compositions(fam.n(), p).into_iter().filter(|s| fam.contains(s).unwrap()).collect();
        prop_assert_eq!(fam.enumerate_shapes(), expected);
    }

    #[test]
    fn two_partitions_are_swap_closed_and_bounded((a, _p) in instance(7, 1)) {
        let pm = PerturbedMatrix::new(lift(&a));
        let two = pm.enumerate_generic_2partitions(&EnumerationLimits::default()).unwrap();
        for pi in two.iter() {
            let swapped = OrderedPartition::new(pi.n(), vec![pi.block(1).to_vec(), pi.block(0).to_vec()]).unwrap();
            prop_assert!(two.contains(&swapped));
        }
        let (d, n) = (pm.dim(), a.cols());
        if n <= d {
            prop_assert_eq!(two.len() as u128, 1u128 << n);
        } else {
            prop_assert!(two.len() as u128 <= two_partition_bound(d, n));
        }
    }

    #[test]
    fn p_partitions_are_bounded_by_pair_lists((a, p) in instance(6, 3)) {
        let pm = PerturbedMatrix::new(lift(&a));
        let two = pm.enumerate_generic_2partitions(&EnumerationLimits::default()).unwrap().len() as u128;
        let many = generic_partitions(&pm, p).len() as u128;
        let pairs = (p * (p - 1) / 2) as u32;
        prop_assert!(many <= two.pow(pairs).max(1));
    }

    #[test]
    fn generic_partitions_are_translation_invariant((a, p) in instance(6, 3), shift in prop::collection::vec(-4i64..=4, 2)) {
        let moved = transform_columns(&a, 1, &shift[..a.rows()]);
        let before = generic_partitions(&PerturbedMatrix::new(lift(&a)), p);
        let after = generic_partitions(&PerturbedMatrix::new(lift(&moved)), p);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn generic_partitions_are_invariant_under_uniform_scaling((a, p) in instance(6, 3), c in 2i64..=5) {
        let lifted_a = lift(&a);
        let before = generic_partitions(&PerturbedMatrix::new(lifted_a.clone()), p);
        let after = generic_partitions(&PerturbedMatrix::new(scale_matrix(&lifted_a, c)), p);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn pruned_assembly_matches_every_pair_list((a, _p) in instance(5, 1)) {
        let p = 3;
        let n = a.cols();
        let pm = PerturbedMatrix::new(lift(&a));
        let two = pm.enumerate_generic_2partitions(&EnumerationLimits::default()).unwrap();
        let mut expected = BTreeSet::new();
        let lists = (0..part_pairs(p).len()).map(|_| two.partitions().iter().cloned()).multi_cartesian_product();
        for list in lists {
            if let Some(pi) = assemble(&list, n, p).unwrap() {
                expected.insert(pi);
            }
        }
        let pruned = assemble_all(&two, p, &EnumerationLimits::default()).unwrap();
        prop_assert_eq!(pruned.into_partitions(), expected.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn vertex_tests_agree_with_the_oracle(points in (1..=3usize, 2..=12usize).prop_flat_map(|(dim, count)| prop::collection::btree_set(prop::collection::vec(-2i64..=2, dim), 1..=count))) {
        let points: Vec<Vec<Rational>> = points.into_iter().map(|p| p.into_iter().map(int).collect()).collect();
        let lifted_points: Vec<Vec<Rational>> = points.iter().map(|p| lifted(p)).collect();
        let extreme = extreme_points(&lifted_points);
        for (u, point) in points.iter().enumerate() {
            let others: Vec<Vec<Rational>> = points.iter().enumerate().filter(|&(j, _)| j != u).map(|(_, p)| p.clone()).collect();
            let expected = oracle_is_vertex(point, &others);
            let refs: Vec<Vec<Rational>> = others.iter().map(|o| lifted(o)).collect();
            let refs: Vec<&[Rational]> = refs.iter().map(Vec::as_slice).collect();
            for test in [VertexTest::Exhaustive, VertexTest::Simplex, VertexTest::Auto] {
                prop_assert_eq!(is_extreme(&lifted_points[u], &refs, test), expected, "{:?}", test);
            }
            prop_assert_eq!(extreme.contains(&u), expected);
        }
    }

    #[test]
    fn vertex_sets_are_relabeling_invariant((a, p, fam) in instance_with_family(6, 3), seed in any::<u64>()) {
        let n = a.cols();
        let mut order: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let permuted = a.select_columns(&order);
        let options = VertexOptions::default();
        let before = enumerate_vertices(&a, p, &fam, &options).unwrap().vertices;
        let after = enumerate_vertices(&permuted, p, &fam, &options).unwrap().vertices;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn single_shape_vertices_translate_covariantly((a, p) in instance(6, 3), pick in any::<prop::sample::Index>(), shift in prop::collection::vec(-4i64..=4, 2)) {
        let n = a.cols();
        let shapes = compositions(n, p);
        let shape = pick.get(&shapes).clone();
        let fam = ShapeFamily::explicit(n, p, [shape.clone()]).unwrap();
        let shift = &shift[..a.rows()];
        let options = VertexOptions::default();
        let before = enumerate_vertices(&a, p, &fam, &options).unwrap().vertices;
        let after = enumerate_vertices(&transform_columns(&a, 1, shift), p, &fam, &options).unwrap().vertices;
        let mut expected: Vec<PartitionMatrix> = before
            .iter()
            .map(|v| {
                let mut m = v.matrix().clone();
                for r in 0..m.rows() {
                    for j in 0..p {
                        let moved = m.get(r, j) + int(shift[r] * shape.counts()[j] as i64);
                        m.set(r, j, moved);
                    }
                }
                PartitionMatrix::new(m)
            })
            .collect();
        expected.sort();
        prop_assert_eq!(after, expected);
    }

    #[test]
    fn brute_counts_are_multinomial_sums((_a, p, fam) in instance_with_family(6, 3)) {
        let n = fam.n();
        let found = enumerate_all_partitions(n, p, &fam, &BruteLimits::default()).unwrap().len() as u128;
        let expected: u128 = fam.enumerate_shapes().iter().map(|s| multinomial(n, s.counts())).sum();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn fast_path_matches_brute_force((a, p, fam) in instance_with_family(6, 3), cost in prop::collection::vec(-4i64..=4, 6), q in prop::sample::select(vec![2u32, 4])) {
        let k = a.rows();
        let cost = DenseMatrix::from_integers(&cost.chunks(3).take(k).map(|c| c[..p].to_vec()).collect::<Vec<_>>());
        let linear = Objective::Linear(cost.clone());
        let limits = BruteLimits::default();
        let brute = brute_force(&a, p, &fam, Some(&linear), &limits).unwrap();
        let report = enumerate_vertices(&a, p, &fam, &VertexOptions::default()).unwrap();
        prop_assert_eq!(&report.vertices, &brute.vertex_set);
        prop_assert!(report.counts.vertices <= report.counts.generic_partitions);

        let options = SolveOptions::default();
        let best = solve(&a, p, &fam, &linear, &options).unwrap();
        prop_assert_eq!(Some(best.value.clone()), brute.best_value);
        let on_vertices = report.vertices.iter().map(|v| linear.evaluate(v).unwrap()).max().unwrap();
        prop_assert_eq!(best.value, on_vertices);

        let norm = Objective::SumColumnNormPow(q);
        let best = solve(&a, p, &fam, &norm, &options).unwrap();
        prop_assert_eq!(&best.value, &brute_solve(&a, p, &fam, &norm, &limits).unwrap());
        prop_assert!(fam.contains(&best.partition.shape()).unwrap());
        prop_assert_eq!(&partition_matrix(&a, &best.partition).unwrap(), &best.matrix);
        prop_assert_eq!(norm.evaluate(&best.matrix).unwrap(), best.value);
        let admissible = scan_generic(&a, p, &fam, &EnumerationLimits::default()).unwrap().admissible.len();
        prop_assert_eq!(best.evaluations, admissible);
    }
}

/// Lifting appends an unscaled index row, so scaling `A` is not a uniform scaling of the lifted
/// matrix and can change the generic partitions of degenerate configurations. The vertex set
/// still scales with `A`.
#[test]
fn scaling_a_alone_can_change_generic_partitions() {
    use shaped_partition::random::{random_problem, InstanceConfig};
    let problem = random_problem(11, 197, &InstanceConfig::default());
    let (a, p) = (&problem.matrix, problem.p);
    let scaled = scale_matrix(a, 3);
    let before = generic_partitions(&PerturbedMatrix::new(lift(a)), p);
    let after = generic_partitions(&PerturbedMatrix::new(lift(&scaled)), p);
    assert_ne!(before, after);

    let all = ShapeFamily::all(a.cols(), p).unwrap();
    let options = VertexOptions::default();
    let vertices = enumerate_vertices(a, p, &all, &options).unwrap().vertices;
    let mut expected: Vec<PartitionMatrix> = vertices.iter().map(|v| PartitionMatrix::new(scale_matrix(v.matrix(), 3))).collect();
    expected.sort();
    assert_eq!(enumerate_vertices(&scaled, p, &all, &options).unwrap().vertices, expected);
}
