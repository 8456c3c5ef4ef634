//! Seeded instance generators for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suffdata::linalg::dot;
use suffdata::{standardize, GeneralLP, Matrix, MilpProblem, StandardLP, UncertaintySet};

/// `{x ≥ 0 : A x ≤ b}` with `m` positive rows.
pub fn packing_lp(seed: u64, d: usize, m: usize) -> StandardLP {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d).map(|_| r.random_range(0.2..1.5)).collect())
        .collect();
    let rhs = (0..m).map(|_| r.random_range(1.0..3.0)).collect();
    let g = GeneralLP::with_inequalities(
        Matrix::from_rows(&rows, d).expect("rows"),
        rhs,
        vec![0.0; d],
        vec![f64::INFINITY; d],
    )
    .expect("feasible and bounded");
    standardize(&g).expect("standard form")
}

/// Box of half-width `width` around a random center, with one cut through
/// a point near the center.
pub fn cost_set(seed: u64, d: usize, width: f64) -> UncertaintySet {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0xc057);
    let center: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut rows = Vec::new();
    let mut h = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        rows.push(e.clone());
        h.push(center[i] + width);
        e[i] = -1.0;
        rows.push(e);
        h.push(width - center[i]);
    }
    let g: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    h.push(dot(&g, &center) + 0.1 * width);
    rows.push(g);
    UncertaintySet::hpolyhedron(Matrix::from_rows(&rows, d).expect("rows"), h).expect("nonempty")
}

/// Pure binary program with `m` knapsack-like rows.
pub fn binary_program(seed: u64, n: usize, m: usize) -> MilpProblem {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| r.random_range(-1.0..3.0)).collect())
        .collect();
    let rhs = rows
        .iter()
        .map(|row| 0.4 * row.iter().map(|v| v.max(0.0)).sum::<f64>())
        .collect();
    MilpProblem {
        objective: (0..n).map(|_| r.random_range(-2.0..1.0)).collect(),
        objective_constant: 0.0,
        var_lower: vec![0.0; n],
        var_upper: vec![1.0; n],
        binary_indices: (0..n).collect(),
        eq_lhs: Matrix::zeros(0, n),
        eq_rhs: vec![],
        ineq_lhs: Matrix::from_rows(&rows, n).expect("rows"),
        ineq_rhs: rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        assert_eq!(packing_lp(3, 5, 2), packing_lp(3, 5, 2));
        assert_eq!(binary_program(1, 8, 2), binary_program(1, 8, 2));
        let c = cost_set(0, 4, 0.3);
        assert!(c.contains(&c.find_point().unwrap(), 1e-9).unwrap());
    }
}
