#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suffdata::linalg::dot;
use suffdata::oracle::VertexCatalog;
use suffdata::{standardize, GeneralLP, Matrix, StandardLP, UncertaintySet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `{x ≥ 0 : A x ≤ b}` with positive `A`, optionally one equality row.
pub fn random_lp(rng: &mut ChaCha8Rng, d: usize) -> StandardLP {
    let m = rng.random_range(1..=3);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d).map(|_| rng.random_range(0.2..1.5)).collect())
        .collect();
    let rhs: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..3.0)).collect();
    let (eq, eq_rhs) = if d >= 3 && rng.random_bool(0.3) {
        let row: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        // pass through a feasible point
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..0.2)).collect();
        let b = dot(&row, &x);
        (Matrix::from_rows(&[row], d).unwrap(), vec![b])
    } else {
        (Matrix::zeros(0, d), vec![])
    };
    let g = GeneralLP::new(
        d,
        Matrix::from_rows(&rows, d).unwrap(),
        rhs,
        eq,
        eq_rhs,
        vec![0.0; d],
        vec![f64::INFINITY; d],
    )
    .unwrap();
    standardize(&g).unwrap()
}

/// A box around a random center, cut by a few halfspaces that keep the
/// center strictly inside.
pub fn random_cost_set(rng: &mut ChaCha8Rng, d: usize) -> UncertaintySet {
    let center: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let width: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..0.8)).collect();
    let mut rows = Vec::new();
    let mut h = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        rows.push(e.clone());
        h.push(center[i] + width[i]);
        e[i] = -1.0;
        rows.push(e);
        h.push(-(center[i] - width[i]));
    }
    for _ in 0..rng.random_range(0..=2) {
        let g: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        h.push(dot(&g, &center) + rng.random_range(0.02..0.3));
        rows.push(g);
    }
    UncertaintySet::hpolyhedron(Matrix::from_rows(&rows, d).unwrap(), h).unwrap()
}

/// Uniform sample from the set by rejection from its coordinate box.
pub fn sample_cost(rng: &mut ChaCha8Rng, c_set: &UncertaintySet) -> Vec<f64> {
    let bounds = c_set.coordinate_bounds().to_vec();
    loop {
        let c: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
        if c_set.contains(&c, 0.0).unwrap() {
            return c;
        }
    }
}

/// Oracle minimum of `cᵀx` over the vertex catalog (original coordinates).
pub fn oracle_min(lp: &StandardLP, catalog: &VertexCatalog, c: &[f64]) -> f64 {
    catalog
        .vertices
        .iter()
        .map(|v| dot(c, &lp.point_to_original(v).unwrap()))
        .fold(f64::INFINITY, f64::min)
}

/// Two smallest objective values over distinct vertices.
pub fn oracle_gap(lp: &StandardLP, catalog: &VertexCatalog, c: &[f64]) -> f64 {
    let mut vals: Vec<f64> = catalog
        .vertices
        .iter()
        .map(|v| dot(c, &lp.point_to_original(v).unwrap()))
        .collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if vals.len() < 2 {
        f64::INFINITY
    } else {
        vals[1] - vals[0]
    }
}
