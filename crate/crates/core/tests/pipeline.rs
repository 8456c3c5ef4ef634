mod common;

use proptest::prelude::*;
use suffdata::linalg::{dot, sub, SpanBasis};
use suffdata::oracle::{enumerate_vertices, f0_cap_kernel, reachable_dir, reachable_vertices};
use suffdata::{
    compute_dir_basis, is_sufficient, recover_decision, select_queries, solve_lp, CsMilpConfig, Dataset, Matrix,
    ObservationVector, QueryBasis, StandardLP, UncertaintySet,
};

fn simplex2() -> StandardLP {
    StandardLP::new(Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(), vec![1.0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_matches_vertex_enumeration(seed in 0u64..10_000) {
        let mut r = common::rng(seed);
        let d = 2 + (seed % 5) as usize;
        let lp = common::random_lp(&mut r, d);
        let c: Vec<f64> = (0..d).map(|i| ((seed + 7 * i as u64) % 13) as f64 - 6.0).collect();
        let catalog = enumerate_vertices(&lp).unwrap();
        let best = common::oracle_min(&lp, &catalog, &c);
        let sol = solve_lp(&lp, &lp.embed_cost(&c).unwrap()).unwrap();
        let val = dot(&c, &lp.point_to_original(&sol.x).unwrap());
        prop_assert!((val - best).abs() <= 1e-8 * (1.0 + best.abs()));
    }

    #[test]
    fn directions_are_reachable_differences(seed in 0u64..10_000) {
        let mut r = common::rng(seed);
        let d = 2 + (seed % 4) as usize;
        let lp = common::random_lp(&mut r, d);
        let c_set = common::random_cost_set(&mut r, d);
        let cfg = CsMilpConfig::derive(&lp, &c_set).unwrap();
        let dirs = compute_dir_basis(&lp, &c_set, &cfg, seed).unwrap();

        let catalog = enumerate_vertices(&lp).unwrap();
        let reach = reachable_vertices(&lp, &catalog, &c_set, 0.0).unwrap();
        let reach_pts: Vec<Vec<f64>> = reach
            .iter()
            .map(|&i| lp.point_to_original(&catalog.vertices[i]).unwrap())
            .collect();
        // anchor and anchor + v lie in the reachable set's affine hull
        let x0 = &reach_pts[0];
        let diffs: Vec<Vec<f64>> = reach_pts.iter().map(|p| sub(p, x0)).collect();
        let truth = SpanBasis::from_vectors(d, &diffs).unwrap();
        prop_assert!(truth.contains(&sub(&dirs.anchor_x0, x0)).unwrap());
        for v in dirs.raw_vectors() {
            prop_assert!(truth.contains(v).unwrap());
        }
        prop_assert!(dirs.basis.subspace_equal(&reachable_dir(&lp, &catalog, &c_set, 0.0).unwrap()));
        prop_assert!(dirs.basis.is_subspace_of(&f0_cap_kernel(&lp).unwrap()));
    }
}

#[test]
fn simplex2_pipeline() {
    let lp = simplex2();
    let bx = UncertaintySet::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
    let cfg = CsMilpConfig::derive(&lp, &bx).unwrap();
    let dirs = compute_dir_basis(&lp, &bx, &cfg, 0).unwrap();
    assert_eq!(dirs.dim(), 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!(dirs.basis.contains(&[s, -s]).unwrap());

    let ds = select_queries(&dirs, &QueryBasis::canonical(2)).unwrap();
    assert_eq!(ds.len(), 2);
    assert!(!is_sufficient(&ds.without(1), &dirs).unwrap());
    assert!(is_sufficient(&ds, &dirs).unwrap());
    assert!(!is_sufficient(&Dataset::empty(2), &dirs).unwrap());

    let res = recover_decision(&ds, &ds.observe(&[0.3, 0.7]).unwrap(), &lp, &bx).unwrap();
    assert_eq!(res.decision, vec![1.0, 0.0]);
}

#[test]
fn tilted_cost_set_needs_no_data() {
    // every cost in C prefers e₁
    let lp = simplex2();
    let g = Matrix::from_rows(
        &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, -1.0]],
        2,
    )
    .unwrap();
    let c_set = UncertaintySet::hpolyhedron(g, vec![1.0, 1.0, 1.0, 1.0, -0.5]).unwrap();
    let cfg = CsMilpConfig::derive(&lp, &c_set).unwrap();
    let dirs = compute_dir_basis(&lp, &c_set, &cfg, 3).unwrap();
    assert_eq!(dirs.dim(), 0);
    assert_eq!(dirs.anchor_x0, vec![1.0, 0.0]);
    let ds = select_queries(&dirs, &QueryBasis::canonical(2)).unwrap();
    assert!(ds.is_empty());
    let res = recover_decision(&ds, &ObservationVector(vec![]), &lp, &c_set).unwrap();
    assert_eq!(res.decision, vec![1.0, 0.0]);
}

#[test]
fn unit_cube_with_full_box_needs_every_coordinate() {
    let g = suffdata::GeneralLP::with_inequalities(Matrix::zeros(0, 3), vec![], vec![0.0; 3], vec![1.0; 3]).unwrap();
    let lp = suffdata::standardize(&g).unwrap();
    let bx = UncertaintySet::boxed(&[-1.0; 3], &[1.0; 3]).unwrap();
    let cfg = CsMilpConfig::derive(&lp, &bx).unwrap();
    let dirs = compute_dir_basis(&lp, &bx, &cfg, 1).unwrap();
    assert_eq!(dirs.dim(), 3);
    let ds = select_queries(&dirs, &QueryBasis::canonical(3)).unwrap();
    assert_eq!(ds.len(), 3);
}
