use suffdata::hiring::{
    build_task, classify_exact, generate_instance, hiring_dir_basis, run_experiment, task_on, Variant,
    HIRING_DUAL_SCALE,
};
use suffdata::oracle::{enumerate_vertices, reachable_dir};
use suffdata::{compute_dir_basis, standardize, CsMilpConfig};

#[test]
fn presolve_matches_oracle_on_small_pools() {
    for seed in 0..6 {
        for variant in [Variant::Vanilla, Variant::ExperienceConstrained] {
            let mut inst = generate_instance(8, variant, [0.05, 0.3, 0.8][seed as usize % 3], seed).unwrap();
            inst.hire_cap = 3;
            inst.group_cap = 1.0;
            let (glp, c_set) = build_task(&inst).unwrap();
            let lp = standardize(&glp).unwrap();
            let catalog = enumerate_vertices(&lp).unwrap();
            let truth = reachable_dir(&lp, &catalog, &c_set, 0.0).unwrap();
            let dirs = hiring_dir_basis(&inst).unwrap();
            assert!(dirs.basis.subspace_equal(&truth), "seed {seed} {variant:?}");
        }
    }
}

#[test]
fn presolve_matches_full_program() {
    for seed in 0..3 {
        let mut inst = generate_instance(16, Variant::ExperienceConstrained, 0.4, seed).unwrap();
        inst.hire_cap = 6;
        inst.group_cap = 2.0;
        let (glp, c_set) = build_task(&inst).unwrap();
        let lp = standardize(&glp).unwrap();
        let cfg = CsMilpConfig::derive_with_scale(&lp, &c_set, HIRING_DUAL_SCALE).unwrap();
        let full = compute_dir_basis(&lp, &c_set, &cfg, seed).unwrap();
        let reduced = hiring_dir_basis(&inst).unwrap();
        assert!(full.basis.subspace_equal(&reduced.basis), "seed {seed}");

        let exact = classify_exact(&lp, &c_set, &cfg).unwrap();
        let pre = inst.presolve();
        for i in pre.always {
            assert_eq!(exact[i], suffdata::hiring::CandidateStatus::Always);
        }
        for i in pre.never {
            assert_eq!(exact[i], suffdata::hiring::CandidateStatus::Never);
        }
    }
}

#[test]
fn restricted_task_shapes() {
    let inst = generate_instance(30, Variant::ExperienceConstrained, 1.0, 9).unwrap();
    let pre = inst.presolve();
    assert!(!pre.rest.is_empty());
    assert_eq!(pre.always.len() + pre.never.len() + pre.rest.len(), 30);
    let (glp, c_set) = task_on(&inst, &pre.rest, &pre.always).unwrap();
    assert_eq!(glp.n_vars(), pre.rest.len());
    assert_eq!(c_set.dimension(), pre.rest.len());
    assert_eq!(glp.ineq_rhs()[0], (inst.hire_cap - pre.always.len()) as f64);
}

#[test]
fn experiment_counts_grow_with_noise() {
    let rep = run_experiment(&[0.0, 0.1, 0.5, 1.0], Variant::Vanilla, 21, 40).unwrap();
    let counts: Vec<usize> = rep.runs.iter().map(|r| r.count).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(rep.runs.iter().all(|r| r.roundtrip_optimal));
}
