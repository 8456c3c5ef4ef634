//! Offline interview selection for hiring under a noisy linear score model.

use std::fmt::Write as _;
use std::time::Instant;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::directions::{compute_dir_basis, CsMilp, CsMilpConfig, DirectionBasis};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpanBasis};
use crate::milp_solver::{solve_milp, MilpStatus};
use crate::model::{standardize, Dataset, GeneralLP, StandardLP, UncertaintySet};
use crate::recovery::{is_optimal_for, recover_decision};
use crate::selection::{select_query_indices, QueryBasis};

pub const HIRE_CAP: usize = 20;
pub const GROUP_CAP: f64 = 8.0;
/// Experience levels that carry a group cap; the most senior level is uncapped.
pub const CAPPED_LEVELS: [u8; 4] = [1, 2, 3, 4];
pub const ALPHA_LOWER: [f64; 2] = [4.0, 4.0];
pub const ALPHA_UPPER: [f64; 2] = [5.0, 5.0];
/// Dual bound multiplier for hiring programs. Basic duals of these
/// unimodular systems stay within a small multiple of `‖C‖∞`.
pub const HIRING_DUAL_SCALE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Vanilla,
    ExperienceConstrained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiringInstance {
    pub d: usize,
    pub gpa: Vec<f64>,
    pub experience: Vec<u8>,
    pub variant: Variant,
    pub hire_cap: usize,
    pub group_cap: f64,
    pub eta: f64,
    pub alpha_lower: [f64; 2],
    pub alpha_upper: [f64; 2],
    pub seed: u64,
}

impl HiringInstance {
    /// Feature matrix, 2 × d: GPA then experience.
    pub fn phi(&self) -> Matrix {
        let exp: Vec<f64> = self.experience.iter().map(|&e| e as f64).collect();
        Matrix::from_rows(&[self.gpa.clone(), exp], self.d).expect("feature rows have length d")
    }

    /// Candidates sharing an experience level.
    pub fn group(&self, level: u8) -> Vec<usize> {
        (0..self.d).filter(|&i| self.experience[i] == level).collect()
    }
}

pub fn generate_instance(d: usize, variant: Variant, eta: f64, seed: u64) -> Result<HiringInstance> {
    if d == 0 {
        return Err(Error::InvalidModel("candidate pool must be nonempty".into()));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidModel("eta must be a finite nonnegative number".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gpa: Vec<f64> = (0..d).map(|_| rng.random_range(2.0..=4.0)).collect();
    let experience: Vec<u8> = (0..d).map(|_| rng.random_range(1..=5)).collect();
    Ok(HiringInstance {
        d,
        gpa,
        experience,
        variant,
        hire_cap: HIRE_CAP.min(d),
        group_cap: GROUP_CAP,
        eta,
        alpha_lower: ALPHA_LOWER,
        alpha_upper: ALPHA_UPPER,
        seed,
    })
}

/// LP relaxation of the hiring set and the negated score set, so that
/// minimizing `cᵀx` maximizes total value.
pub fn build_task(inst: &HiringInstance) -> Result<(GeneralLP, UncertaintySet)> {
    let all: Vec<usize> = (0..inst.d).collect();
    task_on(inst, &all, &[])
}

/// The task restricted to `members`, with `taken` already hired.
pub fn task_on(inst: &HiringInstance, members: &[usize], taken: &[usize]) -> Result<(GeneralLP, UncertaintySet)> {
    let d = members.len();
    let mut lhs = vec![vec![1.0; d]];
    let mut rhs = vec![inst.hire_cap as f64 - taken.len() as f64];
    if inst.variant == Variant::ExperienceConstrained {
        for level in CAPPED_LEVELS {
            let row: Vec<f64> = members
                .iter()
                .map(|&i| if inst.experience[i] == level { 1.0 } else { 0.0 })
                .collect();
            if row.iter().all(|&v| v == 0.0) {
                continue;
            }
            let used = taken.iter().filter(|&&i| inst.experience[i] == level).count();
            lhs.push(row);
            rhs.push(inst.group_cap - used as f64);
        }
    }
    let lp = GeneralLP::with_inequalities(Matrix::from_rows(&lhs, d)?, rhs, vec![0.0; d], vec![1.0; d])?;
    let gpa: Vec<f64> = members.iter().map(|&i| -inst.gpa[i]).collect();
    let exp: Vec<f64> = members.iter().map(|&i| -(inst.experience[i] as f64)).collect();
    let neg_phi = Matrix::from_rows(&[gpa, exp], d)?;
    let c_set = UncertaintySet::affine(neg_phi, inst.alpha_lower.to_vec(), inst.alpha_upper.to_vec(), inst.eta)?;
    Ok((lp, c_set))
}

/// Candidates whose status is the same for every cost in `C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presolve {
    pub always: Vec<usize>,
    pub never: Vec<usize>,
    pub rest: Vec<usize>,
}

impl HiringInstance {
    fn capped(&self, i: usize) -> bool {
        self.variant == Variant::ExperienceConstrained && CAPPED_LEVELS.contains(&self.experience[i])
    }

    /// Rank of a candidate set in the hiring matroid.
    fn rank(&self, set: &[usize]) -> usize {
        let mut per_level = [0usize; 6];
        let mut free = 0usize;
        for &i in set {
            if self.capped(i) {
                per_level[self.experience[i] as usize] += 1;
            } else {
                free += 1;
            }
        }
        let cap = self.group_cap.max(0.0).floor() as usize;
        let capped: usize = per_level.iter().map(|&n| n.min(cap)).sum();
        (capped + free).min(self.hire_cap)
    }

    /// Least value of `value_j − value_i` over the score set.
    fn min_gap(&self, j: usize, i: usize) -> f64 {
        let delta = [self.gpa[j] - self.gpa[i], self.experience[j] as f64 - self.experience[i] as f64];
        let mut gap = -2.0 * self.eta;
        for k in 0..2 {
            gap += if delta[k] >= 0.0 { self.alpha_lower[k] * delta[k] } else { self.alpha_upper[k] * delta[k] };
        }
        gap
    }

    fn min_value(&self, i: usize) -> f64 {
        self.alpha_lower[0].min(self.alpha_upper[0]) * self.gpa[i]
            + self.alpha_lower[1].min(self.alpha_upper[1]) * self.experience[i] as f64
            - self.eta
    }

    /// Exchange-argument presolve. A candidate spanned by those that beat it
    /// under every score is never hired; one outside the span of all that
    /// can tie or beat it, with positive value, is always hired.
    pub fn presolve(&self) -> Presolve {
        let (mut always, mut never, mut rest) = (vec![], vec![], vec![]);
        for i in 0..self.d {
            let better: Vec<usize> = (0..self.d).filter(|&j| j != i && self.min_gap(j, i) > 0.0).collect();
            let mut with_i = better.clone();
            with_i.push(i);
            if self.rank(&with_i) == self.rank(&better) {
                never.push(i);
                continue;
            }
            let rivals: Vec<usize> = (0..self.d).filter(|&j| j != i && self.min_gap(i, j) <= 0.0).collect();
            let mut with_i = rivals.clone();
            with_i.push(i);
            if self.min_value(i) > 0.0 && self.rank(&with_i) > self.rank(&rivals) {
                always.push(i);
            } else {
                rest.push(i);
            }
        }
        Presolve { always, never, rest }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    Never,
    Always,
    Interview,
}

/// Statuses from a direction basis: candidates outside the selected set
/// keep their anchor value across all reachable optima.
pub fn classify(anchor: &[f64], selected: &[usize]) -> Vec<CandidateStatus> {
    anchor
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if selected.contains(&i) {
                CandidateStatus::Interview
            } else if x > 0.5 {
                CandidateStatus::Always
            } else {
                CandidateStatus::Never
            }
        })
        .collect()
}

/// Statuses from the extremes of each `xᵢ` over the complementary-slackness
/// program (two mixed-integer solves per candidate).
pub fn classify_exact(lp: &StandardLP, c_set: &UncertaintySet, cfg: &CsMilpConfig) -> Result<Vec<CandidateStatus>> {
    let cs = CsMilp::new(lp, c_set, cfg)?;
    let d = lp.n_original();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let mut extremes = [0.0; 2];
        for (slot, sign) in [(0, 1.0), (1, -1.0)] {
            let mut p = cs.problem.clone();
            p.objective.iter_mut().for_each(|v| *v = 0.0);
            p.objective[cs.layout.x() + i] = sign;
            let sol = solve_milp(&p)?;
            if sol.status != MilpStatus::Optimal {
                return Err(Error::NumericalFailure("classification program not solved".into()));
            }
            extremes[slot] = sign * sol.objective;
        }
        let (lo, hi) = (extremes[0] + lp.offset()[i], extremes[1] + lp.offset()[i]);
        out.push(if hi < 0.5 {
            CandidateStatus::Never
        } else if lo > 0.5 {
            CandidateStatus::Always
        } else {
            CandidateStatus::Interview
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRun {
    pub eta: f64,
    pub count: usize,
    pub indices: Vec<usize>,
    pub wall_time_ms: u128,
    pub dir_dim: usize,
    pub statuses: Vec<CandidateStatus>,
    pub true_c: Vec<f64>,
    pub roundtrip_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub variant: Variant,
    pub seed: u64,
    pub d: usize,
    pub gpa: Vec<f64>,
    pub experience: Vec<u8>,
    pub runs: Vec<EtaRun>,
}

fn sample_cost(inst: &HiringInstance, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let a: Vec<f64> = (0..2)
        .map(|j| {
            if inst.alpha_lower[j] < inst.alpha_upper[j] {
                rng.random_range(inst.alpha_lower[j]..inst.alpha_upper[j])
            } else {
                inst.alpha_lower[j]
            }
        })
        .collect();
    (0..inst.d)
        .map(|i| {
            let e = if inst.eta > 0.0 { rng.random_range(-inst.eta..inst.eta) } else { 0.0 };
            -(a[0] * inst.gpa[i] + a[1] * inst.experience[i] as f64 + e)
        })
        .collect()
}

/// Direction basis of the full task, computed on the candidates left
/// undetermined by [`HiringInstance::presolve`].
pub fn hiring_dir_basis(inst: &HiringInstance) -> Result<DirectionBasis> {
    let pre = inst.presolve();
    let mut anchor = vec![0.0; inst.d];
    for &i in &pre.always {
        anchor[i] = 1.0;
    }
    let mut raw = Vec::new();
    let mut iterations = 0;
    if !pre.rest.is_empty() {
        let (glp, c_set) = task_on(inst, &pre.rest, &pre.always)?;
        let lp = standardize(&glp)?;
        let cfg = CsMilpConfig::derive_with_scale(&lp, &c_set, HIRING_DUAL_SCALE)?;
        let sub = compute_dir_basis(&lp, &c_set, &cfg, inst.seed)?;
        for (k, &i) in pre.rest.iter().enumerate() {
            anchor[i] = sub.anchor_x0[k];
        }
        for v in sub.raw_vectors() {
            let mut full = vec![0.0; inst.d];
            for (k, &i) in pre.rest.iter().enumerate() {
                full[i] = v[k];
            }
            raw.push(full);
        }
        iterations = sub.iterations;
    }
    Ok(DirectionBasis {
        anchor_x0: anchor,
        basis: SpanBasis::from_vectors(inst.d, &raw)?,
        iterations,
        seed: inst.seed,
    })
}

/// Full pipeline for one noise level.
pub fn run_single(inst: &HiringInstance) -> Result<(EtaRun, DirectionBasis)> {
    let start = Instant::now();
    let dirs = hiring_dir_basis(inst)?;
    let indices = select_query_indices(&dirs, &QueryBasis::canonical(inst.d))?;
    let wall_time_ms = start.elapsed().as_millis();

    let (glp, c_set) = build_task(inst)?;
    let lp = standardize(&glp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ 0x5eed);
    let true_c = sample_cost(inst, &mut rng);
    let dataset = Dataset::canonical(inst.d, &indices);
    let obs = dataset.observe(&true_c)?;
    let rec = recover_decision(&dataset, &obs, &lp, &c_set)?;
    let roundtrip_optimal = is_optimal_for(&lp, &true_c, &rec.decision, 1e-7)?;
    info!(
        "eta {}: {} interviews, {} ms, round trip optimal: {roundtrip_optimal}",
        inst.eta,
        indices.len(),
        wall_time_ms
    );
    let statuses = classify(&dirs.anchor_x0, &indices);
    Ok((
        EtaRun {
            eta: inst.eta,
            count: indices.len(),
            indices,
            wall_time_ms,
            dir_dim: dirs.dim(),
            statuses,
            true_c,
            roundtrip_optimal,
        },
        dirs,
    ))
}

/// One instance (fixed features) swept over the noise grid. Noise levels
/// run on separate threads.
pub fn run_experiment(grid: &[f64], variant: Variant, seed: u64, d: usize) -> Result<ExperimentReport> {
    if grid.is_empty() {
        return Err(Error::InvalidModel("noise grid is empty".into()));
    }
    let base = generate_instance(d, variant, grid[0], seed)?;
    let results: Vec<Result<EtaRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&eta| {
                let inst = HiringInstance { eta, ..base.clone() };
                s.spawn(move || {
                    if !(eta >= 0.0) || !eta.is_finite() {
                        return Err(Error::InvalidModel("eta must be a finite nonnegative number".into()));
                    }
                    run_single(&inst).map(|(r, _)| r)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::NumericalFailure("worker panicked".into()))))
            .collect()
    });
    Ok(ExperimentReport {
        variant,
        seed,
        d,
        gpa: base.gpa,
        experience: base.experience,
        runs: results.into_iter().collect::<Result<_>>()?,
    })
}

impl ExperimentReport {
    /// `eta,count,indices,wall_time_ms` with indices joined by `;`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["eta", "count", "indices", "wall_time_ms"]).map_err(io)?;
        for r in &self.runs {
            let idx: Vec<String> = r.indices.iter().map(|i| i.to_string()).collect();
            w.write_record([
                r.eta.to_string(),
                r.count.to_string(),
                idx.join(";"),
                r.wall_time_ms.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::NumericalFailure(e.to_string()))
    }

    /// One panel per noise level: GPA against experience, colored by status.
    pub fn to_svg(&self) -> String {
        const W: f64 = 260.0;
        const H: f64 = 220.0;
        const PAD: f64 = 30.0;
        let total_w = W * self.runs.len() as f64;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{H}" font-family="sans-serif" font-size="11">"#
        );
        for (p, run) in self.runs.iter().enumerate() {
            let x0 = p as f64 * W;
            let _ = writeln!(
                s,
                r##"<g transform="translate({x0},0)"><rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
                W - 2.0 * PAD,
                H - 2.0 * PAD
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="18" text-anchor="middle">eta = {} ({} interviews)</text>"#,
                W / 2.0,
                run.eta,
                run.count
            );
            for i in 0..self.d {
                let px = PAD + (self.gpa[i] - 2.0) / 2.0 * (W - 2.0 * PAD);
                let jitter = ((i * 37) % 11) as f64 / 11.0 - 0.5;
                let level = self.experience[i] as f64 + 0.5 * jitter;
                let py = H - PAD - (level - 0.5) / 5.0 * (H - 2.0 * PAD);
                let color = match run.statuses[i] {
                    CandidateStatus::Never => "#bbbbbb",
                    CandidateStatus::Always => "#1f77b4",
                    CandidateStatus::Interview => "#d62728",
                };
                let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#);
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">GPA</text><text x="10" y="{}" transform="rotate(-90 10 {})" text-anchor="middle">experience</text></g>"#,
                W / 2.0,
                H - 8.0,
                H / 2.0,
                H / 2.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_generation() {
        let a = generate_instance(100, Variant::Vanilla, 0.1, 7).unwrap();
        let b = generate_instance(100, Variant::Vanilla, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.gpa.iter().all(|g| (2.0..=4.0).contains(g)));
        assert!(a.experience.iter().all(|e| (1..=5).contains(e)));
        assert_eq!(generate_instance(5, Variant::Vanilla, 0.1, 7).unwrap().hire_cap, 5);
    }

    #[test]
    fn task_shapes() {
        let inst = generate_instance(100, Variant::Vanilla, 0.5, 1).unwrap();
        let (glp, c_set) = build_task(&inst).unwrap();
        assert_eq!(glp.ineq_lhs().nrows(), 1);
        let lp = standardize(&glp).unwrap();
        assert_eq!((lp.n_total(), lp.m()), (201, 101));
        assert_eq!(c_set.lifted().unwrap().k(), 102);

        let inst = generate_instance(100, Variant::ExperienceConstrained, 0.5, 1).unwrap();
        let present = CAPPED_LEVELS.iter().filter(|&&l| !inst.group(l).is_empty()).count();
        assert_eq!(build_task(&inst).unwrap().0.ineq_lhs().nrows(), 1 + present);
    }

    #[test]
    fn no_noise_point_set_needs_no_interviews() {
        let mut inst = generate_instance(12, Variant::Vanilla, 0.0, 3).unwrap();
        inst.alpha_lower = [4.5, 4.5];
        inst.alpha_upper = [4.5, 4.5];
        inst.hire_cap = 4;
        let (run, dirs) = run_single(&inst).unwrap();
        assert_eq!(run.count, 0);
        assert_eq!(dirs.dim(), 0);
        assert!(run.roundtrip_optimal);
    }

    #[test]
    fn small_pool_matches_exact_classification() {
        for variant in [Variant::Vanilla, Variant::ExperienceConstrained] {
            let mut inst = generate_instance(10, variant, 0.3, 11).unwrap();
            inst.hire_cap = 4;
            inst.group_cap = 1.0;
            let (run, _) = run_single(&inst).unwrap();
            assert!(run.roundtrip_optimal);
            let (glp, c_set) = build_task(&inst).unwrap();
            let lp = standardize(&glp).unwrap();
            let cfg = CsMilpConfig::derive_with_scale(&lp, &c_set, HIRING_DUAL_SCALE).unwrap();
            assert_eq!(classify_exact(&lp, &c_set, &cfg).unwrap(), run.statuses, "{variant:?}");
        }
    }

    #[test]
    fn report_outputs() {
        let rep = run_experiment(&[0.0, 0.2], Variant::Vanilla, 5, 8).unwrap();
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("eta,count,indices,wall_time_ms\n"));
        assert_eq!(csv.lines().count(), 3);
        let svg = rep.to_svg();
        assert_eq!(svg.matches("<circle").count(), 16);
    }
}
