//! Spanning the directions between reachable optimal solutions.
//!
//! A mixed-integer program encodes "x is optimal for some c ∈ C" through
//! complementary slackness with one binary per standard-form coordinate.
//! Each round maximizes and minimizes a random linear functional of the
//! part of `x − x₀` outside the current span; a nonzero value exhibits a new
//! direction.

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm_inf, sub, Extension, Matrix, SpanBasis};
use crate::lp_solver::simplex::LpOutcome;
use crate::lp_solver::solve_lp;
use crate::milp_solver::{MilpOptions, MilpProblem, MilpSolver, MilpStatus, DEFAULT_NODE_LIMIT};
use crate::model::{StandardLP, UncertaintySet};
use crate::oracle::f0_cap_kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

/// How binaries are tied to primal values and dual slacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Linking {
    /// `1 − ε sᵢ ≥ τᵢ ≥ ε xᵢ` with one constant `ε`.
    Uniform,
    /// `1 − sᵢ / m_dual ≥ τᵢ ≥ xᵢ / uᵢ` with `uᵢ = max xᵢ` over `X`.
    PerCoordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsMilpConfig {
    pub eps: f64,
    pub m_primal: f64,
    pub m_dual: f64,
    pub m_lambda: f64,
    /// Relative threshold; the absolute one is `tol_zero · (1 + ‖x₀‖∞)`.
    pub tol_zero: f64,
    pub max_alpha_redraws: usize,
    pub linking: Linking,
    pub node_limit: usize,
}

/// Default multiplier on `max(‖C‖∞, ‖A‖∞)` for dual bounds.
pub const DEFAULT_DUAL_SCALE: f64 = 1e3;

impl CsMilpConfig {
    /// Bounds derived from the instance with the default dual scale.
    pub fn derive(lp: &StandardLP, c_set: &UncertaintySet) -> Result<Self> {
        Self::derive_with_scale(lp, c_set, DEFAULT_DUAL_SCALE)
    }

    pub fn derive_with_scale(lp: &StandardLP, c_set: &UncertaintySet, dual_scale: f64) -> Result<Self> {
        if !(dual_scale > 0.0) {
            return Err(Error::ConfigError("dual scale must be positive".into()));
        }
        let m_primal = primal_maxima(lp)?.into_iter().fold(0.0, f64::max).max(1e-12);
        let m_dual = dual_scale * c_set.norm_inf().max(lp.a().max_abs()).max(1e-12);
        Ok(Self {
            eps: 1.0 / (2.0 * m_primal.max(m_dual)),
            m_primal,
            m_dual,
            m_lambda: m_dual,
            tol_zero: 1e-7,
            max_alpha_redraws: 3,
            linking: Linking::PerCoordinate,
            node_limit: DEFAULT_NODE_LIMIT,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps", self.eps),
            ("m_primal", self.m_primal),
            ("m_dual", self.m_dual),
            ("m_lambda", self.m_lambda),
            ("tol_zero", self.tol_zero),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ConfigError(format!("{name} must be positive and finite")));
            }
        }
        if self.eps > 1.0 / self.m_primal.max(self.m_dual) * (1.0 + 1e-12) {
            return Err(Error::ConfigError(format!(
                "eps = {} exceeds 1 / max(m_primal, m_dual) = {}",
                self.eps,
                1.0 / self.m_primal.max(self.m_dual)
            )));
        }
        Ok(())
    }
}

/// `max xᵢ` over `X` for every standard-form coordinate.
fn primal_maxima(lp: &StandardLP) -> Result<Vec<f64>> {
    let n = lp.n_total();
    let mut prog = lp.feasibility_lp();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        prog.objective.iter_mut().for_each(|c| *c = 0.0);
        prog.objective[i] = -1.0;
        match prog.solve()? {
            LpOutcome::Optimal(s) => out.push((-s.objective).max(0.0)),
            _ => return Err(Error::NumericalFailure("coordinate bound LP failed".into())),
        }
    }
    Ok(out)
}

/// Column layout of the complementary-slackness program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsLayout {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
}

impl CsLayout {
    pub fn x(&self) -> usize {
        0
    }
    pub fn lambda(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> usize {
        self.n + self.m
    }
    pub fn c(&self) -> usize {
        2 * self.n + self.m
    }
    pub fn z(&self) -> usize {
        2 * self.n + self.m + self.d
    }
    pub fn tau(&self) -> usize {
        2 * self.n + self.m + self.d + self.k
    }
    pub fn width(&self) -> usize {
        3 * self.n + self.m + self.d + self.k
    }
}

/// Constraint system shared by every round, plus the objective builder.
#[derive(Debug, Clone)]
pub struct CsMilp {
    pub problem: MilpProblem,
    pub layout: CsLayout,
}

impl CsMilp {
    pub fn new(lp: &StandardLP, c_set: &UncertaintySet, cfg: &CsMilpConfig) -> Result<Self> {
        cfg.validate()?;
        check_dim("uncertainty dimension", lp.n_original(), c_set.dimension())?;
        let ls = c_set.lifted()?;
        let layout = CsLayout {
            n: lp.n_total(),
            m: lp.m(),
            d: lp.n_original(),
            k: ls.k(),
        };
        let (n, m, d, k) = (layout.n, layout.m, layout.d, layout.k);
        let w = layout.width();
        let upper_x = primal_maxima(lp)?;

        let mut lower = vec![0.0; w];
        let mut upper = vec![f64::INFINITY; w];
        for i in 0..n {
            upper[layout.x() + i] = upper_x[i];
            upper[layout.s() + i] = cfg.m_dual;
            upper[layout.tau() + i] = if upper_x[i] > 0.0 { 1.0 } else { 0.0 };
        }
        for j in 0..m {
            lower[layout.lambda() + j] = -cfg.m_lambda;
            upper[layout.lambda() + j] = cfg.m_lambda;
        }
        for (i, (lo, hi)) in c_set.coordinate_bounds().iter().enumerate() {
            lower[layout.c() + i] = *lo;
            upper[layout.c() + i] = *hi;
        }
        for j in 0..k {
            lower[layout.z() + j] = ls.lower[j];
            upper[layout.z() + j] = ls.upper[j];
        }

        let a = lp.a();
        let n_eq = m + n + d;
        let mut eq = Matrix::zeros(n_eq, w);
        let mut eq_rhs = vec![0.0; n_eq];
        for i in 0..m {
            eq.row_mut(i)[..n].copy_from_slice(a.row(i));
            eq_rhs[i] = lp.b()[i];
        }
        // Aᵀλ + s − embed(c) = 0
        for j in 0..n {
            let r = m + j;
            for i in 0..m {
                eq[(r, layout.lambda() + i)] = a[(i, j)];
            }
            eq[(r, layout.s() + j)] = 1.0;
            if j < d {
                eq[(r, layout.c() + j)] = -1.0;
            }
        }
        // c − map z = offset
        for i in 0..d {
            let r = m + n + i;
            eq[(r, layout.c() + i)] = 1.0;
            for j in 0..k {
                eq[(r, layout.z() + j)] = -ls.map[(i, j)];
            }
            eq_rhs[r] = ls.offset[i];
        }

        let n_g = ls.g.nrows();
        let mut ineq = Matrix::zeros(n_g + 2 * n, w);
        let mut ineq_rhs = Vec::with_capacity(n_g + 2 * n);
        for i in 0..n_g {
            ineq.row_mut(i)[layout.z()..layout.z() + k].copy_from_slice(ls.g.row(i));
            ineq_rhs.push(ls.h[i]);
        }
        for i in 0..n {
            let (px, ps) = match cfg.linking {
                Linking::Uniform => (cfg.eps, cfg.eps),
                Linking::PerCoordinate => (
                    if upper_x[i] > 0.0 { 1.0 / upper_x[i] } else { 0.0 },
                    1.0 / cfg.m_dual,
                ),
            };
            let r = n_g + 2 * i;
            // ε xᵢ − τᵢ ≤ 0
            ineq[(r, layout.x() + i)] = px;
            ineq[(r, layout.tau() + i)] = -1.0;
            ineq_rhs.push(0.0);
            // τᵢ + ε sᵢ ≤ 1
            ineq[(r + 1, layout.tau() + i)] = 1.0;
            ineq[(r + 1, layout.s() + i)] = ps;
            ineq_rhs.push(1.0);
        }

        let problem = MilpProblem {
            objective: vec![0.0; w],
            objective_constant: 0.0,
            var_lower: lower,
            var_upper: upper,
            binary_indices: (0..n).map(|i| layout.tau() + i).collect(),
            eq_lhs: eq,
            eq_rhs,
            ineq_lhs: ineq,
            ineq_rhs,
        };
        problem.validate()?;
        Ok(Self { problem, layout })
    }

    /// Objective `±αᵀ P⊥(anchor − x)` as `(vector, constant)`. `anchor` is
    /// in original coordinates.
    pub fn objective(
        &self,
        lp: &StandardLP,
        alpha: &[f64],
        anchor: &[f64],
        span: &SpanBasis,
        sense: Sense,
    ) -> Result<(Vec<f64>, f64)> {
        let d = self.layout.d;
        check_dim("objective direction", d, alpha.len())?;
        check_dim("anchor", d, anchor.len())?;
        let beta = span.project_onto_complement(alpha)?;
        let shifted: Vec<f64> = anchor.iter().zip(lp.offset()).map(|(a, o)| a - o).collect();
        let sign = match sense {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let mut obj = vec![0.0; self.layout.width()];
        for i in 0..d {
            obj[self.layout.x() + i] = -sign * beta[i];
        }
        Ok((obj, sign * dot(&beta, &shifted)))
    }
}

/// Builds the complementary-slackness program with objective
/// `±αᵀ P⊥(anchor − x)` where `P⊥` projects out `span_basis`.
pub fn build_cs_milp(
    lp: &StandardLP,
    c_set: &UncertaintySet,
    objective_dir: &[f64],
    anchor: &[f64],
    span_basis: &SpanBasis,
    cfg: &CsMilpConfig,
    sense: Sense,
) -> Result<MilpProblem> {
    let cs = CsMilp::new(lp, c_set, cfg)?;
    let (obj, constant) = cs.objective(lp, objective_dir, anchor, span_basis, sense)?;
    let mut p = cs.problem;
    p.objective = obj;
    p.objective_constant = constant;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionBasis {
    pub anchor_x0: Vec<f64>,
    pub basis: SpanBasis,
    pub iterations: usize,
    pub seed: u64,
}

impl DirectionBasis {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Raw (non-orthonormalized) direction vectors.
    pub fn raw_vectors(&self) -> &[Vec<f64>] {
        self.basis.source_vectors()
    }
}

/// Repairs a relaxation point into a feasible program point: solves the
/// lower LP at the relaxation's cost, moves along the optimal face in the
/// objective's favor and sets the binaries from the support.
fn repair(lp: &StandardLP, cs: &CsMilp, objective: &[f64], relax: &[f64]) -> Option<Vec<f64>> {
    let l = cs.layout;
    let c: Vec<f64> = relax[l.c()..l.c() + l.d].to_vec();
    let cost = lp.embed_cost(&c).ok()?;
    let first = solve_lp(lp, &cost).ok()?;
    let mut face = lp.feasibility_lp();
    face.objective.copy_from_slice(&objective[..l.n]);
    let scale = 1e-9 * (1.0 + norm_inf(&cost));
    for i in 0..l.n {
        if first.reduced_costs[i] > scale {
            face.set_bounds(i, 0.0, 0.0);
        }
    }
    let x = match face.solve().ok()? {
        LpOutcome::Optimal(s) => s.x,
        _ => first.x.clone(),
    };
    let mut out = relax.to_vec();
    out[l.x()..l.x() + l.n].copy_from_slice(&x);
    out[l.lambda()..l.lambda() + l.m].copy_from_slice(&first.duals);
    for i in 0..l.n {
        out[l.s() + i] = first.reduced_costs[i].max(0.0);
        out[l.tau() + i] = if x[i] > 1e-9 || first.reduced_costs[i] <= scale { 1.0 } else { 0.0 };
    }
    Some(out)
}

/// Grows an orthonormal basis of the span of differences between reachable
/// optimal solutions. For `C = ℝᵈ` this is `F₀ ∩ Ker A`, computed directly.
pub fn compute_dir_basis(
    lp: &StandardLP,
    c_set: &UncertaintySet,
    cfg: &CsMilpConfig,
    seed: u64,
) -> Result<DirectionBasis> {
    check_dim("uncertainty dimension", lp.n_original(), c_set.dimension())?;
    let d = lp.n_original();
    let c0 = c_set.find_point()?;
    let x0 = solve_lp(lp, &lp.embed_cost(&c0)?)?;
    let anchor = lp.point_to_original(&x0.x)?;
    if c_set.is_unrestricted() {
        let basis = f0_cap_kernel(lp)?;
        return Ok(DirectionBasis {
            anchor_x0: anchor,
            iterations: basis.dim(),
            basis,
            seed,
        });
    }

    let cs = CsMilp::new(lp, c_set, cfg)?;
    let mut solver = MilpSolver::new(cs.problem.clone())?;
    let tol = cfg.tol_zero * (1.0 + norm_inf(&anchor));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = SpanBasis::empty(d);
    let mut iterations = 0usize;
    let mut misses = 0usize;

    while basis.dim() < d {
        let alpha: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut grown = false;
        for sense in [Sense::Max, Sense::Min] {
            let (obj, constant) = cs.objective(lp, &alpha, &anchor, &basis, sense)?;
            solver.set_objective(&obj, constant)?;
            let heuristic = |relax: &[f64]| repair(lp, &cs, &obj, relax);
            let sol = solver.solve(&MilpOptions {
                node_limit: cfg.node_limit,
                target: Some(-tol),
                heuristic: Some(&heuristic),
            })?;
            debug!("round {iterations} {sense:?}: {:?} after {} nodes", sol.status, sol.nodes);
            if sol.status != MilpStatus::TargetReached {
                continue;
            }
            let x_std = &sol.x[cs.layout.x()..cs.layout.x() + cs.layout.n];
            let v = sub(&lp.point_to_original(x_std)?, &anchor);
            match basis.extend(&v)? {
                Extension::Extended(next) => {
                    basis = next;
                    iterations += 1;
                    grown = true;
                    break;
                }
                Extension::InSpan => {
                    return Err(Error::NonTermination(format!(
                        "objective value {} but the direction lies in the current span",
                        sol.objective
                    )));
                }
            }
        }
        if grown {
            misses = 0;
        } else {
            misses += 1;
            if misses > cfg.max_alpha_redraws {
                break;
            }
        }
    }
    info!("direction basis of dimension {} after {iterations} rounds", basis.dim());
    Ok(DirectionBasis {
        anchor_x0: anchor,
        basis,
        iterations,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StandardLP;

    fn simplex2() -> StandardLP {
        StandardLP::new(Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(), vec![1.0]).unwrap()
    }

    fn bx() -> UncertaintySet {
        UncertaintySet::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap()
    }

    fn tilted() -> UncertaintySet {
        let g = Matrix::from_rows(
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
                vec![1.0, -1.0],
            ],
            2,
        )
        .unwrap();
        UncertaintySet::hpolyhedron(g, vec![1.0, 1.0, 1.0, 1.0, -0.1]).unwrap()
    }

    #[test]
    fn milp_shape_for_simplex2() {
        let lp = simplex2();
        let c = bx();
        let cfg = CsMilpConfig::derive(&lp, &c).unwrap();
        let p = build_cs_milp(&lp, &c, &[1.0, 0.5], &[1.0, 0.0], &SpanBasis::empty(2), &cfg, Sense::Min).unwrap();
        let l = CsMilp::new(&lp, &c, &cfg).unwrap().layout;
        assert_eq!((l.n, l.m, l.d, l.k), (2, 1, 2, 2));
        assert_eq!(p.binary_indices.len(), 2);
        assert_eq!(p.num_vars(), 2 + 1 + 2 + 2 + 2 + 2);
        // objective only touches x
        assert!(p.objective[2..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn full_span_kills_objective() {
        let lp = simplex2();
        let c = bx();
        let cfg = CsMilpConfig::derive(&lp, &c).unwrap();
        let p = build_cs_milp(&lp, &c, &[1.0, 0.5], &[1.0, 0.0], &SpanBasis::full(2), &cfg, Sense::Max).unwrap();
        assert!(p.objective.iter().all(|v| v.abs() < 1e-15));
        assert!(p.objective_constant.abs() < 1e-15);
    }

    #[test]
    fn bad_eps_rejected() {
        let lp = simplex2();
        let c = bx();
        let mut cfg = CsMilpConfig::derive(&lp, &c).unwrap();
        cfg.eps = 1.0;
        assert!(matches!(CsMilp::new(&lp, &c, &cfg), Err(Error::ConfigError(_))));
    }

    #[test]
    fn simplex2_examples() {
        let lp = simplex2();
        let cfg = CsMilpConfig::derive(&lp, &bx()).unwrap();
        let db = compute_dir_basis(&lp, &bx(), &cfg, 7).unwrap();
        assert_eq!(db.dim(), 1);
        assert_eq!(db.iterations, 1);
        assert!(db.basis.contains(&[1.0, -1.0]).unwrap());

        let db = compute_dir_basis(&lp, &tilted(), &cfg, 7).unwrap();
        assert_eq!(db.dim(), 0);
        assert_eq!(db.anchor_x0, vec![1.0, 0.0]);
    }

    #[test]
    fn single_point_has_no_directions() {
        let lp = StandardLP::new(Matrix::identity(2), vec![0.3, 0.6]).unwrap();
        let cfg = CsMilpConfig::derive(&lp, &bx()).unwrap();
        let db = compute_dir_basis(&lp, &bx(), &cfg, 1).unwrap();
        assert_eq!((db.dim(), db.iterations), (0, 0));
    }

    #[test]
    fn unrestricted_uses_kernel_path() {
        let lp = simplex2();
        let c = UncertaintySet::unrestricted(2).unwrap();
        let cfg = CsMilpConfig::derive(&lp, &bx()).unwrap();
        let db = compute_dir_basis(&lp, &c, &cfg, 0).unwrap();
        assert_eq!(db.dim(), 1);
    }
}
