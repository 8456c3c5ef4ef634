//! Branch-and-bound over binary variables.
//!
//! Nodes keep a handle on their parent's optimal tableau and re-solve with
//! the dual simplex after fixing one binary. The root tableau survives
//! across objectives, so a sequence of problems that differ only in their
//! objective shares one phase-one solve.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Matrix};
use crate::lp_solver::simplex::{LinearProgram, RowKind, Status, Tableau};

pub const INTEGRALITY_TOL: f64 = 1e-6;
pub const DEFAULT_NODE_LIMIT: usize = 1_000_000;
const FEASIBILITY_TOL: f64 = 1e-7;
/// Tableau cells kept alive by open nodes before falling back to rebuilds.
const CACHE_CELLS: usize = 48_000_000;

/// `min objectiveᵀx + objective_constant` subject to rows, bounds and
/// integrality of `binary_indices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpProblem {
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub binary_indices: Vec<usize>,
    pub eq_lhs: Matrix,
    pub eq_rhs: Vec<f64>,
    pub ineq_lhs: Matrix,
    pub ineq_rhs: Vec<f64>,
}

impl MilpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        check_dim("milp lower bounds", n, self.var_lower.len())?;
        check_dim("milp upper bounds", n, self.var_upper.len())?;
        check_dim("milp eq rhs", self.eq_lhs.nrows(), self.eq_rhs.len())?;
        check_dim("milp ineq rhs", self.ineq_lhs.nrows(), self.ineq_rhs.len())?;
        if self.eq_lhs.nrows() > 0 {
            check_dim("milp eq columns", n, self.eq_lhs.ncols())?;
        }
        if self.ineq_lhs.nrows() > 0 {
            check_dim("milp ineq columns", n, self.ineq_lhs.ncols())?;
        }
        for &j in &self.binary_indices {
            if j >= n {
                return Err(Error::InvalidModel(format!("binary index {j} out of range")));
            }
            if self.var_lower[j] < 0.0 || self.var_upper[j] > 1.0 {
                return Err(Error::InvalidModel(format!("binary {j} has bounds outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn relaxation(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_vars());
        lp.objective.copy_from_slice(&self.objective);
        lp.add_rows(&self.eq_lhs, RowKind::Eq, &self.eq_rhs);
        lp.add_rows(&self.ineq_lhs, RowKind::Le, &self.ineq_rhs);
        lp.lower.copy_from_slice(&self.var_lower);
        lp.upper.copy_from_slice(&self.var_upper);
        lp
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x) + self.objective_constant
    }

    /// Bounds, rows and integrality within `tol` (relative to row scale).
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds = (0..x.len()).all(|j| x[j] >= self.var_lower[j] - tol && x[j] <= self.var_upper[j] + tol);
        let ints = self
            .binary_indices
            .iter()
            .all(|&j| (x[j] - x[j].round()).abs() <= INTEGRALITY_TOL);
        let eq = (0..self.eq_lhs.nrows()).all(|i| {
            let r = self.eq_lhs.row(i);
            (dot(r, x) - self.eq_rhs[i]).abs() <= tol * (1.0 + self.eq_rhs[i].abs())
        });
        let ineq = (0..self.ineq_lhs.nrows()).all(|i| {
            let r = self.ineq_lhs.row(i);
            dot(r, x) <= self.ineq_rhs[i] + tol * (1.0 + self.ineq_rhs[i].abs())
        });
        bounds && ints && eq && ineq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    /// Stopped at an incumbent strictly below the target.
    TargetReached,
    /// Proven: no feasible point has objective below the target.
    TargetUnreachable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    /// Empty unless an incumbent exists.
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: MilpStatus,
    pub nodes: usize,
}

/// Incumbent proposal from a relaxation solution.
pub type Heuristic<'a> = dyn Fn(&[f64]) -> Option<Vec<f64>> + 'a;

pub struct MilpOptions<'a> {
    pub node_limit: usize,
    /// Search only for points with objective strictly below this value.
    pub target: Option<f64>,
    pub heuristic: Option<&'a Heuristic<'a>>,
}

impl Default for MilpOptions<'_> {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
            target: None,
            heuristic: None,
        }
    }
}

pub fn solve_milp(p: &MilpProblem) -> Result<MilpSolution> {
    MilpSolver::new(p.clone())?.solve(&MilpOptions::default())
}

struct Node {
    bound: f64,
    id: usize,
    fixes: Vec<(usize, f64)>,
    parent: Option<Rc<Tableau>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: smaller bound first, then older node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Branch-and-bound driver holding a phase-one-feasible root tableau.
pub struct MilpSolver {
    problem: MilpProblem,
    root: Option<Tableau>,
}

impl MilpSolver {
    pub fn new(problem: MilpProblem) -> Result<Self> {
        problem.validate()?;
        let mut t = Tableau::new(&problem.relaxation())?;
        let root = match t.solve()? {
            Status::Infeasible => None,
            _ => Some(t),
        };
        Ok(Self { problem, root })
    }

    pub fn problem(&self) -> &MilpProblem {
        &self.problem
    }

    /// Replaces the objective; rows and bounds stay.
    pub fn set_objective(&mut self, objective: &[f64], constant: f64) -> Result<()> {
        check_dim("milp objective", self.problem.num_vars(), objective.len())?;
        self.problem.objective.copy_from_slice(objective);
        self.problem.objective_constant = constant;
        if let Some(t) = self.root.as_mut() {
            t.set_objective(objective);
        }
        Ok(())
    }

    pub fn solve(&mut self, opts: &MilpOptions) -> Result<MilpSolution> {
        let infeasible = MilpSolution {
            x: vec![],
            objective: f64::INFINITY,
            status: MilpStatus::Infeasible,
            nodes: 0,
        };
        let Some(root) = self.root.as_mut() else {
            return Ok(infeasible);
        };
        match root.optimize()? {
            Status::Optimal => {}
            Status::Unbounded => {
                return Err(Error::NumericalFailure("MILP relaxation is unbounded".into()));
            }
            Status::Infeasible => return Ok(infeasible),
        }
        let root = root.clone();
        let p = &self.problem;
        let binaries = &p.binary_indices;
        let constant = p.objective_constant;
        let cutoff = opts.target.unwrap_or(f64::INFINITY);

        let mut incumbent: Option<(Vec<f64>, f64)> = None;
        let mut heap = BinaryHeap::new();
        let mut next_id = 0usize;
        let mut nodes = 0usize;
        let mut live_cells = 0usize;
        heap.push(Node {
            bound: f64::NEG_INFINITY,
            id: next_id,
            fixes: vec![],
            parent: None,
        });
        next_id += 1;

        let prune_at = |inc: &Option<(Vec<f64>, f64)>| -> f64 {
            let inc_val = inc.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
            let best = inc_val - 1e-9 * (1.0 + inc_val.abs());
            best.min(cutoff)
        };

        while let Some(node) = heap.pop() {
            if node.bound >= prune_at(&incumbent) {
                if let Some(rc) = node.parent {
                    if Rc::strong_count(&rc) == 1 {
                        live_cells = live_cells.saturating_sub(rc.cells());
                    }
                }
                continue;
            }
            nodes += 1;
            if nodes > opts.node_limit {
                return Err(Error::NodeLimitExceeded(opts.node_limit));
            }
            let mut t = match node.parent {
                None if node.fixes.is_empty() => root.clone(),
                None => {
                    let mut t = root.clone();
                    for &(j, v) in &node.fixes[..node.fixes.len() - 1] {
                        t.set_bounds(j, v, v);
                    }
                    t
                }
                Some(rc) => match Rc::try_unwrap(rc) {
                    Ok(t) => {
                        live_cells = live_cells.saturating_sub(t.cells());
                        t
                    }
                    Err(rc) => (*rc).clone(),
                },
            };
            if let Some(&(j, v)) = node.fixes.last() {
                t.set_bounds(j, v, v);
                match t.reoptimize()? {
                    Status::Optimal => {}
                    Status::Infeasible => continue,
                    Status::Unbounded => {
                        return Err(Error::NumericalFailure("MILP relaxation is unbounded".into()));
                    }
                }
            }
            let x = t.structural_values();
            let bound = t.objective_value() + constant;
            if bound < node.bound - 1e-7 * (1.0 + node.bound.abs()) {
                debug!("node bound {bound} below parent bound {}", node.bound);
            }
            if bound >= prune_at(&incumbent) {
                continue;
            }

            let branch = most_fractional(&x, binaries);
            if branch.is_none() && p.is_feasible(&x, FEASIBILITY_TOL) {
                incumbent = Some((x, bound));
                if bound < cutoff && opts.target.is_some() {
                    break;
                }
                continue;
            }
            if let Some(h) = opts.heuristic {
                if let Some(cand) = h(&x) {
                    let val = p.evaluate(&cand);
                    if val < prune_at(&incumbent) && p.is_feasible(&cand, FEASIBILITY_TOL) {
                        debug!("heuristic incumbent {val} at node {nodes}");
                        incumbent = Some((cand, val));
                        if val < cutoff && opts.target.is_some() {
                            break;
                        }
                        if bound >= prune_at(&incumbent) {
                            continue;
                        }
                    }
                }
            }
            let Some(j) = branch else {
                // integral but outside tolerance on rows: tighten nothing, give up on node
                debug!("integral relaxation rejected by feasibility check");
                continue;
            };
            let shared = if live_cells + t.cells() <= CACHE_CELLS {
                live_cells += t.cells();
                Some(Rc::new(t))
            } else {
                None
            };
            for v in [0.0, 1.0] {
                let mut fixes = node.fixes.clone();
                fixes.push((j, v));
                heap.push(Node {
                    bound,
                    id: next_id,
                    fixes,
                    parent: shared.clone(),
                });
                next_id += 1;
            }
        }

        let status = match (&incumbent, opts.target) {
            (Some((_, v)), Some(target)) if *v < target => MilpStatus::TargetReached,
            (_, Some(_)) => MilpStatus::TargetUnreachable,
            (Some(_), None) => MilpStatus::Optimal,
            (None, None) => MilpStatus::Infeasible,
        };
        let (x, objective) = incumbent.unwrap_or((vec![], f64::INFINITY));
        debug!("branch and bound: {nodes} nodes, status {status:?}");
        Ok(MilpSolution {
            x,
            objective,
            status,
            nodes,
        })
    }
}

fn most_fractional(x: &[f64], binaries: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in binaries {
        let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
        if frac > INTEGRALITY_TOL && best.is_none_or(|(bj, bf)| frac > bf + 1e-12 || (frac >= bf - 1e-12 && j < bj)) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(objective: Vec<f64>, ineq: Vec<Vec<f64>>, rhs: Vec<f64>, binaries: Vec<usize>) -> MilpProblem {
        let n = objective.len();
        MilpProblem {
            objective,
            objective_constant: 0.0,
            var_lower: vec![0.0; n],
            var_upper: vec![1.0; n],
            binary_indices: binaries,
            eq_lhs: Matrix::zeros(0, n),
            eq_rhs: vec![],
            ineq_lhs: Matrix::from_rows(&ineq, n).unwrap(),
            ineq_rhs: rhs,
        }
    }

    #[test]
    fn rounding_blocked() {
        let p = problem(vec![-1.0, -1.0], vec![vec![1.0, 1.0]], vec![1.5], vec![0, 1]);
        let s = solve_milp(&p).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let w = [2.0, 3.0, 4.0, 5.0, 9.0];
        let v = [3.0, 4.0, 5.0, 8.0, 10.0];
        let p = problem(v.iter().map(|x| -x).collect(), vec![w.to_vec()], vec![10.0], (0..5).collect());
        let s = solve_milp(&p).unwrap();
        let mut best = 0.0f64;
        for mask in 0..32u32 {
            let (mut wt, mut val) = (0.0, 0.0);
            for i in 0..5 {
                if mask >> i & 1 == 1 {
                    wt += w[i];
                    val += v[i];
                }
            }
            if wt <= 10.0 {
                best = best.max(val);
            }
        }
        assert!((s.objective + best).abs() < 1e-9);
    }

    #[test]
    fn continuous_problem_is_plain_lp() {
        let p = problem(vec![-1.0, -2.0], vec![vec![1.0, 1.0]], vec![1.5], vec![]);
        let s = solve_milp(&p).unwrap();
        assert!((s.objective + 2.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_milp() {
        let mut p = problem(vec![1.0], vec![vec![1.0], vec![-1.0]], vec![0.6, -0.4], vec![0]);
        assert_eq!(solve_milp(&p).unwrap().status, MilpStatus::Infeasible);
        p.ineq_rhs = vec![2.0, 1.0];
        p.var_lower[0] = 0.0;
        assert_eq!(solve_milp(&p).unwrap().status, MilpStatus::Optimal);
    }

    #[test]
    fn target_mode() {
        let p = problem(vec![-1.0, -1.0], vec![vec![1.0, 1.0]], vec![1.5], vec![0, 1]);
        let mut solver = MilpSolver::new(p).unwrap();
        let s = solver
            .solve(&MilpOptions {
                target: Some(-0.5),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(s.status, MilpStatus::TargetReached);
        assert!(s.objective < -0.5);
        let s = solver
            .solve(&MilpOptions {
                target: Some(-1.0),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(s.status, MilpStatus::TargetUnreachable);
        solver.set_objective(&[1.0, 1.0], 0.0).unwrap();
        let s = solver.solve(&MilpOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!(s.objective.abs() < 1e-12);
    }
}
