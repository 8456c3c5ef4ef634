//! Dense bounded-variable simplex.
//!
//! The tableau keeps `B⁻¹A` for every column (structural, slack and
//! artificial) plus `B⁻¹b` as a trailing column. Nonbasic variables sit at
//! one of their bounds, or at zero when free. The same tableau supports a
//! two-phase primal simplex from scratch and a dual simplex after bound
//! changes, which is what branch-and-bound needs for warm starts.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

/// `min cᵀx` subject to row constraints and variable bounds. Infinite
/// bounds are allowed.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Matrix,
    pub kinds: Vec<RowKind>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// Nonnegative variables, no rows, zero objective.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            rows: Matrix::zeros(0, n),
            kinds: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.kinds.len()
    }

    pub fn add_row(&mut self, coeffs: &[f64], kind: RowKind, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "row length");
        let row = Matrix::from_rows(&[coeffs.to_vec()], coeffs.len()).expect("row length");
        self.rows = self.rows.vstack(&row).expect("row length");
        self.kinds.push(kind);
        self.rhs.push(rhs);
    }

    /// Appends many rows at once.
    pub fn add_rows(&mut self, m: &Matrix, kind: RowKind, rhs: &[f64]) {
        assert_eq!(m.nrows(), rhs.len());
        if m.nrows() == 0 {
            return;
        }
        assert_eq!(m.ncols(), self.num_vars(), "row length");
        self.rows = self.rows.vstack(m).expect("row length");
        self.kinds.extend(std::iter::repeat_n(kind, m.nrows()));
        self.rhs.extend_from_slice(rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let mut t = Tableau::new(self)?;
        let status = t.solve()?;
        Ok(t.outcome(status))
    }
}

/// Optimal primal/dual pair of a [`LinearProgram`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row with `c = Aᵀy + reduced_costs`.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Structural columns that are basic, in row order. Slack or artificial
    /// basics are omitted.
    pub basic_structurals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable resting at zero.
    AtZero,
}

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    m: usize,
    /// Number of tableau columns (excluding the rhs column).
    w: usize,
    n_struct: usize,
    /// `m × (w + 1)` row-major; column `w` is `B⁻¹b`.
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    phase2_cost: Vec<f64>,
    d: Vec<f64>,
    /// Per row: the column whose original coefficient is `coef · e_row`.
    unit_col: Vec<(usize, f64)>,
    /// Original row sign (`-1` for rows stored as negated `≥` rows).
    row_sign: Vec<f64>,
    artificial_start: usize,
    pub(crate) pivots: usize,
}

impl Tableau {
    pub(crate) fn new(lp: &LinearProgram) -> Result<Self> {
        let n = lp.num_vars();
        let m = lp.num_rows();
        if lp.rows.nrows() != m || (m > 0 && lp.rows.ncols() != n) || lp.rhs.len() != m {
            return Err(Error::NumericalFailure("inconsistent LP dimensions".into()));
        }
        for j in 0..n {
            if lp.lower[j] > lp.upper[j] || lp.lower[j].is_nan() || lp.upper[j].is_nan() {
                return Err(Error::NumericalFailure(format!("invalid bounds on variable {j}")));
            }
        }

        let slack_rows: Vec<usize> = (0..m).filter(|&i| lp.kinds[i] != RowKind::Eq).collect();
        let n_slack = slack_rows.len();
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(std::iter::repeat_n(0.0, n_slack));
        upper.extend(std::iter::repeat_n(f64::INFINITY, n_slack));

        let initial_value = |lo: f64, hi: f64| {
            if lo.is_finite() {
                lo
            } else if hi.is_finite() {
                hi
            } else {
                0.0
            }
        };

        let row_sign: Vec<f64> = lp
            .kinds
            .iter()
            .map(|k| if *k == RowKind::Ge { -1.0 } else { 1.0 })
            .collect();
        let x_init: Vec<f64> = (0..n).map(|j| initial_value(lp.lower[j], lp.upper[j])).collect();

        let mut slack_of_row = vec![usize::MAX; m];
        for (k, &i) in slack_rows.iter().enumerate() {
            slack_of_row[i] = n + k;
        }
        let mut residual = vec![0.0; m];
        let mut needs_art = Vec::new();
        for i in 0..m {
            let ax: f64 = lp.rows.row(i).iter().zip(&x_init).map(|(a, x)| a * x).sum();
            residual[i] = row_sign[i] * (lp.rhs[i] - ax);
            if lp.kinds[i] == RowKind::Eq || residual[i] < 0.0 {
                needs_art.push(i);
            }
        }
        let artificial_start = n + n_slack;
        let w = artificial_start + needs_art.len();
        lower.extend(std::iter::repeat_n(0.0, needs_art.len()));
        upper.extend(std::iter::repeat_n(f64::INFINITY, needs_art.len()));

        let mut unit_col = vec![(usize::MAX, 1.0); m];
        let mut basis = vec![usize::MAX; m];
        let mut beta = vec![0.0; m];
        let mut t = vec![0.0; m * (w + 1)];
        let stride = w + 1;
        for i in 0..m {
            let row = &mut t[i * stride..(i + 1) * stride];
            for (j, a) in lp.rows.row(i).iter().enumerate() {
                row[j] = row_sign[i] * a;
            }
            if slack_of_row[i] != usize::MAX {
                row[slack_of_row[i]] = 1.0;
                unit_col[i] = (slack_of_row[i], 1.0);
            }
            row[w] = row_sign[i] * lp.rhs[i];
        }
        let mut state = vec![VarState::AtLower; w];
        for j in 0..n {
            state[j] = if lp.lower[j].is_finite() {
                VarState::AtLower
            } else if lp.upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::AtZero
            };
        }
        for (k, &i) in needs_art.iter().enumerate() {
            let col = artificial_start + k;
            let sigma = if residual[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * stride..(i + 1) * stride];
            row[col] = sigma;
            // B = diag(σ) on this row: divide through.
            if sigma < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            if lp.kinds[i] == RowKind::Eq {
                unit_col[i] = (col, sigma);
            }
            basis[i] = col;
            state[col] = VarState::Basic;
            beta[i] = residual[i].abs();
        }
        for i in 0..m {
            if basis[i] == usize::MAX {
                let s = slack_of_row[i];
                basis[i] = s;
                state[s] = VarState::Basic;
                beta[i] = residual[i];
            }
        }

        let mut phase2_cost = lp.objective.clone();
        phase2_cost.resize(w, 0.0);
        let mut tab = Self {
            m,
            w,
            n_struct: n,
            t,
            beta,
            basis,
            state,
            lower,
            upper,
            cost: vec![0.0; w],
            phase2_cost,
            d: vec![0.0; w],
            unit_col,
            row_sign,
            artificial_start,
            pivots: 0,
        };
        tab.recompute_beta();
        Ok(tab)
    }

    #[inline]
    fn stride(&self) -> usize {
        self.w + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.w + 1) + j]
    }

    fn value_of_nonbasic(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::AtZero | VarState::Basic => 0.0,
        }
    }

    fn recompute_beta(&mut self) {
        let stride = self.stride();
        let nonbasic: Vec<(usize, f64)> = (0..self.w)
            .filter(|&j| self.state[j] != VarState::Basic)
            .map(|j| (j, self.value_of_nonbasic(j)))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        for i in 0..self.m {
            let row = &self.t[i * stride..(i + 1) * stride];
            let mut v = row[self.w];
            for &(j, xj) in &nonbasic {
                v -= row[j] * xj;
            }
            self.beta[i] = v;
        }
    }

    fn recompute_reduced_costs(&mut self) {
        let stride = self.stride();
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * stride..i * stride + self.w];
                for (dj, tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for i in 0..self.m {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let stride = self.stride();
        let p = self.t[r * stride + j];
        let inv = 1.0 / p;
        {
            let row = &mut self.t[r * stride..(r + 1) * stride];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[j] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * stride..(r + 1) * stride].to_vec();
        let nz: Vec<usize> = (0..stride).filter(|&k| pivot_row[k] != 0.0).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * stride + j];
            if f != 0.0 {
                let row = &mut self.t[i * stride..(i + 1) * stride];
                for &k in &nz {
                    row[k] -= f * pivot_row[k];
                }
                row[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for &k in &nz {
                if k < self.w {
                    self.d[k] -= f * pivot_row[k];
                }
            }
            self.d[j] = 0.0;
        }
        let leaving = self.basis[r];
        self.basis[r] = j;
        self.state[j] = VarState::Basic;
        let _ = leaving;
        self.pivots += 1;
    }

    fn feas_tol(&self, bound: f64) -> f64 {
        PRIMAL_TOL * (1.0 + bound.abs())
    }

    /// Primal simplex from a primal feasible basis with the current `cost`.
    fn primal_simplex(&mut self, max_iter: usize) -> Result<Status> {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        for _ in 0..max_iter {
            // pricing
            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.w {
                let st = self.state[j];
                if st == VarState::Basic || self.is_fixed(j) {
                    continue;
                }
                let dj = self.d[j];
                let dir = match st {
                    VarState::AtLower if dj < -DUAL_TOL => 1.0,
                    VarState::AtUpper if dj > DUAL_TOL => -1.0,
                    VarState::AtZero if dj < -DUAL_TOL => 1.0,
                    VarState::AtZero if dj > DUAL_TOL => -1.0,
                    _ => continue,
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    enter = Some((j, dir));
                }
            }
            let Some((j, dir)) = enter else {
                return Ok(Status::Optimal);
            };

            // ratio test
            let mut theta = if self.lower[j].is_finite() && self.upper[j].is_finite() {
                self.upper[j] - self.lower[j]
            } else {
                f64::INFINITY
            };
            let mut leave: Option<(usize, bool)> = None; // (row, goes_to_lower)
            let mut leave_piv = 0.0;
            for i in 0..self.m {
                let a = self.at(i, j) * dir;
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let k = self.basis[i];
                let (limit, to_lower) = if a > 0.0 {
                    if !self.lower[k].is_finite() {
                        continue;
                    }
                    (((self.beta[i] - self.lower[k]) / a).max(0.0), true)
                } else {
                    if !self.upper[k].is_finite() {
                        continue;
                    }
                    (((self.upper[k] - self.beta[i]) / -a).max(0.0), false)
                };
                let better = if limit < theta - 1e-12 {
                    true
                } else if limit <= theta + 1e-12 {
                    match leave {
                        None => limit < theta,
                        Some((li, _)) if bland => self.basis[i] < self.basis[li],
                        Some(_) => a.abs() > leave_piv,
                    }
                } else {
                    false
                };
                if better {
                    theta = theta.min(limit);
                    leave = Some((i, to_lower));
                    leave_piv = a.abs();
                }
            }
            if theta.is_infinite() {
                return Ok(Status::Unbounded);
            }

            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > STALL_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }

            let step = dir * theta;
            let old_xj = self.value_of_nonbasic(j);
            if step != 0.0 {
                let stride = self.stride();
                for i in 0..self.m {
                    let a = self.t[i * stride + j];
                    if a != 0.0 {
                        self.beta[i] -= a * step;
                    }
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.state[j] = if dir > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some((r, to_lower)) => {
                    let k = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = old_xj + step;
                    self.state[k] = if to_lower {
                        VarState::AtLower
                    } else {
                        VarState::AtUpper
                    };
                }
            }
        }
        Err(Error::NumericalFailure(format!(
            "primal simplex iteration cap {max_iter} reached"
        )))
    }

    fn iteration_cap(&self) -> usize {
        10 * self.w.max(1) * self.m.max(1) + 1000
    }

    /// Two-phase solve from the initial basis.
    pub(crate) fn solve(&mut self) -> Result<Status> {
        let cap = self.iteration_cap();
        let has_art = self.artificial_start < self.w;
        if has_art {
            self.cost.iter_mut().for_each(|c| *c = 0.0);
            for j in self.artificial_start..self.w {
                self.cost[j] = 1.0;
            }
            self.recompute_reduced_costs();
            let st = self.primal_simplex(cap)?;
            if st != Status::Optimal {
                return Err(Error::NumericalFailure("phase one did not converge".into()));
            }
            self.recompute_beta();
            let infeas: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.beta[i].abs())
                .sum();
            let scale = 1.0 + self.t.iter().skip(self.w).step_by(self.stride()).fold(0.0f64, |a, v| a.max(v.abs()));
            if infeas > 1e-7 * scale {
                return Ok(Status::Infeasible);
            }
            for j in self.artificial_start..self.w {
                self.upper[j] = 0.0;
                if self.state[j] != VarState::Basic {
                    self.state[j] = VarState::AtLower;
                }
            }
            self.drive_out_artificials();
        }
        self.cost.copy_from_slice(&self.phase2_cost);
        self.recompute_reduced_costs();
        let st = self.primal_simplex(cap)?;
        self.recompute_beta();
        Ok(st)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.artificial_start {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.artificial_start {
                if self.state[j] == VarState::Basic {
                    continue;
                }
                let a = self.at(r, j).abs();
                if a > 1e-7 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let k = self.basis[r];
                let xj = self.value_of_nonbasic(j);
                self.pivot(r, j);
                self.beta[r] = xj;
                self.state[k] = VarState::AtLower;
            }
        }
        self.recompute_beta();
    }

    /// Changes the bounds of a column. The basis stays dual feasible when
    /// the column is fixed or still rests at a finite bound; callers follow
    /// with [`Tableau::reoptimize`].
    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let old = if self.state[j] == VarState::Basic {
            None
        } else {
            Some(self.value_of_nonbasic(j))
        };
        self.lower[j] = lower;
        self.upper[j] = upper;
        if let Some(old) = old {
            let new_state = match self.state[j] {
                VarState::AtLower if lower.is_finite() => VarState::AtLower,
                VarState::AtUpper if upper.is_finite() => VarState::AtUpper,
                _ => {
                    if lower.is_finite() && (self.d[j] >= 0.0 || !upper.is_finite()) {
                        VarState::AtLower
                    } else if upper.is_finite() {
                        VarState::AtUpper
                    } else {
                        VarState::AtZero
                    }
                }
            };
            self.state[j] = new_state;
            let new = self.value_of_nonbasic(j);
            let delta = new - old;
            if delta != 0.0 {
                let stride = self.stride();
                for i in 0..self.m {
                    let a = self.t[i * stride + j];
                    if a != 0.0 {
                        self.beta[i] -= a * delta;
                    }
                }
            }
        }
    }

    /// Primal simplex with the current objective from a primal feasible
    /// basis.
    pub(crate) fn optimize(&mut self) -> Result<Status> {
        let cap = self.iteration_cap();
        let st = self.primal_simplex(cap)?;
        self.recompute_beta();
        Ok(st)
    }

    /// Replaces the phase-two objective (structural part).
    pub(crate) fn set_objective(&mut self, c: &[f64]) {
        self.phase2_cost[..self.n_struct].copy_from_slice(c);
        self.cost.copy_from_slice(&self.phase2_cost);
        self.recompute_reduced_costs();
    }

    fn primal_infeasible_row(&self) -> Option<(usize, bool)> {
        self.infeasible_row(false)
    }

    /// Most violated basic variable, or with `bland` the one of lowest index.
    fn infeasible_row(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        let mut worst = 0.0;
        let mut lowest = usize::MAX;
        for i in 0..self.m {
            let k = self.basis[i];
            let b = self.beta[i];
            let (viol, low) = if b < self.lower[k] - self.feas_tol(self.lower[k]) {
                (self.lower[k] - b, true)
            } else if b > self.upper[k] + self.feas_tol(self.upper[k]) {
                (b - self.upper[k], false)
            } else {
                continue;
            };
            if bland {
                if k < lowest {
                    lowest = k;
                    best = Some((i, low));
                }
            } else if viol > worst {
                worst = viol;
                best = Some((i, low));
            }
        }
        best
    }

    fn dual_simplex(&mut self, max_iter: usize) -> Result<Status> {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        for _ in 0..max_iter {
            let Some((r, below)) = self.infeasible_row(bland) else {
                return Ok(Status::Optimal);
            };
            let k = self.basis[r];
            let target = if below { self.lower[k] } else { self.upper[k] };
            let mut enter: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_piv = 0.0;
            for j in 0..self.w {
                let st = self.state[j];
                if st == VarState::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = self.at(r, j);
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_k moves by -a·Δx_j; it must move toward `target`.
                let ok = match st {
                    VarState::AtLower => (below && a < 0.0) || (!below && a > 0.0),
                    VarState::AtUpper => (below && a > 0.0) || (!below && a < 0.0),
                    VarState::AtZero => true,
                    VarState::Basic => false,
                };
                if !ok {
                    continue;
                }
                let ratio = self.d[j].abs() / a.abs();
                let tie = ratio <= best_ratio + 1e-12;
                if ratio < best_ratio - 1e-12 || (tie && !bland && a.abs() > best_piv) {
                    best_ratio = ratio;
                    best_piv = a.abs();
                    enter = Some(j);
                }
            }
            let Some(j) = enter else {
                return Ok(Status::Infeasible);
            };
            if best_ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > STALL_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            let a = self.at(r, j);
            let delta = (self.beta[r] - target) / a;
            let old_xj = self.value_of_nonbasic(j);
            let stride = self.stride();
            for i in 0..self.m {
                let tij = self.t[i * stride + j];
                if tij != 0.0 {
                    self.beta[i] -= tij * delta;
                }
            }
            self.pivot(r, j);
            self.beta[r] = old_xj + delta;
            self.state[k] = if below {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
        }
        Err(Error::NumericalFailure(format!(
            "dual simplex iteration cap {max_iter} reached"
        )))
    }

    /// Restores optimality after bound or objective changes: dual simplex
    /// for primal infeasibility, then primal cleanup.
    pub(crate) fn reoptimize(&mut self) -> Result<Status> {
        let cap = self.iteration_cap();
        for _ in 0..3 {
            match self.dual_simplex(cap)? {
                Status::Infeasible => return Ok(Status::Infeasible),
                _ => {}
            }
            let st = self.primal_simplex(cap)?;
            if st == Status::Unbounded {
                return Ok(st);
            }
            self.recompute_beta();
            if self.primal_infeasible_row().is_none() {
                return Ok(Status::Optimal);
            }
        }
        Err(Error::NumericalFailure("reoptimization did not settle".into()))
    }

    pub(crate) fn structural_values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n_struct).map(|j| self.value_of_nonbasic(j)).collect();
        for i in 0..self.m {
            let k = self.basis[i];
            if k < self.n_struct {
                x[k] = self.beta[i];
            }
        }
        x
    }

    pub(crate) fn objective_value(&self) -> f64 {
        let x = self.structural_values();
        x.iter().zip(&self.phase2_cost).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn solution(&self) -> LpSolution {
        let x = self.structural_values();
        let objective = x.iter().zip(&self.phase2_cost).map(|(a, b)| a * b).sum();
        let duals = (0..self.m)
            .map(|i| {
                let (col, coef) = self.unit_col[i];
                let y = (self.phase2_cost[col] - self.d[col]) / coef;
                y * self.row_sign[i]
            })
            .collect();
        let basic_structurals = self.basis.iter().copied().filter(|&k| k < self.n_struct).collect();
        LpSolution {
            x,
            objective,
            duals,
            reduced_costs: self.d[..self.n_struct].to_vec(),
            basic_structurals,
        }
    }

    pub(crate) fn outcome(&self, status: Status) -> LpOutcome {
        match status {
            Status::Optimal => LpOutcome::Optimal(self.solution()),
            Status::Infeasible => LpOutcome::Infeasible,
            Status::Unbounded => LpOutcome::Unbounded,
        }
    }

    /// Memory footprint in `f64` cells, used by branch-and-bound caching.
    pub(crate) fn cells(&self) -> usize {
        self.t.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp_from(c: &[f64], rows: &[(Vec<f64>, RowKind, f64)]) -> LinearProgram {
        let mut lp = LinearProgram::new(c.len());
        lp.objective = c.to_vec();
        for (r, k, b) in rows {
            lp.add_row(r, *k, *b);
        }
        lp
    }

    #[test]
    fn small_max_problem() {
        // max x + 2y s.t. x + y <= 4, 2x + y >= 2, y <= 3  → 7 at (1, 3)
        let mut lp = lp_from(
            &[-1.0, -2.0],
            &[
                (vec![1.0, 1.0], RowKind::Le, 4.0),
                (vec![2.0, 1.0], RowKind::Ge, 2.0),
            ],
        );
        lp.set_bounds(1, 0.0, 3.0);
        let s = lp.solve().unwrap().optimal().unwrap();
        assert!((s.objective + 7.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let lp = lp_from(&[1.0], &[(vec![1.0], RowKind::Le, -1.0)]);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
        let lp = lp_from(&[-1.0], &[(vec![1.0], RowKind::Ge, 1.0)]);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_duals() {
        // min y s.t. y >= x - 1, y >= -x + 1, x free, y free → 0 at x = 1
        let mut lp = lp_from(
            &[0.0, 1.0],
            &[
                (vec![-1.0, 1.0], RowKind::Ge, -1.0),
                (vec![1.0, 1.0], RowKind::Ge, 1.0),
            ],
        );
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        let s = lp.solve().unwrap().optimal().unwrap();
        assert!(s.objective.abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        // c = Aᵀy + d with d = 0 for free basics
        let aty0 = -s.duals[0] + s.duals[1];
        let aty1 = s.duals[0] + s.duals[1];
        assert!((aty0 - 0.0).abs() < 1e-12 && (aty1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn warm_start_after_fixing() {
        // min -x - y, x + y <= 1.5, 0 <= x, y <= 1
        let mut lp = lp_from(&[-1.0, -1.0], &[(vec![1.0, 1.0], RowKind::Le, 1.5)]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        let mut t = Tableau::new(&lp).unwrap();
        assert_eq!(t.solve().unwrap(), Status::Optimal);
        assert!((t.objective_value() + 1.5).abs() < 1e-12);
        t.set_bounds(0, 1.0, 1.0);
        t.set_bounds(1, 1.0, 1.0);
        assert_eq!(t.reoptimize().unwrap(), Status::Infeasible);

        let mut t = Tableau::new(&lp).unwrap();
        t.solve().unwrap();
        t.set_bounds(0, 0.0, 0.0);
        assert_eq!(t.reoptimize().unwrap(), Status::Optimal);
        assert!((t.objective_value() + 1.0).abs() < 1e-12);
    }
}
