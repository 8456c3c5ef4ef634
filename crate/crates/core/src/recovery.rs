//! Decisions from observations: constrained least squares for the cost,
//! then an LP solve.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, kernel_basis, norm2, norm_inf, Matrix};
use crate::lp_solver::solve_lp;
use crate::model::{Dataset, ObservationVector, StandardLP, UncertaintySet};

const QP_ITER_FACTOR: usize = 20;
const SVD_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub c_hat: Vec<f64>,
    pub decision: Vec<f64>,
    pub residual: f64,
    pub objective_at_c_hat: f64,
}

/// Minimum-norm solution of `min ‖M w − r‖`.
fn lstsq(m: &DMatrix<f64>, r: &DVector<f64>) -> Result<DVector<f64>> {
    if m.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    if m.nrows() == 0 {
        return Ok(DVector::zeros(m.ncols()));
    }
    let svd = m.clone().svd(true, true);
    let tol = SVD_EPS * svd.singular_values.max().max(1.0);
    svd.solve(r, tol)
        .map_err(|e| Error::NumericalFailure(format!("least squares: {e}")))
}

/// `min ½‖M z − r‖²` over `{z : G z ≤ h, lower ≤ z ≤ upper}` by a primal
/// active-set method. Bound constraints are handled by fixing variables,
/// general rows through a null-space basis.
struct BoxedLsq<'a> {
    m: &'a DMatrix<f64>,
    r: &'a DVector<f64>,
    g: &'a Matrix,
    h: &'a [f64],
    lower: &'a [f64],
    upper: &'a [f64],
}

#[derive(Clone, Copy, PartialEq)]
enum BoundState {
    Free,
    AtLower,
    AtUpper,
}

impl BoxedLsq<'_> {
    fn solve(&self, mut z: Vec<f64>) -> Result<Vec<f64>> {
        let k = z.len();
        let n_g = self.g.nrows();
        let mut bounds: Vec<BoundState> = (0..k)
            .map(|j| {
                if self.lower[j] == self.upper[j] {
                    z[j] = self.lower[j];
                    BoundState::AtLower
                } else {
                    BoundState::Free
                }
            })
            .collect();
        let fixed: Vec<bool> = (0..k).map(|j| self.lower[j] == self.upper[j]).collect();
        let mut rows: Vec<usize> = Vec::new();
        let cap = QP_ITER_FACTOR * (k + n_g + 10);
        let scale = 1.0 + self.m.abs().max() * (1.0 + self.r.abs().max());

        for _ in 0..cap {
            let zv = DVector::from_column_slice(&z);
            let res = self.m * &zv - self.r;
            let grad = self.m.transpose() * &res;
            let free: Vec<usize> = (0..k).filter(|&j| bounds[j] == BoundState::Free).collect();

            // null space of the active general rows restricted to free variables
            let basis: Vec<Vec<f64>> = if rows.is_empty() {
                (0..free.len()).map(|i| crate::linalg::unit(free.len(), i)).collect()
            } else {
                let sub: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|&i| free.iter().map(|&j| self.g[(i, j)]).collect())
                    .collect();
                kernel_basis(&Matrix::from_rows(&sub, free.len())?).vectors().to_vec()
            };
            let mut step = vec![0.0; k];
            if !basis.is_empty() && !free.is_empty() {
                let zmat = DMatrix::from_fn(free.len(), basis.len(), |i, j| basis[j][i]);
                let mf = DMatrix::from_fn(self.m.nrows(), free.len(), |i, j| self.m[(i, free[j])]);
                let w = lstsq(&(&mf * &zmat), &(-&res))?;
                let pf = &zmat * w;
                for (a, &j) in free.iter().enumerate() {
                    step[j] = pf[a];
                }
            }
            let step_norm = norm_inf(&step);
            if step_norm <= 1e-13 * (1.0 + norm_inf(&z)) {
                // multipliers: grad_F + G_{W,F}ᵀ μ = 0
                let mu = if rows.is_empty() {
                    vec![]
                } else {
                    let gt = DMatrix::from_fn(free.len(), rows.len(), |i, a| self.g[(rows[a], free[i])]);
                    let rhs = DVector::from_iterator(free.len(), free.iter().map(|&j| -grad[j]));
                    lstsq(&gt, &rhs)?.iter().copied().collect()
                };
                let mu_tol = 1e-10 * scale;
                let mut worst: Option<(bool, usize, f64)> = None;
                for (a, &mi) in mu.iter().enumerate() {
                    if mi < -mu_tol && worst.is_none_or(|w| mi < w.2) {
                        worst = Some((true, a, mi));
                    }
                }
                for j in 0..k {
                    if fixed[j] || bounds[j] == BoundState::Free {
                        continue;
                    }
                    let gj = grad[j] + rows.iter().zip(&mu).map(|(&i, m)| self.g[(i, j)] * m).sum::<f64>();
                    let mj = if bounds[j] == BoundState::AtUpper { -gj } else { gj };
                    if mj < -mu_tol && worst.is_none_or(|w| mj < w.2) {
                        worst = Some((false, j, mj));
                    }
                }
                match worst {
                    None => return Ok(z),
                    Some((true, a, _)) => {
                        rows.remove(a);
                    }
                    Some((false, j, _)) => bounds[j] = BoundState::Free,
                }
                continue;
            }

            // ratio test
            let mut alpha = 1.0;
            let mut block: Option<(bool, usize, BoundState)> = None;
            for i in 0..n_g {
                if rows.contains(&i) {
                    continue;
                }
                let row = self.g.row(i);
                let ap = dot(row, &step);
                if ap > 1e-14 * (1.0 + norm2(row) * step_norm) {
                    let t = ((self.h[i] - dot(row, &z)) / ap).max(0.0);
                    if t < alpha {
                        alpha = t;
                        block = Some((true, i, BoundState::Free));
                    }
                }
            }
            for j in 0..k {
                if step[j] > 0.0 && self.upper[j].is_finite() {
                    let t = ((self.upper[j] - z[j]) / step[j]).max(0.0);
                    if t < alpha {
                        alpha = t;
                        block = Some((false, j, BoundState::AtUpper));
                    }
                } else if step[j] < 0.0 && self.lower[j].is_finite() {
                    let t = ((self.lower[j] - z[j]) / step[j]).max(0.0);
                    if t < alpha {
                        alpha = t;
                        block = Some((false, j, BoundState::AtLower));
                    }
                }
            }
            for j in 0..k {
                z[j] += alpha * step[j];
            }
            match block {
                Some((true, i, _)) => rows.push(i),
                Some((false, j, st)) => {
                    bounds[j] = st;
                    z[j] = if st == BoundState::AtUpper { self.upper[j] } else { self.lower[j] };
                }
                None => {}
            }
        }
        Err(Error::ConvergenceFailure(cap))
    }
}

/// Least-squares cost fit `min Σ (cᵀqᵢ − oᵢ)²` over `c ∈ C`.
pub fn fit_c_hat(dataset: &Dataset, obs: &ObservationVector, c_set: &UncertaintySet) -> Result<Vec<f64>> {
    check_dim("observations", dataset.len(), obs.values().len())?;
    check_dim("dataset vs uncertainty", c_set.dimension(), dataset.dimension())?;
    let d = c_set.dimension();
    let n = dataset.len();
    let q = DMatrix::from_fn(n, d, |i, j| dataset.queries()[i][j]);
    if c_set.is_unrestricted() {
        let o = DVector::from_column_slice(obs.values());
        return Ok(lstsq(&q, &o)?.iter().copied().collect());
    }
    let ls = c_set.lifted()?;
    let (z0, _) = ls.center()?;
    if n == 0 {
        return Ok(ls.to_cost(&z0));
    }
    let map = DMatrix::from_fn(d, ls.k(), |i, j| ls.map[(i, j)]);
    let m = &q * map;
    let off = DVector::from_column_slice(&ls.offset);
    let r = DVector::from_column_slice(obs.values()) - &q * off;
    let qp = BoxedLsq {
        m: &m,
        r: &r,
        g: &ls.g,
        h: &ls.h,
        lower: &ls.lower,
        upper: &ls.upper,
    };
    let z = qp.solve(z0)?;
    Ok(ls.to_cost(&z))
}

fn residual(dataset: &Dataset, obs: &ObservationVector, c: &[f64]) -> f64 {
    dataset
        .queries()
        .iter()
        .zip(obs.values())
        .map(|(q, o)| (dot(q, c) - o).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn recover_decision(
    dataset: &Dataset,
    obs: &ObservationVector,
    lp: &StandardLP,
    c_set: &UncertaintySet,
) -> Result<RecoveryResult> {
    check_dim("dataset vs model", lp.n_original(), dataset.dimension())?;
    let c_hat = fit_c_hat(dataset, obs, c_set)?;
    let sol = solve_lp(lp, &lp.embed_cost(&c_hat)?)?;
    let decision = lp.point_to_original(&sol.x)?;
    Ok(RecoveryResult {
        residual: residual(dataset, obs, &c_hat),
        objective_at_c_hat: dot(&c_hat, &decision),
        c_hat,
        decision,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// Largest grid magnitude such that it and every smaller one recovered
    /// an optimal decision; 0 if the first one already failed.
    pub kappa_hat: f64,
    /// Index of the first magnitude with a suboptimal decision.
    pub first_failure: Option<usize>,
    /// Per magnitude: whether the recovered decision was optimal.
    pub optimal: Vec<bool>,
}

/// Whether `x` (original coordinates) is optimal for `c` within a relative
/// tolerance.
pub fn is_optimal_for(lp: &StandardLP, c: &[f64], x: &[f64], tol: f64) -> Result<bool> {
    let best = solve_lp(lp, &lp.embed_cost(c)?)?;
    let best_val = best.objective + lp.cost_offset(c);
    Ok(dot(c, x) <= best_val + tol * (1.0 + best_val.abs()))
}

/// Perturbs noiseless observations along `noise_direction` by each grid
/// magnitude (in increasing order) and records where recovery stops being
/// optimal for `true_c`.
pub fn noise_threshold_probe(
    dataset: &Dataset,
    lp: &StandardLP,
    c_set: &UncertaintySet,
    true_c: &[f64],
    noise_direction: &[f64],
    grid: &[f64],
) -> Result<ProbeReport> {
    check_dim("noise direction", dataset.len(), noise_direction.len())?;
    let clean = dataset.observe(true_c)?;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let mut optimal = vec![false; grid.len()];
    let mut kappa_hat = 0.0;
    let mut first_failure = None;
    for &g in &order {
        let mu = grid[g];
        let noisy: Vec<f64> = clean
            .values()
            .iter()
            .zip(noise_direction)
            .map(|(o, e)| o + mu * e)
            .collect();
        let rec = recover_decision(dataset, &ObservationVector(noisy), lp, c_set)?;
        optimal[g] = is_optimal_for(lp, true_c, &rec.decision, 1e-9)?;
        if optimal[g] && first_failure.is_none() {
            kappa_hat = mu;
        } else if !optimal[g] && first_failure.is_none() {
            first_failure = Some(g);
        }
    }
    Ok(ProbeReport {
        kappa_hat,
        first_failure,
        optimal,
    })
}
