//! Vertex-returning LP solves over [`StandardLP`] and interior points of
//! polyhedra.

pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, Matrix};
use crate::model::{LiftedSet, StandardLP, UncertaintySet};
use simplex::{LinearProgram, LpOutcome, RowKind};

pub use simplex::LpSolution;

/// Basic optimal solution of `min cᵀx` over `{x ≥ 0 : Ax = b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic columns, ascending.
    pub basis_indices: Vec<usize>,
    /// `λ` with `c = Aᵀλ + s`.
    pub duals: Vec<f64>,
    /// `s = c − Aᵀλ`.
    pub reduced_costs: Vec<f64>,
}

pub fn solve_lp(lp: &StandardLP, c: &[f64]) -> Result<VertexSolution> {
    check_dim("solve_lp cost", lp.n_total(), c.len())?;
    let mut prog = lp.feasibility_lp();
    prog.objective.copy_from_slice(c);
    match prog.solve()? {
        LpOutcome::Optimal(s) => {
            let mut basis_indices = s.basic_structurals;
            basis_indices.sort_unstable();
            let mut x = s.x;
            // Nonbasic columns rest exactly at zero; clip round-off on basics.
            for v in x.iter_mut() {
                if *v < 0.0 && *v > -1e-12 {
                    *v = 0.0;
                }
            }
            Ok(VertexSolution {
                x,
                objective: s.objective,
                basis_indices,
                duals: s.duals,
                reduced_costs: s.reduced_costs,
            })
        }
        LpOutcome::Infeasible => Err(Error::NumericalFailure(
            "standard-form polytope reported infeasible".into(),
        )),
        LpOutcome::Unbounded => Err(Error::NumericalFailure(
            "standard-form polytope reported unbounded".into(),
        )),
    }
}

/// Cap on the inscribed radius so flat or unbounded directions stay finite.
const RADIUS_CAP: f64 = 1e6;

/// Point of `{v : G v ≤ h}` maximizing the smallest normalized slack.
pub fn find_point(g: &Matrix, h: &[f64]) -> Result<Vec<f64>> {
    check_dim("find_point rhs", g.nrows(), h.len())?;
    let n = g.ncols();
    chebyshev(g, h, &vec![f64::NEG_INFINITY; n], &vec![f64::INFINITY; n]).map(|(v, _)| v)
}

/// Chebyshev-style center of `{z : G z ≤ h, lower ≤ z ≤ upper}`. Fixed
/// coordinates (`lower == upper`) do not limit the radius.
pub(crate) fn chebyshev(g: &Matrix, h: &[f64], lower: &[f64], upper: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = lower.len();
    let r = n;
    let mut lp = LinearProgram::new(n + 1);
    lp.objective[r] = -1.0;
    lp.set_bounds(r, 0.0, RADIUS_CAP);
    for j in 0..n {
        lp.set_bounds(j, lower[j], upper[j]);
    }
    for i in 0..g.nrows() {
        let mut row = g.row(i).to_vec();
        row.push(norm2(g.row(i)));
        lp.add_row(&row, RowKind::Le, h[i]);
    }
    for j in 0..n {
        if lower[j] < upper[j] {
            let mut row = vec![0.0; n + 1];
            row[j] = 1.0;
            row[r] = -1.0;
            if lower[j].is_finite() {
                lp.add_row(&row, RowKind::Ge, lower[j]);
            }
            row[r] = 1.0;
            if upper[j].is_finite() {
                lp.add_row(&row, RowKind::Le, upper[j]);
            }
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal(mut s) => {
            let radius = s.x.pop().unwrap_or(0.0);
            Ok((s.x, radius))
        }
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Err(Error::NumericalFailure("capped radius LP unbounded".into())),
    }
}

impl LiftedSet {
    /// Center `z` of the lifted polyhedron and its radius.
    pub fn center(&self) -> Result<(Vec<f64>, f64)> {
        chebyshev(&self.g, &self.h, &self.lower, &self.upper)
    }

    /// `map · z + offset`.
    pub fn to_cost(&self, z: &[f64]) -> Vec<f64> {
        (0..self.d())
            .map(|i| dot(self.map.row(i), z) + self.offset[i])
            .collect()
    }
}

impl UncertaintySet {
    /// Interior-most point of the set (see [`find_point`]); the origin for `ℝᵈ`.
    pub fn find_point(&self) -> Result<Vec<f64>> {
        if self.is_unrestricted() {
            return Ok(vec![0.0; self.dimension()]);
        }
        let ls = self.lifted()?;
        let (z, _) = ls.center()?;
        Ok(ls.to_cost(&z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex2() -> StandardLP {
        StandardLP::new(Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(), vec![1.0]).unwrap()
    }

    #[test]
    fn simplex2_cheaper_vertex() {
        let s = solve_lp(&simplex2(), &[1.0, 2.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 0.0]);
        assert_eq!(s.objective, 1.0);
        assert_eq!(s.duals, vec![1.0]);
        assert_eq!(s.reduced_costs, vec![0.0, 1.0]);
        assert_eq!(s.basis_indices, vec![0]);
    }

    #[test]
    fn simplex2_tie_is_basic() {
        let s = solve_lp(&simplex2(), &[5.0, 5.0]).unwrap();
        assert_eq!(s.objective, 5.0);
        assert!(s.x == vec![1.0, 0.0] || s.x == vec![0.0, 1.0]);
        let again = solve_lp(&simplex2(), &[5.0, 5.0]).unwrap();
        assert_eq!(s.basis_indices, again.basis_indices);
    }

    #[test]
    fn unit_cube() {
        let g = crate::model::GeneralLP::with_inequalities(
            Matrix::zeros(0, 3),
            vec![],
            vec![0.0; 3],
            vec![1.0; 3],
        )
        .unwrap();
        let lp = crate::model::standardize(&g).unwrap();
        let c = lp.embed_cost(&[-1.0, 2.0, 0.0]).unwrap();
        let s = solve_lp(&lp, &c).unwrap();
        let x = lp.project_to_original(&s.x).unwrap();
        assert_eq!(s.objective, -1.0);
        assert_eq!(&x[..2], &[1.0, 0.0]);
        assert!(x[2] == 0.0 || x[2] == 1.0);
    }

    #[test]
    fn chebyshev_points() {
        let bx = Matrix::from_rows(
            &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            2,
        )
        .unwrap();
        let p = find_point(&bx, &[1.0; 4]).unwrap();
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);

        let g = bx.vstack(&Matrix::from_rows(&[vec![1.0, -1.0]], 2).unwrap()).unwrap();
        let p = find_point(&g, &[1.0, 1.0, 1.0, 1.0, -0.1]).unwrap();
        assert!(p[1] - p[0] > 0.1);

        let empty = Matrix::from_rows(&[vec![1.0], vec![-1.0]], 1).unwrap();
        assert_eq!(find_point(&empty, &[0.0, -1.0]).unwrap_err(), Error::Infeasible);
    }
}
