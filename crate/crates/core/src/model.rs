//! Problem data: decision polyhedra, uncertainty sets, datasets and the
//! conversion from inequality form to standard form.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{independent_rows, Matrix};
use crate::lp_solver::simplex::{LinearProgram, LpOutcome, RowKind};

/// Relative tolerance for redundant equality rows.
const REDUNDANT_ROW_TOL: f64 = 1e-9;

/// Decision polyhedron in user-facing inequality form:
/// `{x : ineq_lhs x ≤ ineq_rhs, eq_lhs x = eq_rhs, lower ≤ x ≤ upper}`.
///
/// Upper bounds may be infinite as long as the region stays bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLP {
    n_vars: usize,
    ineq_lhs: Matrix,
    ineq_rhs: Vec<f64>,
    eq_lhs: Matrix,
    eq_rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
    upper_bounds: Vec<f64>,
}

impl GeneralLP {
    pub fn new(
        n_vars: usize,
        ineq_lhs: Matrix,
        ineq_rhs: Vec<f64>,
        eq_lhs: Matrix,
        eq_rhs: Vec<f64>,
        lower_bounds: Vec<f64>,
        upper_bounds: Vec<f64>,
    ) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidModel("n_vars must be positive".into()));
        }
        check_dim("inequality rhs", ineq_lhs.nrows(), ineq_rhs.len())?;
        check_dim("equality rhs", eq_lhs.nrows(), eq_rhs.len())?;
        if ineq_lhs.nrows() > 0 {
            check_dim("inequality columns", n_vars, ineq_lhs.ncols())?;
        }
        if eq_lhs.nrows() > 0 {
            check_dim("equality columns", n_vars, eq_lhs.ncols())?;
        }
        check_dim("lower bounds", n_vars, lower_bounds.len())?;
        check_dim("upper bounds", n_vars, upper_bounds.len())?;
        for j in 0..n_vars {
            if !lower_bounds[j].is_finite() {
                return Err(Error::InvalidModel(format!("lower bound {j} must be finite")));
            }
            if upper_bounds[j].is_nan() || upper_bounds[j] < lower_bounds[j] {
                return Err(Error::InfeasibleModel);
            }
        }
        let g = Self {
            n_vars,
            ineq_lhs: if ineq_lhs.nrows() == 0 { Matrix::zeros(0, n_vars) } else { ineq_lhs },
            ineq_rhs,
            eq_lhs: if eq_lhs.nrows() == 0 { Matrix::zeros(0, n_vars) } else { eq_lhs },
            eq_rhs,
            lower_bounds,
            upper_bounds,
        };
        g.check_feasible_and_bounded()?;
        Ok(g)
    }

    /// Box `[lower, upper]` with extra inequality rows.
    pub fn with_inequalities(ineq_lhs: Matrix, ineq_rhs: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = lower.len();
        Self::new(n, ineq_lhs, ineq_rhs, Matrix::zeros(0, n), vec![], lower, upper)
    }

    fn as_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.n_vars);
        lp.add_rows(&self.ineq_lhs, RowKind::Le, &self.ineq_rhs);
        lp.add_rows(&self.eq_lhs, RowKind::Eq, &self.eq_rhs);
        for j in 0..self.n_vars {
            lp.set_bounds(j, self.lower_bounds[j], self.upper_bounds[j]);
        }
        lp
    }

    fn check_feasible_and_bounded(&self) -> Result<()> {
        let mut lp = self.as_lp();
        if lp.solve()? == LpOutcome::Infeasible {
            return Err(Error::InfeasibleModel);
        }
        for j in 0..self.n_vars {
            if self.upper_bounds[j].is_finite() {
                continue;
            }
            lp.objective.iter_mut().for_each(|c| *c = 0.0);
            lp.objective[j] = -1.0;
            match lp.solve()? {
                LpOutcome::Unbounded => return Err(Error::UnboundedModel(j)),
                LpOutcome::Infeasible => return Err(Error::InfeasibleModel),
                LpOutcome::Optimal(_) => {}
            }
        }
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn ineq_lhs(&self) -> &Matrix {
        &self.ineq_lhs
    }

    pub fn ineq_rhs(&self) -> &[f64] {
        &self.ineq_rhs
    }

    pub fn eq_lhs(&self) -> &Matrix {
        &self.eq_lhs
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    /// Whether `x` satisfies every constraint within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.n_vars {
            return false;
        }
        let bounds_ok = (0..self.n_vars)
            .all(|j| x[j] >= self.lower_bounds[j] - tol && x[j] <= self.upper_bounds[j] + tol);
        let ineq_ok = (0..self.ineq_lhs.nrows())
            .all(|i| crate::linalg::dot(self.ineq_lhs.row(i), x) <= self.ineq_rhs[i] + tol);
        let eq_ok = (0..self.eq_lhs.nrows())
            .all(|i| (crate::linalg::dot(self.eq_lhs.row(i), x) - self.eq_rhs[i]).abs() <= tol);
        bounds_ok && ineq_ok && eq_ok
    }
}

/// `{x ≥ 0 : A x = b}` with `A` of full row rank. The first `n_original`
/// columns are the user's decision coordinates (shifted by `offset`), the
/// remaining ones are slacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardLP {
    a: Matrix,
    b: Vec<f64>,
    n_original: usize,
    offset: Vec<f64>,
}

impl StandardLP {
    /// Validates `{x ≥ 0 : A x = b}` (nonempty, bounded) and drops redundant
    /// rows. All columns are treated as original coordinates.
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let n = a.ncols();
        Self::from_parts(a, b, n, vec![0.0; n])
    }

    fn from_parts(a: Matrix, b: Vec<f64>, n_original: usize, offset: Vec<f64>) -> Result<Self> {
        check_dim("standard form rhs", a.nrows(), b.len())?;
        if a.ncols() == 0 || n_original == 0 {
            return Err(Error::InvalidModel("standard form needs at least one column".into()));
        }
        let n_total = a.ncols();
        let mut lp = LinearProgram::new(n_total);
        lp.add_rows(&a, RowKind::Eq, &b);
        if lp.solve()? == LpOutcome::Infeasible {
            return Err(Error::InfeasibleModel);
        }
        for j in 0..n_total {
            lp.objective.iter_mut().for_each(|c| *c = 0.0);
            lp.objective[j] = -1.0;
            if lp.solve()? == LpOutcome::Unbounded {
                return Err(Error::UnboundedModel(j));
            }
        }
        let keep = independent_rows(&a, REDUNDANT_ROW_TOL);
        let (a, b) = if keep.len() == a.nrows() {
            (a, b)
        } else {
            let b = keep.iter().map(|&i| b[i]).collect();
            (a.select_rows(&keep), b)
        };
        Ok(Self {
            a,
            b,
            n_original,
            offset,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Number of equality rows `m`.
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }

    pub fn n_total(&self) -> usize {
        self.a.ncols()
    }

    /// Standard-form column of original coordinate `j`.
    pub fn embedding(&self, j: usize) -> usize {
        j
    }

    /// Shift applied to original coordinates (their lower bounds).
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Cost on standard-form columns: `c` on original columns, zero on slacks.
    pub fn embed_cost(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_dim("embed_cost", self.n_original, c.len())?;
        let mut out = vec![0.0; self.n_total()];
        out[..self.n_original].copy_from_slice(c);
        Ok(out)
    }

    /// Original-coordinate components of a standard-form vector (linear).
    pub fn project_to_original(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("project_to_original", self.n_total(), v.len())?;
        Ok(v[..self.n_original].to_vec())
    }

    /// Original-coordinate point for a standard-form point (adds the shift).
    pub fn point_to_original(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.project_to_original(x)?;
        for (pi, o) in p.iter_mut().zip(&self.offset) {
            *pi += o;
        }
        Ok(p)
    }

    /// Objective constant picked up by the shift: `cᵀ offset`.
    pub fn cost_offset(&self, c: &[f64]) -> f64 {
        crate::linalg::dot(c, &self.offset)
    }

    /// `{x ≥ 0 : A x = b}` as an LP with zero objective.
    pub(crate) fn feasibility_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.n_total());
        lp.add_rows(&self.a, RowKind::Eq, &self.b);
        lp
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n_total()
            && x.iter().all(|v| *v >= -tol)
            && (0..self.m()).all(|i| {
                (crate::linalg::dot(self.a.row(i), x) - self.b[i]).abs() <= tol * (1.0 + self.b[i].abs())
            })
    }
}

/// Converts to standard form. Columns: original coordinates (shifted to a
/// zero lower bound), then one slack per inequality row, then one slack per
/// finite upper bound.
pub fn standardize(g: &GeneralLP) -> Result<StandardLP> {
    let d = g.n_vars;
    let n_ineq = g.ineq_lhs.nrows();
    let finite_upper: Vec<usize> = (0..d).filter(|&j| g.upper_bounds[j].is_finite()).collect();
    let n_total = d + n_ineq + finite_upper.len();
    let m = g.eq_lhs.nrows() + n_ineq + finite_upper.len();
    let mut a = Matrix::zeros(m, n_total);
    let mut b = Vec::with_capacity(m);
    let shift = &g.lower_bounds;
    let mut row = 0;
    for i in 0..g.eq_lhs.nrows() {
        let r = g.eq_lhs.row(i);
        a.row_mut(row)[..d].copy_from_slice(r);
        b.push(g.eq_rhs[i] - crate::linalg::dot(r, shift));
        row += 1;
    }
    for i in 0..n_ineq {
        let r = g.ineq_lhs.row(i);
        a.row_mut(row)[..d].copy_from_slice(r);
        a[(row, d + i)] = 1.0;
        b.push(g.ineq_rhs[i] - crate::linalg::dot(r, shift));
        row += 1;
    }
    for (k, &j) in finite_upper.iter().enumerate() {
        a[(row, j)] = 1.0;
        a[(row, d + n_ineq + k)] = 1.0;
        b.push(g.upper_bounds[j] - shift[j]);
        row += 1;
    }
    StandardLP::from_parts(a, b, d, shift.clone())
}

/// Lifted description `c = map · z + offset` with
/// `z ∈ {z : g z ≤ h, lower ≤ z ≤ upper}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSet {
    pub map: Matrix,
    pub offset: Vec<f64>,
    pub g: Matrix,
    pub h: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LiftedSet {
    /// Number of lifted variables `z`.
    pub fn k(&self) -> usize {
        self.map.ncols()
    }

    /// Dimension of `c`.
    pub fn d(&self) -> usize {
        self.map.nrows()
    }

    /// Adds variables `(c, z)` at columns `[c_at, c_at + d)` and
    /// `[z_at, z_at + k)` of `lp` together with the defining constraints.
    pub(crate) fn add_to_lp(&self, lp: &mut LinearProgram, c_at: usize, z_at: usize) {
        let n = lp.num_vars();
        let (d, k) = (self.d(), self.k());
        let mut rows = Matrix::zeros(d, n);
        for i in 0..d {
            rows[(i, c_at + i)] = 1.0;
            for j in 0..k {
                rows[(i, z_at + j)] = -self.map[(i, j)];
            }
        }
        lp.add_rows(&rows, RowKind::Eq, &self.offset);
        self.add_z_rows(lp, z_at);
    }

    /// Adds only the `z` constraints for columns `[z_at, z_at + k)`.
    pub(crate) fn add_z_rows(&self, lp: &mut LinearProgram, z_at: usize) {
        let n = lp.num_vars();
        let k = self.k();
        let mut rows = Matrix::zeros(self.g.nrows(), n);
        for i in 0..self.g.nrows() {
            rows.row_mut(i)[z_at..z_at + k].copy_from_slice(self.g.row(i));
        }
        lp.add_rows(&rows, RowKind::Le, &self.h);
        for j in 0..k {
            lp.set_bounds(z_at + j, self.lower[j], self.upper[j]);
        }
    }

    /// Interior shrink by `sigma`: inequality right-hand sides drop by
    /// `sigma`, nondegenerate boxes shrink by `sigma` on both sides.
    pub fn shrink(&self, sigma: f64) -> LiftedSet {
        let mut s = self.clone();
        if sigma <= 0.0 {
            return s;
        }
        for hi in s.h.iter_mut() {
            *hi -= sigma;
        }
        for j in 0..s.k() {
            let (lo, hi) = (s.lower[j], s.upper[j]);
            if lo < hi {
                let (nlo, nhi) = (lo + sigma, hi - sigma);
                if nlo <= nhi {
                    s.lower[j] = nlo;
                    s.upper[j] = nhi;
                } else {
                    let mid = 0.5 * (lo + hi);
                    s.lower[j] = mid;
                    s.upper[j] = mid;
                }
            }
        }
        s
    }
}

/// How an uncertainty set is described.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UncertaintyRepr {
    /// `{c : G c ≤ h}`.
    #[serde(rename = "hpoly")]
    HPolyhedron { g: Matrix, h: Vec<f64> },
    /// `{φᵀα + ε : α_lower ≤ α ≤ α_upper, |ε|∞ ≤ η}` with `φ` of shape `l × d`.
    #[serde(rename = "affine")]
    AffineFactor {
        phi: Matrix,
        alpha_lower: Vec<f64>,
        alpha_upper: Vec<f64>,
        eta: f64,
    },
    /// `ℝᵈ`: no prior knowledge.
    Unrestricted,
}

/// Polyhedral set of admissible cost vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet {
    repr: UncertaintyRepr,
    dimension: usize,
    lifted: Option<LiftedSet>,
    coord_bounds: Vec<(f64, f64)>,
}

impl UncertaintySet {
    pub fn new(repr: UncertaintyRepr, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidModel("uncertainty dimension must be positive".into()));
        }
        let lifted = match &repr {
            UncertaintyRepr::Unrestricted => None,
            UncertaintyRepr::HPolyhedron { g, h } => {
                check_dim("uncertainty h", g.nrows(), h.len())?;
                if g.nrows() > 0 {
                    check_dim("uncertainty G columns", dimension, g.ncols())?;
                }
                Some(LiftedSet {
                    map: Matrix::identity(dimension),
                    offset: vec![0.0; dimension],
                    g: if g.nrows() == 0 { Matrix::zeros(0, dimension) } else { g.clone() },
                    h: h.clone(),
                    lower: vec![f64::NEG_INFINITY; dimension],
                    upper: vec![f64::INFINITY; dimension],
                })
            }
            UncertaintyRepr::AffineFactor {
                phi,
                alpha_lower,
                alpha_upper,
                eta,
            } => {
                let l = phi.nrows();
                check_dim("affine factor columns", dimension, phi.ncols())?;
                check_dim("alpha lower", l, alpha_lower.len())?;
                check_dim("alpha upper", l, alpha_upper.len())?;
                if !(*eta >= 0.0) || !eta.is_finite() {
                    return Err(Error::InvalidModel("eta must be a finite nonnegative number".into()));
                }
                if alpha_lower.iter().zip(alpha_upper).any(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
                    return Err(Error::EmptyUncertaintySet);
                }
                let k = l + dimension;
                let mut map = Matrix::zeros(dimension, k);
                for i in 0..dimension {
                    for a in 0..l {
                        map[(i, a)] = phi[(a, i)];
                    }
                    map[(i, l + i)] = 1.0;
                }
                let mut lower = alpha_lower.clone();
                lower.extend(std::iter::repeat_n(-eta, dimension));
                let mut upper = alpha_upper.clone();
                upper.extend(std::iter::repeat_n(*eta, dimension));
                Some(LiftedSet {
                    map,
                    offset: vec![0.0; dimension],
                    g: Matrix::zeros(0, k),
                    h: vec![],
                    lower,
                    upper,
                })
            }
        };
        let coord_bounds = match &lifted {
            None => vec![(f64::NEG_INFINITY, f64::INFINITY); dimension],
            Some(ls) => coordinate_bounds(ls)?,
        };
        Ok(Self {
            repr,
            dimension,
            lifted,
            coord_bounds,
        })
    }

    pub fn hpolyhedron(g: Matrix, h: Vec<f64>) -> Result<Self> {
        let d = g.ncols();
        Self::new(UncertaintyRepr::HPolyhedron { g, h }, d)
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        check_dim("box upper", d, hi.len())?;
        let mut g = Matrix::zeros(2 * d, d);
        let mut h = Vec::with_capacity(2 * d);
        for i in 0..d {
            g[(2 * i, i)] = 1.0;
            h.push(hi[i]);
            g[(2 * i + 1, i)] = -1.0;
            h.push(-lo[i]);
        }
        Self::hpolyhedron(g, h)
    }

    pub fn affine(phi: Matrix, alpha_lower: Vec<f64>, alpha_upper: Vec<f64>, eta: f64) -> Result<Self> {
        let d = phi.ncols();
        Self::new(
            UncertaintyRepr::AffineFactor {
                phi,
                alpha_lower,
                alpha_upper,
                eta,
            },
            d,
        )
    }

    pub fn unrestricted(dimension: usize) -> Result<Self> {
        Self::new(UncertaintyRepr::Unrestricted, dimension)
    }

    pub fn repr(&self) -> &UncertaintyRepr {
        &self.repr
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_unrestricted(&self) -> bool {
        self.lifted.is_none()
    }

    /// Lifted form; fails for `ℝᵈ`.
    pub fn lifted(&self) -> Result<&LiftedSet> {
        self.lifted.as_ref().ok_or(Error::UnrestrictedUncertaintySet)
    }

    /// Per-coordinate `(min, max)` of `c` over the set.
    pub fn coordinate_bounds(&self) -> &[(f64, f64)] {
        &self.coord_bounds
    }

    /// `max |cᵢ|` over the set.
    pub fn norm_inf(&self) -> f64 {
        self.coord_bounds
            .iter()
            .fold(0.0, |acc, (lo, hi)| acc.max(lo.abs()).max(hi.abs()))
    }

    /// The set shrunk by `sigma` in its lifted description.
    pub fn shrink(&self, sigma: f64) -> Result<Self> {
        let lifted = self.lifted()?.shrink(sigma);
        let coord_bounds = coordinate_bounds(&lifted)?;
        Ok(Self {
            repr: self.repr.clone(),
            dimension: self.dimension,
            lifted: Some(lifted),
            coord_bounds,
        })
    }

    /// Membership test within `tol` (an LP for lifted descriptions).
    pub fn contains(&self, c: &[f64], tol: f64) -> Result<bool> {
        check_dim("uncertainty membership", self.dimension, c.len())?;
        let Some(ls) = &self.lifted else {
            return Ok(true);
        };
        if let UncertaintyRepr::HPolyhedron { .. } = &self.repr {
            return Ok((0..ls.g.nrows()).all(|i| crate::linalg::dot(ls.g.row(i), c) <= ls.h[i] + tol));
        }
        // min Σ(u⁺ + u⁻) s.t. map z + u⁺ - u⁻ = c - offset, z feasible
        let (d, k) = (ls.d(), ls.k());
        let mut lp = LinearProgram::new(k + 2 * d);
        for j in 0..2 * d {
            lp.objective[k + j] = 1.0;
        }
        ls.add_z_rows(&mut lp, 0);
        let mut rows = Matrix::zeros(d, k + 2 * d);
        for i in 0..d {
            rows.row_mut(i)[..k].copy_from_slice(ls.map.row(i));
            rows[(i, k + i)] = 1.0;
            rows[(i, k + d + i)] = -1.0;
        }
        let rhs: Vec<f64> = (0..d).map(|i| c[i] - ls.offset[i]).collect();
        lp.add_rows(&rows, RowKind::Eq, &rhs);
        match lp.solve()? {
            LpOutcome::Optimal(s) => Ok(s.objective <= tol),
            _ => Ok(false),
        }
    }
}

fn coordinate_bounds(ls: &LiftedSet) -> Result<Vec<(f64, f64)>> {
    let (d, k) = (ls.d(), ls.k());
    let mut lp = LinearProgram::new(d + k);
    for j in 0..d {
        lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
    }
    ls.add_to_lp(&mut lp, 0, d);
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let mut range = [0.0; 2];
        for (s, sign) in [1.0, -1.0].into_iter().enumerate() {
            lp.objective.iter_mut().for_each(|c| *c = 0.0);
            lp.objective[i] = sign;
            match lp.solve()? {
                LpOutcome::Optimal(sol) => range[s] = sign * sol.objective,
                LpOutcome::Infeasible => return Err(Error::EmptyUncertaintySet),
                LpOutcome::Unbounded => return Err(Error::UnboundedUncertaintySet(i)),
            }
        }
        out.push((range[0], range[1]));
    }
    if d == 0 {
        let lp = LinearProgram::new(k);
        if lp.solve()? == LpOutcome::Infeasible {
            return Err(Error::EmptyUncertaintySet);
        }
    }
    Ok(out)
}

/// Ordered set of query vectors. Exact duplicates are dropped at
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dimension: usize,
    queries: Vec<Vec<f64>>,
    labels: Vec<Option<String>>,
}

impl Dataset {
    pub fn new(dimension: usize, queries: Vec<Vec<f64>>) -> Result<Self> {
        let labels = vec![None; queries.len()];
        Self::with_labels(dimension, queries, labels)
    }

    pub fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            queries: vec![],
            labels: vec![],
        }
    }

    pub fn with_labels(dimension: usize, queries: Vec<Vec<f64>>, labels: Vec<Option<String>>) -> Result<Self> {
        check_dim("dataset labels", queries.len(), labels.len())?;
        let mut out = Self::empty(dimension);
        for (q, l) in queries.into_iter().zip(labels) {
            check_dim("query", dimension, q.len())?;
            let dup = out
                .queries
                .iter()
                .any(|p| p.iter().zip(&q).all(|(a, b)| a.to_bits() == b.to_bits()));
            if !dup {
                out.queries.push(q);
                out.labels.push(l);
            }
        }
        Ok(out)
    }

    /// Canonical unit vectors `e_i` for the given indices.
    pub fn canonical(dimension: usize, indices: &[usize]) -> Self {
        let queries = indices.iter().map(|&i| crate::linalg::unit(dimension, i)).collect();
        let labels = indices.iter().map(|i| Some(format!("e{i}"))).collect();
        Self::with_labels(dimension, queries, labels).expect("unit vectors have the right length")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn queries(&self) -> &[Vec<f64>] {
        &self.queries
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Dataset without query `i`.
    pub fn without(&self, i: usize) -> Self {
        let mut d = self.clone();
        d.queries.remove(i);
        d.labels.remove(i);
        d
    }

    /// Noiseless observations `cᵀqᵢ`.
    pub fn observe(&self, c: &[f64]) -> Result<ObservationVector> {
        check_dim("observed cost", self.dimension, c.len())?;
        Ok(ObservationVector(
            self.queries.iter().map(|q| crate::linalg::dot(q, c)).collect(),
        ))
    }
}

/// Observed values aligned with a dataset's queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObservationVector(pub Vec<f64>);

impl ObservationVector {
    pub fn new(values: Vec<f64>, dataset: &Dataset) -> Result<Self> {
        check_dim("observations", dataset.len(), values.len())?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex2() -> GeneralLP {
        GeneralLP::new(
            2,
            Matrix::zeros(0, 2),
            vec![],
            Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(),
            vec![1.0],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
        )
        .unwrap()
    }

    #[test]
    fn already_standard_form_is_unchanged() {
        let s = standardize(&simplex2()).unwrap();
        assert_eq!(s.n_total(), 2);
        assert_eq!(s.m(), 1);
        assert_eq!(s.a().row(0), &[1.0, 1.0]);
    }

    #[test]
    fn single_box_gets_one_slack() {
        let g = GeneralLP::with_inequalities(Matrix::zeros(0, 1), vec![], vec![0.0], vec![1.0]).unwrap();
        let s = standardize(&g).unwrap();
        assert_eq!((s.n_original(), s.n_total(), s.m()), (1, 2, 1));
        assert_eq!(s.a().row(0), &[1.0, 1.0]);
        assert_eq!(s.b(), &[1.0]);
    }

    #[test]
    fn hiring_shape_counts() {
        let d = 100;
        let g = GeneralLP::with_inequalities(
            Matrix::from_rows(&[vec![1.0; d]], d).unwrap(),
            vec![20.0],
            vec![0.0; d],
            vec![1.0; d],
        )
        .unwrap();
        let s = standardize(&g).unwrap();
        assert_eq!((s.n_original(), s.n_total(), s.m()), (100, 201, 101));
        let mut x0 = vec![0.0; 201];
        x0[100] = 20.0;
        for v in x0.iter_mut().skip(101) {
            *v = 1.0;
        }
        assert!(s.contains(&x0, 1e-12));
        let c = s.embed_cost(&vec![1.0; 100]).unwrap();
        assert_eq!(c.len(), 201);
        assert!(c[100..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn embed_and_project() {
        let s = standardize(&simplex2()).unwrap();
        assert_eq!(s.embed_cost(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(s.project_to_original(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        let g = GeneralLP::with_inequalities(Matrix::zeros(0, 1), vec![], vec![0.0], vec![1.0]).unwrap();
        let s = standardize(&g).unwrap();
        assert_eq!(s.embed_cost(&[3.0]).unwrap(), vec![3.0, 0.0]);
        assert_eq!(s.project_to_original(&[3.0, 0.5]).unwrap(), vec![3.0]);
        assert!(matches!(s.embed_cost(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lower_bound_shift_roundtrip() {
        let g = GeneralLP::with_inequalities(Matrix::zeros(0, 1), vec![], vec![2.0], vec![5.0]).unwrap();
        let s = standardize(&g).unwrap();
        assert_eq!(s.b(), &[3.0]);
        assert_eq!(s.point_to_original(&[1.0, 2.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn infeasible_and_unbounded_models() {
        let r = GeneralLP::with_inequalities(
            Matrix::from_rows(&[vec![1.0]], 1).unwrap(),
            vec![-1.0],
            vec![0.0],
            vec![1.0],
        );
        assert_eq!(r.unwrap_err(), Error::InfeasibleModel);
        let r = GeneralLP::with_inequalities(Matrix::zeros(0, 1), vec![], vec![0.0], vec![f64::INFINITY]);
        assert_eq!(r.unwrap_err(), Error::UnboundedModel(0));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]], 2).unwrap();
        let s = StandardLP::new(a, vec![1.0, 2.0]).unwrap();
        assert_eq!(s.m(), 1);
    }

    #[test]
    fn uncertainty_sets_validate() {
        let c = UncertaintySet::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c.coordinate_bounds(), &[(-1.0, 1.0), (-1.0, 1.0)]);
        assert!(c.contains(&[0.5, -0.5], 1e-9).unwrap());
        assert!(!c.contains(&[1.5, 0.0], 1e-9).unwrap());

        let empty = UncertaintySet::hpolyhedron(
            Matrix::from_rows(&[vec![1.0], vec![-1.0]], 1).unwrap(),
            vec![0.0, -1.0],
        );
        assert_eq!(empty.unwrap_err(), Error::EmptyUncertaintySet);

        let unbounded = UncertaintySet::hpolyhedron(Matrix::from_rows(&[vec![1.0]], 1).unwrap(), vec![0.0]);
        assert_eq!(unbounded.unwrap_err(), Error::UnboundedUncertaintySet(0));
    }

    #[test]
    fn affine_factor_expansion() {
        let phi = Matrix::from_rows(&[vec![1.0, 2.0]], 2).unwrap();
        let c = UncertaintySet::affine(phi, vec![1.0], vec![2.0], 0.5).unwrap();
        let b = c.coordinate_bounds();
        assert!((b[0].0 - 0.5).abs() < 1e-12 && (b[0].1 - 2.5).abs() < 1e-12);
        assert!((b[1].0 - 1.5).abs() < 1e-12 && (b[1].1 - 4.5).abs() < 1e-12);
        assert!(c.contains(&[1.0, 2.0], 1e-9).unwrap());
        assert!(!c.contains(&[2.5, 1.5], 1e-9).unwrap());
        assert_eq!(c.lifted().unwrap().k(), 3);
    }

    #[test]
    fn dataset_dedups() {
        let d = Dataset::new(2, vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(d.len(), 2);
        assert!(Dataset::new(2, vec![vec![1.0]]).is_err());
        let obs = d.observe(&[0.3, 0.7]).unwrap();
        assert_eq!(obs.values(), &[0.3, 0.7]);
        assert!(ObservationVector::new(vec![1.0], &d).is_err());
    }
}
