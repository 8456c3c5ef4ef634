//! Sufficiency tests and query selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::directions::DirectionBasis;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, inverse, norm_inf, Matrix, SpanBasis};
use crate::lp_solver::simplex::{LinearProgram, LpOutcome, RowKind};
use crate::model::{Dataset, LiftedSet, StandardLP, UncertaintySet};
use crate::oracle::{argmin_vertices, enumerate_vertices, f0_cap_kernel, VertexCatalog};

/// Largest accepted `‖Q‖∞ ‖Q⁻¹‖∞`.
pub const MAX_CONDITION: f64 = 1e8;
/// Relative threshold on `|(Q⁻¹v)ᵢ|` for buying query `i`.
pub const TOL_SELECT: f64 = 1e-8;

fn query_span(dataset: &Dataset) -> Result<SpanBasis> {
    SpanBasis::from_vectors(dataset.dimension(), dataset.queries())
}

/// Whether every direction lies in the span of the queries.
pub fn is_sufficient(dataset: &Dataset, dirs: &DirectionBasis) -> Result<bool> {
    Ok(unspanned_direction(dataset, &dirs.basis)?.is_none())
}

/// Component of the first direction not spanned by the dataset, if any.
pub fn unspanned_direction(dataset: &Dataset, dirs: &SpanBasis) -> Result<Option<Vec<f64>>> {
    check_dim("dataset vs directions", dirs.ambient(), dataset.dimension())?;
    let span = query_span(dataset)?;
    for v in dirs.vectors() {
        if !span.contains(v)? {
            return Ok(Some(span.project_onto_complement(v)?));
        }
    }
    Ok(None)
}

/// Sufficiency when nothing is known about the cost (`C = ℝᵈ`).
pub fn is_sufficient_unrestricted(dataset: &Dataset, lp: &StandardLP) -> Result<bool> {
    check_dim("dataset vs model", lp.n_original(), dataset.dimension())?;
    let dirs = f0_cap_kernel(lp)?;
    Ok(unspanned_direction(dataset, &dirs)?.is_none())
}

/// Square, invertible set of allowed queries (the columns of `q`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryBasis {
    q: Matrix,
    inverse: Matrix,
}

impl QueryBasis {
    pub fn new(q: Matrix) -> Result<Self> {
        check_dim("query basis (square)", q.nrows(), q.ncols())?;
        let inv = inverse(&q).map_err(|_| Error::IllConditionedQueryBasis(f64::INFINITY))?;
        let cond = q.norm_inf() * inv.norm_inf();
        if !(cond < MAX_CONDITION) {
            return Err(Error::IllConditionedQueryBasis(cond));
        }
        let prod = inv.mul(&q)?;
        let n = q.nrows();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                if (prod[(i, j)] - target).abs() > 1e-8 {
                    return Err(Error::IllConditionedQueryBasis(cond));
                }
            }
        }
        Ok(Self { q, inverse: inv })
    }

    /// Canonical basis `e₁ … e_d`.
    pub fn canonical(d: usize) -> Self {
        Self {
            q: Matrix::identity(d),
            inverse: Matrix::identity(d),
        }
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        Self::new(Matrix::from_columns(columns, n)?)
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn query(&self, i: usize) -> Vec<f64> {
        self.q.column(i)
    }
}

/// Indices `i` such that some direction has a nonzero `i`-th coordinate in
/// the query basis.
pub fn select_query_indices(dirs: &DirectionBasis, qb: &QueryBasis) -> Result<Vec<usize>> {
    let d = qb.dim();
    check_dim("directions vs query basis", d, dirs.basis.ambient())?;
    let mut used = vec![false; d];
    for v in dirs.raw_vectors() {
        let w = qb.inverse.mul_vec(v)?;
        let scale = norm_inf(&w);
        if scale == 0.0 {
            continue;
        }
        for (i, wi) in w.iter().enumerate() {
            if wi.abs() > TOL_SELECT * scale {
                used[i] = true;
            }
        }
    }
    Ok((0..d).filter(|&i| used[i]).collect())
}

pub fn select_queries(dirs: &DirectionBasis, qb: &QueryBasis) -> Result<Dataset> {
    let idx = select_query_indices(dirs, qb)?;
    let queries = idx.iter().map(|&i| qb.query(i)).collect();
    let labels = idx.iter().map(|i| Some(format!("q{i}"))).collect();
    Dataset::with_labels(qb.dim(), queries, labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum McOutcome {
    Pass,
    CounterexamplePair { c: Vec<f64>, c_prime: Vec<f64> },
}

/// Hit-and-run walker over a lifted polytope.
struct Walker<'a> {
    ls: &'a LiftedSet,
    z: Vec<f64>,
}

impl Walker<'_> {
    fn step(&mut self, rng: &mut ChaCha8Rng) {
        let k = self.ls.k();
        let mut u: Vec<f64> = (0..k)
            .map(|j| {
                if self.ls.lower[j] < self.ls.upper[j] {
                    StandardNormal.sample(rng)
                } else {
                    0.0
                }
            })
            .collect();
        let nrm = crate::linalg::norm2(&u);
        if nrm == 0.0 {
            return;
        }
        u.iter_mut().for_each(|v| *v /= nrm);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut clip = |a: f64, slack: f64| {
            // a·t ≤ slack
            if a > 1e-14 {
                hi = hi.min(slack / a);
            } else if a < -1e-14 {
                lo = lo.max(slack / a);
            }
        };
        for i in 0..self.ls.g.nrows() {
            let row = self.ls.g.row(i);
            clip(dot(row, &u), self.ls.h[i] - dot(row, &self.z));
        }
        for j in 0..k {
            if u[j] != 0.0 {
                clip(u[j], self.ls.upper[j] - self.z[j]);
                clip(-u[j], self.z[j] - self.ls.lower[j]);
            }
        }
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return;
        }
        let t = rng.random_range(lo..=hi);
        for j in 0..k {
            self.z[j] += t * u[j];
        }
    }
}

/// Random falsification of sufficiency: samples `c ∈ C`, moves within the
/// slice of `C` with the same projection on the span of the dataset, and
/// compares full optimal vertex sets.
pub fn monte_carlo_sufficiency_check(
    dataset: &Dataset,
    lp: &StandardLP,
    c_set: &UncertaintySet,
    trials: usize,
    seed: u64,
) -> Result<McOutcome> {
    check_dim("dataset vs model", lp.n_original(), dataset.dimension())?;
    check_dim("uncertainty vs model", lp.n_original(), c_set.dimension())?;
    if trials == 0 {
        return Err(Error::ConfigError("trials must be at least 1".into()));
    }
    let catalog = enumerate_vertices(lp)?;
    let ls = c_set.lifted()?;
    let (z0, _) = ls
        .center()
        .map_err(|e| Error::SamplingFailure(format!("no interior point: {e}")))?;
    let span = query_span(dataset)?;
    let d = lp.n_original();
    let k = ls.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walker = Walker { ls, z: z0 };
    for _ in 0..10 * k.max(1) {
        walker.step(&mut rng);
    }

    // slice LP over (c, z): c ∈ C, uᵀc fixed for every u in the span basis
    let mut base = LinearProgram::new(d + k);
    for j in 0..d {
        base.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
    }
    ls.add_to_lp(&mut base, 0, d);
    let first_span_row = base.num_rows();
    for u in span.vectors() {
        let mut row = vec![0.0; d + k];
        row[..d].copy_from_slice(u);
        base.add_row(&row, RowKind::Eq, 0.0);
    }

    for _ in 0..trials {
        for _ in 0..3 {
            walker.step(&mut rng);
        }
        let c = ls.to_cost(&walker.z);
        let reference = argmin_set(lp, &catalog, &c)?;
        let mut prog = base.clone();
        for (r, u) in span.vectors().iter().enumerate() {
            prog.rhs[first_span_row + r] = dot(u, &c);
        }
        for j in 0..d {
            prog.objective[j] = StandardNormal.sample(&mut rng);
        }
        let c_far = match prog.solve()? {
            LpOutcome::Optimal(s) => s.x[..d].to_vec(),
            _ => continue,
        };
        for t in [1.0, 0.75, 0.5, 0.25] {
            let cp: Vec<f64> = c.iter().zip(&c_far).map(|(a, b)| a + t * (b - a)).collect();
            if argmin_set(lp, &catalog, &cp)? != reference {
                return Ok(McOutcome::CounterexamplePair { c, c_prime: cp });
            }
        }
    }
    Ok(McOutcome::Pass)
}

fn argmin_set(lp: &StandardLP, catalog: &VertexCatalog, c: &[f64]) -> Result<Vec<usize>> {
    argmin_vertices(catalog, &lp.embed_cost(c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::{compute_dir_basis, CsMilpConfig};
    use crate::linalg::unit;

    fn simplex2() -> StandardLP {
        StandardLP::new(Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(), vec![1.0]).unwrap()
    }

    fn dirs(vs: &[Vec<f64>]) -> DirectionBasis {
        let d = vs.first().map_or(2, |v| v.len());
        DirectionBasis {
            anchor_x0: vec![0.0; d],
            basis: SpanBasis::from_vectors(d, vs).unwrap(),
            iterations: vs.len(),
            seed: 0,
        }
    }

    #[test]
    fn sufficiency_examples() {
        let dv = dirs(&[vec![1.0, -1.0]]);
        assert!(is_sufficient(&Dataset::canonical(2, &[0, 1]), &dv).unwrap());
        assert!(!is_sufficient(&Dataset::canonical(2, &[0]), &dv).unwrap());
        let r = unspanned_direction(&Dataset::canonical(2, &[0]), &dv.basis).unwrap().unwrap();
        assert!(r[0].abs() < 1e-12 && r[1].abs() > 0.5);
        assert!(is_sufficient(&Dataset::empty(2), &dirs(&[])).unwrap());
    }

    #[test]
    fn unrestricted_examples() {
        let lp = simplex2();
        assert!(is_sufficient_unrestricted(&Dataset::new(2, vec![vec![1.0, -1.0]]).unwrap(), &lp).unwrap());
        assert!(!is_sufficient_unrestricted(&Dataset::new(2, vec![vec![1.0, 1.0]]).unwrap(), &lp).unwrap());
        let point = StandardLP::new(Matrix::identity(2), vec![0.2, 0.3]).unwrap();
        assert!(is_sufficient_unrestricted(&Dataset::empty(2), &point).unwrap());
    }

    #[test]
    fn selection_examples() {
        let dv = dirs(&[vec![1.0, -1.0]]);
        let ds = select_queries(&dv, &QueryBasis::canonical(2)).unwrap();
        assert_eq!(ds.queries(), &[unit(2, 0), unit(2, 1)]);
        assert!(select_queries(&dirs(&[]), &QueryBasis::canonical(2)).unwrap().is_empty());
        let qb = QueryBasis::from_columns(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        let ds = select_queries(&dv, &qb).unwrap();
        assert_eq!(ds.queries(), &[vec![1.0, -1.0]]);
        assert!(matches!(
            QueryBasis::from_columns(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-12]]),
            Err(Error::IllConditionedQueryBasis(_))
        ));
    }

    #[test]
    fn monte_carlo_examples() {
        let lp = simplex2();
        let c = UncertaintySet::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let cfg = CsMilpConfig::derive(&lp, &c).unwrap();
        let db = compute_dir_basis(&lp, &c, &cfg, 3).unwrap();
        let ds = select_queries(&db, &QueryBasis::canonical(2)).unwrap();
        assert_eq!(monte_carlo_sufficiency_check(&ds, &lp, &c, 1000, 11).unwrap(), McOutcome::Pass);
        match monte_carlo_sufficiency_check(&Dataset::empty(2), &lp, &c, 1000, 11).unwrap() {
            McOutcome::CounterexamplePair { c, c_prime } => assert_ne!(c, c_prime),
            McOutcome::Pass => panic!("empty dataset should be falsified"),
        }
        let point = UncertaintySet::boxed(&[0.2, 0.5], &[0.2, 0.5]).unwrap();
        assert_eq!(
            monte_carlo_sufficiency_check(&Dataset::empty(2), &lp, &point, 50, 1).unwrap(),
            McOutcome::Pass
        );
    }
}
