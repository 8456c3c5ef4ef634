//! Brute-force polytope geometry for small instances: vertices by basis
//! enumeration, edges, optimality cones, reachable vertices and relevant
//! extreme directions. Used as ground truth by the test suites.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, kernel_basis, norm2, norm_inf, rank, solve, sub, unit, Matrix, SpanBasis};
use crate::lp_solver::simplex::{LinearProgram, LpOutcome, RowKind};
use crate::model::{StandardLP, UncertaintySet};

/// Largest number of candidate bases `C(n_total, m)` the enumeration accepts.
pub const ENUMERATION_BUDGET: f64 = 2e6;
/// Two basic solutions closer than this are the same vertex.
pub const VERTEX_DEDUP_TOL: f64 = 1e-7;
const ZERO_TOL: f64 = 1e-9;
const CONE_TOL: f64 = 1e-9;
const F0_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexCatalog {
    /// Vertices in standard-form coordinates.
    pub vertices: Vec<Vec<f64>>,
    /// Neighboring pairs `(i, j)` with `i < j`.
    pub adjacency: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl VertexCatalog {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }
}

/// Extreme directions of the feasible-direction cone at one vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDescription {
    pub vertex_index: usize,
    /// Unit edge directions in standard-form coordinates.
    pub extreme_directions: Vec<Vec<f64>>,
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn enumerate_vertices(lp: &StandardLP) -> Result<VertexCatalog> {
    let (m, n) = (lp.m(), lp.n_total());
    let required = binomial(n, m);
    if required > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    let a = lp.a();
    let b = lp.b();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    if m == 0 {
        vertices.push(vec![0.0; n]);
    } else {
        let mut idx: Vec<usize> = (0..m).collect();
        loop {
            let cols: Vec<Vec<f64>> = (0..m)
                .map(|i| idx.iter().map(|&j| a[(i, j)]).collect())
                .collect();
            let basis = Matrix::from_rows(&cols, m)?;
            if rank(&basis) == m {
                if let Ok(xb) = solve(&basis, b) {
                    let scale = 1.0 + norm_inf(&xb);
                    if xb.iter().all(|v| *v >= -ZERO_TOL * scale) {
                        let mut x = vec![0.0; n];
                        for (k, &j) in idx.iter().enumerate() {
                            x[j] = if xb[k].abs() <= ZERO_TOL * scale { 0.0 } else { xb[k] };
                        }
                        let dup = vertices
                            .iter()
                            .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= VERTEX_DEDUP_TOL));
                        if !dup {
                            vertices.push(x);
                        }
                    }
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }

    let mut adjacency = Vec::new();
    let mut neighbors = vec![Vec::new(); vertices.len()];
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if are_adjacent(a, &vertices[i], &vertices[j]) {
                adjacency.push((i, j));
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    Ok(VertexCatalog {
        vertices,
        adjacency,
        neighbors,
    })
}

/// Two vertices span an edge iff the constraints tight at both have rank
/// `n − 1`, i.e. `A` restricted to the columns positive at either vertex has
/// a one-dimensional kernel.
fn are_adjacent(a: &Matrix, u: &[f64], v: &[f64]) -> bool {
    let support: Vec<usize> = (0..u.len()).filter(|&k| u[k] > ZERO_TOL || v[k] > ZERO_TOL).collect();
    if support.len() > a.nrows() + 1 {
        return false;
    }
    let cols: Vec<Vec<f64>> = (0..a.nrows())
        .map(|i| support.iter().map(|&k| a[(i, k)]).collect())
        .collect();
    let sub = Matrix::from_rows(&cols, support.len()).expect("consistent shape");
    rank(&sub) + 1 == support.len()
}

pub fn extreme_directions_at(catalog: &VertexCatalog, vertex_index: usize) -> ConeDescription {
    let x = &catalog.vertices[vertex_index];
    let extreme_directions = catalog.neighbors[vertex_index]
        .iter()
        .map(|&j| {
            let mut d = sub(&catalog.vertices[j], x);
            let nrm = norm2(&d);
            d.iter_mut().for_each(|v| *v /= nrm);
            d
        })
        .collect();
    ConeDescription {
        vertex_index,
        extreme_directions,
    }
}

/// Membership of a standard-form cost in the optimality cone.
pub fn cone_contains(cone: &ConeDescription, c: &[f64]) -> Result<bool> {
    if let Some(d) = cone.extreme_directions.first() {
        check_dim("cone_contains", d.len(), c.len())?;
    }
    Ok(cone.extreme_directions.iter().all(|d| dot(c, d) >= -CONE_TOL))
}

/// Vertices minimizing a standard-form cost.
pub fn argmin_vertices(catalog: &VertexCatalog, c: &[f64]) -> Result<Vec<usize>> {
    if let Some(v) = catalog.vertices.first() {
        check_dim("argmin_vertices", v.len(), c.len())?;
    }
    let vals: Vec<f64> = catalog.vertices.iter().map(|v| dot(c, v)).collect();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-8 * (1.0 + min.abs());
    Ok((0..vals.len()).filter(|&i| vals[i] <= min + tol).collect())
}

/// LP over `c ∈ C` (shrunk by `sigma`) with `c` at columns `0..d`.
fn cost_region_lp(c_set: &UncertaintySet, sigma: f64) -> Result<LinearProgram> {
    let d = c_set.dimension();
    if c_set.is_unrestricted() {
        let mut lp = LinearProgram::new(d);
        for j in 0..d {
            lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
        }
        return Ok(lp);
    }
    let ls = c_set.lifted()?.shrink(sigma);
    let mut lp = LinearProgram::new(d + ls.k());
    for j in 0..d {
        lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
    }
    ls.add_to_lp(&mut lp, 0, d);
    Ok(lp)
}

fn original_part(lp: &StandardLP, delta: &[f64], width: usize) -> Vec<f64> {
    let mut row = vec![0.0; width];
    row[..lp.n_original()].copy_from_slice(&delta[..lp.n_original()]);
    row
}

fn feasible(lp: &LinearProgram) -> Result<bool> {
    Ok(!matches!(lp.solve()?, LpOutcome::Infeasible))
}

/// Vertices optimal for some `c ∈ C` (with `C` shrunk by `sigma`).
pub fn reachable_vertices(
    lp: &StandardLP,
    catalog: &VertexCatalog,
    c_set: &UncertaintySet,
    sigma: f64,
) -> Result<Vec<usize>> {
    check_dim("reachable_vertices", lp.n_original(), c_set.dimension())?;
    let base = cost_region_lp(c_set, sigma)?;
    let width = base.num_vars();
    let mut out = Vec::new();
    for i in 0..catalog.len() {
        let cone = extreme_directions_at(catalog, i);
        let mut prog = base.clone();
        for d in &cone.extreme_directions {
            prog.add_row(&original_part(lp, d, width), RowKind::Ge, 0.0);
        }
        if feasible(&prog)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Edge directions `δ` at some vertex whose face `Λ(x) ∩ δ^⊥` meets `C`,
/// in original coordinates, one representative per line.
pub fn relevant_extreme_directions(
    lp: &StandardLP,
    catalog: &VertexCatalog,
    c_set: &UncertaintySet,
    sigma: f64,
) -> Result<Vec<Vec<f64>>> {
    check_dim("relevant_extreme_directions", lp.n_original(), c_set.dimension())?;
    let base = cost_region_lp(c_set, sigma)?;
    let width = base.num_vars();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..catalog.len() {
        let cone = extreme_directions_at(catalog, i);
        let mut with_cone = base.clone();
        for d in &cone.extreme_directions {
            with_cone.add_row(&original_part(lp, d, width), RowKind::Ge, 0.0);
        }
        for d in &cone.extreme_directions {
            let proj = lp.project_to_original(d)?;
            let nrm = norm2(&proj);
            if nrm <= ZERO_TOL {
                continue;
            }
            let canon = canonical_line(&proj, nrm);
            if out.iter().any(|v| v.iter().zip(&canon).all(|(a, b)| (a - b).abs() <= 1e-9)) {
                continue;
            }
            let mut prog = with_cone.clone();
            prog.add_row(&original_part(lp, d, width), RowKind::Eq, 0.0);
            if feasible(&prog)? {
                out.push(canon);
            }
        }
    }
    Ok(out)
}

/// Unit vector with its first nonzero entry positive.
fn canonical_line(v: &[f64], nrm: f64) -> Vec<f64> {
    let sign = v
        .iter()
        .find(|x| x.abs() > 1e-12 * nrm)
        .map_or(1.0, |x| x.signum());
    v.iter().map(|x| sign * x / nrm).collect()
}

/// Span of `{x_i − x_0}` over the given vertices, in original coordinates.
pub fn dir_of_vertices(lp: &StandardLP, catalog: &VertexCatalog, indices: &[usize]) -> Result<SpanBasis> {
    let d = lp.n_original();
    let Some(&first) = indices.first() else {
        return Ok(SpanBasis::empty(d));
    };
    let x0 = lp.project_to_original(&catalog.vertices[first])?;
    let diffs = indices[1..]
        .iter()
        .map(|&i| Ok(sub(&lp.project_to_original(&catalog.vertices[i])?, &x0)))
        .collect::<Result<Vec<_>>>()?;
    SpanBasis::from_vectors(d, &diffs)
}

/// `dim` and span of `dir(X*(C))` computed from reachable vertices.
pub fn reachable_dir(lp: &StandardLP, catalog: &VertexCatalog, c_set: &UncertaintySet, sigma: f64) -> Result<SpanBasis> {
    let reach = reachable_vertices(lp, catalog, c_set, sigma)?;
    dir_of_vertices(lp, catalog, &reach)
}

/// Span of the coordinates that are positive somewhere on `X`
/// (standard-form coordinates).
pub fn compute_f0(lp: &StandardLP) -> Result<SpanBasis> {
    let n = lp.n_total();
    let mut prog = lp.feasibility_lp();
    let mut units = Vec::new();
    for i in 0..n {
        prog.objective.iter_mut().for_each(|c| *c = 0.0);
        prog.objective[i] = -1.0;
        match prog.solve()? {
            LpOutcome::Optimal(s) if -s.objective > F0_TOL => units.push(unit(n, i)),
            LpOutcome::Optimal(_) => {}
            _ => return Err(Error::NumericalFailure("F0 probe LP failed".into())),
        }
    }
    SpanBasis::from_vectors(n, &units)
}

/// `F₀ ∩ Ker A` projected to original coordinates.
pub fn f0_cap_kernel(lp: &StandardLP) -> Result<SpanBasis> {
    let n = lp.n_total();
    let f0 = compute_f0(lp)?;
    let in_f0: Vec<bool> = (0..n)
        .map(|i| f0.contains(&unit(n, i)))
        .collect::<Result<_>>()?;
    let mut rows = lp.a().to_rows();
    for (i, inside) in in_f0.iter().enumerate() {
        if !inside {
            rows.push(unit(n, i));
        }
    }
    let kernel = kernel_basis(&Matrix::from_rows(&rows, n)?);
    let projected = kernel
        .vectors()
        .iter()
        .map(|v| lp.project_to_original(v))
        .collect::<Result<Vec<_>>>()?;
    SpanBasis::from_vectors(lp.n_original(), &projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{standardize, GeneralLP};

    fn simplex2() -> StandardLP {
        StandardLP::new(Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(), vec![1.0]).unwrap()
    }

    fn cube() -> StandardLP {
        let g = GeneralLP::with_inequalities(Matrix::zeros(0, 3), vec![], vec![0.0; 3], vec![1.0; 3]).unwrap();
        standardize(&g).unwrap()
    }

    fn point() -> StandardLP {
        StandardLP::new(Matrix::identity(2), vec![0.5, 0.25]).unwrap()
    }

    fn tilted() -> UncertaintySet {
        // c₂ − c₁ ≥ 0.1 inside [−1, 1]²
        UncertaintySet::hpolyhedron(
            Matrix::from_rows(
                &[
                    vec![1.0, 0.0],
                    vec![-1.0, 0.0],
                    vec![0.0, 1.0],
                    vec![0.0, -1.0],
                    vec![1.0, -1.0],
                ],
                2,
            )
            .unwrap(),
            vec![1.0, 1.0, 1.0, 1.0, -0.1],
        )
        .unwrap()
    }

    #[test]
    fn vertex_counts() {
        let s = enumerate_vertices(&simplex2()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.adjacency, vec![(0, 1)]);
        let c = enumerate_vertices(&cube()).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.adjacency.len(), 12);
        let p = enumerate_vertices(&point()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.adjacency.is_empty());
    }

    #[test]
    fn budget_guard() {
        let d = 30;
        let g = GeneralLP::with_inequalities(
            Matrix::from_rows(&[vec![1.0; d]], d).unwrap(),
            vec![5.0],
            vec![0.0; d],
            vec![1.0; d],
        )
        .unwrap();
        let lp = standardize(&g).unwrap();
        assert!(matches!(enumerate_vertices(&lp), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn cones_and_argmins() {
        let lp = simplex2();
        let cat = enumerate_vertices(&lp).unwrap();
        let i = cat.vertices.iter().position(|v| v == &vec![1.0, 0.0]).unwrap();
        let cone = extreme_directions_at(&cat, i);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(cone.extreme_directions.len(), 1);
        assert!((cone.extreme_directions[0][0] + r).abs() < 1e-12);
        assert!((cone.extreme_directions[0][1] - r).abs() < 1e-12);
        assert!(cone_contains(&cone, &[1.0, 2.0]).unwrap());
        assert!(!cone_contains(&cone, &[2.0, 1.0]).unwrap());
        assert!(cone_contains(&cone, &[0.0, 0.0]).unwrap());
        assert_eq!(argmin_vertices(&cat, &[1.0, 2.0]).unwrap(), vec![i]);
        assert_eq!(argmin_vertices(&cat, &[1.0, 1.0]).unwrap().len(), 2);

        let lp = cube();
        let cat = enumerate_vertices(&lp).unwrap();
        let c = lp.embed_cost(&[-1.0, 0.0, 0.0]).unwrap();
        let best = argmin_vertices(&cat, &c).unwrap();
        assert_eq!(best.len(), 4);
        assert!(best.iter().all(|&i| cat.vertices[i][0] == 1.0));
        let origin = cat.vertices.iter().position(|v| v[..3] == [0.0, 0.0, 0.0]).unwrap();
        let cone = extreme_directions_at(&cat, origin);
        let mut dirs: Vec<Vec<f64>> = cone
            .extreme_directions
            .iter()
            .map(|d| {
                let p = lp.project_to_original(d).unwrap();
                let n = norm2(&p);
                p.iter().map(|v| v / n).collect()
            })
            .collect();
        dirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(dirs.len(), 3);
        for (k, d) in dirs.iter().enumerate() {
            assert!(d.iter().zip(unit(3, k)).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn reachable_and_relevant() {
        let lp = simplex2();
        let cat = enumerate_vertices(&lp).unwrap();
        let bx = UncertaintySet::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(reachable_vertices(&lp, &cat, &bx, 0.0).unwrap().len(), 2);
        let rel = relevant_extreme_directions(&lp, &cat, &bx, 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(rel.len(), 1);
        assert!((rel[0][0] - r).abs() < 1e-12 && (rel[0][1] + r).abs() < 1e-12);

        let t = tilted();
        let reach = reachable_vertices(&lp, &cat, &t, 0.0).unwrap();
        assert_eq!(reach.len(), 1);
        assert_eq!(cat.vertices[reach[0]], vec![1.0, 0.0]);
        assert!(relevant_extreme_directions(&lp, &cat, &t, 0.0).unwrap().is_empty());

        let lp = point();
        let cat = enumerate_vertices(&lp).unwrap();
        assert!(relevant_extreme_directions(&lp, &cat, &bx, 0.0).unwrap().is_empty());
        assert_eq!(reachable_vertices(&lp, &cat, &bx, 0.0).unwrap(), vec![0]);
    }

    #[test]
    fn f0_examples() {
        assert_eq!(compute_f0(&simplex2()).unwrap().dim(), 2);
        let lp = StandardLP::new(Matrix::identity(2), vec![0.0, 1.0]).unwrap();
        let f0 = compute_f0(&lp).unwrap();
        assert_eq!(f0.dim(), 1);
        assert!(f0.contains(&[0.0, 1.0]).unwrap());
        let k = f0_cap_kernel(&simplex2()).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[1.0, -1.0]).unwrap());
    }
}
