//! Dense linear algebra: a row-major matrix, orthonormal span bases kept by
//! modified Gram–Schmidt with one reorthogonalization pass, kernels and
//! small square solves.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// Default relative tolerance used to decide rank growth.
pub const DEFAULT_TOL_RANK: f64 = 1e-8;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_dim("matrix row length", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            check_dim("matrix column length", rows, col.len())?;
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("matrix-vector product", self.cols, v.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `selfᵀ v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("transposed matrix-vector product", self.rows, v.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                axpy(*vi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim("matrix product", self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a != 0.0 {
                    let (src, dst) = (other.row(k), &mut out.data[i * other.cols..(i + 1) * other.cols]);
                    axpy(a, src, dst);
                }
            }
        }
        Ok(out)
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Appends the rows of `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows > 0 && other.rows > 0 {
            check_dim("vstack columns", self.cols, other.cols)?;
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(&rows, cols).map_err(serde::de::Error::custom)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// y += a * x
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Orthonormal basis of a subspace together with the raw vectors that
/// generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanBasis {
    ambient: usize,
    vectors: Vec<Vec<f64>>,
    source_vectors: Vec<Vec<f64>>,
    tol_rank: f64,
}

/// Result of [`SpanBasis::extend`].
#[derive(Debug, Clone, PartialEq)]
pub enum Extension {
    Extended(SpanBasis),
    InSpan,
}

impl SpanBasis {
    pub fn empty(ambient: usize) -> Self {
        Self::with_tolerance(ambient, DEFAULT_TOL_RANK)
    }

    pub fn with_tolerance(ambient: usize, tol_rank: f64) -> Self {
        Self {
            ambient,
            vectors: Vec::new(),
            source_vectors: Vec::new(),
            tol_rank,
        }
    }

    /// Greedily orthonormalizes `vectors`, skipping those already in the span.
    pub fn from_vectors(ambient: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis = Self::empty(ambient);
        for v in vectors {
            if let Extension::Extended(next) = basis.extend(v)? {
                basis = next;
            }
        }
        Ok(basis)
    }

    /// The full space ℝⁿ with the canonical basis.
    pub fn full(ambient: usize) -> Self {
        let vectors: Vec<Vec<f64>> = (0..ambient).map(|i| unit(ambient, i)).collect();
        Self {
            ambient,
            source_vectors: vectors.clone(),
            vectors,
            tol_rank: DEFAULT_TOL_RANK,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn source_vectors(&self) -> &[Vec<f64>] {
        &self.source_vectors
    }

    pub fn tol_rank(&self) -> f64 {
        self.tol_rank
    }

    /// Residual of `v` after removing its components along the basis, with
    /// one reorthogonalization pass.
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for u in &self.vectors {
                let c = dot(u, &r);
                axpy(-c, u, &mut r);
            }
        }
        r
    }

    /// Returns the basis grown by `v`, or [`Extension::InSpan`] when the
    /// residual of `v` is within tolerance. `self` is left untouched.
    pub fn extend(&self, v: &[f64]) -> Result<Extension> {
        check_dim("extend_basis", self.ambient, v.len())?;
        let r = self.residual(v);
        let rn = norm2(&r);
        if rn <= self.tol_rank * norm2(v).max(1.0) || self.dim() == self.ambient {
            return Ok(Extension::InSpan);
        }
        let mut next = self.clone();
        next.vectors.push(r.iter().map(|x| x / rn).collect());
        next.source_vectors.push(v.to_vec());
        Ok(Extension::Extended(next))
    }

    pub fn project_onto_complement(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("project_onto_complement", self.ambient, v.len())?;
        Ok(self.residual(v))
    }

    pub fn project_onto_span(&self, v: &[f64]) -> Result<Vec<f64>> {
        let r = self.project_onto_complement(v)?;
        Ok(sub(v, &r))
    }

    /// Whether `v` lies in the span within tolerance.
    pub fn contains(&self, v: &[f64]) -> Result<bool> {
        let r = self.project_onto_complement(v)?;
        Ok(norm2(&r) <= self.tol_rank * norm2(v).max(1.0))
    }

    /// Mutual containment of the two spans.
    pub fn subspace_equal(&self, other: &SpanBasis) -> bool {
        if self.ambient != other.ambient || self.dim() != other.dim() {
            return false;
        }
        let within = |a: &SpanBasis, b: &SpanBasis| {
            a.vectors
                .iter()
                .all(|u| b.contains(u).unwrap_or(false))
        };
        within(self, other) && within(other, self)
    }

    /// Whether every vector of `self` lies in `other`.
    pub fn is_subspace_of(&self, other: &SpanBasis) -> bool {
        self.ambient == other.ambient
            && self
                .vectors
                .iter()
                .all(|u| other.contains(u).unwrap_or(false))
    }
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Reduced row echelon form with partial pivoting. Returns the reduced
/// matrix and the pivot columns, in order.
fn rref(m: &Matrix, tol: f64) -> (Matrix, Vec<usize>) {
    let mut r = m.clone();
    let (rows, cols) = (r.nrows(), r.ncols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (best, val) = (row..rows)
            .map(|i| (i, r[(i, col)].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            for i in row..rows {
                r[(i, col)] = 0.0;
            }
            continue;
        }
        if best != row {
            for j in 0..cols {
                let tmp = r[(row, j)];
                r[(row, j)] = r[(best, j)];
                r[(best, j)] = tmp;
            }
        }
        let p = r[(row, col)];
        for j in 0..cols {
            r[(row, j)] /= p;
        }
        let pivot_row = r.row(row).to_vec();
        for i in 0..rows {
            if i != row {
                let f = r[(i, col)];
                if f != 0.0 {
                    axpy(-f, &pivot_row, r.row_mut(i));
                    r[(i, col)] = 0.0;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, pivots)
}

fn rank_tolerance(m: &Matrix) -> f64 {
    1e-9 * m.max_abs().max(1.0)
}

pub fn rank(m: &Matrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    rref(m, rank_tolerance(m)).1.len()
}

/// Indices of a maximal linearly independent subset of rows, chosen greedily
/// in row order.
pub fn independent_rows(m: &Matrix, tol: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut basis = SpanBasis::with_tolerance(m.ncols(), tol);
    for i in 0..m.nrows() {
        if let Ok(Extension::Extended(next)) = basis.extend(m.row(i)) {
            basis = next;
            kept.push(i);
        }
    }
    kept
}

/// Orthonormal basis of `{v : M v = 0}`.
pub fn kernel_basis(m: &Matrix) -> SpanBasis {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return SpanBasis::full(cols);
    }
    let (r, pivots) = rref(m, rank_tolerance(m));
    let mut raw = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0.0; cols];
        v[free] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(row, free)];
        }
        raw.push(v);
    }
    let mut basis = SpanBasis::empty(cols);
    for v in &raw {
        if let Ok(Extension::Extended(next)) = basis.extend(v) {
            basis = next;
        }
    }
    basis
}

/// Inverse of a square matrix by Gauss–Jordan elimination with partial
/// pivoting. Fails on (numerically) singular input.
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    check_dim("inverse (square)", m.nrows(), m.ncols())?;
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (best, val) = (col..n)
            .map(|i| (i, a[(i, col)].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= 1e-14 * scale {
            return Err(Error::NumericalFailure("singular matrix".into()));
        }
        if best != col {
            for j in 0..n {
                a.data.swap(col * n + j, best * n + j);
                inv.data.swap(col * n + j, best * n + j);
            }
        }
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        let (arow, irow) = (a.row(col).to_vec(), inv.row(col).to_vec());
        for i in 0..n {
            if i != col {
                let f = a[(i, col)];
                if f != 0.0 {
                    axpy(-f, &arow, a.row_mut(i));
                    axpy(-f, &irow, inv.row_mut(i));
                }
            }
        }
    }
    Ok(inv)
}

/// Solves the square system `m x = b`.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    check_dim("solve rhs", m.nrows(), b.len())?;
    inverse(m)?.mul_vec(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn extend_from_empty_normalizes() {
        let b = SpanBasis::empty(2);
        match b.extend(&[3.0, 0.0]).unwrap() {
            Extension::Extended(n) => assert!(close(&n.vectors()[0], &[1.0, 0.0], 1e-15)),
            Extension::InSpan => panic!("expected growth"),
        }
    }

    #[test]
    fn colinear_vector_is_in_span() {
        let b = SpanBasis::from_vectors(2, &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(b.extend(&[5.0, 0.0]).unwrap(), Extension::InSpan);
    }

    #[test]
    fn gram_schmidt_second_vector() {
        let b = SpanBasis::from_vectors(2, &[vec![1.0, 0.0]]).unwrap();
        let Extension::Extended(n) = b.extend(&[1.0, 1.0]).unwrap() else {
            panic!("expected growth")
        };
        assert_eq!(n.dim(), 2);
        assert!(close(&n.vectors()[1], &[0.0, 1.0], 1e-15));
        assert_eq!(n.source_vectors()[1], vec![1.0, 1.0]);
        // original untouched
        assert_eq!(b.dim(), 1);
    }

    #[test]
    fn extend_rejects_wrong_dimension() {
        let b = SpanBasis::empty(2);
        assert!(matches!(
            b.extend(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_projection_examples() {
        let e = SpanBasis::empty(2);
        assert_eq!(e.project_onto_complement(&[2.0, 3.0]).unwrap(), vec![2.0, 3.0]);
        let b = SpanBasis::from_vectors(2, &[vec![1.0, 0.0]]).unwrap();
        assert!(close(&b.project_onto_complement(&[2.0, 3.0]).unwrap(), &[0.0, 3.0], 1e-15));
        let d = SpanBasis::from_vectors(2, &[vec![1.0, 1.0]]).unwrap();
        assert!(close(&d.project_onto_complement(&[1.0, 0.0]).unwrap(), &[0.5, -0.5], 1e-15));
    }

    #[test]
    fn subspace_equality_examples() {
        let a = SpanBasis::from_vectors(2, &[vec![1.0, 0.0]]).unwrap();
        let b = SpanBasis::from_vectors(2, &[vec![-1.0, 0.0]]).unwrap();
        assert!(a.subspace_equal(&b));
        let full = SpanBasis::from_vectors(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!a.subspace_equal(&full));
        let s = 0.5f64.sqrt();
        let rot = SpanBasis::from_vectors(2, &[vec![s, s], vec![s, -s]]).unwrap();
        assert!(rot.subspace_equal(&full));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap());
        assert_eq!(k.dim(), 1);
        let s = 0.5f64.sqrt();
        let v = &k.vectors()[0];
        assert!(close(v, &[s, -s], 1e-12) || close(v, &[-s, s], 1e-12));

        assert_eq!(kernel_basis(&Matrix::identity(3)).dim(), 0);

        let m = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 3).unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 1);
        let expected = SpanBasis::from_vectors(3, &[vec![1.0, -1.0, 0.0]]).unwrap();
        assert!(k.subspace_equal(&expected));
    }

    #[test]
    fn rank_and_independent_rows() {
        let m = Matrix::from_rows(
            &[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 1.0]],
            2,
        )
        .unwrap();
        assert_eq!(rank(&m), 2);
        assert_eq!(independent_rows(&m, 1e-9), vec![0, 2]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, 1.0]], 2).unwrap();
        let inv = inverse(&m).unwrap();
        let p = inv.mul(&m).unwrap();
        assert!(close(&p.data, &Matrix::identity(2).data, 1e-15));
        assert!(inverse(&Matrix::zeros(2, 2)).is_err());
    }
}
