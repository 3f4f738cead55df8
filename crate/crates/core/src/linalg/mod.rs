//! Complex sparse linear algebra.
//!
//! Matrices are stored in compressed sparse row form with sorted, unique
//! column indices per row. Assembly goes through [`TripletBuilder`], which
//! sums duplicates in a deterministic order.

mod direct;
mod krylov;
mod ordering;

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::C64;

pub use direct::{direct_solve, DirectSolver, LuFactors};
pub(crate) use direct::solve_refined;
pub use krylov::{cg_projected, gmres, CgOptions, GmresOptions};
pub use ordering::approximate_minimum_degree;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("numerically singular pivot at row {row}")]
    Singular { row: usize },
    #[error("iterative solver did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// Relative residual `|Ax - b| / |b|` (absolute if `b = 0`).
    pub residual: f64,
    pub converged: bool,
}

/// Compressed sparse row matrix with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Builds a matrix from row-major dense storage, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, dense: &[C64]) -> Self {
        assert_eq!(dense.len(), nrows * ncols);
        let mut b = TripletBuilder::new(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = dense[i * ncols + j];
                if v != C64::new(0.0, 0.0) {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Entry `(i, j)`, zero if structurally absent.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`, summing each row in column order.
    pub fn spmv(&self, x: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if x.len() != self.ncols {
            return Err(LinalgError::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked product into a caller buffer.
    pub fn spmv_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        for i in 0..self.nrows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[p];
                let q = next[c];
                col_idx[q] = i;
                values[q] = self.values[p];
                next[c] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, row_ptr, col_idx, values }
    }

    /// `true` if `(i, j)` is stored exactly when `(j, i)` is.
    pub fn is_structurally_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let t = self.transpose();
        t.row_ptr == self.row_ptr && t.col_idx == self.col_idx
    }

    /// `max |A_ij - A_ji|` (entrywise, no conjugation).
    pub fn max_asymmetry(&self) -> f64 {
        let t = self.transpose();
        let diff = self.axpby(C64::new(1.0, 0.0), &t, C64::new(-1.0, 0.0));
        diff.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `alpha * self + beta * other` for matrices of equal shape.
    pub fn axpby(&self, alpha: C64, other: &CsrMatrix, beta: C64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let take_a = q == cb.len() || (p < ca.len() && ca[p] <= cb[q]);
                let take_b = p == ca.len() || (q < cb.len() && cb[q] <= ca[p]);
                let mut v = C64::new(0.0, 0.0);
                let col;
                if take_a && take_b {
                    col = ca[p];
                    v += alpha * va[p] + beta * vb[q];
                    p += 1;
                    q += 1;
                } else if take_a {
                    col = ca[p];
                    v += alpha * va[p];
                    p += 1;
                } else {
                    col = cb[q];
                    v += beta * vb[q];
                    q += 1;
                }
                col_idx.push(col);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }

    pub fn scaled(&self, alpha: C64) -> CsrMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    /// `y^T A x` without conjugation.
    pub fn bilinear(&self, y: &[C64], x: &[C64]) -> C64 {
        let ax = self.spmv(x).expect("dimension checked by caller");
        y.iter().zip(&ax).map(|(a, b)| a * b).sum()
    }

    /// `x^H A x`.
    pub fn quadratic(&self, x: &[C64]) -> C64 {
        let ax = self.spmv(x).expect("dimension checked by caller");
        x.iter().zip(&ax).map(|(a, b)| a.conj() * b).sum()
    }

    /// Row-major dense copy, for tests and tiny systems.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (j, x) in c.iter().zip(v) {
                d[i * self.ncols + j] = *x;
            }
        }
        d
    }
}

/// Coordinate-format accumulator producing a [`CsrMatrix`].
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums duplicates in insertion order, so the result is reproducible.
    pub fn build(mut self) -> CsrMatrix {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    math::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

/// Hermitian inner product `sum conj(x_i) y_i`.
pub fn dotc(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Relative residual `|Ax - b| / |b|`, absolute when `b = 0`.
pub fn relative_residual(a: &CsrMatrix, x: &[C64], b: &[C64]) -> f64 {
    let mut r = a.spmv(x).expect("dimension checked by caller");
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let nb = norm2(b);
    let nr = norm2(&r);
    if nb > 0.0 {
        nr / nb
    } else {
        nr
    }
}
