//! Multifrontal sparse LU on the symmetrized pattern.
//!
//! The matrix is reordered by approximate minimum degree on `A + A^T`, the
//! elimination tree is postordered and grouped into supernodes, and each
//! supernode is eliminated in a dense frontal matrix with diagonal pivots.
//! Dense panel updates go through `faer`. Diagonal pivoting suits the
//! complex symmetric systems produced by the assembly routines; a pivot that
//! vanishes relative to the matrix scale is reported as singular.

use alloc::vec;
use alloc::vec::Vec;

use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::solve_unit_lower_triangular_in_place;
use faer::reborrow::{IntoConst, Reborrow, ReborrowMut};
use faer::{Accum, MatMut, MatRef, Par};

use super::ordering::{amd_order, column_counts, elimination_tree, postorder, SymmetricPattern};
use super::{relative_residual, CsrMatrix, LinalgError, SolverReport};
use crate::C64;

/// Subtrees of the elimination tree up to this size become one supernode.
const RELAX_SUBTREE: usize = 8;
/// Panel width of the blocked frontal factorization.
const PANEL: usize = 48;
/// Pivots below `PIVOT_TOL * max|A_ij|` are treated as zero.
const PIVOT_TOL: f64 = 1e-13;
/// Entrywise asymmetry below `SYMMETRY_TOL * max|A_ij|` selects `L D L^T`.
const SYMMETRY_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
struct Supernode {
    first: usize,
    ncols: usize,
    /// Off-diagonal row indices (new numbering), ascending, all `>= first + ncols`.
    below: Vec<usize>,
    /// `m x ncols` column-major: unit-lower L11 / U11 on top, L21 below.
    lpanel: Vec<C64>,
    /// `ncols x (m - ncols)` column-major U12; empty for `L D L^T`.
    upanel: Vec<C64>,
}

/// Factorization `P A P^T = L U` ready for repeated solves.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    supernodes: Vec<Supernode>,
    symmetric: bool,
}

/// Object that factors once and solves many right-hand sides.
pub trait DirectSolver {
    fn solve(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError>;
}

impl DirectSolver for LuFactors {
    fn solve(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        LuFactors::solve(self, b)
    }
}

struct Symbolic {
    perm: Vec<usize>,
    inv: Vec<usize>,
    /// Supernode ranges `(first, ncols)` in postorder.
    ranges: Vec<(usize, usize)>,
    below: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

fn analyze(a: &CsrMatrix) -> Symbolic {
    let n = a.nrows();
    let base = SymmetricPattern::from_csr(n, a.row_ptr(), a.col_idx());
    let amd = amd_order(&base);
    let mut inv = vec![0usize; n];
    for (new, &old) in amd.iter().enumerate() {
        inv[old] = new;
    }
    let pat = base.permuted(&amd, &inv);
    let parent = elimination_tree(&pat);
    let post = postorder(&parent);

    // compose the postorder so supernodes are contiguous
    let perm: Vec<usize> = post.iter().map(|&k| amd[k]).collect();
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let pat = base.permuted(&perm, &inv);
    let parent = elimination_tree(&pat);
    let counts = column_counts(&pat, &parent);

    let mut nchild = vec![0usize; n];
    let mut subtree = vec![1usize; n];
    for j in 0..n {
        if parent[j] != usize::MAX {
            nchild[parent[j]] += 1;
            subtree[parent[j]] += subtree[j];
        }
    }

    // relaxed supernodes for small subtrees, fundamental supernodes elsewhere
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    let mut j = 0;
    while j < n {
        // the subtree rooted at r occupies [r + 1 - subtree[r], r] in postorder;
        // find the largest small subtree starting at j
        let mut r = j;
        while parent[r] != usize::MAX && subtree[parent[r]] <= RELAX_SUBTREE && parent[r] + 1 - subtree[parent[r]] == j {
            r = parent[r];
        }
        if subtree[r] > 1 && r + 1 - subtree[r] == j && subtree[r] <= RELAX_SUBTREE {
            ranges.push((j, r + 1 - j));
            j = r + 1;
            continue;
        }
        let start = j;
        while j + 1 < n && parent[j] == j + 1 && nchild[j + 1] == 1 && counts[j] == counts[j + 1] + 1 {
            j += 1;
        }
        ranges.push((start, j + 1 - start));
        j += 1;
    }

    let mut owner = vec![0usize; n];
    for (s, &(f, c)) in ranges.iter().enumerate() {
        for col in f..f + c {
            owner[col] = s;
        }
    }
    let ns = ranges.len();
    let mut children = vec![Vec::new(); ns];
    for (s, &(f, c)) in ranges.iter().enumerate() {
        let p = parent[f + c - 1];
        if p != usize::MAX {
            children[owner[p]].push(s);
        }
    }

    let mut below: Vec<Vec<usize>> = Vec::with_capacity(ns);
    let mut mark = vec![usize::MAX; n];
    for (s, &(f, c)) in ranges.iter().enumerate() {
        let last = f + c - 1;
        let mut rows = Vec::new();
        for col in f..=last {
            for &i in pat.neighbors(col) {
                if i > last && mark[i] != s {
                    mark[i] = s;
                    rows.push(i);
                }
            }
        }
        for &ch in &children[s] {
            for &i in &below[ch] {
                if i > last && mark[i] != s {
                    mark[i] = s;
                    rows.push(i);
                }
            }
        }
        rows.sort_unstable();
        below.push(rows);
    }
    Symbolic { perm, inv, ranges, below, children }
}

impl LuFactors {
    /// Factors a square matrix. Matrices that are symmetric up to roundoff
    /// are factored as `L D L^T` and only `L` is stored.
    pub fn factorize(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::NotSquare { rows: n, cols: a.ncols() });
        }
        let amax = a.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let symmetric = a.max_asymmetry() <= SYMMETRY_TOL * amax;
        let sym = analyze(a);
        let at = if symmetric { None } else { Some(a.transpose()) };
        let tiny = PIVOT_TOL * amax;
        let zero = C64::new(0.0, 0.0);

        let ns = sym.ranges.len();
        let mut updates: Vec<Option<Vec<C64>>> = vec![None; ns];
        let mut supernodes = Vec::with_capacity(ns);
        let mut relpos = vec![usize::MAX; n];
        let mut front: Vec<C64> = Vec::new();
        let mut scratch: Vec<C64> = Vec::new();

        for s in 0..ns {
            let (f, c) = sym.ranges[s];
            let below = &sym.below[s];
            let m = c + below.len();
            for t in 0..c {
                relpos[f + t] = t;
            }
            for (t, &i) in below.iter().enumerate() {
                relpos[i] = c + t;
            }
            front.clear();
            front.resize(m * m, zero);

            for t in 0..c {
                let old = sym.perm[f + t];
                let (cols, vals) = a.row(old);
                match &at {
                    None => {
                        // lower part of column `f + t`
                        for (&oc, &v) in cols.iter().zip(vals) {
                            let x = sym.inv[oc];
                            if x >= f + t {
                                front[t * m + relpos[x]] += v;
                            }
                        }
                    }
                    Some(at) => {
                        // row `f + t`, columns to the right of the supernode start
                        for (&oc, &v) in cols.iter().zip(vals) {
                            let x = sym.inv[oc];
                            if x >= f {
                                front[relpos[x] * m + t] += v;
                            }
                        }
                        // column `f + t`, rows below the supernode
                        let (rows, vals) = at.row(old);
                        for (&or, &v) in rows.iter().zip(vals) {
                            let x = sym.inv[or];
                            if x >= f + c {
                                front[t * m + relpos[x]] += v;
                            }
                        }
                    }
                }
            }
            for &ch in &sym.children[s] {
                let upd = updates[ch].take().expect("child processed before parent");
                let rows = &sym.below[ch];
                let mc = rows.len();
                for (b, &rb) in rows.iter().enumerate() {
                    let col = relpos[rb] * m;
                    let first = if symmetric { b } else { 0 };
                    for (a_, &ra) in rows.iter().enumerate().skip(first) {
                        front[col + relpos[ra]] += upd[b * mc + a_];
                    }
                }
            }

            let status = if symmetric {
                factor_front_symmetric(&mut front, m, c, tiny, &mut scratch)
            } else {
                factor_front(&mut front, m, c, tiny)
            };
            status.map_err(|t| LinalgError::Singular { row: sym.perm[f + t] })?;

            let mut lpanel = Vec::with_capacity(m * c);
            lpanel.extend_from_slice(&front[..m * c]);
            let mut upanel = Vec::new();
            if !symmetric {
                upanel.reserve(c * (m - c));
                for col in c..m {
                    upanel.extend_from_slice(&front[col * m..col * m + c]);
                }
            }
            if m > c {
                let mut upd = Vec::with_capacity((m - c) * (m - c));
                for col in c..m {
                    upd.extend_from_slice(&front[col * m + c..(col + 1) * m]);
                }
                updates[s] = Some(upd);
            }
            supernodes.push(Supernode { first: f, ncols: c, below: below.clone(), lpanel, upanel });
        }
        Ok(Self { n, perm: sym.perm, supernodes, symmetric })
    }

    /// Whether the factorization is the symmetric `L D L^T` variant.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored factor entries (L and U panels).
    pub fn factor_nnz(&self) -> usize {
        self.supernodes.iter().map(|s| s.lpanel.len() + s.upanel.len()).sum()
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut y: Vec<C64> = self.perm.iter().map(|&old| b[old]).collect();
        for sn in &self.supernodes {
            let (f, c) = (sn.first, sn.ncols);
            let m = c + sn.below.len();
            for j in 0..c {
                let yj = y[f + j];
                if yj == C64::new(0.0, 0.0) {
                    continue;
                }
                let col = &sn.lpanel[j * m..(j + 1) * m];
                for i in j + 1..c {
                    y[f + i] -= col[i] * yj;
                }
                for (t, &r) in sn.below.iter().enumerate() {
                    y[r] -= col[c + t] * yj;
                }
            }
        }
        if self.symmetric {
            for sn in &self.supernodes {
                let m = sn.ncols + sn.below.len();
                for j in 0..sn.ncols {
                    y[sn.first + j] /= sn.lpanel[j * m + j];
                }
            }
            for sn in self.supernodes.iter().rev() {
                let (f, c) = (sn.first, sn.ncols);
                let m = c + sn.below.len();
                for j in (0..c).rev() {
                    let col = &sn.lpanel[j * m..(j + 1) * m];
                    let mut acc = C64::new(0.0, 0.0);
                    for i in j + 1..c {
                        acc += col[i] * y[f + i];
                    }
                    for (t, &r) in sn.below.iter().enumerate() {
                        acc += col[c + t] * y[r];
                    }
                    y[f + j] -= acc;
                }
            }
        } else {
            for sn in self.supernodes.iter().rev() {
                let (f, c) = (sn.first, sn.ncols);
                let m = c + sn.below.len();
                for (t, &r) in sn.below.iter().enumerate() {
                    let xr = y[r];
                    if xr == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let col = &sn.upanel[t * c..(t + 1) * c];
                    for i in 0..c {
                        y[f + i] -= col[i] * xr;
                    }
                }
                for j in (0..c).rev() {
                    let col = &sn.lpanel[j * m..j * m + c];
                    let xj = y[f + j] / col[j];
                    y[f + j] = xj;
                    for i in 0..j {
                        y[f + i] -= col[i] * xj;
                    }
                }
            }
        }
        let mut x = vec![C64::new(0.0, 0.0); self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }
}

/// Eliminates the first `c` pivots of the `m x m` column-major front in
/// place. Returns the local index of a vanishing pivot.
fn factor_front(front: &mut [C64], m: usize, c: usize, tiny: f64) -> Result<(), usize> {
    let mut k0 = 0;
    while k0 < c {
        let kb = PANEL.min(c - k0);
        // unblocked right-looking LU of the column panel
        for p in k0..k0 + kb {
            let piv = front[p * m + p];
            if !(piv.norm() > tiny) || !piv.is_finite() {
                return Err(p);
            }
            let inv = piv.inv();
            let (head, tail) = front.split_at_mut((p + 1) * m);
            let colp = &mut head[p * m..];
            for v in &mut colp[p + 1..m] {
                *v *= inv;
            }
            for q in p + 1..k0 + kb {
                let off = (q - p - 1) * m;
                let u = tail[off + p];
                if u == C64::new(0.0, 0.0) {
                    continue;
                }
                let colq = &mut tail[off..off + m];
                for i in p + 1..m {
                    colq[i] -= colp[i] * u;
                }
            }
        }
        let k1 = k0 + kb;
        if k1 < m {
            let mat = MatMut::from_column_major_slice_mut(front, m, m);
            let (_, right) = mat.split_at_col_mut(k0);
            let (panel, rest) = right.split_at_col_mut(kb);
            let panel: MatRef<'_, C64> = panel.into_const();
            let lkk = panel.subrows(k0, kb);
            let l21 = panel.subrows(k1, m - k1);
            let (top, trailing) = rest.split_at_row_mut(k1);
            let mut u12 = top.subrows_mut(k0, kb);
            solve_unit_lower_triangular_in_place(lkk, u12.rb_mut(), Par::Seq);
            matmul(trailing, Accum::Add, l21, u12.rb(), C64::new(-1.0, 0.0), Par::Seq);
        }
        k0 = k1;
    }
    Ok(())
}

/// `L D L^T` variant of [`factor_front`] touching only the lower triangle.
/// On return the first `c` columns hold `D` on the diagonal and `L` below.
fn factor_front_symmetric(
    front: &mut [C64],
    m: usize,
    c: usize,
    tiny: f64,
    scratch: &mut Vec<C64>,
) -> Result<(), usize> {
    let zero = C64::new(0.0, 0.0);
    let mut k0 = 0;
    while k0 < c {
        let kb = PANEL.min(c - k0);
        let k1 = k0 + kb;
        let rows = m - k1;
        // unscaled columns `L D` of the panel, rows below it
        scratch.clear();
        scratch.resize(rows * kb, zero);
        for p in k0..k1 {
            let piv = front[p * m + p];
            if !(piv.norm() > tiny) || !piv.is_finite() {
                return Err(p);
            }
            let inv = piv.inv();
            let (head, tail) = front.split_at_mut((p + 1) * m);
            let colp = &mut head[p * m..];
            let w = &mut scratch[(p - k0) * rows..(p - k0 + 1) * rows];
            w.copy_from_slice(&colp[k1..m]);
            for q in p + 1..k1 {
                let u = colp[q];
                if u == zero {
                    continue;
                }
                let off = (q - p - 1) * m;
                let colq = &mut tail[off..off + m];
                for i in q..m {
                    colq[i] -= colp[i] * inv * u;
                }
            }
            for v in &mut colp[p + 1..m] {
                *v *= inv;
            }
        }
        if rows > 0 {
            let mat = MatMut::from_column_major_slice_mut(front, m, m);
            let (left, right) = mat.split_at_col_mut(k1);
            let l21 = left.into_const().submatrix(k1, k0, rows, kb);
            let trailing = right.subrows_mut(k1, rows);
            let w21 = MatRef::from_column_major_slice(scratch, rows, kb);
            triangular::matmul(
                trailing,
                BlockStructure::TriangularLower,
                Accum::Add,
                l21,
                BlockStructure::Rectangular,
                w21.transpose(),
                BlockStructure::Rectangular,
                C64::new(-1.0, 0.0),
                Par::Seq,
            );
        }
        k0 = k1;
    }
    Ok(())
}

/// Solves `A x = b` by sparse LU with one step of iterative refinement when
/// the first residual exceeds `1e-12`.
pub fn direct_solve(a: &CsrMatrix, b: &[C64]) -> Result<(Vec<C64>, SolverReport), LinalgError> {
    if b.len() != a.nrows() {
        return Err(LinalgError::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    let lu = LuFactors::factorize(a)?;
    solve_refined(a, &lu, b)
}

/// Solve with an existing factorization plus at most one refinement pass.
pub(crate) fn solve_refined(
    a: &CsrMatrix,
    lu: &LuFactors,
    b: &[C64],
) -> Result<(Vec<C64>, SolverReport), LinalgError> {
    let mut x = lu.solve(b)?;
    let mut res = relative_residual(a, &x, b);
    let mut iterations = 1;
    if res > 1e-12 {
        let ax = a.spmv(&x)?;
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = lu.solve(&r)?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        res = relative_residual(a, &x, b);
        iterations += 1;
    }
    if !res.is_finite() {
        return Err(LinalgError::Singular { row: 0 });
    }
    Ok((x, SolverReport { iterations, residual: res, converged: res <= 1e-10 }))
}
