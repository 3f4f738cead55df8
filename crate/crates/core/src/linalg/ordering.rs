//! Fill-reducing ordering and elimination-tree utilities.

use alloc::vec;
use alloc::vec::Vec;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::amd;
use faer::sparse::SymbolicSparseColMatRef;

/// Symmetric adjacency structure without the diagonal, column-compressed.
#[derive(Debug, Clone)]
pub(crate) struct SymmetricPattern {
    pub n: usize,
    pub ptr: Vec<usize>,
    pub idx: Vec<usize>,
}

impl SymmetricPattern {
    /// Pattern of `A + A^T` minus the diagonal, given CSR structure of `A`.
    pub fn from_csr(n: usize, row_ptr: &[usize], col_idx: &[usize]) -> Self {
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(2 * col_idx.len());
        for i in 0..n {
            for &j in &col_idx[row_ptr[i]..row_ptr[i + 1]] {
                if i != j {
                    pairs.push((j, i));
                    pairs.push((i, j));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut ptr = vec![0usize; n + 1];
        for &(c, _) in &pairs {
            ptr[c + 1] += 1;
        }
        for j in 0..n {
            ptr[j + 1] += ptr[j];
        }
        let idx = pairs.into_iter().map(|(_, r)| r).collect();
        Self { n, ptr, idx }
    }

    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.idx[self.ptr[j]..self.ptr[j + 1]]
    }

    /// The same graph with vertex `old` renamed to `inv[old]`.
    pub fn permuted(&self, perm: &[usize], inv: &[usize]) -> Self {
        let mut ptr = Vec::with_capacity(self.n + 1);
        let mut idx = Vec::with_capacity(self.idx.len());
        ptr.push(0);
        for &old in perm {
            let start = idx.len();
            idx.extend(self.neighbors(old).iter().map(|&i| inv[i]));
            idx[start..].sort_unstable();
            ptr.push(idx.len());
        }
        Self { n: self.n, ptr, idx }
    }
}

/// Approximate minimum degree ordering of the pattern of `A + A^T`.
///
/// Returns `perm` with `perm[new] = old`.
pub fn approximate_minimum_degree(n: usize, row_ptr: &[usize], col_idx: &[usize]) -> Vec<usize> {
    let pattern = SymmetricPattern::from_csr(n, row_ptr, col_idx);
    amd_order(&pattern)
}

pub(crate) fn amd_order(pattern: &SymmetricPattern) -> Vec<usize> {
    let n = pattern.n;
    if n == 0 {
        return Vec::new();
    }
    let mut perm = vec![0usize; n];
    let mut perm_inv = vec![0usize; n];
    let sym = SymbolicSparseColMatRef::new_checked(n, n, &pattern.ptr, None, &pattern.idx);
    let req = amd::order_scratch::<usize>(n, pattern.idx.len());
    let mut mem = MemBuffer::new(req);
    let stack = MemStack::new(&mut mem);
    amd::order(&mut perm, &mut perm_inv, sym, amd::Control::default(), stack)
        .expect("workspace sized by order_scratch");
    perm
}

/// Elimination tree of a symmetric pattern; `usize::MAX` marks roots.
pub(crate) fn elimination_tree(pattern: &SymmetricPattern) -> Vec<usize> {
    let n = pattern.n;
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for j in 0..n {
        for &i0 in pattern.neighbors(j) {
            if i0 >= j {
                continue;
            }
            let mut i = i0;
            while ancestor[i] != usize::MAX && ancestor[i] != j {
                let next = ancestor[i];
                ancestor[i] = j;
                i = next;
            }
            if ancestor[i] == usize::MAX {
                ancestor[i] = j;
                parent[i] = j;
            }
        }
    }
    parent
}

/// Depth-first postorder of a forest; children visited in increasing order.
pub(crate) fn postorder(parent: &[usize]) -> Vec<usize> {
    let n = parent.len();
    let mut head = vec![usize::MAX; n];
    let mut next = vec![usize::MAX; n];
    for j in (0..n).rev() {
        let p = parent[j];
        if p != usize::MAX {
            next[j] = head[p];
            head[p] = j;
        }
    }
    let mut post = Vec::with_capacity(n);
    let mut stack = Vec::new();
    for root in 0..n {
        if parent[root] != usize::MAX {
            continue;
        }
        stack.push(root);
        while let Some(&top) = stack.last() {
            let child = head[top];
            if child == usize::MAX {
                stack.pop();
                post.push(top);
            } else {
                head[top] = next[child];
                stack.push(child);
            }
        }
    }
    post
}

/// Number of entries (diagonal included) in every column of the Cholesky
/// factor pattern.
pub(crate) fn column_counts(pattern: &SymmetricPattern, parent: &[usize]) -> Vec<usize> {
    let n = pattern.n;
    let mut counts = vec![1usize; n];
    let mut mark = vec![usize::MAX; n];
    for i in 0..n {
        mark[i] = i;
        for &j in pattern.neighbors(i) {
            if j >= i {
                continue;
            }
            let mut k = j;
            while mark[k] != i {
                counts[k] += 1;
                mark[k] = i;
                k = parent[k];
            }
        }
    }
    counts
}
