//! Krylov solvers: projected conjugate gradients for consistent semidefinite
//! systems and restarted GMRES for general ones.

use alloc::vec;
use alloc::vec::Vec;

use super::{dotc, norm2, CsrMatrix, LinalgError, SolverReport};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Relative residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Diagonal (Jacobi) preconditioning.
    pub jacobi: bool,
    /// Lower bound of the norm the residual is measured against; the
    /// default measures against `||b||` alone.
    pub reference_norm: f64,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000, jacobi: true, reference_norm: 0.0 }
    }
}

fn jacobi_inverse(a: &CsrMatrix, enabled: bool) -> Vec<f64> {
    a.diagonal()
        .iter()
        .map(|d| {
            let m = d.re.abs();
            if enabled && m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        })
        .collect()
}

/// Conjugate gradients for a Hermitian positive semidefinite `A` restricted to
/// the range of the orthogonal projector `project` (applied in place).
///
/// The projector must annihilate the kernel of `A`. The returned solution lies
/// in the range of the projector. An inconsistent right-hand side shows up as
/// `converged == false`.
pub fn cg_projected(
    a: &CsrMatrix,
    b: &[C64],
    project: &dyn Fn(&mut [C64]),
    opts: CgOptions,
) -> Result<(Vec<C64>, SolverReport), LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::NotSquare { rows: n, cols: a.ncols() });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    let zero = C64::new(0.0, 0.0);
    let minv = jacobi_inverse(a, opts.jacobi);
    let bnorm = norm2(b).max(opts.reference_norm);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };

    let mut x = vec![zero; n];
    let mut r = b.to_vec();
    let mut res = norm2(&r) / scale;
    if res <= opts.tol {
        return Ok((x, SolverReport { iterations: 0, residual: res, converged: true }));
    }

    let precondition = |r: &[C64], z: &mut Vec<C64>| {
        z.clear();
        z.extend_from_slice(r);
        project(z);
        for (zi, m) in z.iter_mut().zip(&minv) {
            *zi *= *m;
        }
        project(z);
    };

    let mut z = Vec::with_capacity(n);
    precondition(&r, &mut z);
    let mut rz = dotc(&r, &z);
    let mut p = z.clone();
    let mut q = vec![zero; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if rz.norm() <= f64::MIN_POSITIVE {
            break;
        }
        a.spmv_into(&p, &mut q);
        let pq = dotc(&p, &q);
        if pq.re <= 0.0 || !pq.re.is_finite() {
            break;
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        iterations += 1;
        res = norm2(&r) / scale;
        if res <= opts.tol {
            converged = true;
            break;
        }
        precondition(&r, &mut z);
        let rz_new = dotc(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    project(&mut x);
    Ok((x, SolverReport { iterations, residual: res, converged }))
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Krylov dimension before restart.
    pub restart: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 5000, restart: 100 }
    }
}

/// Restarted GMRES with right Jacobi preconditioning.
pub fn gmres(a: &CsrMatrix, b: &[C64], opts: GmresOptions) -> Result<(Vec<C64>, SolverReport), LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::NotSquare { rows: n, cols: a.ncols() });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    let zero = C64::new(0.0, 0.0);
    let minv: Vec<C64> = a
        .diagonal()
        .iter()
        .map(|d| if d.norm() > 0.0 { d.inv() } else { C64::new(1.0, 0.0) })
        .collect();
    let bnorm = norm2(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let m = opts.restart.max(1);

    let mut x = vec![zero; n];
    let mut r = vec![zero; n];
    let mut w = vec![zero; n];
    let mut z = vec![zero; n];
    let mut iterations = 0;
    let mut res;
    loop {
        a.spmv_into(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let beta = norm2(&r);
        res = beta / scale;
        if res <= opts.tol {
            return Ok((x, SolverReport { iterations, residual: res, converged: true }));
        }
        if iterations >= opts.max_iter {
            return Ok((x, SolverReport { iterations, residual: res, converged: false }));
        }
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![zero; m]; m + 1];
        let mut cs = vec![zero; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k = 0;
        while k < m && iterations < opts.max_iter {
            for i in 0..n {
                z[i] = minv[i] * basis[k][i];
            }
            a.spmv_into(&z, &mut w);
            for (j, vj) in basis.iter().enumerate() {
                let hij = dotc(vj, &w);
                h[j][k] = hij;
                for i in 0..n {
                    w[i] -= hij * vj[i];
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = C64::new(hn, 0.0);
            for j in 0..k {
                let t = cs[j].conj() * h[j][k] + sn[j].conj() * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c.conj() * h[k][k] + s.conj() * h[k + 1][k];
            h[k + 1][k] = zero;
            g[k + 1] = -s * g[k];
            g[k] = c.conj() * g[k];
            iterations += 1;
            k += 1;
            res = g[k].norm() / scale;
            if res <= opts.tol || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        // back substitution for the k x k triangular system
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[i][j] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for i in 0..n {
                x[i] += minv[i] * basis[j][i] * yj;
            }
        }
    }
}

/// Complex Givens rotation zeroing `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (C64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    }
    let r = crate::math::sqrt(an * an + bn * bn);
    (a / r, b / r)
}
