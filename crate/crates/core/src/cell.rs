//! Periodic cell problems and effective tensors.
//!
//! The unit cell `[0, 1)^3` is split into the inclusion `Sigma` (tets tagged
//! inside) and the matrix `Sigma*`. Three families of correctors are computed:
//!
//! 1. `w1_l` on `Sigma*`, periodic edge elements, giving `eps_inv_hom`;
//! 2. `p_l = k^2 w2_l` on `Sigma*`, periodic nodal elements with zero mean;
//! 3. `w3_l(k)` on `Sigma`, edge elements with zero tangential trace.
//!
//! `mu_hom(k) = Id + P + k^2 W(k)` with `P_jl = int grad p_l . e_j` and
//! `W_jl = int w3_l . e_j`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::fem::{
    assemble_curlcurl, assemble_mass, assemble_p1_gradient_load, assemble_p1_stiffness, EdgeFlavor, EdgeSpace,
    FieldFunction, NodalFlavor, NodalFunction, NodalSpace, Region, TetGeometry, Tensor3,
};
use crate::linalg::{cg_projected, CgOptions, CsrMatrix, LinalgError, LuFactors, SolverReport};
use crate::math::{self, CVec3};
use crate::mesh::{build_periodic_cell_mesh, AxisBox, MeshError, StructuredTetMesh};
use crate::C64;

/// Relative residual target of the singular cell solves.
pub const CELL_CG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CellError {
    #[error("invalid micro coefficients: {0}")]
    Coefficients(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("cell problem {problem} did not converge (residual {residual:.3e})")]
    NotConverged { problem: u8, residual: f64 },
    #[error("cell problem 3 is singular at k = {k}")]
    Resonance { k: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Inverse permittivities of the matrix and the inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroCoefficients {
    pub eps0_inv: f64,
    pub eps1_inv: C64,
}

impl Default for MicroCoefficients {
    fn default() -> Self {
        Self { eps0_inv: 1.0, eps1_inv: C64::new(1.0, -0.01) }
    }
}

impl MicroCoefficients {
    pub fn validate(&self) -> Result<(), CellError> {
        if !(self.eps0_inv.is_finite() && self.eps0_inv > 0.0) {
            return Err(CellError::Coefficients("eps0_inv must be positive"));
        }
        if !(self.eps1_inv.re.is_finite() && self.eps1_inv.im.is_finite()) {
            return Err(CellError::Coefficients("eps1_inv must be finite"));
        }
        if self.eps1_inv.im > 0.0 {
            return Err(CellError::Coefficients("Im(eps1_inv) must not be positive"));
        }
        Ok(())
    }
}

/// Effective tensors at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTensors {
    pub eps_inv_hom: [[f64; 3]; 3],
    pub mu_hom: Tensor3,
    pub k: f64,
}

/// Correctors of the first cell problem.
#[derive(Debug, Clone)]
pub struct Cell1Solution {
    pub w1: [FieldFunction; 3],
    pub eps_inv_hom: [[f64; 3]; 3],
    pub reports: [SolverReport; 3],
}

impl Cell1Solution {
    /// Constant curl of `w1_l` on tet `t`.
    pub fn curl_w1(&self, l: usize, t: usize) -> CVec3 {
        self.w1[l].curl_in(t)
    }
}

/// Correctors `p_l` of the second cell problem and `P_jl = int grad p_l . e_j`.
#[derive(Debug, Clone)]
pub struct Cell2Solution {
    pub p: [NodalFunction; 3],
    pub grad_mean: [[f64; 3]; 3],
    pub reports: [SolverReport; 3],
}

/// Correctors of the third cell problem at wavenumber `k` and
/// `W_jl = int w3_l . e_j`.
#[derive(Debug, Clone)]
pub struct Cell3Solution {
    pub k: f64,
    pub w3: [FieldFunction; 3],
    pub mean: Tensor3,
}

/// All correctors at one wavenumber.
#[derive(Debug, Clone)]
pub struct CellSolutions {
    pub cell1: Cell1Solution,
    pub cell2: Cell2Solution,
    pub cell3: Cell3Solution,
}

impl CellSolutions {
    pub fn k(&self) -> f64 {
        self.cell3.k
    }

    pub fn effective_tensors(&self) -> EffectiveTensors {
        EffectiveTensors {
            eps_inv_hom: self.cell1.eps_inv_hom,
            mu_hom: compute_mu_hom(&self.cell2, &self.cell3),
            k: self.cell3.k,
        }
    }
}

/// Periodic cell with its spaces and the `k`-independent matrices of the
/// third cell problem.
#[derive(Debug, Clone)]
pub struct MicroCell {
    mesh: Arc<StructuredTetMesh>,
    coeffs: MicroCoefficients,
    outer_edges: Arc<EdgeSpace>,
    outer_nodes: Arc<NodalSpace>,
    inner_edges: Arc<EdgeSpace>,
    inner_curl: CsrMatrix,
    inner_mass: CsrMatrix,
    inner_rhs: [Vec<C64>; 3],
}

impl MicroCell {
    /// Builds the `n^3` Kuhn cell with an optional inclusion.
    pub fn new(n: usize, inclusion: Option<AxisBox>, coeffs: MicroCoefficients) -> Result<Self, CellError> {
        coeffs.validate()?;
        let (mesh, _) = build_periodic_cell_mesh(n, inclusion)?;
        Ok(Self::from_mesh(Arc::new(mesh), coeffs))
    }

    /// Default cell: inclusion `(0.25, 0.75)^3`.
    pub fn standard(n: usize, coeffs: MicroCoefficients) -> Result<Self, CellError> {
        Self::new(n, Some(AxisBox::cube(0.25, 0.75)?), coeffs)
    }

    pub fn from_mesh(mesh: Arc<StructuredTetMesh>, coeffs: MicroCoefficients) -> Self {
        let outer_edges = Arc::new(EdgeSpace::new(mesh.clone(), Region::Outside, EdgeFlavor::PeriodicQuotient));
        let outer_nodes = Arc::new(NodalSpace::new(mesh.clone(), Region::Outside, NodalFlavor::PeriodicZeroMean));
        let inner_edges = Arc::new(EdgeSpace::new(mesh.clone(), Region::Inside, EdgeFlavor::ZeroTangentialTrace));
        let inner_curl = assemble_curlcurl(&inner_edges, 1.0.into());
        let inner_mass = assemble_mass(&inner_edges, 1.0.into());
        let inner_rhs = core::array::from_fn(|l| edge_mean_load(&inner_edges, l));
        Self { mesh, coeffs, outer_edges, outer_nodes, inner_edges, inner_curl, inner_mass, inner_rhs }
    }

    pub fn mesh(&self) -> &Arc<StructuredTetMesh> {
        &self.mesh
    }

    pub fn coefficients(&self) -> MicroCoefficients {
        self.coeffs
    }

    pub fn outer_edge_space(&self) -> &Arc<EdgeSpace> {
        &self.outer_edges
    }

    pub fn outer_nodal_space(&self) -> &Arc<NodalSpace> {
        &self.outer_nodes
    }

    pub fn inner_edge_space(&self) -> &Arc<EdgeSpace> {
        &self.inner_edges
    }

    /// `|Sigma*|`.
    pub fn outer_volume(&self) -> f64 {
        self.outer_edges.tets().iter().map(|&t| self.mesh.tet_volume(t)).sum()
    }

    pub fn solve_cell1(&self) -> Result<Cell1Solution, CellError> {
        solve_cell1(self)
    }

    pub fn solve_cell2(&self) -> Result<Cell2Solution, CellError> {
        solve_cell2(self)
    }

    pub fn solve_cell3(&self, k: f64) -> Result<Cell3Solution, CellError> {
        solve_cell3(self, k)
    }

    pub fn solve_all(&self, k: f64) -> Result<CellSolutions, CellError> {
        Ok(CellSolutions { cell1: self.solve_cell1()?, cell2: self.solve_cell2()?, cell3: self.solve_cell3(k)? })
    }
}

/// `b_a = int e_l . phi_a` over the space's tetrahedra (exact).
fn edge_mean_load(space: &EdgeSpace, l: usize) -> Vec<C64> {
    let mesh = space.mesh();
    let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        for (e, d) in space.local_dofs(t).iter().enumerate() {
            if let Some(d) = d {
                b[d.index] += C64::from(g.whitney_mean(e)[l] * d.sign);
            }
        }
    }
    b
}

/// Norm of the element load vectors before assembly, from their squared
/// norms per tet.
fn unassembled_norm(per_tet: impl Iterator<Item = f64>) -> f64 {
    math::sqrt(per_tet.sum())
}

/// Solves `int eps0^-1 (e_l + curl w) . curl psi = 0` on the periodic edge
/// space of `Sigma*` and returns `eps_inv_hom`.
pub fn solve_cell1(cell: &MicroCell) -> Result<Cell1Solution, CellError> {
    let space = &cell.outer_edges;
    let mesh = space.mesh();
    let c = cell.coeffs.eps0_inv;
    let a = assemble_curlcurl(space, c.into());
    let reference = c * unassembled_norm(space.tets().iter().map(|&t| {
        let g = TetGeometry::new(mesh, t);
        (0..6).map(|e| g.volume * math::norm(g.whitney_curl(e))).map(|v| v * v).sum::<f64>()
    }));
    let opts = CgOptions { tol: CELL_CG_TOL, reference_norm: reference, ..CgOptions::default() };
    let mut w1 = Vec::with_capacity(3);
    let mut reports = Vec::with_capacity(3);
    for l in 0..3 {
        let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
        for &t in space.tets() {
            let g = TetGeometry::new(mesh, t);
            for (e, d) in space.local_dofs(t).iter().enumerate() {
                if let Some(d) = d {
                    b[d.index] -= C64::from(c * g.volume * g.whitney_curl(e)[l] * d.sign);
                }
            }
        }
        // the kernel (discrete gradients and constants) never enters the
        // observed curls, so no explicit projection is needed
        let (x, rep) = cg_projected(&a, &b, &|_: &mut [C64]| {}, opts)?;
        if !rep.converged {
            return Err(CellError::NotConverged { problem: 1, residual: rep.residual });
        }
        w1.push(FieldFunction::new(space.clone(), x));
        reports.push(rep);
    }
    let w1: [FieldFunction; 3] = w1.try_into().expect("three correctors");
    let vol = cell.outer_volume();
    let mut eps = [[0.0; 3]; 3];
    for (l, w) in w1.iter().enumerate() {
        let mut m = [0.0; 3];
        for &t in space.tets() {
            let cu = w.curl_in(t);
            let v = mesh.tet_volume(t);
            for j in 0..3 {
                m[j] += v * cu[j].re;
            }
        }
        for j in 0..3 {
            eps[j][l] = c * (if j == l { vol } else { 0.0 } + m[j]);
        }
    }
    Ok(Cell1Solution { w1, eps_inv_hom: eps, reports: reports.try_into().expect("three reports") })
}

/// Solves `int (e_l + grad p) . grad psi = 0` on the periodic zero-mean
/// nodal space of `Sigma*`.
pub fn solve_cell2(cell: &MicroCell) -> Result<Cell2Solution, CellError> {
    let space = &cell.outer_nodes;
    let a = assemble_p1_stiffness(space, &|_| 1.0);
    let reference = unassembled_norm(space.tets().iter().map(|&t| {
        let g = TetGeometry::new(space.mesh(), t);
        g.grads.iter().map(|d| g.volume * math::norm(*d)).map(|v| v * v).sum::<f64>()
    }));
    let opts = CgOptions { tol: CELL_CG_TOL, reference_norm: reference, ..CgOptions::default() };
    let project = |x: &mut [C64]| {
        let mean: C64 = x.iter().sum::<C64>() / x.len() as f64;
        for v in x.iter_mut() {
            *v -= mean;
        }
    };
    let mut p = Vec::with_capacity(3);
    let mut reports = Vec::with_capacity(3);
    for l in 0..3 {
        let b: Vec<C64> = assemble_p1_gradient_load(space, math::unit(l), &|_| 1.0).iter().map(|v| -v).collect();
        let (mut x, rep) = cg_projected(&a, &b, &project, opts)?;
        if !rep.converged {
            return Err(CellError::NotConverged { problem: 2, residual: rep.residual });
        }
        space.subtract_mean(&mut x);
        p.push(NodalFunction::new(space.clone(), x));
        reports.push(rep);
    }
    let p: [NodalFunction; 3] = p.try_into().expect("three correctors");
    let mesh = space.mesh();
    let mut grad_mean = [[0.0; 3]; 3];
    for (l, pl) in p.iter().enumerate() {
        for &t in space.tets() {
            let g = pl.grad_in(t);
            let v = mesh.tet_volume(t);
            for j in 0..3 {
                grad_mean[j][l] += v * g[j].re;
            }
        }
    }
    Ok(Cell2Solution { p, grad_mean, reports: reports.try_into().expect("three reports") })
}

/// Solves `int eps1^-1 curl w . curl psi - k^2 w . psi = int e_l . psi` on
/// the zero-trace edge space of `Sigma`.
pub fn solve_cell3(cell: &MicroCell, k: f64) -> Result<Cell3Solution, CellError> {
    let space = &cell.inner_edges;
    let zero = C64::new(0.0, 0.0);
    if k == 0.0 || space.n_dofs() == 0 {
        // the k^2 prefactor removes the contribution in the static limit
        let w3 = core::array::from_fn(|_| FieldFunction::zero(space.clone()));
        return Ok(Cell3Solution { k, w3, mean: [[zero; 3]; 3] });
    }
    let a = cell.inner_curl.axpby(cell.coeffs.eps1_inv, &cell.inner_mass, C64::new(-k * k, 0.0));
    let lu = match LuFactors::factorize(&a) {
        Ok(lu) => lu,
        Err(LinalgError::Singular { .. }) => return Err(CellError::Resonance { k }),
        Err(e) => return Err(e.into()),
    };
    let mut w3 = Vec::with_capacity(3);
    for l in 0..3 {
        let (x, rep) = crate::linalg::solve_refined(&a, &lu, &cell.inner_rhs[l])?;
        if !rep.converged {
            return Err(CellError::Resonance { k });
        }
        w3.push(FieldFunction::new(space.clone(), x));
    }
    let w3: [FieldFunction; 3] = w3.try_into().expect("three correctors");
    let mut mean = [[zero; 3]; 3];
    for l in 0..3 {
        for j in 0..3 {
            mean[j][l] = cell.inner_rhs[j].iter().zip(&w3[l].coeffs).map(|(b, w)| b * w).sum();
        }
    }
    Ok(Cell3Solution { k, w3, mean })
}

/// `mu_hom = Id + P + k^2 W(k)`.
pub fn compute_mu_hom(cell2: &Cell2Solution, cell3: &Cell3Solution) -> Tensor3 {
    let k2 = cell3.k * cell3.k;
    let mut mu = [[C64::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        for l in 0..3 {
            let id = if j == l { 1.0 } else { 0.0 };
            mu[j][l] = C64::new(id + cell2.grad_mean[j][l], 0.0) + cell3.mean[j][l] * k2;
        }
    }
    mu
}

/// One row of a wavenumber sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub mu: Result<Tensor3, CellError>,
}

impl SweepRow {
    /// Mean of the diagonal entries.
    pub fn diag_mean(&self) -> Option<C64> {
        self.mu.as_ref().ok().map(|m| (m[0][0] + m[1][1] + m[2][2]) / 3.0)
    }
}

/// Interval of the wavenumber grid flagged as resonant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceInterval {
    pub k_lo: f64,
    pub k_hi: f64,
    /// Grid point of the largest `Im(diag mu)` in the interval.
    pub k_peak: f64,
    pub im_peak: f64,
    /// `Re(diag mu)` changes sign inside the interval.
    pub sign_change: bool,
}

/// Result of [`sweep_mu`].
#[derive(Debug, Clone)]
pub struct MuSweep {
    pub rows: Vec<SweepRow>,
    pub resonances: Vec<ResonanceInterval>,
}

/// Evaluates `mu_hom` on an increasing grid; cell problem 2 is solved once.
/// Failures at single wavenumbers are recorded in the row.
pub fn sweep_mu(cell: &MicroCell, k_grid: &[f64]) -> Result<MuSweep, CellError> {
    let cell2 = cell.solve_cell2()?;
    let rows: Vec<SweepRow> = k_grid
        .iter()
        .map(|&k| SweepRow { k, mu: cell.solve_cell3(k).map(|c3| compute_mu_hom(&cell2, &c3)) })
        .collect();
    let resonances = detect_resonances(&rows);
    Ok(MuSweep { rows, resonances })
}

/// Flags grid points where `Re(diag mu) < 0` or `Im(diag mu)` exceeds three
/// times its median, plus both ends of every sign change of `Re(diag mu)`.
/// Contiguous flagged runs become intervals; a run is kept when it contains
/// a sign change or an interior local maximum of `Im(diag mu)` above the
/// threshold.
pub fn detect_resonances(rows: &[SweepRow]) -> Vec<ResonanceInterval> {
    let pts: Vec<(f64, C64)> = rows.iter().filter_map(|r| r.diag_mean().map(|d| (r.k, d))).collect();
    let n = pts.len();
    if n == 0 {
        return Vec::new();
    }
    let mut im: Vec<f64> = pts.iter().map(|p| p.1.im).collect();
    im.sort_by(|a, b| a.total_cmp(b));
    let median = if n % 2 == 1 { im[n / 2] } else { 0.5 * (im[n / 2 - 1] + im[n / 2]) };
    let threshold = 3.0 * median;

    let mut flag = vec![false; n];
    let mut change = vec![false; n];
    let mut peak = vec![false; n];
    for i in 0..n {
        let (re, imv) = (pts[i].1.re, pts[i].1.im);
        if re < 0.0 || imv > threshold {
            flag[i] = true;
        }
        if i + 1 < n && (re < 0.0) != (pts[i + 1].1.re < 0.0) {
            flag[i] = true;
            flag[i + 1] = true;
            change[i] = true;
        }
        peak[i] = i > 0 && i + 1 < n && pts[i - 1].1.im < imv && pts[i + 1].1.im <= imv && imv > threshold;
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if !flag[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && flag[i + 1] {
            i += 1;
        }
        let end = i;
        let run = start..=end;
        let has_change = run.clone().any(|j| change[j] && j < end);
        let has_peak = run.clone().any(|j| peak[j]);
        if has_change || has_peak {
            let best = run.clone().max_by(|&a, &b| pts[a].1.im.total_cmp(&pts[b].1.im)).expect("non-empty run");
            out.push(ResonanceInterval {
                k_lo: pts[start].0,
                k_hi: pts[end].0,
                k_peak: pts[best].0,
                im_peak: pts[best].1.im,
                sign_change: has_change,
            });
        }
        i += 1;
    }
    out
}

/// Largest `|A_ij - A_ji|` of a complex tensor.
pub fn tensor_asymmetry(m: &Tensor3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((m[i][j] - m[j][i]).norm());
        }
    }
    worst
}

/// Eigenvalues of a real symmetric 3x3 matrix, ascending.
pub fn symmetric_eigenvalues(a: [[f64; 3]; 3]) -> [f64; 3] {
    // closed form via the trigonometric solution of the characteristic cubic
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| x.total_cmp(y));
        return d;
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let sq = |x: f64| x * x;
    let p2 = sq(a[0][0] - q) + sq(a[1][1] - q) + sq(a[2][2] - q) + 2.0 * p1;
    let p = math::sqrt(p2 / 6.0);
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = math::det3(b[0], b[1], b[2]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = libm::acos(r) / 3.0;
    let e1 = q + 2.0 * p * math::cos(phi);
    let e3 = q + 2.0 * p * math::cos(phi + 2.0 * core::f64::consts::PI / 3.0);
    let e2 = 3.0 * q - e1 - e3;
    [e3, e2, e1]
}

/// Real and imaginary parts of a complex tensor.
pub fn split_parts(m: &Tensor3) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    (m.map(|r| r.map(|z| z.re)), m.map(|r| r.map(|z| z.im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_validation() {
        assert!(MicroCoefficients::default().validate().is_ok());
        let bad = MicroCoefficients { eps0_inv: -1.0, ..Default::default() };
        assert!(matches!(bad.validate(), Err(CellError::Coefficients(_))));
        let gain = MicroCoefficients { eps1_inv: C64::new(1.0, 0.1), ..Default::default() };
        assert!(gain.validate().is_err());
    }

    #[test]
    fn empty_inclusion_is_trivial() {
        let c = MicroCoefficients { eps0_inv: 2.5, ..Default::default() };
        let cell = MicroCell::new(3, None, c).unwrap();
        let sol = cell.solve_all(7.0).unwrap();
        let t = sol.effective_tensors();
        for j in 0..3 {
            for l in 0..3 {
                let id = if j == l { 1.0 } else { 0.0 };
                assert!((t.eps_inv_hom[j][l] - 2.5 * id).abs() < 1e-10);
                assert!((t.mu_hom[j][l] - C64::new(id, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cubic_symmetry_of_eps() {
        let cell = MicroCell::standard(4, MicroCoefficients::default()).unwrap();
        let c1 = cell.solve_cell1().unwrap();
        let e = c1.eps_inv_hom;
        // the Kuhn split is invariant under axis permutations only
        for j in 0..3 {
            for l in 0..3 {
                assert!((e[j][l] - e[l][j]).abs() < 1e-10);
            }
        }
        assert!((e[0][0] - e[1][1]).abs() < 1e-8 && (e[1][1] - e[2][2]).abs() < 1e-8);
        assert!((e[0][1] - e[0][2]).abs() < 1e-8 && (e[0][1] - e[1][2]).abs() < 1e-8);
        assert!(e[0][1].abs() < 0.1 * e[0][0]);
        let ev = symmetric_eigenvalues(e);
        assert!(ev[0] > 0.0);
    }

    #[test]
    fn static_limit_keeps_outer_term() {
        let cell = MicroCell::standard(4, MicroCoefficients::default()).unwrap();
        let c2 = cell.solve_cell2().unwrap();
        let c3 = cell.solve_cell3(0.0).unwrap();
        let mu = compute_mu_hom(&c2, &c3);
        for j in 0..3 {
            for l in 0..3 {
                let id = if j == l { 1.0 } else { 0.0 };
                assert_eq!(mu[j][l], C64::new(id + c2.grad_mean[j][l], 0.0));
            }
        }
        assert!((c2.grad_mean[0][1] - c2.grad_mean[1][0]).abs() < 1e-10);
        assert!(c2.grad_mean[0][0] < 0.0);
    }

    #[test]
    fn even_in_k() {
        let cell = MicroCell::standard(4, MicroCoefficients::default()).unwrap();
        let a = cell.solve_cell3(6.0).unwrap();
        let b = cell.solve_cell3(-6.0).unwrap();
        assert_eq!(a.mean, b.mean);
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        let ev = symmetric_eigenvalues([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]]);
        for (a, b) in ev.iter().zip([1.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn detector_on_synthetic_lorentzian() {
        let grid: Vec<f64> = (0..=200).map(|i| 5.0 + 0.1 * i as f64).collect();
        let lorentz = |k: f64, k0: f64, a: f64| {
            let z = C64::new(k0 * k0 - k * k, -0.05 * k);
            C64::new(a, 0.0) * k * k / z
        };
        let rows: Vec<SweepRow> = grid
            .iter()
            .map(|&k| {
                let d = C64::new(1.0, 0.001) + lorentz(k, 8.9, 0.4) + lorentz(k, 19.9, 0.02);
                let z = C64::new(0.0, 0.0);
                SweepRow { k, mu: Ok([[d, z, z], [z, d, z], [z, z, d]]) }
            })
            .collect();
        let res = detect_resonances(&rows);
        assert_eq!(res.len(), 2, "{res:?}");
        assert!((res[0].k_peak - 8.9).abs() < 0.15);
        assert!(res[0].sign_change);
        assert!((res[1].k_peak - 19.9).abs() < 0.15);
    }
}
