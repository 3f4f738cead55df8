//! Heterogeneous multiscale driver: cell problems, effective macro solve,
//! correctors, reconstruction and error analysis.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::cell::{CellError, CellSolutions, EffectiveTensors, MicroCell, MicroCoefficients};
use crate::fem::{
    assemble_curlcurl, assemble_mass, assemble_p1_mass, assemble_p1_stiffness, p1_load_from_edge_field, quadrature,
    EdgeSpace, FieldFunction, NodalFlavor, NodalFunction, NodalSpace, Region,
};
use crate::linalg::{cg_projected, CgOptions, CsrMatrix, LinalgError};
use crate::math::{self, CVec3, Vec3};
use crate::mesh::{AxisBox, StructuredTetMesh, Tag};
use crate::scatter::{incident_plane_wave, solve_effective, MacroSolution, PlaneWave, ScatterConfig, ScatterError};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HmmError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("the Poisson solve for the gradient part did not converge")]
    Theta,
}

/// Geometry, incident wave and microstructure of a two-scale problem; the
/// wavenumber is supplied per solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmmConfig {
    pub domain: AxisBox,
    pub scatterer: AxisBox,
    pub direction: Vec3,
    pub polarization: Vec3,
    pub amplitude: C64,
    pub micro: MicroCoefficients,
    /// Inclusion `Sigma` inside the unit cell; `None` for a homogeneous cell.
    pub inclusion: Option<AxisBox>,
}

impl Default for HmmConfig {
    fn default() -> Self {
        Self {
            domain: AxisBox::unit(),
            scatterer: AxisBox::cube(0.25, 0.75).expect("valid box"),
            direction: math::unit(0),
            polarization: math::unit(1),
            amplitude: C64::new(1.0, 0.0),
            micro: MicroCoefficients::default(),
            inclusion: Some(AxisBox::cube(0.25, 0.75).expect("valid box")),
        }
    }
}

impl HmmConfig {
    pub fn wave(&self, k: f64) -> Result<PlaneWave, HmmError> {
        Ok(incident_plane_wave(k, self.direction, self.polarization, self.amplitude)?)
    }

    pub fn scatter_config(&self, tensors: EffectiveTensors) -> Result<ScatterConfig, HmmError> {
        Ok(ScatterConfig { domain: self.domain, scatterer: self.scatterer, wave: self.wave(tensors.k)?, tensors })
    }

    pub fn macro_mesh(&self, n: usize) -> Result<Arc<StructuredTetMesh>, HmmError> {
        let mesh = crate::mesh::build_box_mesh(self.domain, n, Some(self.scatterer)).map_err(ScatterError::from)?;
        Ok(Arc::new(mesh))
    }

    pub fn micro_cell(&self, n: usize) -> Result<MicroCell, HmmError> {
        Ok(MicroCell::new(n, self.inclusion, self.micro)?)
    }
}

/// Corrector weights on one macro tetrahedron inside the scatterer:
/// `curl u_H` for the first corrector and `u_H` at the four points of the
/// quadratic rule for the second and third.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorWeights {
    pub tet: usize,
    pub curl: CVec3,
    pub values: [CVec3; 4],
}

/// Macro solution together with the cell solutions and corrector weights.
#[derive(Debug, Clone)]
pub struct HmmSolution {
    pub macro_solution: MacroSolution,
    pub cells: CellSolutions,
    pub tensors: EffectiveTensors,
    pub correctors: Vec<CorrectorWeights>,
    pub micro_diameter: f64,
}

fn combine(weights: CVec3, fields: [&[C64]; 3], scale: C64) -> Vec<C64> {
    let n = fields[0].len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for j in 0..3 {
        let w = weights[j] * scale;
        for (o, f) in out.iter_mut().zip(fields[j]) {
            *o += w * f;
        }
    }
    out
}

impl HmmSolution {
    pub fn k(&self) -> f64 {
        self.macro_solution.k
    }

    pub fn u_h(&self) -> &FieldFunction {
        &self.macro_solution.u_h
    }

    /// `u_{h,1}` on macro tet `correctors[i].tet`: `sum_j (curl u_H)_j w1_j`.
    pub fn corrector1(&self, i: usize) -> Vec<C64> {
        let w = &self.cells.cell1.w1;
        combine(self.correctors[i].curl, [&w[0].coeffs, &w[1].coeffs, &w[2].coeffs], C64::new(1.0, 0.0))
    }

    /// `u_{h,2}` at quadrature point `q`: `sum_j (u_H)_j p_j`.
    pub fn corrector2(&self, i: usize, q: usize) -> Vec<C64> {
        let p = &self.cells.cell2.p;
        combine(self.correctors[i].values[q], [&p[0].coeffs, &p[1].coeffs, &p[2].coeffs], C64::new(1.0, 0.0))
    }

    /// `u_{h,3}` at quadrature point `q`: `k^2 sum_j (u_H)_j w3_j`.
    pub fn corrector3(&self, i: usize, q: usize) -> Vec<C64> {
        let w = &self.cells.cell3.w3;
        let k2 = self.cells.cell3.k * self.cells.cell3.k;
        combine(self.correctors[i].values[q], [&w[0].coeffs, &w[1].coeffs, &w[2].coeffs], C64::new(k2, 0.0))
    }
}

/// Solves the cell problems on `cell`, the effective macro problem on
/// `macro_mesh`, and records the corrector weights.
pub fn hmm_solve(
    config: &HmmConfig,
    macro_mesh: &Arc<StructuredTetMesh>,
    cell: &MicroCell,
    k: f64,
) -> Result<HmmSolution, HmmError> {
    let cells = cell.solve_all(k)?;
    let tensors = cells.effective_tensors();
    let scatter = config.scatter_config(tensors)?;
    let macro_solution = solve_effective(&scatter, macro_mesh)?;
    let rule = quadrature::tet_degree2();
    let u = &macro_solution.u_h;
    let correctors = (0..macro_mesh.n_tets())
        .filter(|&t| macro_mesh.tags()[t] == Tag::Inside)
        .map(|t| CorrectorWeights {
            tet: t,
            curl: u.curl_in(t),
            values: core::array::from_fn(|q| {
                let p = &rule.points[q];
                u.value_in(t, p)
            }),
        })
        .collect();
    Ok(HmmSolution { macro_solution, cells, tensors, correctors, micro_diameter: cell.mesh().diameter() })
}

/// Wraps `x / delta` into the unit cell.
fn wrap(x: Vec3, delta: f64) -> Vec3 {
    x.map(|c| {
        let y = c / delta;
        let f = y - math::floor(y);
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    })
}

/// `u_H + grad_y u_{h,2}(x, x/delta) + u_{h,3}(x, x/delta)` at every point;
/// outside the scatterer only `u_H` remains. Points outside the domain give
/// `None`.
pub fn zeroth_order_field(hmm: &HmmSolution, delta: f64, points: &[Vec3]) -> Vec<Option<CVec3>> {
    let u = hmm.u_h();
    let macro_mesh = u.space.mesh();
    let micro_mesh = hmm.cells.cell3.w3[0].space.mesh();
    let k2 = hmm.cells.cell3.k * hmm.cells.cell3.k;
    points
        .iter()
        .map(|&x| {
            let (t, lam) = macro_mesh.locate(x)?;
            let mut v = u.value_in(t, &lam);
            if macro_mesh.tags()[t] != Tag::Inside {
                return Some(v);
            }
            let y = wrap(x, delta);
            let (s, mu) = micro_mesh.locate(y)?;
            let micro: [CVec3; 3] = match micro_mesh.tags()[s] {
                Tag::Outside => core::array::from_fn(|j| hmm.cells.cell2.p[j].grad_in(s)),
                Tag::Inside => core::array::from_fn(|j| {
                    hmm.cells.cell3.w3[j].value_in(s, &mu).map(|z| z * k2)
                }),
            };
            let base = v;
            for (j, m) in micro.iter().enumerate() {
                for i in 0..3 {
                    v[i] += base[j] * m[i];
                }
            }
            Some(v)
        })
        .collect()
}

/// Coarse edge field carried to a nested finer mesh by exact line integrals
/// along the fine edges.
pub fn transfer_to(coarse: &FieldFunction, fine: &Arc<EdgeSpace>) -> Result<FieldFunction, HmmError> {
    let cm = coarse.space.mesh();
    let fm = fine.mesh();
    let (cn, fnn) = (cm.n_per_axis(), fm.n_per_axis());
    if fnn % cn != 0 || cm.bbox() != fm.bbox() {
        return Err(HmmError::Config("meshes are not nested"));
    }
    let (s, w) = quadrature::line_gauss2();
    let mut coeffs = vec![C64::new(0.0, 0.0); fine.n_dofs()];
    for (e, &[a, b]) in fm.edges().iter().enumerate() {
        let Some(d) = fine.edge_dof(e) else { continue };
        let (pa, pb) = (fm.vertices()[a], fm.vertices()[b]);
        let tan = math::sub(pb, pa);
        let mid = math::add(pa, math::scale(0.5, tan));
        let (t, _) = cm.locate(mid).ok_or(HmmError::Config("fine edge outside the coarse mesh"))?;
        let mut v = C64::new(0.0, 0.0);
        for q in 0..2 {
            let x = math::add(pa, math::scale(s[q], tan));
            let lam = cm.barycentric(t, x);
            v += math::rcdot(tan, coarse.value_in(t, &lam)) * w[q];
        }
        coeffs[d.index] = v * d.sign;
    }
    Ok(FieldFunction::new(fine.clone(), coeffs))
}

/// Fine reference field with the matrices needed for error norms.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub field: FieldFunction,
    pub k: f64,
    mass: CsrMatrix,
    curl: CsrMatrix,
    nodal: Arc<NodalSpace>,
    stiffness: CsrMatrix,
    nodal_mass: CsrMatrix,
}

impl ReferenceSolution {
    pub fn new(field: FieldFunction, k: f64) -> Self {
        let mass = assemble_mass(&field.space, 1.0.into());
        let curl = assemble_curlcurl(&field.space, 1.0.into());
        let nodal = Arc::new(NodalSpace::new(field.space.mesh_arc().clone(), Region::All, NodalFlavor::ZeroBoundary));
        let stiffness = assemble_p1_stiffness(&nodal, &|_| 1.0);
        let nodal_mass = assemble_p1_mass(&nodal);
        Self { field, k, mass, curl, nodal, stiffness, nodal_mass }
    }

    pub fn n_per_axis(&self) -> usize {
        self.field.space.mesh().n_per_axis()
    }

    /// `theta` in the zero-boundary P1 space with
    /// `int grad theta . grad phi = int e . grad phi`, and `||theta||_{L2}`.
    pub fn helmholtz_theta(&self, e: &FieldFunction) -> Result<(NodalFunction, f64), HmmError> {
        if !Arc::ptr_eq(&e.space, &self.field.space) {
            return Err(HmmError::Config("field does not live on the reference space"));
        }
        let edge = e.space.edge_coefficients(&e.coeffs);
        let b = p1_load_from_edge_field(&self.nodal, &edge);
        let opts = CgOptions { tol: 1e-10, max_iter: 50_000, ..CgOptions::default() };
        let (x, rep) = cg_projected(&self.stiffness, &b, &|_: &mut [C64]| {}, opts)?;
        if !rep.converged {
            return Err(HmmError::Theta);
        }
        let l2 = math::sqrt(self.nodal_mass.quadratic(&x).re.max(0.0));
        Ok((NodalFunction::new(self.nodal.clone(), x), l2))
    }
}

/// `theta` and `||theta||_{L2}` for a field on any mesh of the domain.
pub fn helmholtz_theta(e: &FieldFunction) -> Result<(NodalFunction, f64), HmmError> {
    ReferenceSolution::new(e.clone(), 0.0).helmholtz_theta(e)
}

/// Errors of a macro field against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub n_macro: usize,
    pub h_macro: f64,
    pub n_micro: Option<usize>,
    pub h_micro: Option<f64>,
    pub k: f64,
    pub l2: f64,
    pub curl_semi: f64,
    pub theta_l2: f64,
}

/// `||e||`, `||curl e||` and `||theta||` for `e = u_ref - u_H`, computed on
/// the reference mesh.
pub fn error_norms(u_h: &FieldFunction, reference: &ReferenceSolution) -> Result<ErrorReport, HmmError> {
    let fine = &reference.field.space;
    let moved = transfer_to(u_h, fine)?;
    let coeffs: Vec<C64> = reference.field.coeffs.iter().zip(&moved.coeffs).map(|(a, b)| a - b).collect();
    let e = FieldFunction::new(fine.clone(), coeffs);
    let q = |m: &CsrMatrix| math::sqrt(m.quadratic(&e.coeffs).re.max(0.0));
    let (_, theta_l2) = reference.helmholtz_theta(&e)?;
    let mesh = u_h.space.mesh();
    Ok(ErrorReport {
        n_macro: mesh.n_per_axis(),
        h_macro: mesh.diameter(),
        n_micro: None,
        h_micro: None,
        k: reference.k,
        l2: q(&reference.mass),
        curl_semi: q(&reference.curl),
        theta_l2,
    })
}

/// `ln(e_i / e_{i+1}) / ln(H_i / H_{i+1})` between consecutive rows;
/// `None` where an error is not positive.
pub fn eoc(rows: &[(f64, f64)]) -> Vec<Option<f64>> {
    rows.windows(2)
        .map(|w| {
            let ((h1, e1), (h2, e2)) = (w[0], w[1]);
            if e1 > 0.0 && e2 > 0.0 && h1 > 0.0 && h2 > 0.0 && h1 != h2 {
                Some(math::ln(e1 / e2) / math::ln(h1 / h2))
            } else {
                None
            }
        })
        .collect()
}

/// One row of a convergence table; the orders refer to the interval ending
/// at this row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub error: ErrorReport,
    pub eoc_l2: Option<f64>,
    pub eoc_curl: Option<f64>,
    pub eoc_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub k: f64,
    pub reference_n: usize,
    pub rows: Vec<StudyRow>,
}

impl ConvergenceReport {
    /// Builds the table from per-mesh errors, sorted by decreasing `H`.
    pub fn from_errors(k: f64, reference_n: usize, mut errors: Vec<ErrorReport>) -> Self {
        errors.sort_by(|a, b| b.h_macro.total_cmp(&a.h_macro));
        let col = |f: fn(&ErrorReport) -> f64| -> Vec<Option<f64>> {
            let pts: Vec<(f64, f64)> = errors.iter().map(|e| (e.h_macro, f(e))).collect();
            let mut out = vec![None];
            out.extend(eoc(&pts));
            out
        };
        let (l2, cu, th) = (col(|e| e.l2), col(|e| e.curl_semi), col(|e| e.theta_l2));
        let rows = errors
            .into_iter()
            .enumerate()
            .map(|(i, error)| StudyRow { error, eoc_l2: l2[i], eoc_curl: cu[i], eoc_theta: th[i] })
            .collect();
        Self { k, reference_n, rows }
    }
}

/// Effective solution on the reference macro mesh with tensors from the
/// reference micro mesh.
pub fn reference_solution(
    config: &HmmConfig,
    n_macro: usize,
    n_micro: usize,
    k: f64,
) -> Result<ReferenceSolution, HmmError> {
    let mesh = config.macro_mesh(n_macro)?;
    let cell = config.micro_cell(n_micro)?;
    let hmm = hmm_solve(config, &mesh, &cell, k)?;
    Ok(ReferenceSolution::new(hmm.macro_solution.u_h, k))
}

/// HMM solve with `n` cells per axis on both scales and its errors.
pub fn study_row(config: &HmmConfig, n: usize, reference: &ReferenceSolution) -> Result<ErrorReport, HmmError> {
    if n >= reference.n_per_axis() {
        return Err(HmmError::Config("reference must be finer than every study mesh"));
    }
    let mesh = config.macro_mesh(n)?;
    let cell = config.micro_cell(n)?;
    let hmm = hmm_solve(config, &mesh, &cell, reference.k)?;
    let mut err = error_norms(hmm.u_h(), reference)?;
    err.n_micro = Some(n);
    err.h_micro = Some(hmm.micro_diameter);
    Ok(err)
}

/// Runs [`study_row`] for every mesh and assembles the table.
pub fn convergence_study(
    config: &HmmConfig,
    meshes: &[usize],
    reference: &ReferenceSolution,
) -> Result<ConvergenceReport, HmmError> {
    if meshes.is_empty() {
        return Err(HmmError::Config("at least one study mesh is required"));
    }
    let errors = meshes.iter().map(|&n| study_row(config, n, reference)).collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceReport::from_errors(reference.k, reference.n_per_axis(), errors))
}

/// Sample points at the tet barycenters of the macro mesh that lie in the
/// scatterer, for amplitude statistics of reconstructed fields.
pub fn scatterer_barycenters(mesh: &StructuredTetMesh) -> Vec<Vec3> {
    (0..mesh.n_tets()).filter(|&t| mesh.tags()[t] == Tag::Inside).map(|t| mesh.tet_barycenter(t)).collect()
}
