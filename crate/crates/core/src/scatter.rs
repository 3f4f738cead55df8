//! Effective macroscopic scattering problem on a box with an impedance
//! boundary condition and plane-wave incident data.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cell::EffectiveTensors;
use crate::fem::{
    assemble_boundary_load, assemble_boundary_tangential_mass, assemble_curlcurl, assemble_mass, identity_tensor,
    Coefficient, EdgeFlavor, EdgeSpace, FieldFunction, Region, Tensor3,
};
use crate::linalg::{self, CsrMatrix, LinalgError, LuFactors, SolverReport};
use crate::math::{self, CVec3, Vec3};
use crate::mesh::{build_box_mesh, AxisBox, MeshError, StructuredTetMesh, Tag};
use crate::C64;

/// Largest accepted relative residual of the macro solve.
pub const MACRO_RESIDUAL_TOL: f64 = 1e-8;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatterError {
    #[error("invalid scattering configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("macro system is singular (pivot row {row})")]
    Singular { row: usize },
    #[error("macro solve residual {0:.3e} exceeds tolerance")]
    Residual(f64),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for ScatterError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Singular { row } => ScatterError::Singular { row },
            other => ScatterError::Linalg(other),
        }
    }
}

/// `u_inc(x) = a exp(-i k d . x) p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: f64,
    pub direction: Vec3,
    pub polarization: Vec3,
    pub amplitude: C64,
}

/// Checks `|d| = |p| = 1` and `p . d = 0`.
pub fn incident_plane_wave(
    k: f64,
    direction: Vec3,
    polarization: Vec3,
    amplitude: C64,
) -> Result<PlaneWave, ScatterError> {
    if !k.is_finite() {
        return Err(ScatterError::Config("wavenumber must be finite"));
    }
    if (math::norm(direction) - 1.0).abs() > UNIT_TOL {
        return Err(ScatterError::Config("direction must be a unit vector"));
    }
    if (math::norm(polarization) - 1.0).abs() > UNIT_TOL {
        return Err(ScatterError::Config("polarization must be a unit vector"));
    }
    if math::dot(direction, polarization).abs() > UNIT_TOL {
        return Err(ScatterError::Config("polarization must be orthogonal to the direction"));
    }
    Ok(PlaneWave { k, direction, polarization, amplitude })
}

impl PlaneWave {
    /// `exp(-i k x_1) e_2`.
    pub fn standard(k: f64) -> Self {
        Self { k, direction: math::unit(0), polarization: math::unit(1), amplitude: C64::new(1.0, 0.0) }
    }

    fn phase(&self, x: Vec3) -> C64 {
        self.amplitude * math::cis(-self.k * math::dot(self.direction, x))
    }

    pub fn value(&self, x: Vec3) -> CVec3 {
        let ph = self.phase(x);
        self.polarization.map(|p| ph * p)
    }

    /// `curl u_inc = -i k (d x p) u_inc / p`.
    pub fn curl(&self, x: Vec3) -> CVec3 {
        let f = self.phase(x) * C64::new(0.0, -self.k);
        math::cross(self.direction, self.polarization).map(|c| f * c)
    }
}

/// `g = curl u_inc x n - i k (n x u_inc) x n` at `x` with outward normal `n`.
pub fn impedance_trace_g(wave: &PlaneWave, x: Vec3, normal: Vec3) -> CVec3 {
    let u = wave.value(x);
    let cu = wave.curl(x);
    let n = math::to_complex(normal);
    let a = math::ccross(cu, n);
    let t = math::ccross(math::ccross(n, u), n);
    let ik = C64::new(0.0, wave.k);
    core::array::from_fn(|i| a[i] - ik * t[i])
}

/// Outer domain `G`, scatterer `Omega`, incident wave and the effective
/// tensors inside `Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterConfig {
    pub domain: AxisBox,
    pub scatterer: AxisBox,
    pub wave: PlaneWave,
    pub tensors: EffectiveTensors,
}

impl ScatterConfig {
    /// `G = (0,1)^3`, `Omega = (0.25, 0.75)^3`, the standard wave.
    pub fn standard(tensors: EffectiveTensors) -> Self {
        Self {
            domain: AxisBox::unit(),
            scatterer: AxisBox::cube(0.25, 0.75).expect("valid box"),
            wave: PlaneWave::standard(tensors.k),
            tensors,
        }
    }

    /// Identity tensors in `Omega`, i.e. free space.
    pub fn free_space(domain: AxisBox, scatterer: AxisBox, wave: PlaneWave) -> Self {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let tensors = EffectiveTensors { eps_inv_hom: id, mu_hom: identity_tensor(), k: wave.k };
        Self { domain, scatterer, wave, tensors }
    }

    pub fn k(&self) -> f64 {
        self.wave.k
    }

    pub fn validate(&self) -> Result<(), ScatterError> {
        if !self.domain.contains_box_strictly(&self.scatterer) {
            return Err(ScatterError::Config("scatterer must lie strictly inside the domain"));
        }
        let k = self.k();
        if !(k.is_finite() && k > 0.0) {
            return Err(ScatterError::Config("wavenumber must be positive"));
        }
        if (self.tensors.k - k).abs() > 1e-12 * k.max(1.0) {
            return Err(ScatterError::Config("effective tensors were computed at a different wavenumber"));
        }
        Ok(())
    }

    /// Structured mesh of `G` with `n` cells per axis resolving `Omega`.
    pub fn mesh(&self, n: usize) -> Result<StructuredTetMesh, ScatterError> {
        Ok(build_box_mesh(self.domain, n, Some(self.scatterer))?)
    }

    fn eps_tensor(&self, tag: Tag) -> Tensor3 {
        match tag {
            Tag::Inside => self.tensors.eps_inv_hom.map(|r| r.map(|v| C64::new(v, 0.0))),
            Tag::Outside => identity_tensor(),
        }
    }

    fn mu_tensor(&self, tag: Tag) -> Tensor3 {
        match tag {
            Tag::Inside => self.tensors.mu_hom,
            Tag::Outside => identity_tensor(),
        }
    }
}

/// Blocks and right-hand side of the effective system
/// `A = K(eps) - k^2 M(mu) - i k B`.
#[derive(Debug, Clone)]
pub struct EffectiveSystem {
    pub space: Arc<EdgeSpace>,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary: CsrMatrix,
    pub matrix: CsrMatrix,
    pub rhs: Vec<C64>,
    pub k: f64,
}

fn check_mesh(config: &ScatterConfig, mesh: &StructuredTetMesh) -> Result<(), ScatterError> {
    let close = |a: &AxisBox, b: &AxisBox| {
        (0..3).all(|i| (a.lo()[i] - b.lo()[i]).abs() < 1e-12 && (a.hi()[i] - b.hi()[i]).abs() < 1e-12)
    };
    if !close(mesh.bbox(), &config.domain) {
        return Err(ScatterError::Config("mesh box differs from the domain"));
    }
    match mesh.inclusion() {
        Some(inc) if close(inc, &config.scatterer) => Ok(()),
        _ => Err(ScatterError::Config("mesh does not resolve the scatterer")),
    }
}

pub fn assemble_effective_system(
    config: &ScatterConfig,
    mesh: &Arc<StructuredTetMesh>,
) -> Result<EffectiveSystem, ScatterError> {
    config.validate()?;
    check_mesh(config, mesh)?;
    let space = Arc::new(EdgeSpace::new(mesh.clone(), Region::All, EdgeFlavor::Unconstrained));
    let tags = mesh.tags();
    let eps = |t: usize| config.eps_tensor(tags[t]);
    let mu = |t: usize| config.mu_tensor(tags[t]);
    let stiffness = assemble_curlcurl(&space, Coefficient::PerTet(&eps));
    let mass = assemble_mass(&space, Coefficient::PerTet(&mu));
    let boundary = assemble_boundary_tangential_mass(&space);
    let k = config.k();
    let matrix = stiffness
        .axpby(C64::new(1.0, 0.0), &mass, C64::new(-k * k, 0.0))
        .axpby(C64::new(1.0, 0.0), &boundary, C64::new(0.0, -k));
    let wave = config.wave;
    let rhs = assemble_boundary_load(&space, &|x, n| impedance_trace_g(&wave, x, n));
    Ok(EffectiveSystem { space, stiffness, mass, boundary, matrix, rhs, k })
}

/// Imaginary parts of the energy identity obtained by testing with the
/// solution itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    /// `Im(conj(u)^T b)`.
    pub source: f64,
    /// `-k^2 Im(conj(u)^T M u)`.
    pub absorption: f64,
    /// `-k conj(u)^T B u`.
    pub boundary: f64,
}

impl EnergyBalance {
    pub fn relative_defect(&self) -> f64 {
        let lhs = self.absorption + self.boundary;
        let scale = self.source.abs().max(self.absorption.abs()).max(self.boundary.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.source - lhs).abs() / scale
        }
    }
}

impl EffectiveSystem {
    pub fn energy_balance(&self, u: &[C64]) -> EnergyBalance {
        let uc: Vec<C64> = u.iter().map(|z| z.conj()).collect();
        let source = linalg::dotc(u, &self.rhs).im;
        let absorption = -self.k * self.k * self.mass.bilinear(&uc, u).im;
        let boundary = -self.k * self.boundary.bilinear(&uc, u).re;
        EnergyBalance { source, absorption, boundary }
    }
}

/// Discrete effective solution `u_H`.
#[derive(Debug, Clone)]
pub struct MacroSolution {
    pub u_h: FieldFunction,
    pub k: f64,
    pub n_per_axis: usize,
    pub diameter: f64,
    pub report: SolverReport,
    pub energy: EnergyBalance,
}

impl MacroSolution {
    pub fn mesh(&self) -> &StructuredTetMesh {
        self.u_h.space.mesh()
    }
}

pub fn solve_effective(config: &ScatterConfig, mesh: &Arc<StructuredTetMesh>) -> Result<MacroSolution, ScatterError> {
    let system = assemble_effective_system(config, mesh)?;
    solve_system(&system)
}

/// Direct solve of an assembled effective system.
pub fn solve_system(system: &EffectiveSystem) -> Result<MacroSolution, ScatterError> {
    let lu = LuFactors::factorize(&system.matrix)?;
    let (x, report) = linalg::solve_refined(&system.matrix, &lu, &system.rhs)?;
    if report.residual > MACRO_RESIDUAL_TOL || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ScatterError::Residual(report.residual));
    }
    let energy = system.energy_balance(&x);
    let mesh = system.space.mesh();
    Ok(MacroSolution {
        k: system.k,
        n_per_axis: mesh.n_per_axis(),
        diameter: mesh.diameter(),
        u_h: FieldFunction::new(system.space.clone(), x),
        report,
        energy,
    })
}

/// Samples of a field on the plane `x_axis = offset`, taken at the centers
/// of an `m x m` grid of squares covering the domain face.
pub fn plane_slice(u: &FieldFunction, axis: usize, offset: f64, m: usize) -> Vec<(Vec3, CVec3)> {
    let bbox = *u.space.mesh().bbox();
    let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let mut p = [0.0; 3];
            p[axis] = offset;
            p[a] = bbox.lo()[a] + bbox.side(a) * (i as f64 + 0.5) / m as f64;
            p[b] = bbox.lo()[b] + bbox.side(b) * (j as f64 + 0.5) / m as f64;
            if let Some(v) = u.eval(p) {
                out.push((p, v));
            }
        }
    }
    out
}
