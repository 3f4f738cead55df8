//! Lowest-order Nédélec edge elements and linear nodal elements on
//! [`StructuredTetMesh`], with constrained spaces, assembly, interpolation
//! and norms.

mod assemble;
mod field;
pub mod quadrature;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, Vec3};
use crate::mesh::{PeriodicIdentification, StructuredTetMesh, Tag, LOCAL_EDGES, LOCAL_FACES};
use crate::C64;

pub use assemble::{
    assemble_boundary_load, assemble_boundary_tangential_mass, assemble_curlcurl, assemble_edge_load,
    assemble_mass, assemble_p1_gradient_load, assemble_p1_mass, assemble_p1_stiffness, p1_load_from_edge_field,
    Coefficient,
};
pub use field::{interpolate_edge, weighted_norms, FieldFunction, NodalFunction, WeightedNorms};

/// Complex 3x3 tensor, row-major.
pub type Tensor3 = [[C64; 3]; 3];

pub fn scalar_tensor(c: C64) -> Tensor3 {
    let z = C64::new(0.0, 0.0);
    [[c, z, z], [z, c, z], [z, z, c]]
}

pub fn identity_tensor() -> Tensor3 {
    scalar_tensor(C64::new(1.0, 0.0))
}

/// Which tetrahedra a space lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    All,
    Inside,
    Outside,
}

impl Region {
    pub fn contains(self, tag: Tag) -> bool {
        match self {
            Region::All => true,
            Region::Inside => tag == Tag::Inside,
            Region::Outside => tag == Tag::Outside,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFlavor {
    Unconstrained,
    /// Edges on the boundary of the region carry no unknown.
    ZeroTangentialTrace,
    /// Opposite faces of the cell are identified.
    PeriodicQuotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodalFlavor {
    Unconstrained,
    /// Periodic, with the mean fixed to zero after each solve.
    PeriodicZeroMean,
    /// Vertices on the boundary of the region carry no unknown.
    ZeroBoundary,
}

/// Geometry of one tetrahedron: volume and gradients of the barycentric
/// coordinates.
#[derive(Debug, Clone, Copy)]
pub struct TetGeometry {
    pub vertices: [Vec3; 4],
    pub volume: f64,
    pub grads: [Vec3; 4],
}

impl TetGeometry {
    pub fn new(mesh: &StructuredTetMesh, t: usize) -> Self {
        let v = mesh.tet_vertices(t);
        let e1 = math::sub(v[1], v[0]);
        let e2 = math::sub(v[2], v[0]);
        let e3 = math::sub(v[3], v[0]);
        let det = math::det3(e1, e2, e3);
        let g1 = math::scale(1.0 / det, math::cross(e2, e3));
        let g2 = math::scale(1.0 / det, math::cross(e3, e1));
        let g3 = math::scale(1.0 / det, math::cross(e1, e2));
        let g0 = math::scale(-1.0, math::add(math::add(g1, g2), g3));
        Self { vertices: v, volume: det / 6.0, grads: [g0, g1, g2, g3] }
    }

    pub fn point(&self, lam: &[f64; 4]) -> Vec3 {
        let mut p = [0.0; 3];
        for (l, v) in lam.iter().zip(&self.vertices) {
            p = math::add(p, math::scale(*l, *v));
        }
        p
    }

    /// Whitney function of local edge `e` (reference orientation) at `lam`.
    pub fn whitney(&self, e: usize, lam: &[f64; 4]) -> Vec3 {
        let [i, j] = LOCAL_EDGES[e];
        math::sub(math::scale(lam[i], self.grads[j]), math::scale(lam[j], self.grads[i]))
    }

    /// Constant curl of the Whitney function of local edge `e`.
    pub fn whitney_curl(&self, e: usize) -> Vec3 {
        let [i, j] = LOCAL_EDGES[e];
        math::scale(2.0, math::cross(self.grads[i], self.grads[j]))
    }

    /// `int_T phi_e dx`.
    pub fn whitney_mean(&self, e: usize) -> Vec3 {
        let [i, j] = LOCAL_EDGES[e];
        math::scale(self.volume / 4.0, math::sub(self.grads[j], self.grads[i]))
    }
}

/// Degree of freedom attached to a mesh entity with its orientation sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dof {
    pub index: usize,
    pub sign: f64,
}

/// Faces of region tetrahedra that are not shared by two region tetrahedra.
fn region_boundary_faces(mesh: &StructuredTetMesh, region: Region) -> Vec<[usize; 3]> {
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (t, tet) in mesh.tets().iter().enumerate() {
        if !region.contains(mesh.tags()[t]) {
            continue;
        }
        for lf in LOCAL_FACES {
            let mut f = [tet[lf[0]], tet[lf[1]], tet[lf[2]]];
            f.sort_unstable();
            faces.push(f);
        }
    }
    faces.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < faces.len() {
        let mut j = i + 1;
        while j < faces.len() && faces[j] == faces[i] {
            j += 1;
        }
        if j - i == 1 {
            out.push(faces[i]);
        }
        i = j;
    }
    out
}

fn region_tets(mesh: &StructuredTetMesh, region: Region) -> Vec<usize> {
    (0..mesh.n_tets()).filter(|&t| region.contains(mesh.tags()[t])).collect()
}

/// Lowest-order edge element space.
#[derive(Debug, Clone)]
pub struct EdgeSpace {
    mesh: Arc<StructuredTetMesh>,
    region: Region,
    flavor: EdgeFlavor,
    tets: Vec<usize>,
    edge_dof: Vec<Option<Dof>>,
    n_dofs: usize,
}

impl EdgeSpace {
    pub fn new(mesh: Arc<StructuredTetMesh>, region: Region, flavor: EdgeFlavor) -> Self {
        let tets = region_tets(&mesh, region);
        let mut used = vec![false; mesh.n_edges()];
        for &t in &tets {
            for se in &mesh.tet_edges()[t] {
                used[se.edge] = true;
            }
        }
        let mut edge_dof = vec![None; mesh.n_edges()];
        let mut n_dofs = 0;
        match flavor {
            EdgeFlavor::Unconstrained | EdgeFlavor::ZeroTangentialTrace => {
                if flavor == EdgeFlavor::ZeroTangentialTrace {
                    for f in region_boundary_faces(&mesh, region) {
                        for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
                            let e = mesh.find_edge(a, b).expect("face edge exists");
                            used[e] = false;
                        }
                    }
                }
                for (e, slot) in edge_dof.iter_mut().enumerate() {
                    if used[e] {
                        *slot = Some(Dof { index: n_dofs, sign: 1.0 });
                        n_dofs += 1;
                    }
                }
            }
            EdgeFlavor::PeriodicQuotient => {
                let ident = PeriodicIdentification::new(&mesh);
                let mut rep_used = vec![false; mesh.n_edges()];
                for e in 0..mesh.n_edges() {
                    if used[e] {
                        rep_used[ident.edge_rep(e).edge] = true;
                    }
                }
                let mut rep_dof = vec![usize::MAX; mesh.n_edges()];
                for (r, slot) in rep_dof.iter_mut().enumerate() {
                    if rep_used[r] {
                        *slot = n_dofs;
                        n_dofs += 1;
                    }
                }
                for e in 0..mesh.n_edges() {
                    if used[e] {
                        let r = ident.edge_rep(e);
                        edge_dof[e] = Some(Dof { index: rep_dof[r.edge], sign: r.sign });
                    }
                }
            }
        }
        Self { mesh, region, flavor, tets, edge_dof, n_dofs }
    }

    pub fn mesh(&self) -> &StructuredTetMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<StructuredTetMesh> {
        &self.mesh
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn flavor(&self) -> EdgeFlavor {
        self.flavor
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Tetrahedra of the region, ascending.
    pub fn tets(&self) -> &[usize] {
        &self.tets
    }

    pub fn edge_dof(&self, e: usize) -> Option<Dof> {
        self.edge_dof[e]
    }

    /// Degrees of freedom of the six local edges of `t`; the sign maps the
    /// local reference orientation to the dof orientation.
    pub fn local_dofs(&self, t: usize) -> [Option<Dof>; 6] {
        let te = &self.mesh.tet_edges()[t];
        core::array::from_fn(|i| self.edge_dof[te[i].edge].map(|d| Dof { index: d.index, sign: d.sign * te[i].sign }))
    }

    /// Coefficient of every mesh edge (global orientation), zero where the
    /// space has no unknown.
    pub fn edge_coefficients(&self, u: &[C64]) -> Vec<C64> {
        self.edge_dof
            .iter()
            .map(|d| match d {
                Some(d) => u[d.index] * d.sign,
                None => C64::new(0.0, 0.0),
            })
            .collect()
    }
}

/// Linear Lagrange element space.
#[derive(Debug, Clone)]
pub struct NodalSpace {
    mesh: Arc<StructuredTetMesh>,
    region: Region,
    flavor: NodalFlavor,
    tets: Vec<usize>,
    vertex_dof: Vec<Option<usize>>,
    n_dofs: usize,
}

impl NodalSpace {
    pub fn new(mesh: Arc<StructuredTetMesh>, region: Region, flavor: NodalFlavor) -> Self {
        let tets = region_tets(&mesh, region);
        let mut used = vec![false; mesh.n_vertices()];
        for &t in &tets {
            for &v in &mesh.tets()[t] {
                used[v] = true;
            }
        }
        let mut vertex_dof = vec![None; mesh.n_vertices()];
        let mut n_dofs = 0;
        match flavor {
            NodalFlavor::Unconstrained | NodalFlavor::ZeroBoundary => {
                if flavor == NodalFlavor::ZeroBoundary {
                    for f in region_boundary_faces(&mesh, region) {
                        for v in f {
                            used[v] = false;
                        }
                    }
                }
                for (v, slot) in vertex_dof.iter_mut().enumerate() {
                    if used[v] {
                        *slot = Some(n_dofs);
                        n_dofs += 1;
                    }
                }
            }
            NodalFlavor::PeriodicZeroMean => {
                let ident = PeriodicIdentification::new(&mesh);
                let mut rep_used = vec![false; mesh.n_vertices()];
                for v in 0..mesh.n_vertices() {
                    if used[v] {
                        rep_used[ident.vertex_rep(v)] = true;
                    }
                }
                let mut rep_dof = vec![usize::MAX; mesh.n_vertices()];
                for (r, slot) in rep_dof.iter_mut().enumerate() {
                    if rep_used[r] {
                        *slot = n_dofs;
                        n_dofs += 1;
                    }
                }
                for v in 0..mesh.n_vertices() {
                    if used[v] {
                        vertex_dof[v] = Some(rep_dof[ident.vertex_rep(v)]);
                    }
                }
            }
        }
        Self { mesh, region, flavor, tets, vertex_dof, n_dofs }
    }

    pub fn mesh(&self) -> &StructuredTetMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<StructuredTetMesh> {
        &self.mesh
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn flavor(&self) -> NodalFlavor {
        self.flavor
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn tets(&self) -> &[usize] {
        &self.tets
    }

    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dof[v]
    }

    pub fn local_dofs(&self, t: usize) -> [Option<usize>; 4] {
        let tet = &self.mesh.tets()[t];
        core::array::from_fn(|i| self.vertex_dof[tet[i]])
    }

    /// Value at every mesh vertex, zero where the space has no unknown.
    pub fn vertex_values(&self, u: &[C64]) -> Vec<C64> {
        self.vertex_dof.iter().map(|d| d.map_or(C64::new(0.0, 0.0), |i| u[i])).collect()
    }

    /// Removes the mass-weighted mean over the region, in place.
    pub fn subtract_mean(&self, u: &mut [C64]) {
        let mut total = C64::new(0.0, 0.0);
        let mut vol = 0.0;
        for &t in &self.tets {
            let w = self.mesh.tet_volume(t) / 4.0;
            for d in self.local_dofs(t).into_iter().flatten() {
                total += u[d] * w;
            }
            vol += self.mesh.tet_volume(t);
        }
        let mean = total / vol;
        for v in u.iter_mut() {
            *v -= mean;
        }
    }
}
