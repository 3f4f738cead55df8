//! Structured tetrahedral meshes of axis-aligned boxes.
//!
//! Every hexahedron of an `n x n x n` grid is split into six tetrahedra along
//! the diagonal from its low corner to its high corner (Kuhn/Freudenthal
//! subdivision). The split is translation invariant, so the mesh of the unit
//! cell wraps onto the torus without hanging nodes, and a mesh with `m * n`
//! subdivisions refines the one with `n`.


use alloc::vec::Vec;
use core::fmt;

use crate::math::{self, Vec3};

/// Local vertex pairs of the six edges of a tetrahedron.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local vertices of the face opposite to vertex `i`.
pub const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Axis orders of the six Kuhn tetrahedra, in construction order.
const KUHN_PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("degenerate box: lo[{axis}] = {lo} is not below hi[{axis}] = {hi}")]
    DegenerateBox { axis: usize, lo: f64, hi: f64 },
    #[error("subdivision count must be at least 1")]
    ZeroSubdivisions,
    #[error("inclusion face {coord} on axis {axis} does not lie on a mesh plane")]
    Unaligned { axis: usize, coord: f64 },
    #[error("inclusion is not contained in the meshed box")]
    InclusionOutside,
    #[error("inclusion must lie strictly inside the periodic cell")]
    InclusionTouchesCell,
}

/// An axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    lo: Vec3,
    hi: Vec3,
}

impl AxisBox {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self, MeshError> {
        for axis in 0..3 {
            // also rejects NaN
            if !(lo[axis] < hi[axis]) {
                return Err(MeshError::DegenerateBox { axis, lo: lo[axis], hi: hi[axis] });
            }
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[a, b]^3`.
    pub fn cube(a: f64, b: f64) -> Result<Self, MeshError> {
        Self::new([a; 3], [b; 3])
    }

    pub fn unit() -> Self {
        Self { lo: [0.0; 3], hi: [1.0; 3] }
    }

    pub fn lo(&self) -> Vec3 {
        self.lo
    }

    pub fn hi(&self) -> Vec3 {
        self.hi
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        self.side(0) * self.side(1) * self.side(2)
    }

    /// Closed containment with an absolute slack `tol`.
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        (0..3).all(|i| p[i] >= self.lo[i] - tol && p[i] <= self.hi[i] + tol)
    }

    /// Strict interior containment.
    pub fn contains_strictly(&self, p: Vec3) -> bool {
        (0..3).all(|i| p[i] > self.lo[i] && p[i] < self.hi[i])
    }

    /// `true` if `other` lies in the open interior of `self`.
    pub fn contains_box_strictly(&self, other: &AxisBox) -> bool {
        (0..3).all(|i| other.lo[i] > self.lo[i] && other.hi[i] < self.hi[i])
    }

    pub fn center(&self) -> Vec3 {
        math::scale(0.5, math::add(self.lo, self.hi))
    }
}

/// Subdomain label of a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Outside,
    Inside,
}

/// Global edge index with the sign reconciling local and global orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedEdge {
    pub edge: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    /// Vertex indices, ascending.
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: Vec3,
    pub area: f64,
    /// The tetrahedron owning the face.
    pub tet: usize,
}

/// Tetrahedral mesh of an axis-aligned box.
#[derive(Debug, Clone)]
pub struct StructuredTetMesh {
    bbox: AxisBox,
    n: usize,
    inclusion: Option<AxisBox>,
    vertices: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    tet_edges: Vec<[SignedEdge; 6]>,
    boundary_faces: Vec<BoundaryFace>,
    tags: Vec<Tag>,
}

fn check_alignment(bbox: &AxisBox, n: usize, inclusion: &AxisBox) -> Result<(), MeshError> {
    if !bbox.contains(inclusion.lo, 0.0) || !bbox.contains(inclusion.hi, 0.0) {
        return Err(MeshError::InclusionOutside);
    }
    for axis in 0..3 {
        let h = bbox.side(axis) / n as f64;
        for coord in [inclusion.lo[axis], inclusion.hi[axis]] {
            let t = (coord - bbox.lo[axis]) / h;
            if (t - math::round(t)).abs() > ALIGN_TOL * n as f64 {
                return Err(MeshError::Unaligned { axis, coord });
            }
        }
    }
    Ok(())
}

/// Builds the Kuhn mesh of `bbox` with `n` subdivisions per axis. Tetrahedra
/// whose barycenter lies inside `inclusion` are tagged [`Tag::Inside`].
pub fn build_box_mesh(
    bbox: AxisBox,
    n: usize,
    inclusion: Option<AxisBox>,
) -> Result<StructuredTetMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ZeroSubdivisions);
    }
    if let Some(inc) = &inclusion {
        check_alignment(&bbox, n, inc)?;
    }
    let np = n + 1;
    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                let ijk = [i, j, k];
                let mut p = [0.0; 3];
                for a in 0..3 {
                    // exact at both ends of the axis
                    p[a] = if ijk[a] == n {
                        bbox.hi[a]
                    } else {
                        bbox.lo[a] + bbox.side(a) * (ijk[a] as f64 / n as f64)
                    };
                }
                vertices.push(p);
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| i + np * (j + np * k);

    let mut tets = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for path in KUHN_PATHS.iter() {
                    let mut c = [i, j, k];
                    let mut ids = [0usize; 4];
                    ids[0] = vid(c[0], c[1], c[2]);
                    for (step, &axis) in path.iter().enumerate() {
                        c[axis] += 1;
                        ids[step + 1] = vid(c[0], c[1], c[2]);
                    }
                    let t = orient_positive(&vertices, ids);
                    tets.push(t);
                }
            }
        }
    }

    let tags = tets
        .iter()
        .map(|t| {
            let bc = barycenter(&vertices, t);
            match &inclusion {
                Some(inc) if inc.contains_strictly(bc) => Tag::Inside,
                _ => Tag::Outside,
            }
        })
        .collect();

    let (edges, tet_edges) = enumerate_edges(&tets);
    let boundary_faces = find_boundary_faces(&vertices, &tets);

    Ok(StructuredTetMesh { bbox, n, inclusion, vertices, tets, edges, tet_edges, boundary_faces, tags })
}

fn orient_positive(vertices: &[Vec3], mut ids: [usize; 4]) -> [usize; 4] {
    let v = |i: usize| vertices[ids[i]];
    let det = math::det3(math::sub(v(1), v(0)), math::sub(v(2), v(0)), math::sub(v(3), v(0)));
    if det < 0.0 {
        ids.swap(1, 2);
    }
    ids
}

fn barycenter(vertices: &[Vec3], t: &[usize; 4]) -> Vec3 {
    let mut c = [0.0; 3];
    for &v in t {
        c = math::add(c, vertices[v]);
    }
    math::scale(0.25, c)
}

fn enumerate_edges(tets: &[[usize; 4]]) -> (Vec<[usize; 2]>, Vec<[SignedEdge; 6]>) {
    let mut edges: Vec<[usize; 2]> = Vec::with_capacity(tets.len() * 2);
    for t in tets {
        for [a, b] in LOCAL_EDGES {
            let (p, q) = (t[a], t[b]);
            edges.push(if p < q { [p, q] } else { [q, p] });
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let tet_edges = tets
        .iter()
        .map(|t| {
            let mut out = [SignedEdge { edge: 0, sign: 1.0 }; 6];
            for (slot, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                let (p, q) = (t[*a], t[*b]);
                let key = if p < q { [p, q] } else { [q, p] };
                let edge = edges.binary_search(&key).expect("edge was enumerated");
                out[slot] = SignedEdge { edge, sign: if p < q { 1.0 } else { -1.0 } };
            }
            out
        })
        .collect();
    (edges, tet_edges)
}

fn find_boundary_faces(vertices: &[Vec3], tets: &[[usize; 4]]) -> Vec<BoundaryFace> {
    let mut faces: Vec<([usize; 3], usize, usize)> = Vec::with_capacity(tets.len() * 4);
    for (ti, t) in tets.iter().enumerate() {
        for (opp, lf) in LOCAL_FACES.iter().enumerate() {
            let mut f = [t[lf[0]], t[lf[1]], t[lf[2]]];
            f.sort_unstable();
            faces.push((f, ti, opp));
        }
    }
    faces.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < faces.len() {
        let mut j = i + 1;
        while j < faces.len() && faces[j].0 == faces[i].0 {
            j += 1;
        }
        if j - i == 1 {
            let (f, ti, opp) = faces[i];
            let p0 = vertices[f[0]];
            let mut nrm = math::cross(math::sub(vertices[f[1]], p0), math::sub(vertices[f[2]], p0));
            let len = math::norm(nrm);
            let inward = math::sub(vertices[tets[ti][opp]], p0);
            if math::dot(nrm, inward) > 0.0 {
                nrm = math::scale(-1.0, nrm);
            }
            out.push(BoundaryFace { vertices: f, normal: math::scale(1.0 / len, nrm), area: 0.5 * len, tet: ti });
        }
        i = j;
    }
    out
}

impl StructuredTetMesh {
    pub fn bbox(&self) -> &AxisBox {
        &self.bbox
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn inclusion(&self) -> Option<&AxisBox> {
        self.inclusion.as_ref()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn tet_edges(&self) -> &[[SignedEdge; 6]] {
        &self.tet_edges
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn tet_vertices(&self, t: usize) -> [Vec3; 4] {
        let ids = self.tets[t];
        [self.vertices[ids[0]], self.vertices[ids[1]], self.vertices[ids[2]], self.vertices[ids[3]]]
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let v = self.tet_vertices(t);
        math::det3(math::sub(v[1], v[0]), math::sub(v[2], v[0]), math::sub(v[3], v[0])) / 6.0
    }

    pub fn tet_barycenter(&self, t: usize) -> Vec3 {
        barycenter(&self.vertices, &self.tets[t])
    }

    /// Grid coordinates `(i, j, k)` of a vertex.
    pub fn vertex_grid(&self, v: usize) -> [usize; 3] {
        let np = self.n + 1;
        [v % np, (v / np) % np, v / (np * np)]
    }

    pub fn vertex_at(&self, grid: [usize; 3]) -> usize {
        let np = self.n + 1;
        grid[0] + np * (grid[1] + np * grid[2])
    }

    /// Index of the edge joining two vertices, if it exists.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edges.binary_search(&key).ok()
    }

    /// Largest tetrahedron diameter (the body diagonal of a grid hexahedron).
    pub fn diameter(&self) -> f64 {
        let h = [0, 1, 2].map(|a| self.bbox.side(a) / self.n as f64);
        math::norm(h)
    }

    /// Outward unit normal of every boundary face.
    pub fn boundary_outward_normals(&self) -> Vec<Vec3> {
        self.boundary_faces.iter().map(|f| f.normal).collect()
    }

    /// `true` if the vertex lies on the outer boundary of the box.
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_grid(v).iter().any(|&g| g == 0 || g == self.n)
    }

    /// Finds the tetrahedron containing `p` and its barycentric coordinates.
    /// Points slightly outside the box are clamped onto it.
    pub fn locate(&self, p: Vec3) -> Option<(usize, [f64; 4])> {
        if !self.bbox.contains(p, 1e-9 * self.diameter()) {
            return None;
        }
        let mut cell = [0usize; 3];
        for a in 0..3 {
            let t = (p[a] - self.bbox.lo[a]) / self.bbox.side(a) * self.n as f64;
            let c = math::floor(t).max(0.0) as usize;
            cell[a] = c.min(self.n - 1);
        }
        let hex = cell[0] + self.n * (cell[1] + self.n * cell[2]);
        let mut best = (usize::MAX, [0.0; 4], f64::NEG_INFINITY);
        for t in 6 * hex..6 * hex + 6 {
            let lam = self.barycentric(t, p);
            let worst = lam.iter().copied().fold(f64::INFINITY, f64::min);
            if worst > best.2 {
                best = (t, lam, worst);
            }
        }
        Some((best.0, best.1))
    }

    /// Barycentric coordinates of `p` with respect to tetrahedron `t`.
    pub fn barycentric(&self, t: usize, p: Vec3) -> [f64; 4] {
        let v = self.tet_vertices(t);
        let vol6 = math::det3(math::sub(v[1], v[0]), math::sub(v[2], v[0]), math::sub(v[3], v[0]));
        let d = math::sub(p, v[0]);
        let l1 = math::det3(d, math::sub(v[2], v[0]), math::sub(v[3], v[0])) / vol6;
        let l2 = math::det3(math::sub(v[1], v[0]), d, math::sub(v[3], v[0])) / vol6;
        let l3 = math::det3(math::sub(v[1], v[0]), math::sub(v[2], v[0]), d) / vol6;
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    pub fn summary(&self) -> MeshSummary {
        let mut min_vol = f64::INFINITY;
        let mut max_vol = 0.0f64;
        let mut inside = 0;
        for t in 0..self.n_tets() {
            let v = self.tet_volume(t);
            min_vol = min_vol.min(v);
            max_vol = max_vol.max(v);
            if self.tags[t] == Tag::Inside {
                inside += 1;
            }
        }
        MeshSummary {
            n_per_axis: self.n,
            vertices: self.n_vertices(),
            edges: self.n_edges(),
            tets: self.n_tets(),
            boundary_faces: self.boundary_faces.len(),
            min_volume: min_vol,
            max_volume: max_vol,
            inside,
            outside: self.n_tets() - inside,
        }
    }
}

/// Plain-text mesh statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSummary {
    pub n_per_axis: usize,
    pub vertices: usize,
    pub edges: usize,
    pub tets: usize,
    pub boundary_faces: usize,
    pub min_volume: f64,
    pub max_volume: f64,
    pub inside: usize,
    pub outside: usize,
}

impl fmt::Display for MeshSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subdivisions per axis: {}", self.n_per_axis)?;
        writeln!(f, "vertices:              {}", self.vertices)?;
        writeln!(f, "edges:                 {}", self.edges)?;
        writeln!(f, "tetrahedra:            {}", self.tets)?;
        writeln!(f, "boundary faces:        {}", self.boundary_faces)?;
        writeln!(f, "tet volume min/max:    {:.6e} / {:.6e}", self.min_volume, self.max_volume)?;
        write!(f, "tags inside/outside:   {} / {}", self.inside, self.outside)
    }
}

/// Identification of opposite faces of a box mesh (wrapping onto the torus).
#[derive(Debug, Clone)]
pub struct PeriodicIdentification {
    vertex_map: Vec<usize>,
    edge_map: Vec<SignedEdge>,
}

impl PeriodicIdentification {
    /// Wraps all three axis directions of `mesh`.
    pub fn new(mesh: &StructuredTetMesh) -> Self {
        let n = mesh.n_per_axis();
        let wrap = |g: [usize; 3]| g.map(|c| c % n);
        let vertex_map = (0..mesh.n_vertices()).map(|v| mesh.vertex_at(wrap(mesh.vertex_grid(v)))).collect();
        let edge_map = mesh
            .edges()
            .iter()
            .map(|&[a, b]| {
                let ga = mesh.vertex_grid(a);
                let gb = mesh.vertex_grid(b);
                // Kuhn edges run from the componentwise smaller endpoint
                let base = wrap(ga);
                let tip = [0, 1, 2].map(|i| base[i] + (gb[i] - ga[i]));
                let (p, q) = (mesh.vertex_at(base), mesh.vertex_at(tip));
                let edge = mesh.find_edge(p, q).expect("translated edge exists");
                SignedEdge { edge, sign: if p < q { 1.0 } else { -1.0 } }
            })
            .collect();
        Self { vertex_map, edge_map }
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[SignedEdge] {
        &self.edge_map
    }

    pub fn vertex_rep(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn edge_rep(&self, e: usize) -> SignedEdge {
        self.edge_map[e]
    }

    pub fn n_vertex_reps(&self) -> usize {
        self.vertex_map.iter().enumerate().filter(|(i, &r)| *i == r).count()
    }

    pub fn n_edge_reps(&self) -> usize {
        self.edge_map.iter().enumerate().filter(|(i, r)| *i == r.edge).count()
    }
}

/// Builds the periodic mesh of the unit cell `[0, 1)^3` and its identification.
/// The inclusion must lie strictly inside the cell.
pub fn build_periodic_cell_mesh(
    n: usize,
    inclusion: Option<AxisBox>,
) -> Result<(StructuredTetMesh, PeriodicIdentification), MeshError> {
    let cell = AxisBox::unit();
    if let Some(inc) = &inclusion {
        if !cell.contains_box_strictly(inc) {
            return Err(MeshError::InclusionTouchesCell);
        }
    }
    let mesh = build_box_mesh(cell, n, inclusion)?;
    let ident = PeriodicIdentification::new(&mesh);
    Ok((mesh, ident))
}
