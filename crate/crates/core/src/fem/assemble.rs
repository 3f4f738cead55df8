//! Global matrix and load-vector assembly.

use alloc::vec;
use alloc::vec::Vec;

use super::quadrature::{self, QuadratureRule};
use super::{scalar_tensor, EdgeSpace, NodalSpace, TetGeometry, Tensor3};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::math::{self, CVec3, Vec3};
use crate::mesh::LOCAL_EDGES;
use crate::C64;

/// Material coefficient, constant on each tetrahedron.
#[derive(Clone, Copy)]
pub enum Coefficient<'a> {
    Scalar(C64),
    Tensor(Tensor3),
    PerTet(&'a dyn Fn(usize) -> Tensor3),
}

impl Coefficient<'_> {
    pub fn at(&self, t: usize) -> Tensor3 {
        match self {
            Coefficient::Scalar(c) => scalar_tensor(*c),
            Coefficient::Tensor(m) => *m,
            Coefficient::PerTet(f) => f(t),
        }
    }
}

impl From<f64> for Coefficient<'_> {
    fn from(c: f64) -> Self {
        Coefficient::Scalar(C64::new(c, 0.0))
    }
}

impl From<C64> for Coefficient<'_> {
    fn from(c: C64) -> Self {
        Coefficient::Scalar(c)
    }
}

/// `a^T C b` for real vectors and a complex tensor.
fn tensor_form(a: Vec3, c: &Tensor3, b: Vec3) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            s += c[i][j] * (a[i] * b[j]);
        }
    }
    s
}

fn scatter_edge(tb: &mut TripletBuilder, space: &EdgeSpace, t: usize, local: &[[C64; 6]; 6]) {
    let dofs = space.local_dofs(t);
    for (a, da) in dofs.iter().enumerate() {
        let Some(da) = da else { continue };
        for (b, db) in dofs.iter().enumerate() {
            let Some(db) = db else { continue };
            tb.push(da.index, db.index, local[a][b] * (da.sign * db.sign));
        }
    }
}

/// `A_ab = sum_T |T| (C curl phi_b) . curl phi_a`.
pub fn assemble_curlcurl(space: &EdgeSpace, coeff: Coefficient<'_>) -> CsrMatrix {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let mut tb = TripletBuilder::with_capacity(n, n, 36 * space.tets().len());
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        let c = coeff.at(t);
        let curls: [Vec3; 6] = core::array::from_fn(|e| g.whitney_curl(e));
        let mut local = [[C64::new(0.0, 0.0); 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                local[a][b] = tensor_form(curls[a], &c, curls[b]) * g.volume;
            }
        }
        scatter_edge(&mut tb, space, t, &local);
    }
    tb.build()
}

/// `M_ab = sum_T int_T (C phi_b) . phi_a` with the 4-point second-order rule.
pub fn assemble_mass(space: &EdgeSpace, coeff: Coefficient<'_>) -> CsrMatrix {
    assemble_mass_with(space, coeff, &quadrature::tet_degree2())
}

pub(crate) fn assemble_mass_with(space: &EdgeSpace, coeff: Coefficient<'_>, rule: &QuadratureRule) -> CsrMatrix {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let mut tb = TripletBuilder::with_capacity(n, n, 36 * space.tets().len());
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        let c = coeff.at(t);
        let scale = g.volume / quadrature::REFERENCE_TET_VOLUME;
        let mut local = [[C64::new(0.0, 0.0); 6]; 6];
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let phi: [Vec3; 6] = core::array::from_fn(|e| g.whitney(e, lam));
            for a in 0..6 {
                for b in 0..6 {
                    local[a][b] += tensor_form(phi[a], &c, phi[b]) * (w * scale);
                }
            }
        }
        scatter_edge(&mut tb, space, t, &local);
    }
    tb.build()
}

/// Local edges (indices into `LOCAL_EDGES`) lying on the face opposite to
/// local vertex `opp`.
fn face_edges(opp: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for (e, [a, b]) in LOCAL_EDGES.iter().enumerate() {
        if *a != opp && *b != opp {
            out[k] = e;
            k += 1;
        }
    }
    out
}

fn tangential(v: Vec3, n: Vec3) -> Vec3 {
    math::sub(v, math::scale(math::dot(v, n), n))
}

/// Boundary faces belonging to tetrahedra of the space, with the local index
/// of the vertex opposite to the face.
fn space_boundary_faces(space: &EdgeSpace) -> impl Iterator<Item = (usize, usize, Vec3, f64)> + '_ {
    let mesh = space.mesh();
    mesh.boundary_faces().iter().filter(move |f| space.region().contains(mesh.tags()[f.tet])).map(move |f| {
        let tet = &mesh.tets()[f.tet];
        let opp = (0..4).find(|&i| !f.vertices.contains(&tet[i])).expect("face has an opposite vertex");
        (f.tet, opp, f.normal, f.area)
    })
}

fn face_lambda(opp: usize, bary: &[f64; 3]) -> [f64; 4] {
    let mut lam = [0.0; 4];
    let mut k = 0;
    for (i, l) in lam.iter_mut().enumerate() {
        if i != opp {
            *l = bary[k];
            k += 1;
        }
    }
    lam
}

/// `B_ab = sum_F int_F (phi_b)_T . (phi_a)_T` over the outer boundary.
pub fn assemble_boundary_tangential_mass(space: &EdgeSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let rule = quadrature::triangle_midpoints();
    let mut tb = TripletBuilder::new(n, n);
    for (t, opp, normal, area) in space_boundary_faces(space) {
        let g = TetGeometry::new(mesh, t);
        let edges = face_edges(opp);
        let scale = area / quadrature::REFERENCE_TRIANGLE_AREA;
        let mut local = [[C64::new(0.0, 0.0); 6]; 6];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let lam = face_lambda(opp, bary);
            let phi: [Vec3; 3] = core::array::from_fn(|k| tangential(g.whitney(edges[k], &lam), normal));
            for a in 0..3 {
                for b in 0..3 {
                    local[edges[a]][edges[b]] += C64::from(math::dot(phi[a], phi[b]) * w * scale);
                }
            }
        }
        scatter_edge(&mut tb, space, t, &local);
    }
    tb.build()
}

/// `b_a = sum_F int_F g(x, n) . phi_a` over the outer boundary, using a
/// degree-5 face rule.
pub fn assemble_boundary_load(space: &EdgeSpace, g_fn: &dyn Fn(Vec3, Vec3) -> CVec3) -> Vec<C64> {
    let mesh = space.mesh();
    let rule = quadrature::triangle_degree5();
    let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
    for (t, opp, normal, area) in space_boundary_faces(space) {
        let g = TetGeometry::new(mesh, t);
        let edges = face_edges(opp);
        let dofs = space.local_dofs(t);
        let scale = area / quadrature::REFERENCE_TRIANGLE_AREA;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let lam = face_lambda(opp, bary);
            let val = g_fn(g.point(&lam), normal);
            for &e in &edges {
                if let Some(d) = dofs[e] {
                    let phi = tangential(g.whitney(e, &lam), normal);
                    b[d.index] += math::rcdot(phi, val) * (w * scale * d.sign);
                }
            }
        }
    }
    b
}

/// `b_a = int f . phi_a` over the space's tetrahedra with the given rule.
pub fn assemble_edge_load(space: &EdgeSpace, f: &dyn Fn(Vec3) -> CVec3, rule: &QuadratureRule) -> Vec<C64> {
    let mesh = space.mesh();
    let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        let dofs = space.local_dofs(t);
        let scale = g.volume / quadrature::REFERENCE_TET_VOLUME;
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let val = f(g.point(lam));
            for (e, d) in dofs.iter().enumerate() {
                if let Some(d) = d {
                    b[d.index] += math::rcdot(g.whitney(e, lam), val) * (w * scale * d.sign);
                }
            }
        }
    }
    b
}

fn scatter_nodal(tb: &mut TripletBuilder, space: &NodalSpace, t: usize, local: &[[f64; 4]; 4], c: C64) {
    let dofs = space.local_dofs(t);
    for (a, da) in dofs.iter().enumerate() {
        let Some(da) = da else { continue };
        for (b, db) in dofs.iter().enumerate() {
            let Some(db) = db else { continue };
            tb.push(*da, *db, c * local[a][b]);
        }
    }
}

/// `K_ij = sum_T c_T |T| grad(lambda_j) . grad(lambda_i)`.
pub fn assemble_p1_stiffness(space: &NodalSpace, coeff: &dyn Fn(usize) -> f64) -> CsrMatrix {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let mut tb = TripletBuilder::with_capacity(n, n, 16 * space.tets().len());
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        let local: [[f64; 4]; 4] =
            core::array::from_fn(|a| core::array::from_fn(|b| math::dot(g.grads[a], g.grads[b]) * g.volume));
        scatter_nodal(&mut tb, space, t, &local, C64::from(coeff(t)));
    }
    tb.build()
}

/// Consistent P1 mass matrix, `|T| (1 + delta_ij) / 20` per element.
pub fn assemble_p1_mass(space: &NodalSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let n = space.n_dofs();
    let mut tb = TripletBuilder::with_capacity(n, n, 16 * space.tets().len());
    for &t in space.tets() {
        let v = mesh.tet_volume(t);
        let local: [[f64; 4]; 4] =
            core::array::from_fn(|a| core::array::from_fn(|b| v * if a == b { 0.1 } else { 0.05 }));
        scatter_nodal(&mut tb, space, t, &local, C64::new(1.0, 0.0));
    }
    tb.build()
}

/// `b_i = sum_T c_T int_T d . grad(lambda_i)` for a constant direction `d`.
pub fn assemble_p1_gradient_load(space: &NodalSpace, d: Vec3, coeff: &dyn Fn(usize) -> f64) -> Vec<C64> {
    let mesh = space.mesh();
    let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        for (a, da) in space.local_dofs(t).iter().enumerate() {
            if let Some(i) = da {
                b[*i] += C64::from(coeff(t) * g.volume * math::dot(d, g.grads[a]));
            }
        }
    }
    b
}

/// `b_i = int u . grad(lambda_i)` for an edge field given by per-edge
/// coefficients on the same mesh (exact integration).
pub fn p1_load_from_edge_field(space: &NodalSpace, edge_coeffs: &[C64]) -> Vec<C64> {
    let mesh = space.mesh();
    let mut b = vec![C64::new(0.0, 0.0); space.n_dofs()];
    for &t in space.tets() {
        let g = TetGeometry::new(mesh, t);
        let te = &mesh.tet_edges()[t];
        let mut mean = math::ZERO3;
        for e in 0..6 {
            let c = edge_coeffs[te[e].edge] * te[e].sign;
            let m = g.whitney_mean(e);
            for i in 0..3 {
                mean[i] += c * m[i];
            }
        }
        for (a, da) in space.local_dofs(t).iter().enumerate() {
            if let Some(i) = da {
                b[*i] += math::rcdot(g.grads[a], mean);
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{interpolate_edge, EdgeFlavor, NodalFlavor, Region};
    use crate::mesh::{build_box_mesh, AxisBox};
    use alloc::sync::Arc;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn unit_space(n: usize) -> Arc<EdgeSpace> {
        let mesh = Arc::new(build_box_mesh(AxisBox::unit(), n, None).unwrap());
        Arc::new(EdgeSpace::new(mesh, Region::All, EdgeFlavor::Unconstrained))
    }

    #[test]
    fn constant_field_has_no_curl_energy() {
        let s = unit_space(3);
        let u = interpolate_edge(&s, &|_| [c(1.0), c(0.0), c(0.0)]);
        let k = assemble_curlcurl(&s, 1.0.into());
        let r = k.spmv(&u.coeffs).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn constant_field_mass_and_boundary() {
        let s = unit_space(2);
        let u = interpolate_edge(&s, &|_| [c(0.0), c(1.0), c(0.0)]);
        let m = assemble_mass(&s, 1.0.into());
        assert!((m.bilinear(&u.coeffs, &u.coeffs) - c(1.0)).norm() < 1e-13);
        let b = assemble_boundary_tangential_mass(&s);
        assert!((b.bilinear(&u.coeffs, &u.coeffs) - c(4.0)).norm() < 1e-13);
    }

    #[test]
    fn boundary_mass_scales_with_area() {
        let mesh = Arc::new(build_box_mesh(AxisBox::cube(0.0, 3.0).unwrap(), 2, None).unwrap());
        let s = Arc::new(EdgeSpace::new(mesh, Region::All, EdgeFlavor::Unconstrained));
        let u = interpolate_edge(&s, &|_| [c(0.0), c(1.0), c(0.0)]);
        let b = assemble_boundary_tangential_mass(&s);
        assert!((b.bilinear(&u.coeffs, &u.coeffs) - c(36.0)).norm() < 1e-11);
    }

    #[test]
    fn linearity_in_coefficient() {
        let s = unit_space(1);
        let k1 = assemble_curlcurl(&s, 1.0.into());
        let k2 = assemble_curlcurl(&s, 2.0.into());
        let mi = assemble_mass(&s, C64::new(0.0, 1.0).into());
        let m1 = assemble_mass(&s, 1.0.into());
        for (a, b) in k1.values().iter().zip(k2.values()) {
            assert_eq!(*a * 2.0, *b);
        }
        for (a, b) in m1.values().iter().zip(mi.values()) {
            assert_eq!(b.re, 0.0);
            assert_eq!(a.re, b.im);
        }
    }

    #[test]
    fn discrete_gradients_lie_in_curl_kernel() {
        let s = unit_space(3);
        let k = assemble_curlcurl(&s, 1.0.into());
        let u = interpolate_edge(&s, &|p| [c(p[1]), c(p[0]), c(0.0)]);
        let r = k.spmv(&u.coeffs).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn p1_stiffness_of_linear_and_constant() {
        let mesh = Arc::new(build_box_mesh(AxisBox::unit(), 3, None).unwrap());
        let s = NodalSpace::new(mesh.clone(), Region::All, NodalFlavor::Unconstrained);
        let k = assemble_p1_stiffness(&s, &|_| 1.0);
        let x: Vec<C64> = mesh.vertices().iter().map(|p| c(p[0])).collect();
        assert!((k.bilinear(&x, &x) - c(1.0)).norm() < 1e-13);
        let one = vec![c(1.0); s.n_dofs()];
        assert!(k.spmv(&one).unwrap().iter().all(|v| v.norm() < 1e-13));
        let m = assemble_p1_mass(&s);
        assert!((m.bilinear(&one, &one) - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn gradient_load_sums_to_zero_on_periodic_space() {
        let (mesh, _) = crate::mesh::build_periodic_cell_mesh(4, Some(AxisBox::cube(0.25, 0.75).unwrap())).unwrap();
        let s = NodalSpace::new(Arc::new(mesh), Region::Outside, NodalFlavor::PeriodicZeroMean);
        for l in 0..3 {
            let b = assemble_p1_gradient_load(&s, math::unit(l), &|_| 1.0);
            let total: C64 = b.iter().sum();
            assert!(total.norm() < 1e-13);
        }
    }
}
