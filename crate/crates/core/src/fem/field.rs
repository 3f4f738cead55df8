//! Discrete fields, interpolation and norms.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::assemble::{assemble_boundary_tangential_mass, assemble_curlcurl, assemble_mass};
use super::quadrature::{self, QuadratureRule};
use super::{EdgeSpace, NodalSpace, TetGeometry};
use crate::math::{self, CVec3, Vec3};
use crate::C64;

/// Coefficient vector of an [`EdgeSpace`].
#[derive(Debug, Clone)]
pub struct FieldFunction {
    pub space: Arc<EdgeSpace>,
    pub coeffs: Vec<C64>,
}

/// Coefficient vector of a [`NodalSpace`].
#[derive(Debug, Clone)]
pub struct NodalFunction {
    pub space: Arc<NodalSpace>,
    pub coeffs: Vec<C64>,
}

impl FieldFunction {
    pub fn new(space: Arc<EdgeSpace>, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), space.n_dofs(), "coefficient length must equal the number of dofs");
        Self { space, coeffs }
    }

    pub fn zero(space: Arc<EdgeSpace>) -> Self {
        let n = space.n_dofs();
        Self { space, coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    /// Local coefficients of tet `t` in the reference orientation.
    pub fn local_coeffs(&self, t: usize) -> [C64; 6] {
        let dofs = self.space.local_dofs(t);
        core::array::from_fn(|e| dofs[e].map_or(C64::new(0.0, 0.0), |d| self.coeffs[d.index] * d.sign))
    }

    /// Value inside tet `t` at barycentric coordinates `lam`.
    pub fn value_in(&self, t: usize, lam: &[f64; 4]) -> CVec3 {
        let g = TetGeometry::new(self.space.mesh(), t);
        combine(&self.local_coeffs(t), |e| g.whitney(e, lam))
    }

    /// Constant curl on tet `t`.
    pub fn curl_in(&self, t: usize) -> CVec3 {
        let g = TetGeometry::new(self.space.mesh(), t);
        combine(&self.local_coeffs(t), |e| g.whitney_curl(e))
    }

    /// Value at a point of the mesh box; `None` outside.
    pub fn eval(&self, p: Vec3) -> Option<CVec3> {
        let (t, lam) = self.space.mesh().locate(p)?;
        Some(self.value_in(t, &lam))
    }

    pub fn curl_at(&self, p: Vec3) -> Option<CVec3> {
        let (t, _) = self.space.mesh().locate(p)?;
        Some(self.curl_in(t))
    }

    /// Errors `(||u - f||_{L2}, ||curl u - curl f||_{L2})` over the space's
    /// tetrahedra, integrated with `rule`.
    pub fn error_against(
        &self,
        f: &dyn Fn(Vec3) -> CVec3,
        curl_f: &dyn Fn(Vec3) -> CVec3,
        rule: &QuadratureRule,
    ) -> (f64, f64) {
        let mesh = self.space.mesh();
        let (mut l2, mut curl) = (0.0, 0.0);
        for &t in self.space.tets() {
            let g = TetGeometry::new(mesh, t);
            let c = self.local_coeffs(t);
            let cu = combine(&c, |e| g.whitney_curl(e));
            let scale = g.volume / quadrature::REFERENCE_TET_VOLUME;
            for (lam, w) in rule.points.iter().zip(&rule.weights) {
                let x = g.point(lam);
                let u = combine(&c, |e| g.whitney(e, lam));
                let fx = f(x);
                let cf = curl_f(x);
                l2 += w * scale * math::cnorm_sqr(core::array::from_fn(|i| u[i] - fx[i]));
                curl += w * scale * math::cnorm_sqr(core::array::from_fn(|i| cu[i] - cf[i]));
            }
        }
        (math::sqrt(l2), math::sqrt(curl))
    }
}

fn combine(c: &[C64; 6], basis: impl Fn(usize) -> Vec3) -> CVec3 {
    let mut out = math::ZERO3;
    for (e, ce) in c.iter().enumerate() {
        if *ce == C64::new(0.0, 0.0) {
            continue;
        }
        let b = basis(e);
        for i in 0..3 {
            out[i] += ce * b[i];
        }
    }
    out
}

impl NodalFunction {
    pub fn new(space: Arc<NodalSpace>, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), space.n_dofs(), "coefficient length must equal the number of dofs");
        Self { space, coeffs }
    }

    pub fn local_coeffs(&self, t: usize) -> [C64; 4] {
        let dofs = self.space.local_dofs(t);
        core::array::from_fn(|i| dofs[i].map_or(C64::new(0.0, 0.0), |d| self.coeffs[d]))
    }

    /// Constant gradient on tet `t`.
    pub fn grad_in(&self, t: usize) -> CVec3 {
        let g = TetGeometry::new(self.space.mesh(), t);
        let c = self.local_coeffs(t);
        let mut out = math::ZERO3;
        for (a, ca) in c.iter().enumerate() {
            for i in 0..3 {
                out[i] += ca * g.grads[a][i];
            }
        }
        out
    }

    pub fn value_in(&self, t: usize, lam: &[f64; 4]) -> C64 {
        self.local_coeffs(t).iter().zip(lam).map(|(c, l)| c * l).sum()
    }
}

/// Edge interpolant: each dof is the line integral of `f` along its edge
/// (two-point Gauss rule). Periodic spaces read the representative edges.
pub fn interpolate_edge(space: &Arc<EdgeSpace>, f: &dyn Fn(Vec3) -> CVec3) -> FieldFunction {
    let mesh = space.mesh();
    let (s, w) = quadrature::line_gauss2();
    let mut coeffs = vec![C64::new(0.0, 0.0); space.n_dofs()];
    let mut done = vec![false; space.n_dofs()];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let Some(d) = space.edge_dof(e) else { continue };
        if done[d.index] {
            continue;
        }
        done[d.index] = true;
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let tan = math::sub(pb, pa);
        let mut v = C64::new(0.0, 0.0);
        for q in 0..2 {
            let x = math::add(pa, math::scale(s[q], tan));
            v += math::rcdot(tan, f(x)) * w[q];
        }
        coeffs[d.index] = v * d.sign;
    }
    FieldFunction { space: space.clone(), coeffs }
}

/// Ingredients of the weighted norms of a discrete field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorms {
    pub l2: f64,
    pub curl_semi: f64,
    /// `L2` norm of the tangential trace on the outer boundary.
    pub imp_boundary: f64,
    pub k: f64,
}

impl WeightedNorms {
    /// `(||curl v||^2 + k^2 ||v||^2)^(1/2)`.
    pub fn curl_k(&self) -> f64 {
        math::sqrt(self.curl_semi * self.curl_semi + self.k * self.k * self.l2 * self.l2)
    }

    /// `(||v||_{curl;k}^2 + k ||v_T||_{boundary}^2)^(1/2)`.
    pub fn imp_k(&self) -> f64 {
        let c = self.curl_k();
        math::sqrt(c * c + self.k * self.imp_boundary * self.imp_boundary)
    }
}

pub fn weighted_norms(u: &FieldFunction, k: f64) -> WeightedNorms {
    let m = assemble_mass(&u.space, 1.0.into());
    let c = assemble_curlcurl(&u.space, 1.0.into());
    let b = assemble_boundary_tangential_mass(&u.space);
    let q = |a: &crate::linalg::CsrMatrix| math::sqrt(a.quadratic(&u.coeffs).re.max(0.0));
    WeightedNorms { l2: q(&m), curl_semi: q(&c), imp_boundary: q(&b), k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{EdgeFlavor, Region};
    use crate::mesh::{build_box_mesh, AxisBox};

    fn space(n: usize) -> Arc<EdgeSpace> {
        let mesh = Arc::new(build_box_mesh(AxisBox::unit(), n, None).unwrap());
        Arc::new(EdgeSpace::new(mesh, Region::All, EdgeFlavor::Unconstrained))
    }

    #[test]
    fn constant_interpolant_dofs_are_edge_extents() {
        let s = space(2);
        let u = interpolate_edge(&s, &|_| [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        let mesh = s.mesh();
        for (e, &[a, b]) in mesh.edges().iter().enumerate() {
            let ext = mesh.vertices()[b][0] - mesh.vertices()[a][0];
            assert!((u.coeffs[s.edge_dof(e).unwrap().index] - C64::new(ext, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn norms_of_constant_field() {
        let s = space(2);
        let u = interpolate_edge(&s, &|_| [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let n = weighted_norms(&u, 2.0);
        assert!((n.l2 - 1.0).abs() < 1e-13);
        assert!(n.curl_semi.abs() < 1e-7);
        assert!((n.imp_boundary - 2.0).abs() < 1e-13);
        let n4 = weighted_norms(&u, 4.0);
        assert!((n4.k * n4.l2 - 2.0 * n.k * n.l2).abs() < 1e-13);
        let z = weighted_norms(&FieldFunction::zero(s), 3.0);
        assert_eq!((z.l2, z.curl_semi, z.imp_boundary), (0.0, 0.0, 0.0));
    }

    #[test]
    fn evaluation_reproduces_linear_whitney_fields() {
        // fields a + b x p are in the lowest-order space
        let s = space(2);
        let f = |p: Vec3| {
            let v = math::add([1.0, -2.0, 0.5], math::cross([0.3, 0.1, -0.7], p));
            math::to_complex(v)
        };
        let u = interpolate_edge(&s, &f);
        for p in [[0.1, 0.2, 0.3], [0.77, 0.4, 0.91], [0.5, 0.5, 0.5]] {
            let v = u.eval(p).unwrap();
            let e = f(p);
            for i in 0..3 {
                assert!((v[i] - e[i]).norm() < 1e-13);
            }
            let cu = u.curl_at(p).unwrap();
            let expect = [0.6, 0.2, -1.4];
            for i in 0..3 {
                assert!((cu[i].re - expect[i]).abs() < 1e-12);
            }
        }
    }
}
