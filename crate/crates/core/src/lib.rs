//! Two-scale finite element machinery for time-harmonic Maxwell scattering by
//! periodic high-contrast composites.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It covers:
//!
//! - [`mesh`]: structured Kuhn tetrahedral meshes of axis-aligned boxes,
//!   inclusion tagging and periodic identification of the unit cell;
//! - [`linalg`]: complex sparse matrices, a multifrontal direct solver and
//!   Krylov methods (projected CG, restarted GMRES);
//! - [`fem`]: lowest-order edge and nodal spaces, assembly, interpolation
//!   and norms;
//! - [`cell`]: the three periodic cell problems and the effective tensors
//!   `eps_inv_hom` and `mu_hom(k)`;
//! - [`scatter`]: the effective macroscopic impedance problem;
//! - [`hmm`]: the heterogeneous multiscale driver, corrector reconstruction,
//!   error norms and convergence studies.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cell;
pub mod fem;
pub mod hmm;
pub mod linalg;
pub mod math;
pub mod mesh;
pub mod scatter;

pub use num_complex::Complex64 as C64;
