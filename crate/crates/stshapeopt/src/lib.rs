//! Shape optimization of a moving material interface in a time-periodic,
//! mixed parabolic–elliptic problem, solved with space-time finite elements.
//!
//! The pipeline mirrors a classical shape-gradient loop:
//!
//! 1. [`mesh`] builds a space-time triangulation that follows the motion `φ_t`;
//! 2. [`fem`] solves the state, adjoint and tangent problems on it;
//! 3. [`shape`] turns `(u, p)` into derivative densities `(g0, g1)`;
//! 4. [`optimizer`] extracts a Hilbertian descent direction and moves the mesh.
//!
//! [`motion`] and [`kernel`] hold the analytic motions and the first-order
//! kernels of the shape calculus; [`materials`] the constitutive laws.
//!
//! [`config`], [`expr`], [`io`] and [`app`] are the plumbing of the
//! `stshapeopt` binary.

pub mod app;
pub mod config;
pub mod expr;
pub mod fem;
pub mod functions;
pub mod io;
pub mod kernel;
pub mod materials;
pub mod mesh;
pub mod motion;
pub mod optimizer;
pub mod quadrature;
pub mod shape;
