//! Shape derivatives of space-time functionals and their reduction to
//! spatial density fields.
//!
//! A derivative is stored as two piecewise-constant fields `(g0, g1)` on the
//! spatial mesh, so that `J′(Ω)(θ) = ∫_D g0 θ + g1 θ′` for every P1
//! deformation `θ`. Three ways of producing them are offered, see
//! [`DensityRule`].

mod academic;
mod densities;
mod magnetization;
mod surface;
mod volume;

use thiserror::Error;

use crate::fem::FemError;
use crate::mesh::MeshError;
use crate::motion::MotionError;

pub use academic::{
    academic_objective, academic_surface_derivative, academic_volume_derivative,
    academic_volume_derivative_reference, ReferenceQuadrature,
};
pub use densities::{DensityAccumulator, DerivativeDensities};
pub use magnetization::{magnetization_supplement, magnetization_supplement_direct};
pub use surface::{pair_surface, pde_surface_derivative, InterfaceDensity};
pub use volume::{
    nodal_shape_gradient, pde_volume_densities, pde_volume_derivative_direct, vertex_sensitivities,
    DirectModel,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("field has {got} values, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

/// How the volume form is reduced to densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityRule {
    /// Derivative of the discrete objective with respect to the vertex
    /// positions, collected per spatial column. Pairs exactly with P1 `θ`,
    /// so it is the gradient of the discrete problem.
    #[default]
    Exact,
    /// The continuous kernels evaluated at the element quadrature points and
    /// pulled back to the spatial element containing `φ_t⁻¹(x)`.
    KernelQuadrature,
    /// Coefficient fields integrated along the trajectory of each spatial
    /// centroid with the composite trapezoidal rule (piecewise-constant
    /// approximation at the centroids).
    CentroidTrajectory,
}

impl DensityRule {
    pub fn name(&self) -> &'static str {
        match self {
            DensityRule::Exact => "exact",
            DensityRule::KernelQuadrature => "kernel-quadrature",
            DensityRule::CentroidTrajectory => "centroid-trajectory",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(DensityRule::Exact),
            "kernel-quadrature" | "kernel" => Some(DensityRule::KernelQuadrature),
            "centroid-trajectory" | "trajectory" => Some(DensityRule::CentroidTrajectory),
            _ => None,
        }
    }
}
