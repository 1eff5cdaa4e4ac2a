use crate::mesh::{SpatialField, SpatialMesh};

use super::{DensityRule, ShapeError};

/// Piecewise-constant densities `(g0, g1)` on the spatial mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeDensities {
    /// Pairs with `θ`, one value per spatial element.
    pub g0: Vec<f64>,
    /// Pairs with `θ′`, one value per spatial element.
    pub g1: Vec<f64>,
    /// Name of the differentiated functional.
    pub functional: String,
    pub rule: DensityRule,
    /// Free-form description of the quadrature used.
    pub quadrature: String,
}

impl DerivativeDensities {
    pub fn zeros(n_elements: usize, functional: impl Into<String>, rule: DensityRule) -> Self {
        Self {
            g0: vec![0.0; n_elements],
            g1: vec![0.0; n_elements],
            functional: functional.into(),
            rule,
            quadrature: String::new(),
        }
    }

    pub fn n_elements(&self) -> usize {
        self.g0.len()
    }

    /// `∫_D g0 θ + g1 θ′` for a P1 deformation.
    pub fn pair(&self, mesh: &SpatialMesh, theta: &SpatialField) -> Result<f64, ShapeError> {
        let load = self.nodal_load(mesh)?;
        if theta.values.len() != load.len() {
            return Err(ShapeError::Dimension { expected: load.len(), got: theta.values.len() });
        }
        Ok(load.iter().zip(&theta.values).map(|(a, b)| a * b).sum())
    }

    /// `ℓ_i = ∫_D g0 η_i + g1 η_i′` for every nodal hat function `η_i`.
    pub fn nodal_load(&self, mesh: &SpatialMesh) -> Result<Vec<f64>, ShapeError> {
        if self.g0.len() != mesh.n_elements() || self.g1.len() != mesh.n_elements() {
            return Err(ShapeError::Dimension { expected: mesh.n_elements(), got: self.g0.len() });
        }
        let mut load = vec![0.0; mesh.n_nodes()];
        for e in 0..mesh.n_elements() {
            let h = mesh.length(e);
            load[e] += 0.5 * h * self.g0[e] - self.g1[e];
            load[e + 1] += 0.5 * h * self.g0[e] + self.g1[e];
        }
        Ok(load)
    }

    /// Adds another density pair (e.g. a magnetization supplement).
    pub fn add_assign(&mut self, other: &DerivativeDensities) -> Result<(), ShapeError> {
        if other.g0.len() != self.g0.len() {
            return Err(ShapeError::Dimension { expected: self.g0.len(), got: other.g0.len() });
        }
        for (a, b) in self.g0.iter_mut().zip(&other.g0) {
            *a += b;
        }
        for (a, b) in self.g1.iter_mut().zip(&other.g1) {
            *a += b;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.g0.iter().chain(&self.g1).all(|v| *v == 0.0)
    }
}

/// Collects, per spatial element `e`, the coefficients of `θ` at its left and
/// right nodes, then converts them to the unique `(g0, g1)` reproducing that
/// pairing for P1 `θ`:
/// `g0 = (C_l + C_r)/h`, `g1 = (C_r − C_l)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityAccumulator {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl DensityAccumulator {
    pub fn new(n_elements: usize) -> Self {
        Self { left: vec![0.0; n_elements], right: vec![0.0; n_elements] }
    }

    /// Adds `c` times the value of `θ` at node `node` of element `e`
    /// (`node` is `e` or `e + 1`).
    #[inline]
    pub fn add_node(&mut self, e: usize, node: usize, c: f64) {
        if node == e {
            self.left[e] += c;
        } else {
            debug_assert_eq!(node, e + 1);
            self.right[e] += c;
        }
    }

    /// Adds `a θ(y) + b θ′(y)` for a point `y` of element `e`.
    pub fn add_form(&mut self, mesh: &SpatialMesh, e: usize, y: f64, a: f64, b: f64) {
        let h = mesh.length(e);
        let s = ((y - mesh.nodes[e]) / h).clamp(0.0, 1.0);
        self.left[e] += a * (1.0 - s) - b / h;
        self.right[e] += a * s + b / h;
    }

    pub fn finish(
        self,
        mesh: &SpatialMesh,
        functional: impl Into<String>,
        rule: DensityRule,
        quadrature: impl Into<String>,
    ) -> DerivativeDensities {
        let n = self.left.len();
        let mut out = DerivativeDensities::zeros(n, functional, rule);
        out.quadrature = quadrature.into();
        for e in 0..n {
            out.g0[e] = (self.left[e] + self.right[e]) / mesh.length(e);
            out.g1[e] = 0.5 * (self.right[e] - self.left[e]);
        }
        out
    }
}
