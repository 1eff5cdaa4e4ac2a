//! Conductivity and reluctivity laws per material phase, and the Arkkio
//! torque post-processing on an air-gap annulus.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::quadrature::TriangleRule;

/// Phase identifier attached to each mesh element.
pub type PhaseId = u32;

/// Permeability of vacuum inverted: `ν₀ = 1/μ₀ = 10⁷/(4π)`.
pub const NU_VACUUM: f64 = 1.0e7 / (4.0 * std::f64::consts::PI);

/// Below this magnitude `ν̂′(s)/s` is replaced by its limit.
pub const SMALL_GRADIENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("field magnitude must be finite and non-negative, got {0}")]
    InvalidMagnitude(f64),
    #[error("invalid material law: {0}")]
    InvalidLaw(String),
    #[error("phase {0} has no material assigned")]
    UnknownPhase(PhaseId),
    #[error("arkkio weight is singular at the origin")]
    Singular,
    #[error("geometry error: {0}")]
    Geometry(String),
}

/// Parameters of `ν̂(s) = ν_a − (ν_a − c₁) exp(−c₂ s^{c₃})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub nu_a: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CurveParams {
    /// The ferromagnetic curve used for electric-machine iron.
    pub fn iron() -> Self {
        Self { nu_a: NU_VACUUM, c1: 200.0, c2: 0.001, c3: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReluctivityLaw {
    Constant(f64),
    Curve(CurveParams),
}

impl ReluctivityLaw {
    pub fn validate(&self) -> Result<(), MaterialError> {
        match *self {
            ReluctivityLaw::Constant(v) if !(v.is_finite() && v > 0.0) => {
                Err(MaterialError::InvalidLaw(format!("constant reluctivity must be positive, got {v}")))
            }
            ReluctivityLaw::Curve(p) => {
                let ok = p.c1 > 0.0 && p.nu_a >= p.c1 && p.c2 > 0.0 && p.c3 >= 1.0;
                let finite = [p.nu_a, p.c1, p.c2, p.c3].iter().all(|v| v.is_finite());
                if ok && finite {
                    Ok(())
                } else {
                    Err(MaterialError::InvalidLaw(format!(
                        "curve needs 0 < c1 <= nu_a, c2 > 0, c3 >= 1 (got {p:?})"
                    )))
                }
            }
            _ => Ok(()),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, ReluctivityLaw::Constant(_))
    }

    /// `(ν̂(s), ν̂′(s))`.
    pub fn evaluate(&self, s: f64) -> Result<(f64, f64), MaterialError> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(MaterialError::InvalidMagnitude(s));
        }
        Ok(self.evaluate_unchecked(s))
    }

    /// As [`evaluate`](Self::evaluate) but trusts the caller that `s ≥ 0`.
    #[inline]
    pub fn evaluate_unchecked(&self, s: f64) -> (f64, f64) {
        match *self {
            ReluctivityLaw::Constant(v) => (v, 0.0),
            ReluctivityLaw::Curve(p) => {
                let sc = s.powf(p.c3);
                let e = (-p.c2 * sc).exp();
                let nu = p.nu_a - (p.nu_a - p.c1) * e;
                let dnu = if s == 0.0 {
                    if p.c3 == 1.0 {
                        (p.nu_a - p.c1) * p.c2
                    } else {
                        0.0
                    }
                } else {
                    (p.nu_a - p.c1) * e * p.c2 * p.c3 * sc / s
                };
                (nu, dnu)
            }
        }
    }

    /// `d/ds [ν̂(s) s] = ν̂(s) + s ν̂′(s)`, the one-dimensional linearization.
    #[inline]
    pub fn tangent(&self, s: f64) -> f64 {
        let (nu, dnu) = self.evaluate_unchecked(s);
        nu + s * dnu
    }

    /// Coefficients `(ν̂(s), ν̂′(s)/s)` of the linearized tensor
    /// `ν̂ I + (ν̂′/s) G ⊗ G`, with the quotient replaced by its limit for
    /// `s < SMALL_GRADIENT`. For the curves accepted by `validate` with
    /// `c₃ ≥ 2` the limit is 0; for `1 ≤ c₃ < 2` the quotient is unbounded and
    /// we still return 0, which is flagged in the documentation of the
    /// shape derivative.
    pub fn linearized(&self, s: f64) -> (f64, f64) {
        let (nu, dnu) = self.evaluate_unchecked(s);
        if s < SMALL_GRADIENT {
            (nu, 0.0)
        } else {
            (nu, dnu / s)
        }
    }

    /// Infimum of `ν̂` over `s ≥ 0`, which is also the strong monotonicity
    /// constant of `s ↦ ν̂(s) s`.
    pub fn nu_lower(&self) -> f64 {
        match *self {
            ReluctivityLaw::Constant(v) => v,
            ReluctivityLaw::Curve(p) => p.c1,
        }
    }

    /// Supremum of `ν̂` over `s ≥ 0`.
    pub fn nu_upper(&self) -> f64 {
        match *self {
            ReluctivityLaw::Constant(v) => v,
            ReluctivityLaw::Curve(p) => p.nu_a,
        }
    }

    /// Exact Lipschitz constant of `s ↦ ν̂(s) s`, i.e. `sup_s ν̂(s) + s ν̂′(s)`.
    ///
    /// For the curve, with `z = c₂ s^{c₃}` the derivative reads
    /// `ν_a − (ν_a − c₁) e^{−z}(1 − c₃ z)`, maximal at `z = 1 + 1/c₃`.
    /// Note this exceeds `ν_a` (by a factor ≈ 2.87 for the iron curve).
    pub fn lipschitz_constant(&self) -> f64 {
        match *self {
            ReluctivityLaw::Constant(v) => v,
            ReluctivityLaw::Curve(p) => {
                p.nu_a + (p.nu_a - p.c1) * p.c3 * (-(1.0 + 1.0 / p.c3)).exp()
            }
        }
    }
}

/// `(ν̂(s), ν̂′(s))` for a law; errors on negative or non-finite `s`.
pub fn reluctivity(s: f64, law: &ReluctivityLaw) -> Result<(f64, f64), MaterialError> {
    law.evaluate(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub sigma: f64,
    pub nu: ReluctivityLaw,
}

impl Material {
    pub fn linear(sigma: f64, nu: f64) -> Self {
        Self { sigma, nu: ReluctivityLaw::Constant(nu) }
    }
}

/// Map from phase id to material. Element labels live on the mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseLayout {
    materials: BTreeMap<PhaseId, Material>,
}

impl PhaseLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, phase: PhaseId, material: Material) -> Self {
        self.materials.insert(phase, material);
        self
    }

    pub fn insert(&mut self, phase: PhaseId, material: Material) {
        self.materials.insert(phase, material);
    }

    pub fn get(&self, phase: PhaseId) -> Result<&Material, MaterialError> {
        self.materials.get(&phase).ok_or(MaterialError::UnknownPhase(phase))
    }

    pub fn phases(&self) -> impl Iterator<Item = (&PhaseId, &Material)> {
        self.materials.iter()
    }

    pub fn is_linear(&self) -> bool {
        self.materials.values().all(|m| m.nu.is_linear())
    }

    /// Checks every law and that each label in `labels` has a material.
    pub fn validate(&self, labels: impl IntoIterator<Item = PhaseId>) -> Result<(), MaterialError> {
        for m in self.materials.values() {
            if !(m.sigma.is_finite() && m.sigma >= 0.0) {
                return Err(MaterialError::InvalidLaw(format!("conductivity must be >= 0, got {}", m.sigma)));
            }
            m.nu.validate()?;
        }
        for l in labels {
            self.get(l)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Arkkio torque
// ---------------------------------------------------------------------------

/// Torque weight `Q(x) = (1/|x|) [[x₁x₂, (x₂² − x₁²)/2], [(x₂² − x₁²)/2, −x₁x₂]]`.
pub fn arkkio_q(x: &Vector2<f64>) -> Result<Matrix2<f64>, MaterialError> {
    let r = x.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(MaterialError::Singular);
    }
    let off = 0.5 * (x[1] * x[1] - x[0] * x[0]);
    let d = x[0] * x[1];
    Ok(Matrix2::new(d, off, off, -d) / r)
}

/// A triangulated planar region (typically containing the air gap).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMesh {
    pub nodes: Vec<Vector2<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl PlanarMesh {
    /// Structured polar triangulation of `r_in ≤ |x| ≤ r_out`.
    pub fn annulus(r_in: f64, r_out: f64, n_r: usize, n_theta: usize) -> Self {
        let mut nodes = Vec::with_capacity((n_r + 1) * n_theta);
        for i in 0..=n_r {
            let r = r_in + (r_out - r_in) * i as f64 / n_r as f64;
            for j in 0..n_theta {
                let a = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
                nodes.push(Vector2::new(r * a.cos(), r * a.sin()));
            }
        }
        let id = |i: usize, j: usize| i * n_theta + (j % n_theta);
        let mut triangles = Vec::with_capacity(2 * n_r * n_theta);
        for i in 0..n_r {
            for j in 0..n_theta {
                triangles.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
            }
        }
        Self { nodes, triangles }
    }

    pub fn area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangles[k].map(|i| self.nodes[i]);
        0.5 * ((b - a).perp(&(c - a)))
    }

    /// Constant gradient of the P1 interpolant of `values` on triangle `k`.
    pub fn gradient(&self, k: usize, values: &[f64]) -> Vector2<f64> {
        let [ia, ib, ic] = self.triangles[k];
        let (a, b, c) = (self.nodes[ia], self.nodes[ib], self.nodes[ic]);
        let m = Matrix2::new(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
        let rhs = Vector2::new(values[ib] - values[ia], values[ic] - values[ia]);
        m.lu().solve(&rhs).unwrap_or_else(Vector2::zeros)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArkkioParams {
    pub r_rotor: f64,
    pub r_stator: f64,
    pub length: f64,
    pub nu_a: f64,
    pub period: f64,
}

/// Torque `(1/T)·(L ν_a/(r_s − r_r))·∫₀ᵀ∫_Σ Q∇u·∇u`, with `Σ` the union of
/// the triangles whose vertices all lie in `r_r ≤ |x| ≤ r_s`.
///
/// `snapshots` are `(t, nodal values)` pairs sorted in time and spanning
/// `[0, T]`; the time integral uses the trapezoidal rule over them.
pub fn arkkio_torque(
    mesh: &PlanarMesh,
    snapshots: &[(f64, Vec<f64>)],
    params: &ArkkioParams,
) -> Result<f64, MaterialError> {
    let ArkkioParams { r_rotor, r_stator, length, nu_a, period } = *params;
    if !(r_rotor < r_stator) || period <= 0.0 {
        return Err(MaterialError::Geometry("need r_r < r_s and T > 0".into()));
    }
    let slack = 1e-12 * r_stator;
    let gap: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&k| {
            mesh.triangles[k].iter().all(|&i| {
                let r = mesh.nodes[i].norm();
                r >= r_rotor - slack && r <= r_stator + slack
            })
        })
        .collect();
    if gap.is_empty() {
        return Err(MaterialError::Geometry("annulus contains no mesh element".into()));
    }
    // ∫_K Q dx is time independent; precompute it per element.
    let rule = TriangleRule::collapsed_gauss(6);
    let mut q_int = Vec::with_capacity(gap.len());
    for &k in &gap {
        let [a, b, c] = mesh.triangles[k].map(|i| mesh.nodes[i]);
        let area = mesh.area(k).abs();
        let mut acc = Matrix2::zeros();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = a * p[0] + b * p[1] + c * p[2];
            acc += arkkio_q(&x)? * (w * area);
        }
        q_int.push(acc);
    }
    let density = |values: &[f64]| -> f64 {
        gap.iter()
            .zip(&q_int)
            .map(|(&k, q)| {
                let g = mesh.gradient(k, values);
                g.dot(&(q * g))
            })
            .sum()
    };
    let integral = match snapshots {
        [] => return Err(MaterialError::Geometry("no time snapshots".into())),
        [(_, u)] => density(u) * period,
        _ => snapshots
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (density(&w[0].1) + density(&w[1].1)))
            .sum(),
    };
    Ok(integral * length * nu_a / (r_stator - r_rotor) / period)
}
