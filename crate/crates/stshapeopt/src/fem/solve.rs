use crate::functions::Integrand;
use crate::mesh::SpatialField;
use crate::motion::Motion1D;

use super::linear::norm;
use super::{transported_velocity, Assembler, FemError, Field, LinearSystem};

/// Damped Newton settings. Damping halves the step until the residual norm
/// decreases; it gives up when the factor drops below `min_damping` or after
/// `max_halvings` halvings, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Relative tolerance on `‖R(u)‖ / ‖R(0)‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, max_halvings: 30, min_damping: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `‖R‖` before the first and after every accepted step.
    pub residuals: Vec<f64>,
    /// Damping factor of every accepted step.
    pub dampings: Vec<f64>,
    /// `‖R(0)‖`, the scale of the relative tolerance.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSolution {
    pub u: Field,
    pub report: NewtonReport,
}

/// Relative size of a Newton correction treated as roundoff.
pub const STAGNATION_STEP: f64 = 1e-13;

/// Solves the state equation by damped Newton, optionally warm-started.
pub fn solve_state(
    asm: &Assembler<'_>,
    opts: &NewtonOptions,
    guess: Option<&Field>,
) -> Result<StateSolution, FemError> {
    let dofs = &asm.dofs;
    let n = dofs.n_vertices();
    let zero = Field::zeros(n);
    let reference = norm(&asm.residual(&zero)?);
    let mut report = NewtonReport { reference, ..Default::default() };
    if reference == 0.0 {
        report.residuals.push(0.0);
        return Ok(StateSolution { u: zero, report });
    }
    let mut u = match guess {
        Some(g) if g.len() == n => dofs.expand(&dofs.restrict(g)),
        Some(g) => return Err(FemError::Dimension { expected: n, got: g.len() }),
        None => zero,
    };
    let target = opts.tol * reference;
    let mut r = asm.residual(&u)?;
    let mut r_norm = norm(&r);
    report.residuals.push(r_norm);
    while r_norm > target {
        if report.iterations == opts.max_iter {
            return Err(FemError::NonConvergence {
                iterations: report.iterations,
                residual: r_norm,
                reason: "iteration limit reached".into(),
            });
        }
        let jac = asm.jacobian(&u)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = LinearSystem::new(jac, rhs)?.solve()?.x;
        // At the roundoff floor of an ill-conditioned system the residual can
        // no longer decrease; a negligible Newton correction means converged.
        let u_scale = u.max_abs();
        if u_scale > 0.0 && step.iter().fold(0.0f64, |m, s| m.max(s.abs())) <= STAGNATION_STEP * u_scale {
            break;
        }
        let mut lambda = 1.0;
        let mut halvings = 0;
        loop {
            let mut reduced = dofs.restrict(&u);
            for (a, s) in reduced.iter_mut().zip(&step) {
                *a += lambda * s;
            }
            let trial = dofs.expand(&reduced);
            let r_trial = asm.residual(&trial)?;
            let n_trial = norm(&r_trial);
            if n_trial < r_norm || n_trial <= target {
                u = trial;
                r = r_trial;
                r_norm = n_trial;
                break;
            }
            lambda *= 0.5;
            halvings += 1;
            if lambda < opts.min_damping || halvings > opts.max_halvings {
                return Err(FemError::NonConvergence {
                    iterations: report.iterations,
                    residual: r_norm,
                    reason: format!("damping underflow (factor {lambda:e})"),
                });
            }
        }
        report.iterations += 1;
        report.residuals.push(r_norm);
        report.dampings.push(lambda);
    }
    Ok(StateSolution { u, report })
}

/// Adjoint state: `J_R(u)ᵀ p = −∂J/∂u`, the exact adjoint of the discrete
/// state equation (periodic aliasing included).
pub fn solve_adjoint(asm: &Assembler<'_>, u: &Field, j: &dyn Integrand) -> Result<Field, FemError> {
    let g = asm.objective_gradient_full(u, j)?;
    let load: Vec<f64> = g.iter().map(|v| -v).collect();
    solve_adjoint_with_load(asm, u, &load)
}

/// Adjoint state for an arbitrary unfolded right-hand side (one value per
/// vertex, already carrying the minus sign).
pub fn solve_adjoint_with_load(asm: &Assembler<'_>, u: &Field, load: &[f64]) -> Result<Field, FemError> {
    let jac = asm.jacobian(u)?;
    let sol = LinearSystem::new(jac, asm.dofs.fold(load))?.solve_transpose()?;
    Ok(asm.dofs.expand(&sol.x))
}

/// Adjoint of the continuous problem: the same equation as [`solve_adjoint`]
/// but with `p(0, ξ) = φ_T′(ξ) p(T, φ_T(ξ))` on the periodic pairs, the
/// condition that makes the time-boundary terms of the integration by parts
/// cancel. Returned as vertex values (top values are `p_bottom / φ_T′`).
///
/// The derivative of the discrete objective pairs with [`solve_adjoint`];
/// this variant converges to the continuous adjoint and is the one to use in
/// formulas derived by integrating the adjoint equation by parts, such as
/// the surface form.
pub fn solve_continuous_adjoint(asm: &Assembler<'_>, u: &Field, j: &dyn Integrand) -> Result<Field, FemError> {
    let mesh = asm.mesh();
    let motion = asm.problem.motion;
    let mut weights = vec![1.0; u.len()];
    for &(bottom, top) in &mesh.periodic_pairs {
        let xi = mesh.reference[bottom][1];
        weights[top] = 1.0 / motion.grad1(mesh.period, xi);
    }
    let jac = asm.jacobian_with_test_weights(u, &weights)?;
    let g = asm.objective_gradient_full(u, j)?;
    let load: Vec<f64> = g.iter().map(|v| -v).collect();
    let sol = LinearSystem::new(jac, asm.dofs.fold(&load))?.solve_transpose()?;
    let mut p = asm.dofs.expand(&sol.x);
    for (v, w) in weights.iter().enumerate() {
        p.values[v] *= w;
    }
    Ok(p)
}

/// Lagrangian derivative `u̇(θ)`: `J_R(u) u̇ = −(∂R/∂X)·V(θ)`.
pub fn solve_tangent(asm: &Assembler<'_>, u: &Field, theta: &SpatialField) -> Result<Field, FemError> {
    let velocity = transported_velocity(asm.mesh(), asm.problem.motion, theta);
    let dr = asm.shape_residual_derivative(u, &velocity)?;
    let rhs: Vec<f64> = asm.dofs.fold(&dr).iter().map(|v| -v).collect();
    let jac = asm.jacobian(u)?;
    let sol = LinearSystem::new(jac, rhs)?.solve()?;
    Ok(asm.dofs.expand(&sol.x))
}

/// `∫_Q j(u)` by element quadrature.
pub fn evaluate_objective(asm: &Assembler<'_>, u: &Field, j: &dyn Integrand) -> Result<f64, FemError> {
    asm.objective(u, j)
}
