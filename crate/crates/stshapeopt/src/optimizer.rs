//! Shape-gradient descent: state → adjoint → densities → Hilbertian
//! direction → step halving → mesh update.

use thiserror::Error;

use crate::fem::{
    evaluate_objective, solve_adjoint, solve_state, Assembler, FemError, Field, LinearSystem, NewtonOptions,
    SparseMatrix, StateProblem,
};
use crate::functions::{Integrand, ScalarField};
use crate::materials::PhaseLayout;
use crate::mesh::{MeshError, SpaceTimeMesh, SpatialField, SpatialMesh};
use crate::motion::Motion;
use crate::quadrature::TriangleRule;
use crate::shape::{pde_volume_densities, DensityRule, DerivativeDensities, ShapeError};

/// Trial meshes with a spatial element shorter than this fraction of the
/// mean element length are rejected like inverted ones: the descent can
/// otherwise squeeze an element to zero and make the adjoint singular.
pub const MIN_ELEMENT_FRACTION: f64 = 0.05;

/// True when no spatial element is shorter than [`MIN_ELEMENT_FRACTION`]
/// of the mean element length.
pub fn mesh_quality_ok(mesh: &SpatialMesh) -> bool {
    let n = mesh.n_elements();
    let mean = (mesh.nodes[n] - mesh.nodes[0]) / n as f64;
    (0..n).all(|e| mesh.length(e) >= MIN_ELEMENT_FRACTION * mean)
}

/// Name of the norm used in the stopping rule, recorded in outputs.
pub const NORM_KIND: &str = "hilbertian: sqrt(b(theta, theta))";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    /// Weight of the symmetrized-gradient term.
    pub alpha: f64,
    /// Weight of the mass term.
    pub beta: f64,
    /// Conformality penalty; only meaningful in two space dimensions.
    pub include_cauchy_riemann: bool,
    /// Upper bound of the first trial step of every line search.
    pub tau_init: f64,
    pub tau_min: f64,
    /// Stop when the Hilbertian norm of the direction falls below this.
    pub theta_tol: f64,
    pub max_outer: usize,
    pub max_halvings: usize,
    pub density_rule: DensityRule,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.0,
            include_cauchy_riemann: false,
            tau_init: 1.0,
            tau_min: 1e-10,
            theta_tol: 1e-9,
            max_outer: 200,
            max_halvings: 60,
            density_rule: DensityRule::Exact,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: &str| Err(OptimizeError::Config(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("beta must be non-negative");
        }
        if self.include_cauchy_riemann {
            return bad("the Cauchy-Riemann term needs two space dimensions");
        }
        if !(self.tau_min > 0.0 && self.tau_min < self.tau_init) {
            return bad("need 0 < tau_min < tau_init");
        }
        if !(self.theta_tol >= 0.0) {
            return bad("theta_tol must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid descent configuration: {0}")]
    Config(String),
    /// A solve or geometry failure; `report` holds everything accepted so
    /// far (absent if the initial state could not be computed).
    #[error("{cause}")]
    Failed { cause: ShapeError, report: Option<Box<OptimizationReport>> },
}

impl OptimizeError {
    fn failed(cause: impl Into<ShapeError>) -> Self {
        OptimizeError::Failed { cause: cause.into(), report: None }
    }
}

/// Everything but the mesh: the state equation data and the objective.
#[derive(Clone, Copy)]
pub struct ShapeProblem<'a> {
    pub layout: &'a PhaseLayout,
    pub motion: &'a dyn Motion<1>,
    pub source: &'a dyn ScalarField,
    pub objective: &'a dyn Integrand,
    pub newton: NewtonOptions,
    pub quadrature: &'a TriangleRule,
}

impl<'a> ShapeProblem<'a> {
    pub fn assembler<'m>(&self, mesh: &'m SpaceTimeMesh) -> Result<Assembler<'m>, FemError>
    where
        'a: 'm,
    {
        Assembler::with_rule(
            StateProblem { mesh, layout: self.layout, motion: self.motion, source: self.source },
            self.quadrature,
        )
    }

    /// Solves the state on `mesh` and evaluates the objective.
    pub fn evaluate(&self, mesh: &SpaceTimeMesh, guess: Option<&Field>) -> Result<Evaluation, FemError> {
        let asm = self.assembler(mesh)?;
        let state = solve_state(&asm, &self.newton, guess)?;
        let objective = evaluate_objective(&asm, &state.u, self.objective)?;
        Ok(Evaluation { objective, newton_iterations: state.report.iterations, u: state.u })
    }

    /// Adjoint solve and derivative densities at a solved state.
    pub fn densities(&self, mesh: &SpaceTimeMesh, u: &Field, rule: DensityRule) -> Result<DerivativeDensities, ShapeError> {
        let asm = self.assembler(mesh)?;
        let p = solve_adjoint(&asm, u, self.objective)?;
        pde_volume_densities(&asm, u, &p, self.objective, rule)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub newton_iterations: usize,
    pub u: Field,
}

/// A descent direction and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    /// `−θ`, where `θ` represents `J′(Ω)` in the Hilbertian inner product.
    pub theta: SpatialField,
    /// `√b(θ, θ)`.
    pub norm: f64,
    /// `J′(Ω)(direction) = −b(θ, θ)`.
    pub slope: f64,
}

/// Solves `b(θ, η) = J′(Ω)(η)` for all P1 `η` vanishing at both ends of `D`,
/// with `b(θ, η) = ∫ α (θ′ + θ′) η′ + β θ η`, and returns `−θ`.
pub fn hilbertian_direction(
    mesh: &SpatialMesh,
    densities: &DerivativeDensities,
    config: &DescentConfig,
) -> Result<Direction, OptimizeError> {
    config.validate()?;
    let load = densities.nodal_load(mesh).map_err(OptimizeError::failed)?;
    let n = mesh.n_nodes();
    let interior = n - 2;
    let mut entries = Vec::with_capacity(4 * (n - 1));
    for e in 0..mesh.n_elements() {
        let h = mesh.length(e);
        let stiff = 2.0 * config.alpha / h;
        let mass = config.beta * h / 6.0;
        let local = [[stiff + 2.0 * mass, -stiff + mass], [-stiff + mass, stiff + 2.0 * mass]];
        for a in 0..2 {
            for b in 0..2 {
                let (i, j) = (e + a, e + b);
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    continue;
                }
                entries.push((i - 1, j - 1, local[a][b]));
            }
        }
    }
    let rhs = load[1..n - 1].to_vec();
    let mut theta = vec![0.0; n];
    if rhs.iter().any(|v| *v != 0.0) {
        let matrix = SparseMatrix::from_triplets(interior, entries);
        let sol = LinearSystem::new(matrix, rhs.clone())
            .and_then(|s| s.solve())
            .map_err(OptimizeError::failed)?;
        for (k, v) in sol.x.iter().enumerate() {
            theta[k + 1] = -v;
        }
    }
    let slope: f64 = load.iter().zip(&theta).map(|(a, b)| a * b).sum();
    Ok(Direction { theta: SpatialField { values: theta }, norm: (-slope).max(0.0).sqrt(), slope })
}

/// Result of a line search.
#[derive(Debug, Clone, PartialEq)]
pub enum LineSearch {
    Accepted { tau: f64, mesh: SpaceTimeMesh, evaluation: Evaluation, trials: usize },
    /// No step down to `tau_min` decreased the objective.
    Rejected { last_tau: f64, trials: usize },
}

/// Tries `τ₀, τ₀/2, …` until the deformed mesh is valid and the objective
/// decreases. Inverted or degenerate meshes are rejected before any solve; a trial whose
/// Newton iteration or linear solve fails is treated like a non-decreasing one.
pub fn line_search(
    problem: &ShapeProblem<'_>,
    mesh: &SpaceTimeMesh,
    current: &Evaluation,
    direction: &Direction,
    tau0: f64,
    config: &DescentConfig,
) -> Result<LineSearch, OptimizeError> {
    let mut tau = tau0;
    let mut trials = 0;
    loop {
        if tau < config.tau_min || trials > config.max_halvings {
            return Ok(LineSearch::Rejected { last_tau: tau, trials });
        }
        trials += 1;
        match mesh.deformed(problem.motion, &direction.theta, tau) {
            Ok(trial) if !mesh_quality_ok(&trial.spatial) => {}
            Ok(trial) => match problem.evaluate(&trial, Some(&current.u)) {
                Ok(eval) if eval.objective < current.objective => {
                    return Ok(LineSearch::Accepted { tau, mesh: trial, evaluation: eval, trials });
                }
                Ok(_) | Err(FemError::NonConvergence { .. }) | Err(FemError::Solver(_)) => {}
                Err(e) => return Err(OptimizeError::failed(e)),
            },
            Err(MeshError::InvertedElement { .. }) => {}
            Err(e) => return Err(OptimizeError::failed(e)),
        }
        tau *= 0.5;
    }
}

/// One line of the optimization history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    pub objective: f64,
    /// Norm of the direction that produced this iterate (0 for the start).
    pub theta_norm: f64,
    /// Accepted step that produced this iterate (0 for the start).
    pub tau: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The direction norm fell below `theta_tol`.
    ThetaTolerance,
    /// No acceptable step above `tau_min`.
    LineSearchFailure,
    MaxIterations,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ThetaTolerance => "theta_tol",
            Termination::LineSearchFailure => "line_search_failure",
            Termination::MaxIterations => "max_outer",
        }
    }
}

/// Predicted and observed decrease of the first accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstStep {
    pub tau: f64,
    pub predicted: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    pub history: Vec<HistoryRow>,
    pub termination: Termination,
    pub final_mesh: SpaceTimeMesh,
    pub final_state: Field,
    /// Norm of the last computed direction.
    pub last_theta_norm: f64,
    pub first_step: Option<FirstStep>,
    pub norm_kind: &'static str,
}

impl OptimizationReport {
    pub fn initial_objective(&self) -> f64 {
        self.history[0].objective
    }

    pub fn final_objective(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |r| r.objective)
    }

    /// True when every accepted objective is below its predecessor.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.history.windows(2).all(|w| w[1].objective < w[0].objective)
    }
}

/// Runs the descent loop from `mesh`. `observer` sees every accepted
/// iterate (including the initial one) with its mesh and state.
pub fn optimize(
    problem: &ShapeProblem<'_>,
    mesh: SpaceTimeMesh,
    config: &DescentConfig,
    observer: &mut dyn FnMut(&HistoryRow, &SpaceTimeMesh, &Field),
) -> Result<OptimizationReport, OptimizeError> {
    config.validate()?;
    let mut current = problem.evaluate(&mesh, None).map_err(OptimizeError::failed)?;
    let row = HistoryRow {
        iter: 0,
        objective: current.objective,
        theta_norm: 0.0,
        tau: 0.0,
        newton_iters: current.newton_iterations,
    };
    observer(&row, &mesh, &current.u);
    let mut report = OptimizationReport {
        history: vec![row],
        termination: Termination::MaxIterations,
        final_mesh: mesh,
        final_state: current.u.clone(),
        last_theta_norm: 0.0,
        first_step: None,
        norm_kind: NORM_KIND,
    };
    let abort = |cause: ShapeError, report: &OptimizationReport| OptimizeError::Failed {
        cause,
        report: Some(Box::new(report.clone())),
    };
    let mut tau_prev = config.tau_init;
    for k in 0..config.max_outer {
        let densities = problem
            .densities(&report.final_mesh, &current.u, config.density_rule)
            .map_err(|e| abort(e, &report))?;
        let direction = match hilbertian_direction(&report.final_mesh.spatial, &densities, config) {
            Ok(d) => d,
            Err(OptimizeError::Failed { cause, .. }) => return Err(abort(cause, &report)),
            Err(e) => return Err(e),
        };
        report.last_theta_norm = direction.norm;
        if direction.norm <= config.theta_tol {
            report.termination = Termination::ThetaTolerance;
            return Ok(report);
        }
        let tau0 = (2.0 * tau_prev).min(config.tau_init);
        let outcome = match line_search(problem, &report.final_mesh, &current, &direction, tau0, config) {
            Ok(o) => o,
            Err(OptimizeError::Failed { cause, .. }) => return Err(abort(cause, &report)),
            Err(e) => return Err(e),
        };
        match outcome {
            LineSearch::Accepted { tau, mesh, evaluation, .. } => {
                if k == 0 {
                    report.first_step = Some(FirstStep {
                        tau,
                        predicted: tau * direction.slope,
                        observed: evaluation.objective - current.objective,
                    });
                }
                let row = HistoryRow {
                    iter: k + 1,
                    objective: evaluation.objective,
                    theta_norm: direction.norm,
                    tau,
                    newton_iters: evaluation.newton_iterations,
                };
                observer(&row, &mesh, &evaluation.u);
                report.history.push(row);
                report.final_mesh = mesh;
                report.final_state = evaluation.u.clone();
                current = evaluation;
                tau_prev = tau;
            }
            LineSearch::Rejected { .. } => {
                report.termination = Termination::LineSearchFailure;
                return Ok(report);
            }
        }
    }
    report.termination = Termination::MaxIterations;
    Ok(report)
}

/// One row of a finite-difference gradient check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheckRow {
    pub eps: f64,
    /// `(J(Ω_εθ) − J(Ω)) / ε`.
    pub finite_difference: f64,
    pub adjoint: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub objective: f64,
    pub adjoint: f64,
    /// Rows in the order of the requested `ε`.
    pub rows: Vec<GradientCheckRow>,
    /// Least-squares slope of `log err` against `log ε`; `None` with fewer
    /// than two usable rows.
    pub observed_order: Option<f64>,
}

/// Minimum observed order accepted by [`GradientCheck::passes`]. A one-sided
/// difference converges with order exactly one; the slack absorbs the
/// pre-asymptotic curvature of the error over a few decades of `ε`.
pub const MIN_OBSERVED_ORDER: f64 = 0.9;

impl GradientCheck {
    pub fn best_rel_error(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_error).fold(f64::INFINITY, f64::min)
    }

    /// First-order convergence, or agreement at the level of roundoff
    /// (which includes `θ = 0`).
    pub fn passes(&self) -> bool {
        match self.observed_order {
            Some(q) => q >= MIN_OBSERVED_ORDER,
            None => self.rows.iter().all(|r| r.rel_error <= 1e-10),
        }
    }
}

/// Compares the adjoint derivative `J′(Ω)(θ)` with one-sided differences of
/// the objective along the mesh deformation `Ω ↦ Ω_εθ`.
pub fn check_gradient(
    problem: &ShapeProblem<'_>,
    mesh: &SpaceTimeMesh,
    theta: &SpatialField,
    epsilons: &[f64],
    rule: DensityRule,
) -> Result<GradientCheck, ShapeError> {
    let base = problem.evaluate(mesh, None)?;
    let adjoint = problem.densities(mesh, &base.u, rule)?.pair(&mesh.spatial, theta)?;
    let scale = adjoint.abs().max(f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let moved = mesh.deformed(problem.motion, theta, eps)?;
        let j = problem.evaluate(&moved, Some(&base.u))?.objective;
        let fd = (j - base.objective) / eps;
        let rel_error = if adjoint == 0.0 && fd == 0.0 { 0.0 } else { (fd - adjoint).abs() / scale };
        rows.push(GradientCheckRow { eps, finite_difference: fd, adjoint, rel_error });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.rel_error > 1e-10)
        .map(|r| (r.eps.ln(), r.rel_error.ln()))
        .collect();
    let observed_order = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 { sxy / sxx } else { f64::NAN }
    });
    Ok(GradientCheck { objective: base.objective, adjoint, rows, observed_order })
}
