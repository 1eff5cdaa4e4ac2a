//! The three commands behind the `stshapeopt` binary, as library functions
//! that return exit codes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::config::{LoadError, RunConfig};
use crate::expr::{Env, ExprField, ExprIntegrand};
use crate::fem::{Field, FemError};
use crate::io::{format_sci, write_history_csv, write_vtk, ScalarData};
use crate::materials::PhaseLayout;
use crate::mesh::{generate_1d_example_mesh, SpaceTimeMesh, SpatialField, INNER_PHASE, OUTER_PHASE};
use crate::motion::Motion;
use crate::optimizer::{check_gradient, optimize, OptimizationReport, OptimizeError, ShapeProblem, NORM_KIND};
use crate::quadrature::TriangleRule;
use crate::shape::ShapeError;

pub const EXIT_OK: i32 = 0;
/// `check-gradient` ran but the observed order was too low.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Io(String),
    Solver(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Io(_) => EXIT_IO,
            AppError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Io(m) => write!(f, "i/o error: {m}"),
            AppError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

fn io_err(path: &Path, e: io::Error) -> AppError {
    AppError::Io(format!("{}: {e}", path.display()))
}

/// Command-line overrides of the `[output]` section.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub vtk: bool,
}

/// A configuration turned into solver inputs.
pub struct Setup {
    pub config: RunConfig,
    pub motion: Arc<dyn Motion<1>>,
    pub layout: PhaseLayout,
    pub source: ExprField,
    pub objective: ExprIntegrand,
    pub rule: TriangleRule,
    pub mesh: SpaceTimeMesh,
    pub out_dir: PathBuf,
    pub vtk: bool,
}

impl Setup {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, AppError> {
        let config = RunConfig::load(path).map_err(|e| match e {
            LoadError::Io(e) => io_err(path, e),
            LoadError::Config(e) => AppError::Config(format!("{}: {e}", path.display())),
        })?;
        Self::new(config, overrides)
    }

    pub fn new(config: RunConfig, overrides: &Overrides) -> Result<Self, AppError> {
        let motion = config.problem.motion.build(config.problem.period);
        let layout = PhaseLayout::new().with(INNER_PHASE, config.inner.clone()).with(OUTER_PHASE, config.outer.clone());
        let source = ExprField::new(config.source.clone(), motion.clone()).map_err(|e| AppError::Config(e.to_string()))?;
        let objective = ExprIntegrand::new(config.objective.clone(), motion.clone());
        let mesh = generate_1d_example_mesh(config.n_x, config.n_t, &config.problem.interfaces, &*motion)
            .map_err(|e| AppError::Config(format!("cannot build the mesh: {e}")))?;
        layout
            .validate(mesh.elements.iter().map(|e| e.phase))
            .map_err(|e| AppError::Config(e.to_string()))?;
        let rule = config.quadrature.rule();
        let out_dir = overrides.out.clone().unwrap_or_else(|| config.output.directory.clone());
        let vtk = overrides.vtk || config.output.vtk;
        Ok(Self { config, motion, layout, source, objective, rule, mesh, out_dir, vtk })
    }

    pub fn problem(&self) -> ShapeProblem<'_> {
        ShapeProblem {
            layout: &self.layout,
            motion: &*self.motion,
            source: &self.source,
            objective: &self.objective,
            newton: self.config.newton,
            quadrature: &self.rule,
        }
    }

    fn prepare_output(&self) -> Result<(), AppError> {
        fs::create_dir_all(&self.out_dir).map_err(|e| io_err(&self.out_dir, e))?;
        // Fail early on read-only directories rather than after a long run.
        let probe = self.out_dir.join(".write_probe");
        fs::write(&probe, b"").map_err(|e| io_err(&self.out_dir, e))?;
        let _ = fs::remove_file(probe);
        Ok(())
    }

    fn write_snapshot(&self, name: &str, mesh: &SpaceTimeMesh, u: &Field, title: &str) -> Result<(), AppError> {
        let path = self.out_dir.join(name);
        let xi: Vec<f64> = mesh.reference.iter().map(|r| r[1]).collect();
        let phase: Vec<f64> = mesh.elements.iter().map(|e| f64::from(e.phase)).collect();
        write_vtk(
            &path,
            mesh,
            title,
            &[ScalarData::new("u", &u.values), ScalarData::new("xi", &xi)],
            &[ScalarData::new("phase", &phase)],
        )
        .map_err(|e| io_err(&path, e))
    }

    fn write_text(&self, name: &str, text: &str) -> Result<(), AppError> {
        let path = self.out_dir.join(name);
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }
}

fn solver(e: impl std::fmt::Display) -> AppError {
    AppError::Solver(e.to_string())
}

/// Solves the state once; writes `state.vtk` and `summary.txt` and prints `J`.
pub fn cmd_solve(setup: &Setup, out: &mut dyn Write) -> Result<f64, AppError> {
    setup.prepare_output()?;
    let problem = setup.problem();
    let eval = problem.evaluate(&setup.mesh, None).map_err(solver)?;
    setup.write_snapshot("state.vtk", &setup.mesh, &eval.u, "state")?;
    let interfaces: Vec<String> = setup.mesh.spatial.interfaces().iter().map(|p| format!("{}", p.xi)).collect();
    setup.write_text(
        "summary.txt",
        &format!(
            "command = solve\nJ = {}\nnewton_iters = {}\nn_x = {}\nn_t = {}\ninterfaces = {}\n",
            format_sci(eval.objective),
            eval.newton_iterations,
            setup.config.n_x,
            setup.config.n_t,
            interfaces.join(", ")
        ),
    )?;
    let _ = writeln!(out, "J = {}  (newton iterations: {})", format_sci(eval.objective), eval.newton_iterations);
    Ok(eval.objective)
}

fn summary(setup: &Setup, report: &OptimizationReport) -> String {
    let mut s = String::from("command = optimize\n");
    let interfaces: Vec<String> = report.final_mesh.spatial.interfaces().iter().map(|p| format!("{}", p.xi)).collect();
    let _ = writeln!(s, "J_initial = {}", format_sci(report.initial_objective()));
    let _ = writeln!(s, "J_final = {}", format_sci(report.final_objective()));
    let _ = writeln!(s, "iterations = {}", report.history.len() - 1);
    let _ = writeln!(s, "termination = {}", report.termination.name());
    let _ = writeln!(s, "last_theta_norm = {}", format_sci(report.last_theta_norm));
    let _ = writeln!(s, "norm = {NORM_KIND}");
    let _ = writeln!(s, "density_rule = {}", setup.config.descent.density_rule.name());
    let _ = writeln!(s, "final_interfaces = {}", interfaces.join(", "));
    s
}

/// Runs the descent loop; writes `history.csv` (also after a solver
/// failure, up to the last good iterate), `final.vtk`, `summary.txt`, and
/// `iter_NNNN.vtk` snapshots when VTK output is on.
pub fn cmd_optimize(setup: &Setup, out: &mut dyn Write) -> Result<OptimizationReport, AppError> {
    setup.prepare_output()?;
    let problem = setup.problem();
    let mut io_failure = None;
    let mut observer = |row: &crate::optimizer::HistoryRow, mesh: &SpaceTimeMesh, u: &Field| {
        let _ = writeln!(
            out,
            "iter {:4}  J = {}  |theta| = {}  tau = {}  newton = {}",
            row.iter,
            format_sci(row.objective),
            format_sci(row.theta_norm),
            format_sci(row.tau),
            row.newton_iters
        );
        if setup.vtk && io_failure.is_none() {
            if let Err(e) = setup.write_snapshot(&format!("iter_{:04}.vtk", row.iter), mesh, u, "iterate") {
                io_failure = Some(e);
            }
        }
    };
    let result = optimize(&problem, setup.mesh.clone(), &setup.config.descent, &mut observer);
    let csv = setup.out_dir.join(&setup.config.output.csv);
    match result {
        Ok(report) => {
            if let Some(e) = io_failure {
                return Err(e);
            }
            write_history_csv(&csv, &report.history).map_err(|e| io_err(&csv, e))?;
            setup.write_snapshot("final.vtk", &report.final_mesh, &report.final_state, "final")?;
            setup.write_text("summary.txt", &summary(setup, &report))?;
            let _ = writeln!(
                out,
                "J: {} -> {}  ({} iterations, termination: {})",
                format_sci(report.initial_objective()),
                format_sci(report.final_objective()),
                report.history.len() - 1,
                report.termination.name()
            );
            Ok(report)
        }
        Err(OptimizeError::Config(m)) => Err(AppError::Config(m)),
        Err(OptimizeError::Failed { cause, report }) => {
            if let Some(report) = report {
                write_history_csv(&csv, &report.history).map_err(|e| io_err(&csv, e))?;
                setup.write_snapshot("last_good.vtk", &report.final_mesh, &report.final_state, "last good")?;
            }
            Err(solver(cause))
        }
    }
}

/// Prints the `(ε, FD, adjoint, rel. error)` table for the configured `θ`,
/// writes it to `gradient_check.csv`, and returns whether the check passed.
pub fn cmd_check_gradient(setup: &Setup, out: &mut dyn Write) -> Result<bool, AppError> {
    setup.prepare_output()?;
    let problem = setup.problem();
    let spatial = &setup.mesh.spatial;
    let expr = &setup.config.gradient_check.theta;
    let mut values: Vec<f64> = spatial
        .nodes
        .iter()
        .map(|&xi| expr.eval(&Env { t: 0.0, x: xi, xi, dxi_dx: 1.0, u: 0.0 }).v)
        .collect();
    let last = values.len() - 1;
    values[0] = 0.0;
    values[last] = 0.0;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AppError::Config("gradient_check.theta is not finite on the mesh".into()));
    }
    let theta = SpatialField { values };
    let check = check_gradient(
        &problem,
        &setup.mesh,
        &theta,
        &setup.config.gradient_check.epsilons,
        setup.config.descent.density_rule,
    )
    .map_err(|e| match e {
        ShapeError::Mesh(m) => AppError::Solver(format!("deformed mesh is invalid: {m}")),
        ShapeError::Fem(FemError::NonConvergence { .. }) => solver(e),
        e => solver(e),
    })?;
    let mut csv = String::from("eps,fd,adjoint,rel_error\n");
    let _ = writeln!(out, "{:>12} {:>22} {:>22} {:>12}", "eps", "finite difference", "adjoint", "rel. error");
    for r in &check.rows {
        let _ = writeln!(out, "{:>12.3e} {:>22.14e} {:>22.14e} {:>12.3e}", r.eps, r.finite_difference, r.adjoint, r.rel_error);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            format_sci(r.eps),
            format_sci(r.finite_difference),
            format_sci(r.adjoint),
            format_sci(r.rel_error)
        );
    }
    let order = check.observed_order.map_or("n/a".to_string(), |q| format!("{q:.3}"));
    let verdict = if check.passes() { "pass" } else { "FAIL" };
    let _ = writeln!(out, "observed order: {order}  best rel. error: {:.3e}  {verdict}", check.best_rel_error());
    setup.write_text("gradient_check.csv", &csv)?;
    Ok(check.passes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Optimize,
    CheckGradient,
}

/// Loads the configuration and runs `command`; errors are reported on
/// `err`. Returns the process exit code.
pub fn run(command: Command, config: &Path, overrides: &Overrides, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = Setup::load(config, overrides).and_then(|setup| match command {
        Command::Solve => cmd_solve(&setup, out).map(|_| EXIT_OK),
        Command::Optimize => cmd_optimize(&setup, out).map(|_| EXIT_OK),
        Command::CheckGradient => {
            cmd_check_gradient(&setup, out).map(|ok| if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
