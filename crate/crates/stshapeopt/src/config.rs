//! Run configuration: a line-oriented `key = value` format with sections.
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | entry
//! comment  := '#' any*
//! section  := '[' name ']'
//! entry    := key '=' value [comment]
//! ```
//!
//! Keys are unique within a section, unknown sections or keys are errors,
//! and every error reports its 1-based line number. Lists are
//! comma-separated; booleans are `true`/`false`. Sections and keys:
//!
//! | section | keys |
//! |---|---|
//! | `problem` | `domain` (`0, 1`), `interfaces`, `motion` (`identity` or `polynomial`), `period` |
//! | `materials` | `inner.sigma`, `inner.nu`, `outer.sigma`, `outer.nu`; `nu` is a number, `curve(nu_a, c1, c2, c3)` or `iron` |
//! | `source` | `f` (expression in `t, x, xi`) |
//! | `discretization` | `n_x`, `n_t`, `quadrature` (`three-point` or `gauss-N`) |
//! | `objective` | `j` (expression in `t, x, xi, u`) |
//! | `descent` | `alpha`, `beta`, `cauchy_riemann`, `tau_init`, `tau_min`, `theta_tol`, `max_outer`, `max_halvings`, `density_rule` |
//! | `newton` | `tol`, `max_iter`, `max_halvings`, `min_damping` |
//! | `gradient_check` | `theta` (expression in `xi`), `epsilons` |
//! | `output` | `directory`, `vtk`, `csv` |
//!
//! The inner phase is the design `Ω`, i.e. the intervals between the 1st and
//! 2nd, 3rd and 4th, … interfaces.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::expr::{Expr, Var};
use crate::fem::NewtonOptions;
use crate::materials::{CurveParams, Material, ReluctivityLaw};
use crate::motion::{Identity, Motion, Polynomial1D};
use crate::optimizer::DescentConfig;
use crate::quadrature::TriangleRule;
use crate::shape::DensityRule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line: Some(line), message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    Identity,
    Polynomial,
}

impl MotionKind {
    pub fn build(&self, period: f64) -> Arc<dyn Motion<1>> {
        match self {
            MotionKind::Identity => Arc::new(Identity::<1>::new(period)),
            MotionKind::Polynomial => Arc::new(Polynomial1D::new(period)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MotionKind::Identity => "identity",
            MotionKind::Polynomial => "polynomial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    ThreePoint,
    Gauss(usize),
}

impl Quadrature {
    pub fn rule(&self) -> TriangleRule {
        match *self {
            Quadrature::ThreePoint => TriangleRule::three_point(),
            Quadrature::Gauss(n) => TriangleRule::collapsed_gauss(n),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Quadrature::ThreePoint => "three-point".into(),
            Quadrature::Gauss(n) => format!("gauss-{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub interfaces: Vec<f64>,
    pub motion: MotionKind,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheckConfig {
    /// Deformation `θ(ξ)`; its values at both ends of `D` are set to zero.
    pub theta: Expr,
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub vtk: bool,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub inner: Material,
    pub outer: Material,
    pub source: Expr,
    pub n_x: usize,
    pub n_t: usize,
    pub quadrature: Quadrature,
    pub objective: Expr,
    pub descent: DescentConfig,
    pub newton: NewtonOptions,
    pub gradient_check: GradientCheckConfig,
    pub output: OutputConfig,
}

/// Failure to obtain a configuration from a file.
#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Config(ConfigError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read configuration: {e}"),
            LoadError::Config(e) => write!(f, "invalid configuration: {e}"),
        }
    }
}

impl std::error::Error for LoadError {}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Sections {
    map: BTreeMap<String, BTreeMap<String, Entry>>,
}

const SECTIONS: [&str; 9] =
    ["problem", "materials", "source", "discretization", "objective", "descent", "newton", "gradient_check", "output"];

impl Sections {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(line, "section header must end with `]`");
                };
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return err(line, format!("unknown section `{name}`"));
                }
                if map.contains_key(name) {
                    return err(line, format!("section `{name}` appears twice"));
                }
                map.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, "expected `key = value`");
            };
            let Some(section) = &current else {
                return err(line, "entry before the first section header");
            };
            let key = key.trim();
            if key.is_empty() {
                return err(line, "empty key");
            }
            let entries = map.get_mut(section).expect("section registered");
            if entries.contains_key(key) {
                return err(line, format!("duplicate key `{key}`"));
            }
            entries.insert(key.to_string(), Entry { value: value.trim().to_string(), line, used: false });
        }
        Ok(Self { map })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let e = self.map.get_mut(section)?.get_mut(key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn require(&mut self, section: &str, key: &str) -> Result<(String, usize), ConfigError> {
        self.take(section, key).ok_or_else(|| ConfigError {
            line: None,
            message: format!("missing required key `{key}` in section [{section}]"),
        })
    }

    fn number(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => parse_number(&v, line),
        }
    }

    fn integer(&mut self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse().or_else(|_| err(line, format!("expected a non-negative integer, got `{v}`"))),
        }
    }

    fn boolean(&mut self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => err(line, format!("expected `true` or `false`, got `{v}`")),
            },
        }
    }

    fn unused(&self) -> Option<(usize, String, String)> {
        self.map
            .iter()
            .flat_map(|(s, entries)| entries.iter().map(move |(k, e)| (s, k, e)))
            .filter(|(_, _, e)| !e.used)
            .map(|(s, k, e)| (e.line, s.clone(), k.clone()))
            .min()
    }
}

fn parse_number(v: &str, line: usize) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("expected a number, got `{v}`")),
    }
}

fn parse_list(v: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_number(s.trim(), line)).collect()
}

fn parse_expr(v: &str, line: usize) -> Result<Expr, ConfigError> {
    Expr::parse(v).or_else(|e| err(line, format!("expression error at {e}")))
}

fn parse_law(v: &str, line: usize) -> Result<ReluctivityLaw, ConfigError> {
    let law = if v == "iron" {
        ReluctivityLaw::Curve(CurveParams::iron())
    } else if let Some(args) = v.strip_prefix("curve(").and_then(|r| r.strip_suffix(')')) {
        let p = parse_list(args, line)?;
        if p.len() != 4 {
            return err(line, "curve(...) takes four numbers: nu_a, c1, c2, c3");
        }
        ReluctivityLaw::Curve(CurveParams { nu_a: p[0], c1: p[1], c2: p[2], c3: p[3] })
    } else {
        ReluctivityLaw::Constant(parse_number(v, line)?)
    };
    law.validate().or_else(|e| err(line, e.to_string()))?;
    Ok(law)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
        Self::parse(&text).map_err(LoadError::Config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Sections::parse(text)?;

        if let Some((v, line)) = s.take("problem", "domain") {
            let d = parse_list(&v, line)?;
            if d != [0.0, 1.0] {
                return err(line, "only the domain `0, 1` is supported");
            }
        }
        let (v, line) = s.require("problem", "interfaces")?;
        let interfaces = parse_list(&v, line)?;
        if interfaces.is_empty() || interfaces.windows(2).any(|w| w[0] >= w[1]) {
            return err(line, "interfaces must be a non-empty increasing list");
        }
        if interfaces.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return err(line, "interfaces must lie strictly inside (0, 1)");
        }
        let motion = match s.take("problem", "motion") {
            None => MotionKind::Polynomial,
            Some((v, line)) => match v.as_str() {
                "identity" => MotionKind::Identity,
                "polynomial" => MotionKind::Polynomial,
                _ => return err(line, format!("unknown motion `{v}` (identity, polynomial)")),
            },
        };
        let period = s.number("problem", "period", 1.0)?;
        if !(period > 0.0) {
            return err(s.take("problem", "period").map_or(0, |e| e.1), "period must be positive");
        }

        let material = |s: &mut Sections, name: &str| -> Result<Material, ConfigError> {
            let (v, line) = s.require("materials", &format!("{name}.sigma"))?;
            let sigma = parse_number(&v, line)?;
            if sigma < 0.0 {
                return err(line, "conductivity must be non-negative");
            }
            let (v, line) = s.require("materials", &format!("{name}.nu"))?;
            Ok(Material { sigma, nu: parse_law(&v, line)? })
        };
        let inner = material(&mut s, "inner")?;
        let outer = material(&mut s, "outer")?;

        let (v, line) = s.require("source", "f")?;
        let source = parse_expr(&v, line)?;
        if source.uses(Var::U) {
            return err(line, "the source cannot depend on `u`");
        }

        let n_x = s.integer("discretization", "n_x", 40)?;
        let n_t = s.integer("discretization", "n_t", 40)?;
        if n_x < 4 || n_t < 2 {
            let line = s.take("discretization", "n_x").map_or(0, |e| e.1);
            return err(line, "need n_x >= 4 and n_t >= 2");
        }
        let quadrature = match s.take("discretization", "quadrature") {
            None => Quadrature::ThreePoint,
            Some((v, line)) => match v.as_str() {
                "three-point" => Quadrature::ThreePoint,
                g => match g.strip_prefix("gauss-").and_then(|n| n.parse::<usize>().ok()) {
                    Some(n) if (1..=10).contains(&n) => Quadrature::Gauss(n),
                    _ => return err(line, format!("unknown quadrature `{v}` (three-point, gauss-N)")),
                },
            },
        };

        let objective = match s.take("objective", "j") {
            None => Expr::parse("u").expect("literal"),
            Some((v, line)) => parse_expr(&v, line)?,
        };

        let d = DescentConfig::default();
        let mut descent = DescentConfig {
            alpha: s.number("descent", "alpha", d.alpha)?,
            beta: s.number("descent", "beta", d.beta)?,
            include_cauchy_riemann: s.boolean("descent", "cauchy_riemann", d.include_cauchy_riemann)?,
            tau_init: s.number("descent", "tau_init", d.tau_init)?,
            tau_min: s.number("descent", "tau_min", d.tau_min)?,
            theta_tol: s.number("descent", "theta_tol", d.theta_tol)?,
            max_outer: s.integer("descent", "max_outer", d.max_outer)?,
            max_halvings: s.integer("descent", "max_halvings", d.max_halvings)?,
            density_rule: d.density_rule,
        };
        if let Some((v, line)) = s.take("descent", "density_rule") {
            descent.density_rule =
                DensityRule::parse(&v).ok_or_else(|| ConfigError { line: Some(line), message: format!("unknown density rule `{v}`") })?;
        }
        if let Err(e) = descent.validate() {
            return Err(ConfigError { line: None, message: format!("[descent] {e}") });
        }

        let n = NewtonOptions::default();
        let newton = NewtonOptions {
            tol: s.number("newton", "tol", n.tol)?,
            max_iter: s.integer("newton", "max_iter", n.max_iter)?,
            max_halvings: s.integer("newton", "max_halvings", n.max_halvings)?,
            min_damping: s.number("newton", "min_damping", n.min_damping)?,
        };
        if !(newton.tol > 0.0) || newton.max_iter == 0 {
            return Err(ConfigError { line: None, message: "[newton] tol must be positive and max_iter at least 1".into() });
        }

        let theta = match s.take("gradient_check", "theta") {
            None => Expr::parse("sin(pi*xi)").expect("literal"),
            Some((v, line)) => {
                let e = parse_expr(&v, line)?;
                if e.uses(Var::U) || e.uses(Var::T) {
                    return err(line, "theta may only depend on `xi` (or `x`, read as `xi`)");
                }
                e
            }
        };
        let epsilons = match s.take("gradient_check", "epsilons") {
            None => vec![1e-2, 1e-3, 1e-4, 1e-5],
            Some((v, line)) => {
                let eps = parse_list(&v, line)?;
                if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
                    return err(line, "epsilons must be positive");
                }
                eps
            }
        };

        let output = OutputConfig {
            directory: PathBuf::from(s.take("output", "directory").map_or("out".to_string(), |e| e.0)),
            vtk: s.boolean("output", "vtk", false)?,
            csv: s.take("output", "csv").map_or("history.csv".to_string(), |e| e.0),
        };

        if let Some((line, section, key)) = s.unused() {
            return err(line, format!("unknown key `{key}` in section [{section}]"));
        }

        Ok(Self {
            problem: ProblemConfig { interfaces, motion, period },
            inner,
            outer,
            source,
            n_x,
            n_t,
            quadrature,
            objective,
            descent,
            newton,
            gradient_check: GradientCheckConfig { theta, epsilons },
            output,
        })
    }
}
