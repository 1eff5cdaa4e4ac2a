//! Parses a run configuration and drives the same commands as the binary.
use stshapeopt::app::{cmd_check_gradient, cmd_solve, Overrides, Setup};
use stshapeopt::config::RunConfig;

const CONFIG: &str = "
[problem]
interfaces = 0.4, 0.6
motion = polynomial

[materials]
inner.sigma = 10
inner.nu = 1
outer.sigma = 0
outer.nu = 10

[source]
f = (xi - 0.4) * (xi - 0.6) * sqrt(x) * (1 + t - x)

[discretization]
n_x = 40
n_t = 40

[gradient_check]
theta = sin(pi * xi)
epsilons = 1e-3, 1e-4, 1e-5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::parse(CONFIG)?;
    println!("source: f = {}", config.source);
    let out = std::env::temp_dir().join("stshapeopt_examples").join("run_config");
    let setup = Setup::new(config, &Overrides { out: Some(out.clone()), vtk: false })?;
    let mut stdout = std::io::stdout();
    cmd_solve(&setup, &mut stdout)?;
    let passed = cmd_check_gradient(&setup, &mut stdout)?;
    println!("gradient check {}; outputs in {}", if passed { "passed" } else { "failed" }, out.display());

    let bad = CONFIG.replace("n_x = 40", "n_x = forty");
    println!("malformed input: {}", RunConfig::parse(&bad).unwrap_err());
    Ok(())
}
