//! Branch energies over a log-spaced λ grid, read from a TOML config.

use nehari::cli::config::RunConfig;
use nehari::cli::{sweep_csv, sweep_rows};

const CONFIG: &str = r#"
seed = 42

[instance]
sizes = [64]
metric = "identity"
p = 3.0
q = 2.0
beta = 4.0

[lambda_grid]
lo = { relative = 0.125 }
hi = { relative = 1.0 }
points = 4

[solver]
multistart = 4
"#;

fn main() -> nehari::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG, std::path::Path::new("inline.toml"))?;
    let (rows, th) = sweep_rows(&cfg)?;
    println!("λ** = {:.6}", th.lambda_star_star);
    print!("{}", sweep_csv(&rows));
    Ok(())
}
