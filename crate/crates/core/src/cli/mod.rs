//! Command-line front end: `verify`, `solve`, `sweep` and `project`.
//!
//! Every artifact carries the resolved configuration and seed: JSON reports
//! embed them, CSV files get a `<name>.config.toml` sidecar, and `solve`
//! writes `resolved_config.toml` next to its reports.

pub mod config;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

pub use config::RunConfig;

use crate::doublephase::{energy_with, Kind};
use crate::error::{Error, Result};
use crate::manifold::io::{read_field, write_field};
use crate::manifold::ScalarField;
use crate::nehari::{project_with, NehariClass, Thresholds};
use crate::solver::{minimize_on_branch, two_solution_experiment, RunStatus, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "nehari", version, about = "Double-phase Nehari experiments on periodic grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default: `out` from the config, else `./out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Test hook, `KEY=VAL`; only `r_q` is recognized.
    #[arg(long = "fault-inject", global = true, value_name = "KEY=VAL")]
    pub fault_inject: Vec<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Randomized function-space and derivative property suite.
    Verify,
    /// Two-solution experiment at a single lambda.
    Solve,
    /// Branch energies over the lambda grid.
    Sweep,
    /// Nehari roots of the ray through a stored field.
    Project {
        /// Field file; overrides `[project] field`.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

/// How a command finished.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success,
    /// A check failed; exit code 1.
    Failed(String),
    /// Nothing wrong, but no verdict; exit code 2.
    Inconclusive(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Failed(_) => 1,
            Outcome::Inconclusive(_) => 2,
        }
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            match &outcome {
                Outcome::Success => {}
                Outcome::Failed(m) => eprintln!("FAIL: {m}"),
                Outcome::Inconclusive(m) => eprintln!("INCONCLUSIVE: {m}"),
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Usage("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from("out"));
    }
    let faults = parse_faults(&cli.fault_inject)?;
    let command = cli.command.clone();
    let go = move || match command {
        Command::Verify => cmd_verify(&cfg, faults),
        Command::Solve => cmd_solve(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Project { field } => {
            let field = field.or_else(|| cfg.project.field.clone());
            cmd_project(&cfg, field.as_deref())
        }
    };
    match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(format!("cannot build thread pool: {e}")))?
            .install(go),
        None => go(),
    }
}

fn parse_faults(items: &[String]) -> Result<verify::Faults> {
    let mut f = verify::Faults::default();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--fault-inject expects KEY=VAL, got {item:?}")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| Error::Usage(format!("--fault-inject {k}: {v:?} is not a number")))?;
        match k {
            "r_q" => f.r_q = Some(value),
            _ => return Err(Error::Usage(format!("unknown fault-injection key {k:?}"))),
        }
    }
    Ok(f)
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}

/// CSV plus its `<stem>.config.toml` sidecar.
fn write_csv(dir: &Path, stem: &str, csv: &str, cfg: &RunConfig, notes: &[String]) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    write_text(&path, csv)?;
    write_text(&dir.join(format!("{stem}.config.toml")), &echo(cfg, notes))?;
    Ok(path)
}

/// Replayable config text with resolved values as leading comments.
fn echo(cfg: &RunConfig, notes: &[String]) -> String {
    let mut s = String::new();
    for n in notes {
        s.push_str(&format!("# {n}\n"));
    }
    s.push_str(&cfg.to_toml());
    s
}

fn threshold_notes(th: &Thresholds) -> Vec<String> {
    vec![
        format!("lambda_star = {:e} (raw {:e}, clamped {})", th.lambda_star, th.lambda_star_raw, th.lambda_star_clamped),
        format!("lambda_star_star = {:e}", th.lambda_star_star),
        format!(
            "constants ({}): c = {:e}, D = {:e}, c1 = {:e}",
            th.constants.provenance, th.constants.c_poincare, th.constants.d_embed, th.constants.c1_embed
        ),
    ]
}

fn needs_thresholds(cfg: &RunConfig) -> bool {
    cfg.instance.lambda.is_some_and(|l| l.is_relative())
        || cfg
            .lambda_grid
            .as_ref()
            .is_some_and(|g| g.lo.is_relative() || g.hi.is_relative())
}

pub fn cmd_verify(cfg: &RunConfig, faults: verify::Faults) -> Result<Outcome> {
    if cfg.verify.trials == 0 {
        return Err(Error::Usage("verify.trials must be >= 1".into()));
    }
    let ing = cfg.ingredients()?;
    let consts = cfg.constants(&ing)?;
    let th = ing.thresholds(&consts)?;
    let lambda = match cfg.instance.lambda {
        Some(l) => l.resolve(Some(&th))?,
        None => 1.0,
    };
    let pb = ing.instance(lambda)?;
    let rows = verify::run_suite(&ing, &pb, &consts, &cfg.verify, cfg.seed, faults)?;
    let dir = out_dir(cfg)?;
    let mut notes = threshold_notes(&th);
    notes.push(format!("lambda = {lambda:e}"));
    if let Some(r) = faults.r_q {
        notes.push(format!("fault injection: r_q = {r}"));
    }
    let path = write_csv(&dir, "verify", &verify::to_csv(&rows, cfg.seed), cfg, &notes)?;
    let failures: Vec<&verify::Row> = rows.iter().filter(|r| !r.pass).collect();
    println!("verify: {} rows, {} failures -> {}", rows.len(), failures.len(), path.display());
    for w in &pb.warnings {
        println!("warning: {w}");
    }
    match failures.first() {
        None => Ok(Outcome::Success),
        Some(r) => {
            let line = rows.iter().position(|x| std::ptr::eq(x, *r)).unwrap() + 2;
            Ok(Outcome::Failed(format!(
                "{} failing rows; first at {}:{line}: {} trial {} lhs = {:e} rhs = {:e}",
                failures.len(),
                path.display(),
                r.property,
                r.trial,
                r.lhs,
                r.rhs
            )))
        }
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg
        .instance
        .lambda
        .ok_or_else(|| Error::Usage("solve needs instance.lambda".into()))?;
    cfg.solver.validate()?;
    let ing = cfg.ingredients()?;
    let consts = cfg.constants(&ing)?;
    let th = ing.thresholds(&consts)?;
    let lambda = spec.resolve(Some(&th))?;
    let pb = ing.instance(lambda)?;
    let ex = two_solution_experiment(&pb, &SolverConfig { seed: cfg.seed, ..cfg.solver.clone() }, Some(&th))?;

    let dir = out_dir(cfg)?;
    let mut notes = threshold_notes(&th);
    notes.push(format!("lambda = {lambda:e}"));
    write_text(&dir.join("resolved_config.toml"), &echo(cfg, &notes))?;
    let config_json = serde_json::to_value(cfg)?;
    for (name, report, cert, runs) in [
        ("plus", &ex.report_plus, &ex.certificate_plus, &ex.runs_plus),
        ("minus", &ex.report_minus, &ex.certificate_minus, &ex.runs_minus),
    ] {
        let field_file = match report {
            Some(r) => {
                let p = dir.join(format!("u_{name}.field"));
                write_field(&p, &r.u)?;
                Some(p.file_name().unwrap().to_string_lossy().into_owned())
            }
            None => None,
        };
        let doc = json!({
            "seed": cfg.seed,
            "config": config_json,
            "branch": name,
            "lambda": lambda,
            "thresholds": th,
            "status": ex.status(),
            "distinct": ex.distinct,
            "separation": ex.separation,
            "report": report,
            "certificate": cert,
            "runs": runs,
            "field_file": field_file,
            "warnings": ex.warnings,
        });
        write_json(&dir.join(format!("report_{name}.json")), &doc)?;
    }
    for (name, r) in [("u+", &ex.report_plus), ("u-", &ex.report_minus)] {
        match r {
            Some(r) => println!(
                "{name}: J = {:.9e}  residual = {:.3e}  min_u = {:.3e}  status = {:?}  iterations = {}",
                r.j_value, r.residual_norm, r.min_u, r.status, r.iterations
            ),
            None => println!("{name}: branch empty"),
        }
    }
    println!("lambda = {lambda:e}, distinct = {}, status = {}", ex.distinct, ex.status());
    for w in &ex.warnings {
        println!("warning: {w}");
    }
    Ok(match ex.status() {
        "pass" => Outcome::Success,
        "inconclusive" => Outcome::Inconclusive(ex.warnings.join("; ")),
        _ => Outcome::Failed("solutions converged but sign, distinctness or non-negativity checks failed".into()),
    })
}

/// One sweep row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub theta_plus_estimate: f64,
    pub theta_minus_estimate: f64,
    pub n_plus_found: usize,
    pub n_minus_found: usize,
    pub lambda_star: f64,
    pub lambda_star_star: f64,
}

pub const SWEEP_HEADER: &str =
    "lambda,theta_plus_estimate,theta_minus_estimate,n_plus_found,n_minus_found,lambda_star,lambda_star_star";

pub fn sweep_rows(cfg: &RunConfig) -> Result<(Vec<SweepRow>, Thresholds)> {
    let grid = cfg
        .lambda_grid
        .as_ref()
        .ok_or_else(|| Error::Usage("sweep needs a [lambda_grid] section".into()))?;
    cfg.solver.validate()?;
    let ing = cfg.ingredients()?;
    let consts = cfg.constants(&ing)?;
    let th = ing.thresholds(&consts)?;
    let mut rows = Vec::new();
    for lambda in grid.values(Some(&th))? {
        let pb = ing.instance(lambda)?;
        let branch = |target| -> Result<(f64, usize)> {
            let c = SolverConfig {
                target,
                seed: cfg.seed,
                ..cfg.solver.clone()
            };
            match minimize_on_branch(&pb, &c) {
                Ok(b) => Ok((
                    b.best.theta_estimate,
                    b.runs.iter().filter(|r| r.status == Some(RunStatus::Converged)).count(),
                )),
                Err(Error::BranchEmpty(_)) => Ok((f64::NAN, 0)),
                Err(e) => Err(e),
            }
        };
        let (tp, np) = branch(NehariClass::Plus)?;
        let (tm, nm) = branch(NehariClass::Minus)?;
        rows.push(SweepRow {
            lambda,
            theta_plus_estimate: tp,
            theta_minus_estimate: tm,
            n_plus_found: np,
            n_minus_found: nm,
            lambda_star: th.lambda_star,
            lambda_star_star: th.lambda_star_star,
        });
    }
    Ok((rows, th))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{:e},{:e},{:e},{},{},{:e},{:e}\n",
            r.lambda,
            r.theta_plus_estimate,
            r.theta_minus_estimate,
            r.n_plus_found,
            r.n_minus_found,
            r.lambda_star,
            r.lambda_star_star
        ));
    }
    s
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let (rows, th) = sweep_rows(cfg)?;
    let dir = out_dir(cfg)?;
    let path = write_csv(&dir, "sweep", &sweep_csv(&rows), cfg, &threshold_notes(&th))?;
    println!("sweep: {} rows -> {}", rows.len(), path.display());
    for r in &rows {
        println!(
            "  lambda = {:.6e}  theta+ = {:.6e} ({})  theta- = {:.6e} ({})",
            r.lambda, r.theta_plus_estimate, r.n_plus_found, r.theta_minus_estimate, r.n_minus_found
        );
    }
    Ok(Outcome::Success)
}

pub fn cmd_project(cfg: &RunConfig, field: Option<&Path>) -> Result<Outcome> {
    let field = field.ok_or_else(|| Error::Usage("project needs --field PATH or [project] field".into()))?;
    let spec = cfg
        .instance
        .lambda
        .ok_or_else(|| Error::Usage("project needs instance.lambda".into()))?;
    let ing = cfg.ingredients()?;
    let th = if needs_thresholds(cfg) {
        Some(ing.thresholds(&cfg.constants(&ing)?)?)
    } else {
        None
    };
    let lambda = spec.resolve(th.as_ref())?;
    let pb = ing.instance(lambda)?;
    let raw = read_field(field)?;
    if raw.chart().sizes() != pb.chart().sizes() {
        return Err(Error::ShapeMismatch(format!(
            "{} has sizes {:?}, instance has {:?}",
            field.display(),
            raw.chart().sizes(),
            pb.chart().sizes()
        )));
    }
    let u = ScalarField::new(pb.chart().clone(), raw.into_values())?;
    let kind = if cfg.project.truncate { Kind::Truncated } else { Kind::Full };
    let roots = project_with(&pb, &u, kind)?;
    let dir = out_dir(cfg)?;
    let mut entries = Vec::new();
    for (k, r) in roots.iter().enumerate() {
        let v = u.scaled(r.t);
        let name = format!("projected_{k}.field");
        write_field(&dir.join(&name), &v)?;
        let e = energy_with(&pb, &v, kind)?;
        println!("root {k}: t = {:.12e}  class = {}  J = {:.9e}", r.t, r.class, e.total);
        entries.push(json!({
            "t": r.t,
            "class": r.class,
            "phi": r.phi,
            "curvature": r.curvature,
            "scale": r.scale,
            "J_value": e.total,
            "field_file": name,
        }));
    }
    let doc = json!({
        "seed": cfg.seed,
        "config": serde_json::to_value(cfg)?,
        "lambda": lambda,
        "field": field.display().to_string(),
        "truncate": cfg.project.truncate,
        "roots": entries,
    });
    write_json(&dir.join("projection.json"), &doc)?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests;
