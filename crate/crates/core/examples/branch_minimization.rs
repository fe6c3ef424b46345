//! Multistart minimization of the energy on each Nehari branch.

use nehari::doublephase::{Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::nehari::NehariClass;
use nehari::orlicz::{ExponentField, WeightField};
use nehari::solver::{minimize_on_branch, SolverConfig};

fn main() -> nehari::Result<()> {
    let (chart, g) = build_torus(&[64], &MetricSpec::Identity)?;
    let pb = ProblemInstance::new(
        g,
        ExponentField::constant(chart.clone(), 3.0, 2.0)?,
        WeightField::constant(chart.clone(), 1.0)?,
        0.08,
        Nonlinearity::power(4.0, ScalarField::constant(chart, 1.0))?,
    )?;
    for target in [NehariClass::Plus, NehariClass::Minus] {
        let cfg = SolverConfig { target, ..SolverConfig::default() };
        let res = minimize_on_branch(&pb, &cfg)?;
        println!("{target}: converged = {}  θ ≈ {:.9e}", res.converged, res.best.theta_estimate);
        for run in &res.runs {
            println!(
                "  start {}: {:?}  J = {:+.9e}  residual = {:.2e}  iterations = {}",
                run.start_index, run.status, run.j_value, run.residual_norm, run.iterations
            );
        }
        let u = &res.best.u;
        println!("  best: min u = {:.6}  max u = {:.6}", u.min(), u.max());
    }
    Ok(())
}
