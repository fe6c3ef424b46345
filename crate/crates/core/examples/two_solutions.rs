//! Two-solution experiment at λ**/8 with a nonnegativity certificate for each branch.

use nehari::doublephase::{Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::nehari::thresholds;
use nehari::orlicz::{estimate_constants, ExponentField, WeightField};
use nehari::solver::{two_solution_experiment, SolverConfig};

fn main() -> nehari::Result<()> {
    let (chart, g) = build_torus(&[64], &MetricSpec::Identity)?;
    let pb = ProblemInstance::new(
        g,
        ExponentField::constant(chart.clone(), 3.0, 2.0)?,
        WeightField::constant(chart.clone(), 1.0)?,
        1.0,
        Nonlinearity::power(4.0, ScalarField::constant(chart, 1.0))?,
    )?;
    let th = thresholds(&pb, &estimate_constants(&pb.exps, &pb.weight, &pb.metric, 200, 42)?);
    let pb = pb.with_lambda(th.lambda_star_star / 8.0)?;

    let exp = two_solution_experiment(&pb, &SolverConfig::default(), Some(&th))?;
    for (name, r, c) in [
        ("u+", &exp.report_plus, &exp.certificate_plus),
        ("u-", &exp.report_minus, &exp.certificate_minus),
    ] {
        if let (Some(r), Some(c)) = (r, c) {
            println!("{name}: J = {:+.9e}  residual = {:.2e}  min u = {:.4e}  certificate = {}", r.j_value, r.residual_norm, c.min_u, c.pass);
        }
    }
    println!("λ = {:.6}  separation = {:.4e}  status = {}", pb.lambda, exp.separation, exp.status());
    for w in &exp.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
