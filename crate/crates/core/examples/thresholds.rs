//! λ* and λ** from estimated constants, and from the closed forms directly.

use nehari::doublephase::{Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::nehari::{lambda_star, lambda_star_star, thresholds};
use nehari::orlicz::{estimate_constants, ExponentField, WeightField};

fn main() -> nehari::Result<()> {
    println!("λ**(μ0=1, q=2, p=3, D=c=1) = {}", lambda_star_star(1.0, 2.0, 2.0, 3.0, 1.0, 1.0));
    println!("λ*(μ0=1, q=2, p=3, D=c=c1=1) = {}", lambda_star(1.0, 2.0, 2.0, 3.0, 3.0, 1.0, 1.0, 1.0));

    let (chart, g) = build_torus(&[64], &MetricSpec::Identity)?;
    for mu in [1.0, 4.0] {
        let pb = ProblemInstance::new(
            g.clone(),
            ExponentField::constant(chart.clone(), 3.0, 2.0)?,
            WeightField::constant(chart.clone(), mu)?,
            1.0,
            Nonlinearity::power(4.0, ScalarField::constant(chart.clone(), 1.0))?,
        )?;
        let consts = estimate_constants(&pb.exps, &pb.weight, &pb.metric, 200, 42)?;
        let th = thresholds(&pb, &consts);
        println!(
            "μ ≡ {mu}: λ* = {:.6} (raw {:.6}, clamped {})  λ** = {:.6}  λ̄ = {:.6}",
            th.lambda_star, th.lambda_star_raw, th.lambda_star_clamped, th.lambda_star_star, th.lambda_bar
        );
    }
    Ok(())
}
