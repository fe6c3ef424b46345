//! Fibering map of a constant field and its projections onto the Nehari set.

use nehari::doublephase::{Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::nehari::{classify, fibering, project};
use nehari::orlicz::{ExponentField, WeightField};

fn main() -> nehari::Result<()> {
    let (chart, g) = build_torus(&[64], &MetricSpec::Identity)?;
    let pb = ProblemInstance::new(
        g,
        ExponentField::constant(chart.clone(), 3.0, 2.0)?,
        WeightField::constant(chart.clone(), 1.0)?,
        0.2,
        Nonlinearity::power(4.0, ScalarField::constant(chart.clone(), 1.0))?,
    )?;
    // J(t) = -λt²/2 + t³/3 - t⁴/4 for u ≡ 1, so roots solve t² - t + λ = 0.
    let u = ScalarField::constant(chart, 1.0);

    let grid: Vec<f64> = (1..=12).map(|k| 0.1 * k as f64).collect();
    let f = fibering(&pb, &u, &grid)?;
    for ((t, p), d) in f.t_values.iter().zip(&f.phi).zip(&f.phi_prime) {
        println!("t = {t:.2}  φ = {p:+.6e}  φ' = {d:+.6e}");
    }
    for r in project(&pb, &u)? {
        let back = classify(&pb, &u.scaled(r.t))?;
        println!("root t = {:.12}  class = {}  J = {:.6e}  reclassified = {back}", r.t, r.class, r.phi);
    }
    println!("closed form: {:.12}, {:.12}", (1.0 - 0.2f64.mul_add(-4.0, 1.0).sqrt()) / 2.0, (1.0 + 0.2f64.mul_add(-4.0, 1.0).sqrt()) / 2.0);
    Ok(())
}
