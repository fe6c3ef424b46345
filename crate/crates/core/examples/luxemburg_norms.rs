//! Variable-exponent modulars and Luxemburg norms of a single field.

use std::f64::consts::PI;

use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::orlicz::{luxemburg_norm, modular, sobolev_norm, weighted_norm, WeightField};

fn main() -> nehari::Result<()> {
    let (chart, g) = build_torus(&[128], &MetricSpec::Identity)?;
    let e = ScalarField::from_fn(chart.clone(), |x| 2.0 + 0.5 * (2.0 * PI * x[0]).cos());
    let mu = WeightField::new(ScalarField::from_fn(chart.clone(), |x| 1.0 + (2.0 * PI * x[0]).sin().powi(2)))?;
    let u = ScalarField::from_fn(chart, |x| 1.5 + (4.0 * PI * x[0]).sin());

    let n = luxemburg_norm(&u, &e, &g)?;
    println!("ρ(u) = {:.8}  ‖u‖ = {n:.8}", modular(&u, &e, &g)?);
    println!("ρ(u/‖u‖) = {:.15}", modular(&u.scaled(1.0 / n), &e, &g)?);
    for s in [0.1, 10.0] {
        println!("‖{s}u‖ / ‖u‖ = {:.12}", luxemburg_norm(&u.scaled(s), &e, &g)? / n);
    }
    println!("weighted ‖u‖_μ = {:.8}", weighted_norm(&u, &e, &mu, &g)?);
    println!("‖u‖_1,e = {:.8}", sobolev_norm(&u, &e, &g)?);
    Ok(())
}
