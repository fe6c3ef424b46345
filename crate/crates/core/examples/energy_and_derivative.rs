//! Energy breakdown, Gateaux derivative against a central difference, and
//! the Nehari functional.

use std::f64::consts::PI;

use nehari::doublephase::{energy, gateaux, Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::nehari::psi;
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
    let u = ScalarField::from_fn(chart.clone(), |x| 0.3 + 0.2 * (2.0 * PI * x[0]).cos());
    let phi = ScalarField::from_fn(chart, |x| (2.0 * PI * x[0]).cos() + 0.5 * (6.0 * PI * x[0]).sin());

    let e = energy(&pb, &u)?;
    println!("{}", serde_json::to_string_pretty(&e).expect("serializable"));

    let h = 1e-5;
    let fd = (energy(&pb, &u.axpby(1.0, &phi, h))?.total - energy(&pb, &u.axpby(1.0, &phi, -h))?.total) / (2.0 * h);
    let d = gateaux(&pb, &u, &phi)?;
    println!("<J'(u),φ> = {d:.12e}  central difference = {fd:.12e}");
    println!("ψ(u) = {:.12e}  <J'(u),u> = {:.12e}", psi(&pb, &u)?, gateaux(&pb, &u, &u)?);
    Ok(())
}
