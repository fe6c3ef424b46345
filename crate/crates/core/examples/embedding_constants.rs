//! Monte-Carlo estimates of the Poincaré and embedding constants.

use nehari::manifold::{build_torus, MetricSpec};
use nehari::orlicz::{estimate_constants, ExponentField, WeightField};

fn main() -> nehari::Result<()> {
    for n in [32, 64, 128] {
        let (chart, g) = build_torus(&[n], &MetricSpec::Identity)?;
        let exps = ExponentField::constant(chart.clone(), 3.0, 2.0)?;
        let weight = WeightField::constant(chart, 1.0)?;
        let c = estimate_constants(&exps, &weight, &g, 200, 42)?;
        println!(
            "n = {n:4}  c = {:.6}  D = {:.6}  c1 = {:.6}  r_q = {:.6}",
            c.c_poincare, c.d_embed, c.c1_embed, c.r_q
        );
    }
    Ok(())
}
