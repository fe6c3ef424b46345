//! Hölder, modular/norm and embedding checks on random band-limited fields.

use nehari::manifold::{build_torus, MetricSpec};
use nehari::orlicz::{
    estimate_constants, holder_check, modular_norm_relations, said_check, ExponentField, WeightField,
};
use nehari::rng::{substream, Stream};
use nehari::spectral::Spectral;

fn main() -> nehari::Result<()> {
    let (chart, g) = build_torus(&[64], &MetricSpec::Identity)?;
    let exps = ExponentField::constant(chart.clone(), 3.0, 1.7)?;
    let weight = WeightField::constant(chart.clone(), 1.0)?;
    let consts = estimate_constants(&exps, &weight, &g, 200, 7)?;
    let spectral = Spectral::identity(chart);
    let band = spectral.quarter_band();

    let (mut holder_fail, mut clause_fail, mut said_fail) = (0, 0, 0);
    for k in 0..200 {
        let mut rng = substream(7, Stream::Property, k);
        let u = spectral.band_limited(&mut rng, &band, None);
        let v = spectral.band_limited(&mut rng, &band, None);
        holder_fail += usize::from(!holder_check(&u, &v, &exps.q, &g)?.pass);
        clause_fail += modular_norm_relations(&u, &exps.p, &g)?.failures().count();
        said_fail += usize::from(!said_check(&u, &exps, &g, &consts, 1.01)?.pass);
    }
    println!("200 trials: Hölder {holder_fail}, modular/norm {clause_fail}, embedding {said_fail} failures");
    Ok(())
}
