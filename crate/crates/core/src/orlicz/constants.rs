//! Seeded lower estimates of the Poincaré and embedding constants.
//!
//! The true constants are suprema over infinite-dimensional spaces; here they
//! are maxima over random band-limited fields (modes up to a quarter of the
//! grid per axis) plus a short power iteration with the inverse discrete
//! Laplacian. Every candidate only ever raises an estimate, so enlarging the
//! trial set never lowers it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{luxemburg_raw, weighted_node_weights, ExponentField, WeightField};
use crate::error::{Error, Result};
use crate::manifold::{check_same_chart, gradient, grad_norm_g, MetricField, ScalarField};
use crate::rng::{substream, Stream};
use crate::spectral::Spectral;
use crate::sum::pairwise_sum_by;

pub const MIN_TRIALS: usize = 100;
const POWER_ITERATIONS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsEstimate {
    /// `max ‖u‖_q / ‖∇u‖_q` over zero-mean samples.
    pub c_poincare: f64,
    /// `max ‖u‖_p / ‖u‖_{1,q}`.
    pub d_embed: f64,
    /// `max ‖u‖_{q,μ} / ‖u‖_{1,q}`.
    pub c1_embed: f64,
    /// `1 + 1/q- + 1/q+`.
    pub r_q: f64,
    /// `1 + 1/q- - 1/q+`.
    pub r_q_tight: f64,
    pub trials: usize,
    pub seed: u64,
    pub band: Vec<usize>,
    /// Either "sampled lower estimate" or "fixed".
    pub provenance: String,
}

impl ConstantsEstimate {
    /// Constants supplied by hand rather than sampled.
    pub fn fixed(c_poincare: f64, d_embed: f64, c1_embed: f64, q_minus: f64, q_plus: f64) -> Self {
        ConstantsEstimate {
            c_poincare,
            d_embed,
            c1_embed,
            r_q: 1.0 + 1.0 / q_minus + 1.0 / q_plus,
            r_q_tight: 1.0 + 1.0 / q_minus - 1.0 / q_plus,
            trials: 0,
            seed: 0,
            band: Vec::new(),
            provenance: "fixed".into(),
        }
    }
}

/// Ratios realized by one trial field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRatios {
    /// `‖u‖_q / ‖∇u‖_q` (meaningful for zero-mean `u`).
    pub poincare: f64,
    pub d_embed: f64,
    pub c1_embed: f64,
}

/// Ratios of one field; zero denominators give `0`.
pub fn trial_ratios(u: &ScalarField, exps: &ExponentField, w: &WeightField, g: &MetricField) -> Result<TrialRatios> {
    check_same_chart(u.chart(), g.chart())?;
    let weights = g.node_weights();
    let mu_weights = weighted_node_weights(w, g);
    let grad = grad_norm_g(&gradient(u), g)?;
    let q = exps.q.values();
    let nq = luxemburg_raw(u.values(), q, weights);
    let ngrad = luxemburg_raw(grad.values(), q, weights);
    let np = luxemburg_raw(u.values(), exps.p.values(), weights);
    let nmu = luxemburg_raw(u.values(), q, &mu_weights);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(TrialRatios {
        poincare: ratio(nq, ngrad),
        d_embed: ratio(np, nq + ngrad),
        c1_embed: ratio(nmu, nq + ngrad),
    })
}

fn remove_weighted_mean(vals: &mut [f64], weights: &[f64]) {
    let vol = pairwise_sum_by(weights.len(), |i| weights[i]);
    let mean = pairwise_sum_by(vals.len(), |i| vals[i] * weights[i]) / vol;
    for v in vals.iter_mut() {
        *v -= mean;
    }
}

fn normalized(mut vals: Vec<f64>) -> Vec<f64> {
    let max = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max > 0.0 {
        for v in vals.iter_mut() {
            *v /= max;
        }
    }
    vals
}

/// Samples `trials` random fields (plus refinements) and returns the largest
/// ratio seen for each constant.
pub fn estimate_constants(
    exps: &ExponentField,
    w: &WeightField,
    g: &MetricField,
    trials: usize,
    seed: u64,
) -> Result<ConstantsEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::Usage(format!("constant estimation needs at least {MIN_TRIALS} trials, got {trials}")));
    }
    check_same_chart(exps.p.chart(), g.chart())?;
    let chart = g.chart().clone();
    let spectral = Spectral::new(chart.clone(), g.mean_inverse_diagonal());
    let band = spectral.quarter_band();
    let weights = g.node_weights();

    let draw = |k: usize| -> (ScalarField, ScalarField) {
        let mut rng = substream(seed, Stream::Constants, k as u64);
        let mut z = spectral.band_limited(&mut rng, &band, None).into_values();
        remove_weighted_mean(&mut z, weights);
        let mean = rng.random_range(-2.0..2.0);
        let m = spectral.band_limited(&mut rng, &band, Some(mean));
        (ScalarField::new(chart.clone(), z).expect("finite"), m)
    };

    let samples: Vec<Result<(TrialRatios, TrialRatios)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let (z, m) = draw(k);
            Ok((trial_ratios(&z, exps, w, g)?, trial_ratios(&m, exps, w, g)?))
        })
        .collect();

    let mut c = 0.0_f64;
    let mut d = 0.0_f64;
    let mut c1 = 0.0_f64;
    for s in samples {
        let (z, m) = s?;
        c = c.max(z.poincare);
        d = d.max(m.d_embed);
        c1 = c1.max(m.c1_embed);
    }

    // Constants realize the embedding ratios on unit volume.
    let one = trial_ratios(&ScalarField::constant(chart.clone(), 1.0), exps, w, g)?;
    d = d.max(one.d_embed);
    c1 = c1.max(one.c1_embed);

    // Power iteration toward the lowest nonzero mode and the constant mode.
    let (z0, m0) = draw(0);
    let mut z = z0.into_values();
    let mut m = m0.into_values();
    for _ in 0..POWER_ITERATIONS {
        z = normalized(spectral.band_inverse(&z, &band, 0.0, true));
        remove_weighted_mean(&mut z, weights);
        m = normalized(spectral.band_inverse(&m, &band, 1.0, false));
        let zr = trial_ratios(&ScalarField::new(chart.clone(), z.clone())?, exps, w, g)?;
        let mr = trial_ratios(&ScalarField::new(chart.clone(), m.clone())?, exps, w, g)?;
        c = c.max(zr.poincare);
        d = d.max(mr.d_embed);
        c1 = c1.max(mr.c1_embed);
    }

    Ok(ConstantsEstimate {
        c_poincare: c,
        d_embed: d,
        c1_embed: c1,
        r_q: 1.0 + 1.0 / exps.q_minus + 1.0 / exps.q_plus,
        r_q_tight: 1.0 + 1.0 / exps.q_minus - 1.0 / exps.q_plus,
        trials,
        seed,
        band,
        provenance: "sampled lower estimate".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_torus, MetricSpec};
    use std::f64::consts::PI;

    fn setup(n: usize) -> (ExponentField, WeightField, MetricField) {
        let (chart, g) = build_torus(&[n], &MetricSpec::Identity).unwrap();
        (
            ExponentField::constant(chart.clone(), 3.0, 2.0).unwrap(),
            WeightField::constant(chart, 1.0).unwrap(),
            g,
        )
    }

    #[test]
    fn single_sine_mode_gives_discrete_poincare_ratio() {
        let n = 64;
        let (exps, w, g) = setup(n);
        let h = 1.0 / n as f64;
        let u = ScalarField::from_fn(g.chart().clone(), |x| (2.0 * PI * x[0]).sin());
        let r = trial_ratios(&u, &exps, &w, &g).unwrap();
        let exact = h / (2.0 * PI * h).sin();
        assert!((r.poincare - exact).abs() < 1e-13);
        assert!((r.poincare - 1.0 / (2.0 * PI)).abs() < 1e-3);
    }

    #[test]
    fn poincare_estimate_reaches_first_mode() {
        let (exps, w, g) = setup(64);
        let est = estimate_constants(&exps, &w, &g, 100, 42).unwrap();
        assert!(est.c_poincare >= 1.0 / (2.0 * PI) - 1e-3);
        assert!(est.d_embed >= 1.0 && est.c1_embed >= 1.0);
        assert!((est.r_q - 2.0).abs() < 1e-15);
    }

    #[test]
    fn more_trials_never_lower_estimates() {
        let (exps, w, g) = setup(32);
        let a = estimate_constants(&exps, &w, &g, 100, 5).unwrap();
        let b = estimate_constants(&exps, &w, &g, 200, 5).unwrap();
        assert!(b.c_poincare >= a.c_poincare);
        assert!(b.d_embed >= a.d_embed);
        assert!(b.c1_embed >= a.c1_embed);
    }

    #[test]
    fn too_few_trials_is_usage_error() {
        let (exps, w, g) = setup(16);
        assert!(matches!(estimate_constants(&exps, &w, &g, 99, 1), Err(Error::Usage(_))));
    }
}
