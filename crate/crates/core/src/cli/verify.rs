//! Randomized property suite behind `verify`.

use rand::Rng;
use rayon::prelude::*;

use super::config::{Ingredients, VerifySpec};
use crate::doublephase::{energy, gateaux, ProblemInstance};
use crate::error::Result;
use crate::manifold::{gradient, grad_norm_g, log_holder_check, ScalarField};
use crate::nehari::psi;
use crate::orlicz::{
    holder_check_with, luxemburg_norm, modular_norm_relations, said_check, weighted_modular_norm_relations,
    ClauseCheck, ConstantsEstimate,
};
use crate::rng::{substream, Stream};
use crate::spectral::Spectral;

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub property: String,
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl Row {
    fn from_clause(c: &ClauseCheck, property: String, trial: usize) -> Self {
        Row {
            property,
            trial,
            lhs: c.lhs,
            rhs: c.rhs,
            margin: c.margin,
            pass: c.pass,
        }
    }
}

pub const CSV_HEADER: &str = "property,seed,lhs,rhs,margin,pass";

pub fn to_csv(rows: &[Row], seed: u64) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{seed},{:e},{:e},{:e},{}\n", r.property, r.lhs, r.rhs, r.margin, r.pass));
    }
    out
}

/// Overrides injected by `--fault-inject`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Faults {
    pub r_q: Option<f64>,
}

/// Runs every property on `spec.trials` seeded fields.
pub fn run_suite(
    ing: &Ingredients,
    pb: &ProblemInstance,
    consts: &ConstantsEstimate,
    spec: &VerifySpec,
    seed: u64,
    faults: Faults,
) -> Result<Vec<Row>> {
    let g = &ing.metric;
    let chart = g.chart().clone();
    let spectral = Spectral::new(chart.clone(), g.mean_inverse_diagonal());
    let band = spectral.quarter_band();
    let exps = &ing.exps;
    let mut rows = Vec::new();

    for (name, field) in [("p", &exps.p), ("q", &exps.q)] {
        let r = log_holder_check(field, spec.log_holder_bound);
        rows.push(Row {
            property: format!("log-holder:{name}"),
            trial: 0,
            lhs: r.constant,
            rhs: spec.log_holder_bound,
            margin: spec.log_holder_bound - r.constant,
            pass: r.pass,
        });
    }

    let per_trial: Vec<Result<Vec<Row>>> = (0..spec.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, Stream::Property, k as u64);
            let mean: f64 = rng.random_range(-1.0..1.0);
            let amp: f64 = rng.random_range(-3.0f64..3.0).exp();
            let mut draw = |mean: Option<f64>| spectral.band_limited(&mut rng, &band, mean);
            let mut rows = Vec::new();
            let u = draw(Some(mean)).scaled(amp);

            let v = if k % 2 == 0 {
                // Equality case of Young's inequality: v = |u|^{q-1}.
                let q = exps.q.values();
                ScalarField::new(
                    chart.clone(),
                    u.values().iter().zip(q).map(|(x, e)| x.abs().powf(e - 1.0)).collect(),
                )?
            } else {
                draw(Some(0.3)).scaled(amp.recip())
            };
            let r_q = faults.r_q.unwrap_or(consts.r_q);
            let h = holder_check_with(&u, &v, &exps.q, g, r_q)?;
            rows.push(Row {
                property: "holder".into(),
                trial: k,
                lhs: h.lhs,
                rhs: h.rhs,
                margin: h.rhs - h.lhs,
                pass: h.pass,
            });

            for (label, e) in [("p", &exps.p), ("q", &exps.q)] {
                let rel = modular_norm_relations(&u, e, g)?;
                for c in &rel.clauses {
                    rows.push(Row::from_clause(c, format!("{}[{label}]", c.name), k));
                }
            }
            let rel = weighted_modular_norm_relations(&u, &exps.q, &ing.weight, g)?;
            for c in &rel.clauses {
                rows.push(Row::from_clause(c, format!("{}[q]", c.name), k));
            }

            // Zero-mean field with ‖∇u‖_q spread over [1, 10].
            let z = draw(None);
            let gn = grad_norm_g(&gradient(&z), g)?;
            let target = 1.0 + 9.0 * (k as f64 + 0.5) / spec.trials as f64;
            let z = z.scaled(target / luxemburg_norm(&gn, &exps.q, g)?);
            let c = said_check(&z, exps, g, consts, spec.said_inflation)?;
            rows.push(Row::from_clause(&c, "said".into(), k));

            if k < spec.derivative_trials {
                let u = draw(Some(0.5));
                let phi = draw(Some(0.0));
                let step = 1e-5;
                let jp = energy(pb, &u.axpby(1.0, &phi, step))?.total;
                let jm = energy(pb, &u.axpby(1.0, &phi, -step))?.total;
                let fd = (jp - jm) / (2.0 * step);
                let gd = gateaux(pb, &u, &phi)?;
                rows.push(Row::from_clause(
                    &ClauseCheck::leq_abs("gateaux-fd", (gd - fd).abs(), 1e-6 * (1.0 + gd.abs()), 0.0),
                    "gateaux-fd".into(),
                    k,
                ));
                let a = psi(pb, &u)?;
                let b = gateaux(pb, &u, &u)?;
                rows.push(Row::from_clause(
                    &ClauseCheck::leq_abs("psi-gateaux", (a - b).abs(), 1e-12 * (1.0 + a.abs()), 0.0),
                    "psi-gateaux".into(),
                    k,
                ));
            }
            Ok(rows)
        })
        .collect();
    for r in per_trial {
        rows.extend(r?);
    }
    Ok(rows)
}
