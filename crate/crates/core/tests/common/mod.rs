#![allow(dead_code)]

use std::path::PathBuf;

use nehari::doublephase::{densities, Kind, Nonlinearity, ProblemInstance};
use nehari::manifold::{build_torus, MetricSpec, ScalarField};
use nehari::orlicz::{ExponentField, WeightField};

pub fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// `p = 3`, `q = 2`, `β = 4`, `a = 1` on a 1-D unit torus.
pub fn reference(n: usize, mu: f64, lambda: f64) -> ProblemInstance {
    let (chart, g) = build_torus(&[n], &MetricSpec::Identity).unwrap();
    ProblemInstance::new(
        g,
        ExponentField::constant(chart.clone(), 3.0, 2.0).unwrap(),
        WeightField::constant(chart.clone(), mu).unwrap(),
        lambda,
        Nonlinearity::power(4.0, ScalarField::constant(chart, 1.0)).unwrap(),
    )
    .unwrap()
}

/// Scale `s`, weight `μ` and amplitude `a` for which `u = s sin(2πx)` on the
/// reference-type instance has fibering map `t^3 + t^2 - t^4`: `s` fixes
/// `A + D = 1`, `μ` fixes `μB - λC = 1` and `a` fixes `E = 1`.
pub fn golden_coefficients(n: usize, lambda: f64) -> (ScalarField, f64, f64) {
    let base = reference(n, 1.0, lambda);
    let sin = ScalarField::from_fn(base.chart().clone(), |x| (2.0 * std::f64::consts::PI * x[0]).sin());
    let d = densities(&base, &sin, Kind::Full).unwrap();
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let w = base.metric.node_weights();
    let e0: f64 = sin.values().iter().zip(w).map(|(v, w)| w * v.powi(4)).sum();
    let s = (sum(&d.grad_p) + sum(&d.u_p)).powf(-1.0 / 3.0);
    let mu = (1.0 / (s * s) + lambda * sum(&d.u_q)) / sum(&d.grad_q);
    let a = 1.0 / (s.powi(4) * e0);
    (sin.scaled(s), mu, a)
}

pub fn golden(n: usize, lambda: f64) -> (ProblemInstance, ScalarField) {
    let (u, mu, a) = golden_coefficients(n, lambda);
    let base = reference(n, 1.0, lambda);
    let chart = base.chart().clone();
    let pb = ProblemInstance::new(
        base.metric.clone(),
        base.exps.clone(),
        WeightField::constant(chart.clone(), mu).unwrap(),
        lambda,
        Nonlinearity::power(4.0, ScalarField::constant(chart, a)).unwrap(),
    )
    .unwrap();
    (pb, u)
}

/// Runs the CLI in-process and returns its exit code.
pub fn cli(args: &[&str]) -> i32 {
    let mut all = vec!["nehari"];
    all.extend_from_slice(args);
    nehari::cli::main_with_args(all)
}
