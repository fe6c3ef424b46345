use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{check_same_chart, MetricField, ScalarField};
use crate::orlicz::ExponentField;
use crate::sum::pairwise_sum_by;

/// Shape of the source term `f(x, s)`.
#[derive(Debug, Clone)]
pub enum Form {
    /// `a(x) |s|^{β-2} s`.
    Power { a: ScalarField },
    /// `x`-independent piecewise-linear `f` through `(knots[k], values[k])`,
    /// extended linearly past the end knots.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    /// Ambrosetti-Rabinowitz exponent.
    pub beta: f64,
    /// Threshold `A` beyond which the AR inequality is required.
    pub a_threshold: f64,
    pub form: Form,
}

impl Nonlinearity {
    pub fn power(beta: f64, a: ScalarField) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!("beta must be > 1, got {beta}")));
        }
        if let Some(node) = a.values().iter().position(|&v| !(v > 0.0)) {
            return Err(Error::InvalidNonlinearity(format!(
                "amplitude must be > 0, got {} at node {node}",
                a.values()[node]
            )));
        }
        Ok(Nonlinearity {
            beta,
            a_threshold: 0.0,
            form: Form::Power { a },
        })
    }

    /// Tabulated source; `f(0) = 0` is enforced, the AR and small-α
    /// hypotheses are not.
    pub fn tabulated(beta: f64, a_threshold: f64, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidNonlinearity(
                "tabulated f needs at least two (knot, value) pairs".into(),
            ));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidNonlinearity("knots must be strictly increasing".into()));
        }
        let nl = Nonlinearity {
            beta,
            a_threshold,
            form: Form::Tabulated { knots, values },
        };
        if nl.f_scalar(0, 0.0).abs() > 1e-14 {
            return Err(Error::InvalidNonlinearity("tabulated f must vanish at 0".into()));
        }
        Ok(nl)
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.form, Form::Tabulated { .. })
    }

    fn segment(knots: &[f64], s: f64) -> usize {
        let k = knots.partition_point(|&x| x <= s);
        k.clamp(1, knots.len() - 1) - 1
    }

    /// `f(x_node, s)`.
    #[inline]
    pub fn f_scalar(&self, node: usize, s: f64) -> f64 {
        match &self.form {
            Form::Power { a } => a.values()[node] * s.abs().powf(self.beta - 2.0) * s,
            Form::Tabulated { knots, values } => {
                let k = Self::segment(knots, s);
                let slope = (values[k + 1] - values[k]) / (knots[k + 1] - knots[k]);
                values[k] + slope * (s - knots[k])
            }
        }
    }

    /// `∂f/∂s (x_node, s)`.
    #[inline]
    pub fn df_scalar(&self, node: usize, s: f64) -> f64 {
        match &self.form {
            Form::Power { a } => a.values()[node] * (self.beta - 1.0) * s.abs().powf(self.beta - 2.0),
            Form::Tabulated { knots, values } => {
                let k = Self::segment(knots, s);
                (values[k + 1] - values[k]) / (knots[k + 1] - knots[k])
            }
        }
    }

    /// `F(x_node, s) = ∫_0^s f(x_node, t) dt`.
    #[inline]
    pub fn big_f_scalar(&self, node: usize, s: f64) -> f64 {
        match &self.form {
            Form::Power { a } => a.values()[node] * s.abs().powf(self.beta) / self.beta,
            Form::Tabulated { .. } => self.tabulated_primitive(s),
        }
    }

    /// Exact integral of the piecewise-linear `f` from 0 to `s`.
    fn tabulated_primitive(&self, s: f64) -> f64 {
        let Form::Tabulated { knots, .. } = &self.form else {
            unreachable!()
        };
        let (lo, hi, sign) = if s >= 0.0 { (0.0, s, 1.0) } else { (s, 0.0, -1.0) };
        // Breakpoints strictly inside (lo, hi).
        let mut pts = vec![lo];
        pts.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
        pts.push(hi);
        let mut acc = 0.0;
        for w in pts.windows(2) {
            // f is linear on each piece, so the trapezoid rule is exact.
            acc += 0.5 * (w[1] - w[0]) * (self.f_scalar(0, w[0]) + self.f_scalar(0, w[1]));
        }
        sign * acc
    }
}

/// Nodewise `f(x, u(x))`.
pub fn f_eval(nl: &Nonlinearity, u: &ScalarField) -> ScalarField {
    let vals = u.values().iter().enumerate().map(|(i, &s)| nl.f_scalar(i, s)).collect();
    ScalarField::new(u.chart().clone(), vals).expect("finite source values")
}

/// Nodewise `F(x, u(x))`.
#[allow(non_snake_case)]
pub fn F_eval(nl: &Nonlinearity, u: &ScalarField) -> ScalarField {
    let vals = u.values().iter().enumerate().map(|(i, &s)| nl.big_f_scalar(i, s)).collect();
    ScalarField::new(u.chart().clone(), vals).expect("finite primitive values")
}

#[derive(Debug, Clone, Serialize)]
pub struct F1Sample {
    pub alpha: f64,
    pub integral_f: f64,
    pub integral_f_alpha_over_beta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct F1Report {
    pub samples: Vec<F1Sample>,
    pub pass: bool,
}

/// Checks `0 < ∫F(x,α) <= ∫ f(x,α) α/β` for each sample `|α| > A`.
pub fn check_f1(nl: &Nonlinearity, exps: &ExponentField, g: &MetricField, alphas: &[f64]) -> Result<F1Report> {
    if nl.beta <= exps.p_plus {
        return Err(Error::InvalidNonlinearity(format!(
            "beta = {} must exceed p+ = {}",
            nl.beta, exps.p_plus
        )));
    }
    check_same_chart(exps.p.chart(), g.chart())?;
    let w = g.node_weights();
    let mut samples = Vec::new();
    for &alpha in alphas.iter().filter(|a| a.abs() > nl.a_threshold) {
        let lhs = pairwise_sum_by(w.len(), |i| w[i] * nl.big_f_scalar(i, alpha));
        let rhs = pairwise_sum_by(w.len(), |i| w[i] * nl.f_scalar(i, alpha) * alpha / nl.beta);
        samples.push(F1Sample {
            alpha,
            integral_f: lhs,
            integral_f_alpha_over_beta: rhs,
            pass: lhs > 0.0 && lhs <= rhs + 1e-12 * rhs.abs(),
        });
    }
    let pass = samples.iter().all(|s| s.pass);
    Ok(F1Report { samples, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct F3Report {
    pub alphas: Vec<f64>,
    /// `max_x |f(x,α)| / |α|^{q(x)-1}` per `α`.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Scans `α = 1e-1 ... 1e-6` and requires strictly shrinking ratios.
pub fn check_f3(nl: &Nonlinearity, exps: &ExponentField) -> F3Report {
    let alphas: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let q = exps.q.values();
    let ratios: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            (0..q.len())
                .map(|i| nl.f_scalar(i, alpha).abs() / alpha.powf(q[i] - 1.0))
                .fold(0.0, f64::max)
        })
        .collect();
    let pass = ratios.windows(2).all(|w| w[1] < w[0]);
    F3Report { alphas, ratios, pass }
}
