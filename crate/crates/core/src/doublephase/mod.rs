//! The double-phase problem: instance data, the energy functional and its
//! Gateaux derivative.
//!
//! With `Kind::Truncated` the reaction terms `-λ|u|^q/q + |u|^p/p - F(u)` are
//! only integrated over `{u >= 0}`, which is the functional whose critical
//! points are non-negative.

mod nonlinearity;

use std::sync::Arc;

use serde::Serialize;

pub use nonlinearity::{check_f1, check_f3, f_eval, F1Report, F1Sample, F3Report, F_eval, Form, Nonlinearity};

use crate::error::{Error, Result};
use crate::manifold::{check_same_chart, gradient, Chart, MetricField, ScalarField, VectorField, MAX_DIM};
use crate::orlicz::{ExponentField, WeightField};
use crate::sum::pairwise_sum_by;

/// Which energy is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Full,
    /// Reaction terms restricted to `{u >= 0}`.
    Truncated,
}

/// One fully specified instance of the problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub metric: MetricField,
    pub exps: ExponentField,
    pub weight: WeightField,
    pub lambda: f64,
    pub nonlinearity: Nonlinearity,
    /// Diagnostics for hypotheses that are recorded rather than enforced.
    pub warnings: Vec<String>,
}

impl ProblemInstance {
    pub fn new(
        metric: MetricField,
        exps: ExponentField,
        weight: WeightField,
        lambda: f64,
        nonlinearity: Nonlinearity,
    ) -> Result<Self> {
        check_same_chart(metric.chart(), exps.p.chart())?;
        check_same_chart(metric.chart(), weight.mu.chart())?;
        if let Form::Power { a } = &nonlinearity.form {
            check_same_chart(metric.chart(), a.chart())?;
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!("lambda must be > 0, got {lambda}")));
        }
        if nonlinearity.beta <= exps.p_plus {
            return Err(Error::InvalidNonlinearity(format!(
                "beta = {} must exceed p+ = {}",
                nonlinearity.beta, exps.p_plus
            )));
        }
        let mut warnings = Vec::new();
        if let Some(w) = exps.dimension_warning() {
            warnings.push(w);
        }
        let (pm, pp, qm, qp) = (exps.p_minus, exps.p_plus, exps.q_minus, exps.q_plus);
        let n = metric.chart().dim() as f64;
        let lhs = pp / (qp - qm);
        let rhs = (pp - qp) / (pp - qm) - (qp - qm) * (pp - qp) / ((pp - qm) * (pm - qm));
        if !(lhs < rhs) {
            warnings.push(format!(
                "exponent inequality p+/(q+ - q-) < ... fails: {lhs:.6e} vs {rhs:.6e}"
            ));
        }
        if pm / qp > 1.0 + 1.0 / n {
            warnings.push(format!("p-/q+ = {:.6} exceeds 1 + 1/N = {:.6}", pm / qp, 1.0 + 1.0 / n));
        }
        if nonlinearity.is_tabulated() {
            warnings.push("tabulated nonlinearity: unverified hypotheses".into());
        }
        Ok(ProblemInstance {
            metric,
            exps,
            weight,
            lambda,
            nonlinearity,
            warnings,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.metric.chart()
    }

    /// Same instance with a different `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ProblemInstance::new(
            self.metric.clone(),
            self.exps.clone(),
            self.weight.clone(),
            lambda,
            self.nonlinearity.clone(),
        )
    }
}

/// The five terms of the energy and their signed total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `∫ |∇u|^p / p`.
    pub grad_p_term: f64,
    /// `∫ μ |∇u|^q / q`.
    pub grad_q_term: f64,
    /// `∫ λ |u|^q / q`.
    pub lambda_q_term: f64,
    /// `∫ |u|^p / p`.
    pub u_p_term: f64,
    /// `∫ F(x, u)`.
    #[serde(rename = "F_term")]
    pub f_term: f64,
    pub total: f64,
}

/// Weighted per-node densities of the five Nehari integrals at `u`:
/// `|∇u|^p`, `μ|∇u|^q`, `|u|^q`, `|u|^p` and the reaction mask.
#[derive(Debug, Clone)]
pub struct Densities {
    pub grad_p: Vec<f64>,
    pub grad_q: Vec<f64>,
    pub u_q: Vec<f64>,
    pub u_p: Vec<f64>,
    /// `1` where the reaction terms are active, `0` otherwise.
    pub mask: Vec<f64>,
}

pub(crate) fn reaction_mask(u: &[f64], kind: Kind) -> Vec<f64> {
    match kind {
        Kind::Full => vec![1.0; u.len()],
        Kind::Truncated => u.iter().map(|&v| if v >= 0.0 { 1.0 } else { 0.0 }).collect(),
    }
}

/// Node densities (already multiplied by quadrature weights).
pub fn densities(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<Densities> {
    check_same_chart(u.chart(), pb.chart())?;
    let g = &pb.metric;
    let w = g.node_weights();
    let du = gradient(u);
    let p = pb.exps.p.values();
    let q = pb.exps.q.values();
    let mu = pb.weight.mu.values();
    let uv = u.values();
    let mask = reaction_mask(uv, kind);
    let n = uv.len();
    let mut d = Densities {
        grad_p: vec![0.0; n],
        grad_q: vec![0.0; n],
        u_q: vec![0.0; n],
        u_p: vec![0.0; n],
        mask,
    };
    for i in 0..n {
        let gn = g.covector_norm(i, &du.components()[i]);
        d.grad_p[i] = w[i] * gn.powf(p[i]);
        d.grad_q[i] = w[i] * mu[i] * gn.powf(q[i]);
        let a = uv[i].abs();
        d.u_q[i] = w[i] * d.mask[i] * a.powf(q[i]);
        d.u_p[i] = w[i] * d.mask[i] * a.powf(p[i]);
    }
    Ok(d)
}

/// `J_λ(u)` (or its truncated form) term by term.
pub fn energy_with(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<EnergyBreakdown> {
    let d = densities(pb, u, kind)?;
    let p = pb.exps.p.values();
    let q = pb.exps.q.values();
    let w = pb.metric.node_weights();
    let uv = u.values();
    let nl = &pb.nonlinearity;
    let n = uv.len();
    let grad_p_term = pairwise_sum_by(n, |i| d.grad_p[i] / p[i]);
    let grad_q_term = pairwise_sum_by(n, |i| d.grad_q[i] / q[i]);
    let lambda_q_term = pb.lambda * pairwise_sum_by(n, |i| d.u_q[i] / q[i]);
    let u_p_term = pairwise_sum_by(n, |i| d.u_p[i] / p[i]);
    let f_term = pairwise_sum_by(n, |i| w[i] * d.mask[i] * nl.big_f_scalar(i, uv[i]));
    Ok(EnergyBreakdown {
        grad_p_term,
        grad_q_term,
        lambda_q_term,
        u_p_term,
        f_term,
        total: grad_p_term + grad_q_term - lambda_q_term + u_p_term - f_term,
    })
}

/// `J_λ(u)`.
pub fn energy(pb: &ProblemInstance, u: &ScalarField) -> Result<EnergyBreakdown> {
    energy_with(pb, u, Kind::Full)
}

/// Raised flux `(|∇u|^{p-2} + μ|∇u|^{q-2}) g^{-1} ∇u` per node; zero where
/// `∇u = 0`.
fn flux(pb: &ProblemInstance, du: &VectorField) -> Vec<[f64; MAX_DIM]> {
    let g = &pb.metric;
    let p = pb.exps.p.values();
    let q = pb.exps.q.values();
    let mu = pb.weight.mu.values();
    du.components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let gn = g.covector_norm(i, c);
            if gn == 0.0 {
                return [0.0; MAX_DIM];
            }
            let coef = gn.powf(p[i] - 2.0) + mu[i] * gn.powf(q[i] - 2.0);
            let raised = g.raise(i, c);
            [coef * raised[0], coef * raised[1], coef * raised[2]]
        })
        .collect()
}

/// Local reaction density `-λ|u|^{q-2}u + |u|^{p-2}u - f(x,u)` (masked).
#[inline]
fn reaction(pb: &ProblemInstance, i: usize, s: f64, mask: f64) -> f64 {
    if mask == 0.0 {
        return 0.0;
    }
    let a = s.abs();
    let p = pb.exps.p.values()[i];
    let q = pb.exps.q.values()[i];
    -pb.lambda * a.powf(q - 2.0) * s + a.powf(p - 2.0) * s - pb.nonlinearity.f_scalar(i, s)
}

/// `<J'(u), φ>` for the chosen functional.
pub fn gateaux_with(pb: &ProblemInstance, u: &ScalarField, phi: &ScalarField, kind: Kind) -> Result<f64> {
    check_same_chart(u.chart(), pb.chart())?;
    check_same_chart(phi.chart(), pb.chart())?;
    let w = pb.metric.node_weights();
    let du = gradient(u);
    let dphi = gradient(phi);
    let fl = flux(pb, &du);
    let uv = u.values();
    let pv = phi.values();
    let mask = reaction_mask(uv, kind);
    let dim = pb.chart().dim();
    Ok(pairwise_sum_by(uv.len(), |i| {
        let dp = &dphi.components()[i];
        let mut grad = 0.0;
        for d in 0..dim {
            grad += fl[i][d] * dp[d];
        }
        let local = if uv[i] == 0.0 { 0.0 } else { reaction(pb, i, uv[i], mask[i]) * pv[i] };
        w[i] * (grad + local)
    }))
}

/// `<J'_λ(u), φ>`.
pub fn gateaux(pb: &ProblemInstance, u: &ScalarField, phi: &ScalarField) -> Result<f64> {
    gateaux_with(pb, u, phi, Kind::Full)
}

/// Riesz representative of `J'(u)` in the node basis and its weighted norm.
#[derive(Debug, Clone)]
pub struct Residual {
    /// `gateaux(u, δ_i) / w_i` per node.
    pub field: ScalarField,
    /// `sqrt(Σ w_i r_i^2)`.
    pub norm: f64,
}

pub fn residual_gradient_with(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<Residual> {
    check_same_chart(u.chart(), pb.chart())?;
    let chart = pb.chart();
    let w = pb.metric.node_weights();
    let du = gradient(u);
    let fl = flux(pb, &du);
    let uv = u.values();
    let mask = reaction_mask(uv, kind);
    let dim = chart.dim();
    let n = uv.len();
    // Central differences are antisymmetric: <flux, D δ_j> = -(D (w flux))_j.
    let r: Vec<f64> = (0..n)
        .map(|j| {
            let mut div = 0.0;
            for d in 0..dim {
                let back = chart.neighbor(j, d, false);
                let fwd = chart.neighbor(j, d, true);
                div += (w[back] * fl[back][d] - w[fwd] * fl[fwd][d]) / (2.0 * chart.spacings()[d]);
            }
            let local = if uv[j] == 0.0 { 0.0 } else { reaction(pb, j, uv[j], mask[j]) };
            div / w[j] + local
        })
        .collect();
    let norm = pairwise_sum_by(n, |i| w[i] * r[i] * r[i]).sqrt();
    Ok(Residual {
        field: ScalarField::new(chart.clone(), r)?,
        norm,
    })
}

pub fn residual_gradient(pb: &ProblemInstance, u: &ScalarField) -> Result<Residual> {
    residual_gradient_with(pb, u, Kind::Full)
}
