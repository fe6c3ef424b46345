//! Executable forms of the variable-exponent inequalities.
//!
//! Every clause reports `lhs`, `rhs` and a relative `margin =
//! (rhs - lhs) / max(|lhs|, |rhs|)`; a clause passes when the margin is at
//! least `-1e-12`.

use serde::Serialize;

use super::{
    conjugate_exponent, luxemburg_raw, scaled_modular, weighted_node_weights, ConstantsEstimate,
    ExponentField, WeightField,
};
use crate::error::Result;
use crate::manifold::{check_same_chart, gradient, grad_norm_g, MetricField, ScalarField};
use crate::sum::pairwise_sum_by;

pub const CLAUSE_TOLERANCE: f64 = 1e-12;
pub const LUXEMBURG_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ClauseCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl ClauseCheck {
    /// The clause `lhs <= rhs` judged by relative margin.
    pub fn leq(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let margin = if scale == 0.0 { 0.0 } else { (rhs - lhs) / scale };
        ClauseCheck {
            name: name.into(),
            lhs,
            rhs,
            margin,
            pass: margin >= -CLAUSE_TOLERANCE,
        }
    }

    /// The clause `lhs <= rhs` judged by absolute slack `tol`.
    pub fn leq_abs(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        ClauseCheck {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs + tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub r_q: f64,
    /// `(1 + 1/q- - 1/q+) ‖u‖ ‖v‖`, the bound reached inside the proof.
    pub rhs_tight: f64,
    pub pass: bool,
    pub pass_tight: bool,
}

/// `∫|uv| dv_g <= r_q ‖u‖_e ‖v‖_{e'}` with `r_q = 1 + 1/e- + 1/e+`.
pub fn holder_check(u: &ScalarField, v: &ScalarField, e: &ScalarField, g: &MetricField) -> Result<HolderReport> {
    let (em, ep) = (e.min(), e.max());
    holder_check_with(u, v, e, g, 1.0 + 1.0 / em + 1.0 / ep)
}

/// Hölder check against a caller-supplied constant.
pub fn holder_check_with(
    u: &ScalarField,
    v: &ScalarField,
    e: &ScalarField,
    g: &MetricField,
    r_q: f64,
) -> Result<HolderReport> {
    check_same_chart(u.chart(), v.chart())?;
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    let w = g.node_weights();
    let (uv, vv) = (u.values(), v.values());
    let lhs = pairwise_sum_by(uv.len(), |i| w[i] * (uv[i] * vv[i]).abs());
    let conj = conjugate_exponent(e);
    let nu = luxemburg_raw(uv, e.values(), w);
    let nv = luxemburg_raw(vv, conj.values(), w);
    let (em, ep) = (e.min(), e.max());
    let rhs = r_q * nu * nv;
    let rhs_tight = (1.0 + 1.0 / em - 1.0 / ep) * nu * nv;
    Ok(HolderReport {
        lhs,
        rhs,
        r_q,
        rhs_tight,
        pass: lhs <= rhs + CLAUSE_TOLERANCE,
        pass_tight: lhs <= rhs_tight + CLAUSE_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationsReport {
    pub norm: f64,
    pub modular: f64,
    pub clauses: Vec<ClauseCheck>,
    pub pass: bool,
}

impl RelationsReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClauseCheck> {
        self.clauses.iter().filter(|c| !c.pass)
    }
}

fn relations(label: &str, u: &[f64], e: &[f64], w: &[f64]) -> RelationsReport {
    let em = e.iter().copied().fold(f64::INFINITY, f64::min);
    let ep = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = luxemburg_raw(u, e, w);
    let rho = scaled_modular(u, e, w, 1.0);
    let mut clauses = Vec::new();

    // Luxemburg defining equation.
    if norm > 0.0 {
        let at_norm = scaled_modular(u, e, w, norm);
        clauses.push(ClauseCheck::leq_abs(
            format!("{label}:luxemburg"),
            (at_norm - 1.0).abs(),
            LUXEMBURG_TOLERANCE,
            0.0,
        ));
    }

    // Trichotomy: norm - 1 and modular - 1 never have opposite signs.
    let product = (norm - 1.0) * (rho - 1.0);
    clauses.push(ClauseCheck {
        name: format!("{label}:trichotomy"),
        lhs: norm - 1.0,
        rhs: rho - 1.0,
        margin: product,
        pass: product >= -CLAUSE_TOLERANCE,
    });

    if norm < 1.0 {
        clauses.push(ClauseCheck::leq(format!("{label}:small-lower"), norm.powf(ep), rho));
        clauses.push(ClauseCheck::leq(format!("{label}:small-upper"), rho, norm.powf(em)));
    } else if norm > 1.0 {
        clauses.push(ClauseCheck::leq(format!("{label}:large-lower"), norm.powf(em), rho));
        clauses.push(ClauseCheck::leq(format!("{label}:large-upper"), rho, norm.powf(ep)));
    }

    let (a, b) = (rho.powf(1.0 / em), rho.powf(1.0 / ep));
    clauses.push(ClauseCheck::leq(format!("{label}:sandwich-lower"), a.min(b), norm));
    clauses.push(ClauseCheck::leq(format!("{label}:sandwich-upper"), norm, a.max(b)));

    let pass = clauses.iter().all(|c| c.pass);
    RelationsReport {
        norm,
        modular: rho,
        clauses,
        pass,
    }
}

/// Norm/modular relations for `L^{e(.)}`: the defining equation, the
/// trichotomy against 1, the power bounds on each side of 1 and the min/max
/// sandwich.
pub fn modular_norm_relations(u: &ScalarField, e: &ScalarField, g: &MetricField) -> Result<RelationsReport> {
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    Ok(relations("modular", u.values(), e.values(), g.node_weights()))
}

/// Same relations for the weighted space `L^{e(.)}_{μ(.)}`.
pub fn weighted_modular_norm_relations(
    u: &ScalarField,
    e: &ScalarField,
    w: &WeightField,
    g: &MetricField,
) -> Result<RelationsReport> {
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    check_same_chart(u.chart(), w.mu.chart())?;
    Ok(relations("weighted", u.values(), e.values(), &weighted_node_weights(w, g)))
}

/// Embedding estimate `ρ_p(u) <= D^{p+} (c+1)^{p+} ρ_q(|∇u|)^{p+/q-}` with
/// `D` and `c` multiplied by `inflation`.
pub fn said_check(
    u: &ScalarField,
    exps: &ExponentField,
    g: &MetricField,
    consts: &ConstantsEstimate,
    inflation: f64,
) -> Result<ClauseCheck> {
    check_same_chart(u.chart(), g.chart())?;
    let grad = grad_norm_g(&gradient(u), g)?;
    let w = g.node_weights();
    let lhs = scaled_modular(u.values(), exps.p.values(), w, 1.0);
    let rho_grad = scaled_modular(grad.values(), exps.q.values(), w, 1.0);
    let d = consts.d_embed * inflation;
    let c = consts.c_poincare * inflation;
    let k = (d * (c + 1.0)).powf(exps.p_plus);
    let rhs = k * rho_grad.powf(exps.p_plus / exps.q_minus);
    Ok(ClauseCheck::leq("said", lhs, rhs))
}

/// Nodewise window `Np/(Np - q(N - p)) < ε < p/(p - q)` for the weight
/// integrability exponent. Reports the worst node margin.
pub fn epsilon_window_check(exps: &ExponentField, eps: &ScalarField) -> Result<ClauseCheck> {
    check_same_chart(exps.p.chart(), eps.chart())?;
    let n = exps.p.chart().dim() as f64;
    let (p, q, e) = (exps.p.values(), exps.q.values(), eps.values());
    let mut worst = ClauseCheck {
        name: "epsilon-window".into(),
        lhs: f64::NAN,
        rhs: f64::NAN,
        margin: f64::INFINITY,
        pass: true,
    };
    for i in 0..p.len() {
        let lo = n * p[i] / (n * p[i] - q[i] * (n - p[i]));
        let hi = p[i] / (p[i] - q[i]);
        let margin = (e[i] - lo).min(hi - e[i]);
        if margin < worst.margin {
            worst.margin = margin;
            worst.lhs = lo;
            worst.rhs = hi;
        }
    }
    worst.pass = worst.margin > 0.0;
    Ok(worst)
}
