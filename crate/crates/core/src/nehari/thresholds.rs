use serde::Serialize;

use crate::doublephase::ProblemInstance;
use crate::orlicz::ConstantsEstimate;

/// Smallness thresholds on `λ`, evaluated from (estimated) constants.
#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    /// Bound below which `N0` is empty; clamped at 0.
    pub lambda_star: f64,
    /// Unclamped value of the `λ*` expression.
    pub lambda_star_raw: f64,
    /// Bound below which `J > 0` on `N-`.
    pub lambda_star_star: f64,
    pub lambda_bar: f64,
    pub lambda_star_clamped: bool,
    pub lambda_star_star_degenerate: bool,
    pub mu0: f64,
    pub constants: ConstantsEstimate,
}

/// `μ0 q- (p+ - q+) / (D^{p+} (c+1)^{p+} q+ (p+ - q-))`.
pub fn lambda_star_star(mu0: f64, q_minus: f64, q_plus: f64, p_plus: f64, d: f64, c: f64) -> f64 {
    let k = d.powf(p_plus) * (c + 1.0).powf(p_plus);
    mu0 * q_minus * (p_plus - q_plus) / (k * q_plus * (p_plus - q_minus))
}

/// Unclamped `λ*` with `K = D^{p+} (c+1)^{p+}`.
pub fn lambda_star(mu0: f64, q_minus: f64, q_plus: f64, p_minus: f64, p_plus: f64, d: f64, c: f64, c1: f64) -> f64 {
    let k = d.powf(p_plus) * (c + 1.0).powf(p_plus);
    2.0 * mu0 * (p_plus - q_plus) / (k * (p_plus - q_minus))
        - mu0 * c1 * (q_plus - q_minus) * (p_plus - q_plus) / (k * (p_plus - q_minus) * (p_minus - q_minus))
        - p_plus / (p_plus - q_minus)
}

pub fn thresholds(pb: &ProblemInstance, consts: &ConstantsEstimate) -> Thresholds {
    let e = &pb.exps;
    let mu0 = pb.weight.mu0;
    let (d, c, c1) = (consts.d_embed, consts.c_poincare, consts.c1_embed);
    let lss = lambda_star_star(mu0, e.q_minus, e.q_plus, e.p_plus, d, c);
    let raw = lambda_star(mu0, e.q_minus, e.q_plus, e.p_minus, e.p_plus, d, c, c1);
    let degenerate = !(lss > 0.0);
    let lss = lss.max(0.0);
    let clamped = !(raw > 0.0);
    let ls = if clamped { 0.0 } else { raw };
    Thresholds {
        lambda_star: ls,
        lambda_star_raw: raw,
        lambda_star_star: lss,
        lambda_bar: ls.min(lss),
        lambda_star_clamped: clamped,
        lambda_star_star_degenerate: degenerate,
        mu0,
        constants: consts.clone(),
    }
}
