//! Variable-exponent Lebesgue and Sobolev spaces on a discrete chart.
//!
//! All modulars are rectangle-rule sums `Σ w_i |u_i|^{e_i}` with node weights
//! `w_i = sqrt(det g) * cell volume` (times `μ_i` for weighted spaces), reduced
//! pairwise. Luxemburg norms are found by bisection on the scale `γ`.

mod checks;
mod constants;

pub use checks::{
    epsilon_window_check, holder_check, holder_check_with, modular_norm_relations, said_check,
    weighted_modular_norm_relations, ClauseCheck, HolderReport, RelationsReport,
};
pub use constants::{estimate_constants, trial_ratios, ConstantsEstimate, TrialRatios};

use crate::error::{Error, Result};
use crate::manifold::{check_same_chart, gradient, grad_norm_g, MetricField, ScalarField};
use crate::sum::pairwise_sum_by;

/// Smallest admissible exponent when forming `e / (e - 1)`.
pub const CONJUGATE_GUARD: f64 = 1.0 + 1e-6;

const MAX_BISECTIONS: usize = 200;

/// The pair `p(.)`, `q(.)` with cached extrema.
#[derive(Debug, Clone)]
pub struct ExponentField {
    pub p: ScalarField,
    pub q: ScalarField,
    pub p_minus: f64,
    pub p_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
}

impl ExponentField {
    /// Checks `1 < q- <= q+ < p- <= p+`. The clause `p+ < N` is left to
    /// [`ExponentField::dimension_warning`].
    pub fn new(p: ScalarField, q: ScalarField) -> Result<Self> {
        check_same_chart(p.chart(), q.chart())?;
        let (p_minus, p_plus) = (p.min(), p.max());
        let (q_minus, q_plus) = (q.min(), q.max());
        if !(1.0 < q_minus && q_plus < p_minus) {
            return Err(Error::InvalidExponents(format!(
                "need 1 < q- <= q+ < p- <= p+, got q in [{q_minus}, {q_plus}], p in [{p_minus}, {p_plus}]"
            )));
        }
        Ok(ExponentField {
            p,
            q,
            p_minus,
            p_plus,
            q_minus,
            q_plus,
        })
    }

    pub fn constant(chart: std::sync::Arc<crate::manifold::Chart>, p: f64, q: f64) -> Result<Self> {
        ExponentField::new(
            ScalarField::constant(chart.clone(), p),
            ScalarField::constant(chart, q),
        )
    }

    /// True when both exponents are the same at every node.
    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus && self.q_minus == self.q_plus
    }

    /// Warning text when `p+ >= N`.
    pub fn dimension_warning(&self) -> Option<String> {
        let n = self.p.chart().dim() as f64;
        (self.p_plus >= n).then(|| format!("p+ = {} is not below the dimension N = {n}", self.p_plus))
    }
}

/// Weight `μ(.)` with its positive lower bound `μ0`.
#[derive(Debug, Clone)]
pub struct WeightField {
    pub mu: ScalarField,
    pub mu0: f64,
}

impl WeightField {
    pub fn new(mu: ScalarField) -> Result<Self> {
        let mu0 = mu.min();
        if !(mu0 > 0.0) {
            return Err(Error::InvalidWeight(format!("weight minimum must be > 0, got {mu0}")));
        }
        Ok(WeightField { mu, mu0 })
    }

    pub fn constant(chart: std::sync::Arc<crate::manifold::Chart>, mu: f64) -> Result<Self> {
        WeightField::new(ScalarField::constant(chart, mu))
    }
}

/// `Σ w_i (|u_i| / γ)^{e_i}`.
pub(crate) fn scaled_modular(u: &[f64], e: &[f64], w: &[f64], gamma: f64) -> f64 {
    pairwise_sum_by(u.len(), |i| w[i] * (u[i].abs() / gamma).powf(e[i]))
}

/// Luxemburg norm of node data against arbitrary positive weights.
pub(crate) fn luxemburg_raw(u: &[f64], e: &[f64], w: &[f64]) -> f64 {
    let max = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let e_minus = e.iter().copied().fold(f64::INFINITY, f64::min);
    let e_plus = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vol = pairwise_sum_by(w.len(), |i| w[i]);
    let rho = |gamma: f64| scaled_modular(u, e, w, gamma);

    // rho(hi) <= vol / (1 + vol) < 1.
    let mut hi = max * (1.0 + vol).powf(1.0 / e_minus);
    let mut lo = max * vol.powf(1.0 / e_plus) * 1e-8;
    while rho(lo) <= 1.0 {
        hi = lo;
        lo *= 1e-8;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if rho(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `∫ |u|^{e(x)} dv_g`.
pub fn modular(u: &ScalarField, e: &ScalarField, g: &MetricField) -> Result<f64> {
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    Ok(scaled_modular(u.values(), e.values(), g.node_weights(), 1.0))
}

/// `inf { γ > 0 : ∫ |u/γ|^{e(x)} dv_g <= 1 }`.
pub fn luxemburg_norm(u: &ScalarField, e: &ScalarField, g: &MetricField) -> Result<f64> {
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    Ok(luxemburg_raw(u.values(), e.values(), g.node_weights()))
}

fn weighted_node_weights(w: &WeightField, g: &MetricField) -> Vec<f64> {
    w.mu.values()
        .iter()
        .zip(g.node_weights())
        .map(|(m, nw)| m * nw)
        .collect()
}

/// `∫ μ |u|^{e(x)} dv_g`.
pub fn weighted_modular(u: &ScalarField, e: &ScalarField, w: &WeightField, g: &MetricField) -> Result<f64> {
    check_same_chart(u.chart(), w.mu.chart())?;
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    Ok(scaled_modular(u.values(), e.values(), &weighted_node_weights(w, g), 1.0))
}

pub fn weighted_norm(u: &ScalarField, e: &ScalarField, w: &WeightField, g: &MetricField) -> Result<f64> {
    check_same_chart(u.chart(), w.mu.chart())?;
    check_same_chart(u.chart(), e.chart())?;
    check_same_chart(u.chart(), g.chart())?;
    Ok(luxemburg_raw(u.values(), e.values(), &weighted_node_weights(w, g)))
}

/// Nodewise `e / (e - 1)` with `e` clamped to at least [`CONJUGATE_GUARD`].
pub fn conjugate_exponent(e: &ScalarField) -> ScalarField {
    e.map(|x| {
        let x = x.max(CONJUGATE_GUARD);
        x / (x - 1.0)
    })
}

/// `‖u‖_e + ‖ |∇u|_g ‖_e`.
pub fn sobolev_norm(u: &ScalarField, e: &ScalarField, g: &MetricField) -> Result<f64> {
    let grad = grad_norm_g(&gradient(u), g)?;
    Ok(luxemburg_norm(u, e, g)? + luxemburg_norm(&grad, e, g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_torus, MetricSpec};
    use std::f64::consts::PI;

    fn torus(n: usize) -> (std::sync::Arc<crate::manifold::Chart>, MetricField) {
        build_torus(&[n], &MetricSpec::Identity).unwrap()
    }

    #[test]
    fn modular_constant_cases() {
        let (chart, g) = torus(64);
        let three = ScalarField::constant(chart.clone(), 3.0);
        let two = ScalarField::constant(chart.clone(), 2.0);
        assert!((modular(&three, &two, &g).unwrap() - 9.0).abs() < 1e-13);
        let one = ScalarField::constant(chart.clone(), 1.0);
        let e = ScalarField::from_fn(chart, |x| 2.5 + 0.3 * (2.0 * PI * x[0]).sin());
        assert!((modular(&one, &e, &g).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn modular_matches_refined_grid() {
        // |u|^e has kinks at the zeros of u, so convergence is algebraic (h^{e+1}).
        let eval = |n: usize| {
            let (chart, g) = torus(n);
            let u = ScalarField::from_fn(chart.clone(), |x| (2.0 * PI * x[0]).sin());
            let e = ScalarField::from_fn(chart, |x| 2.5 + 0.3 * (2.0 * PI * x[0]).sin());
            modular(&u, &e, &g).unwrap()
        };
        assert!((eval(1024) - eval(4096)).abs() < 1e-8);
    }

    #[test]
    fn luxemburg_constant_exponent_is_power_mean() {
        let (chart, g) = torus(64);
        let u = ScalarField::from_fn(chart.clone(), |x| 1.0 + (2.0 * PI * x[0]).cos());
        let e = ScalarField::constant(chart.clone(), 3.0);
        let n = luxemburg_norm(&u, &e, &g).unwrap();
        let m = modular(&u, &e, &g).unwrap();
        assert!((n - m.powf(1.0 / 3.0)).abs() < 1e-13 * n);
        assert_eq!(luxemburg_norm(&ScalarField::zeros(chart), &e, &g).unwrap(), 0.0);
    }

    #[test]
    fn luxemburg_of_constant_two_with_variable_exponent() {
        let (chart, g) = torus(64);
        let ef = |x: f64| 2.0 + 0.5 * (2.0 * PI * x).sin();
        let e = ScalarField::from_fn(chart.clone(), |x| ef(x[0]));
        let u = ScalarField::constant(chart, 2.0);
        let n = luxemburg_norm(&u, &e, &g).unwrap();
        // Independent scalar root find with a secant iteration on log γ.
        let f = |lg: f64| {
            (0..64)
                .map(|i| (2.0 / lg.exp()).powf(ef(i as f64 / 64.0)) / 64.0)
                .sum::<f64>()
                - 1.0
        };
        let (mut a, mut b) = (0.0_f64, 2.0_f64);
        for _ in 0..60 {
            let (fa, fb) = (f(a), f(b));
            if fb == fa {
                break;
            }
            let c = b - fb * (b - a) / (fb - fa);
            a = b;
            b = c;
        }
        assert!((n - b.exp()).abs() < 1e-12 * n);
    }

    #[test]
    fn weighted_reduces_and_scales() {
        let (chart, g) = torus(32);
        let u = ScalarField::from_fn(chart.clone(), |x| (2.0 * PI * x[0]).sin() + 0.3);
        let e2 = ScalarField::constant(chart.clone(), 2.0);
        let one = WeightField::constant(chart.clone(), 1.0).unwrap();
        let four = WeightField::constant(chart.clone(), 4.0).unwrap();
        let m = modular(&u, &e2, &g).unwrap();
        assert_eq!(weighted_modular(&u, &e2, &one, &g).unwrap(), m);
        assert!((weighted_modular(&u, &e2, &four, &g).unwrap() - 4.0 * m).abs() < 1e-13);
        let n = luxemburg_norm(&u, &e2, &g).unwrap();
        assert!((weighted_norm(&u, &e2, &four, &g).unwrap() - 2.0 * n).abs() < 1e-13);
    }

    #[test]
    fn weighted_example_weight_refines() {
        let eval = |n: usize| {
            let (chart, g) = torus(n);
            let eps = ScalarField::from_fn(chart.clone(), |x| 1.5 + 0.2 * (2.0 * PI * x[0]).cos());
            let mu = ScalarField::new(
                chart.clone(),
                (0..n)
                    .map(|i| {
                        let x = chart.coords(i)[0];
                        (1.0 + x.sin().abs()).powf(eps.values()[i])
                    })
                    .collect(),
            )
            .unwrap();
            let w = WeightField::new(mu).unwrap();
            let u = ScalarField::from_fn(chart.clone(), |x| (2.0 * PI * x[0]).sin());
            let e = ScalarField::from_fn(chart, |x| 1.7 + 0.1 * (2.0 * PI * x[0]).cos());
            weighted_modular(&u, &e, &w, &g).unwrap()
        };
        // |x| is replaced by the periodic |sin x|; its kink limits the rate to algebraic.
        assert!((eval(4096) - eval(16384)).abs() < 1e-8);
    }

    #[test]
    fn sobolev_norm_of_sine() {
        let n = 8192;
        let (chart, g) = torus(n);
        let u = ScalarField::from_fn(chart.clone(), |x| (2.0 * PI * x[0]).sin());
        let e = ScalarField::constant(chart.clone(), 2.0);
        let expected = (0.5_f64).sqrt() * (1.0 + 2.0 * PI);
        assert!((sobolev_norm(&u, &e, &g).unwrap() - expected).abs() < 1e-6);
        let c = ScalarField::constant(chart.clone(), 1.5);
        assert_eq!(
            sobolev_norm(&c, &e, &g).unwrap(),
            luxemburg_norm(&c, &e, &g).unwrap()
        );
        assert_eq!(sobolev_norm(&ScalarField::zeros(chart), &e, &g).unwrap(), 0.0);
    }

    #[test]
    fn exponent_ordering_enforced() {
        let (chart, _) = torus(8);
        assert!(ExponentField::constant(chart.clone(), 3.0, 2.0).is_ok());
        assert!(ExponentField::constant(chart.clone(), 2.0, 2.0).is_err());
        assert!(ExponentField::constant(chart.clone(), 3.0, 1.0).is_err());
        let w = ExponentField::constant(chart.clone(), 3.0, 2.0).unwrap();
        assert!(w.dimension_warning().is_some());
        assert!(WeightField::constant(chart, 0.0).is_err());
    }
}
