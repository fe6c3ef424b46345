//! Minimization of the energy over the `N+` and `N-` branches of the Nehari
//! set by preconditioned projected descent, with multistart.
//!
//! Each step moves along `-S r`, where `r` is the Riesz residual and
//! `S = (σ I + κ L)^{-1}` is a spectral smoother built from the discrete
//! Laplacian symbol, then rescales the trial point back onto the target
//! branch. Steps are accepted by Armijo backtracking on the energy of the
//! re-projected point.

mod certificate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{nonnegativity_certificate, Certificate};

use crate::doublephase::{energy_with, residual_gradient_with, EnergyBreakdown, Kind, ProblemInstance};
use crate::error::{Error, Result};
use crate::manifold::{gradient, grad_norm_g, ScalarField};
use crate::nehari::{Fiber, FiberPoint, NehariClass, Thresholds, BRACKET, PROBES};
use crate::rng::{substream, Stream};
use crate::spectral::Spectral;
use crate::sum::pairwise_sum_by;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
    /// Accepted `|ψ|` relative to the five-integral scale.
    pub projection_tol: f64,
    /// Stop when `sqrt(Σ w r^2)` falls to this value.
    pub residual_tol: f64,
    pub multistart: usize,
    pub seed: u64,
    pub target: NehariClass,
    pub truncate: bool,
    /// Mean of the random starts.
    pub start_mean: f64,
    /// Max-norm of the zero-mean fluctuation added to the start mean.
    pub start_amplitude: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 60,
            projection_tol: 1e-8,
            residual_tol: 1e-6,
            multistart: 8,
            seed: 42,
            target: NehariClass::Minus,
            truncate: true,
            start_mean: 1.0,
            start_amplitude: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("initial_step", self.initial_step),
            ("sufficient_decrease", self.sufficient_decrease),
            ("projection_tol", self.projection_tol),
            ("residual_tol", self.residual_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("solver.{name} must be > 0, got {v}")));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidConfig(format!("solver.shrink must lie in (0, 1), got {}", self.shrink)));
        }
        if self.sufficient_decrease >= 1.0 {
            return Err(Error::InvalidConfig("solver.sufficient_decrease must be < 1".into()));
        }
        if self.multistart == 0 {
            return Err(Error::InvalidConfig("solver.multistart must be >= 1".into()));
        }
        if self.max_iters == 0 || self.max_backtracks == 0 {
            return Err(Error::InvalidConfig("solver.max_iters and solver.max_backtracks must be >= 1".into()));
        }
        if self.target == NehariClass::Zero {
            return Err(Error::InvalidConfig("solver.target must be plus or minus".into()));
        }
        if !(self.start_amplitude >= 0.0 && self.start_mean.is_finite() && self.start_amplitude.is_finite()) {
            return Err(Error::InvalidConfig("solver.start_mean/start_amplitude must be finite, amplitude >= 0".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        if self.truncate {
            Kind::Truncated
        } else {
            Kind::Full
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    IterationCap,
    /// Backtracking could not decrease the energy.
    Stalled,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    #[serde(skip)]
    pub u: ScalarField,
    #[serde(rename = "J_value")]
    pub j_value: f64,
    pub energy: EnergyBreakdown,
    pub class: NehariClass,
    pub psi_value: f64,
    /// `|ψ|` divided by the five-integral scale.
    pub psi_relative: f64,
    pub residual_norm: f64,
    pub min_u: f64,
    /// Best `J` over converged starts, `NaN` when none converged.
    pub theta_estimate: f64,
    pub iterations: usize,
    pub status: RunStatus,
    pub start_index: usize,
    pub seed: u64,
    pub truncate: bool,
    /// Accepted energies never increased.
    pub monotone: bool,
    /// Largest `|ψ|/scale` over accepted iterates.
    pub max_psi_relative: f64,
    pub constants_provenance: Option<String>,
    pub warnings: Vec<String>,
}

/// Outcome of one start.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub start_index: usize,
    /// `None` when the start has no root of the target class.
    pub status: Option<RunStatus>,
    #[serde(rename = "J_value")]
    pub j_value: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchResult {
    /// Best converged run, or the lowest-energy run when none converged.
    pub best: SolutionReport,
    pub converged: bool,
    pub runs: Vec<RunSummary>,
}

/// Multistart minimization of the energy over the `cfg.target` branch.
pub fn minimize_on_branch(pb: &ProblemInstance, cfg: &SolverConfig) -> Result<BranchResult> {
    cfg.validate()?;
    let spectral = Spectral::new(pb.chart().clone(), pb.metric.mean_inverse_diagonal());
    let outcomes: Vec<Result<Option<SolutionReport>>> = (0..cfg.multistart)
        .into_par_iter()
        .map(|k| {
            let z = start_fluctuation(&spectral, cfg.seed, k);
            for attempt in 0..START_ATTEMPTS {
                let a = cfg.start_amplitude * 0.25f64.powi(attempt as i32);
                let u0 = z.map(|v| cfg.start_mean + a * v);
                if let Some(r) = run_from(pb, cfg, &spectral, &u0, k)? {
                    return Ok(Some(r));
                }
            }
            Ok(None)
        })
        .collect();
    let mut reports = Vec::new();
    let mut runs = Vec::new();
    for (k, o) in outcomes.into_iter().enumerate() {
        match o? {
            Some(r) => {
                runs.push(RunSummary {
                    start_index: k,
                    status: Some(r.status),
                    j_value: r.j_value,
                    residual_norm: r.residual_norm,
                    iterations: r.iterations,
                });
                reports.push(r);
            }
            None => runs.push(RunSummary {
                start_index: k,
                status: None,
                j_value: f64::NAN,
                residual_norm: f64::NAN,
                iterations: 0,
            }),
        }
    }
    if reports.is_empty() {
        return Err(Error::BranchEmpty(format!(
            "no start out of {} projects onto the {} branch",
            cfg.multistart, cfg.target
        )));
    }
    let by_energy = |a: &&SolutionReport, b: &&SolutionReport| {
        a.j_value.total_cmp(&b.j_value).then(a.start_index.cmp(&b.start_index))
    };
    let converged: Vec<&SolutionReport> = reports.iter().filter(|r| r.status == RunStatus::Converged).collect();
    let is_converged = !converged.is_empty();
    let pool: Vec<&SolutionReport> = if is_converged { converged } else { reports.iter().collect() };
    let mut best = pool.into_iter().min_by(|a, b| by_energy(&a, &b)).unwrap().clone();
    let theta = if is_converged { best.j_value } else { f64::NAN };
    best.theta_estimate = theta;
    best.warnings.extend(pb.warnings.iter().cloned());
    Ok(BranchResult {
        best,
        converged: is_converged,
        runs,
    })
}

/// A start with no root of the target class is retried with its fluctuation
/// damped by 4, up to this many times in total.
pub const START_ATTEMPTS: usize = 8;

/// Zero-mean band-limited fluctuation of unit max-norm for start `k`.
pub fn start_fluctuation(spectral: &Spectral, seed: u64, k: usize) -> ScalarField {
    let mut rng = substream(seed, Stream::Multistart, k as u64);
    let band = spectral.quarter_band();
    spectral.band_limited(&mut rng, &band, None)
}

/// Root of the target class: nearest to `t = 1` within `[1/2, 2]`, otherwise
/// the smallest on the full bracket.
fn reproject(fiber: &Fiber, target: NehariClass, local: bool) -> Option<FiberPoint> {
    if local {
        let near = fiber
            .roots_in(0.5, 2.0, 32)
            .into_iter()
            .filter(|r| r.class() == target)
            .min_by(|a, b| a.t.ln().abs().total_cmp(&b.t.ln().abs()));
        if near.is_some() {
            return near;
        }
    }
    fiber.roots_in(BRACKET.0, BRACKET.1, PROBES).into_iter().find(|r| r.class() == target)
}

/// Smoother weights `(σ, κ)` and per-node diagonal scaling from the local
/// linearization at `u`.
fn preconditioner(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<(f64, f64, Vec<f64>)> {
    let gn = grad_norm_g(&gradient(u), &pb.metric)?;
    let g = gn.values();
    let gmax = gn.max().max(1e-300);
    let uv = u.values();
    let p = pb.exps.p.values();
    let q = pb.exps.q.values();
    let mu = pb.weight.mu.values();
    let w = pb.metric.node_weights();
    let vol = pb.metric.volume();
    let n = uv.len();
    let nl = &pb.nonlinearity;
    let kappa = pairwise_sum_by(n, |i| {
        let s = g[i].max(1e-3 * gmax);
        w[i] * ((p[i] - 1.0) * s.powf(p[i] - 2.0) + mu[i] * (q[i] - 1.0) * s.powf(q[i] - 2.0))
    }) / vol;
    let umax = u.max_abs().max(1e-300);
    let local: Vec<f64> = (0..n)
        .map(|i| {
            if kind == Kind::Truncated && uv[i] < 0.0 {
                return 0.0;
            }
            let a = uv[i].abs().max(1e-3 * umax);
            ((p[i] - 1.0) * a.powf(p[i] - 2.0) - pb.lambda * (q[i] - 1.0) * a.powf(q[i] - 2.0) - nl.df_scalar(i, a)).abs()
        })
        .collect();
    let sigma = pairwise_sum_by(n, |i| w[i] * local[i]) / vol;
    let kappa = if kappa > 0.0 { kappa } else { 1.0 };
    let sigma = sigma.max(1e-6 * kappa).max(1e-12);
    let scaling = local.iter().map(|&h| ((h + 0.1 * sigma) / sigma).sqrt().recip()).collect();
    Ok((sigma, kappa, scaling))
}

/// Projected descent from one start; `None` if the start has no root of the
/// target class.
pub fn run_from(
    pb: &ProblemInstance,
    cfg: &SolverConfig,
    spectral: &Spectral,
    u0: &ScalarField,
    start_index: usize,
) -> Result<Option<SolutionReport>> {
    let kind = cfg.kind();
    let fiber = Fiber::new(pb, u0, kind)?;
    if fiber.is_trivial() {
        return Ok(None);
    }
    let Some(root) = reproject(&fiber, cfg.target, false) else {
        return Ok(None);
    };
    let w = pb.metric.node_weights();
    let n = u0.len();
    let mut u = u0.scaled(root.t);
    let mut e = energy_with(pb, &u, kind)?;
    let mut step = cfg.initial_step;
    let mut monotone = true;
    let mut max_psi = root.phi.abs() / root.scale;
    let mut status = RunStatus::IterationCap;
    let mut iterations = 0;
    let mut res = residual_gradient_with(pb, &u, kind)?;
    let max_step = 1e6 * cfg.initial_step;
    while iterations < cfg.max_iters {
        if res.norm <= cfg.residual_tol {
            status = RunStatus::Converged;
            break;
        }
        iterations += 1;
        let (sigma, kappa, m) = preconditioner(pb, &u, kind)?;
        let r = res.field.values();
        let mr: Vec<f64> = r.iter().zip(&m).map(|(a, b)| a * b).collect();
        let d: Vec<f64> = spectral.smooth(&mr, sigma, kappa).iter().zip(&m).map(|(a, b)| a * b).collect();
        let slope = pairwise_sum_by(n, |i| w[i] * r[i] * d[i]);
        if !(slope > 0.0) {
            status = RunStatus::Stalled;
            break;
        }
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let trial = ScalarField::new(
                pb.chart().clone(),
                u.values().iter().zip(&d).map(|(a, b)| a - step * b).collect(),
            );
            if let Ok(trial) = trial {
                let fiber = Fiber::new(pb, &trial, kind)?;
                if let Some(pt) = reproject(&fiber, cfg.target, true) {
                    let v = trial.scaled(pt.t);
                    let ev = energy_with(pb, &v, kind)?;
                    if ev.total <= e.total - cfg.sufficient_decrease * step * slope
                        && pt.phi.abs() <= cfg.projection_tol * pt.scale
                    {
                        accepted = Some((v, ev, pt));
                        break;
                    }
                }
            }
            step *= cfg.shrink;
        }
        let Some((v, ev, pt)) = accepted else {
            status = RunStatus::Stalled;
            break;
        };
        if ev.total > e.total {
            monotone = false;
        }
        u = v;
        e = ev;
        max_psi = max_psi.max(pt.phi.abs() / pt.scale);
        step = (step * 2.0).min(max_step);
        res = residual_gradient_with(pb, &u, kind)?;
    }
    if status == RunStatus::IterationCap && res.norm <= cfg.residual_tol {
        status = RunStatus::Converged;
    }
    let here = Fiber::new(pb, &u, kind)?.eval(1.0);
    Ok(Some(SolutionReport {
        j_value: e.total,
        energy: e,
        class: here.class(),
        psi_value: here.phi,
        psi_relative: here.phi.abs() / here.scale,
        residual_norm: res.norm,
        min_u: u.min(),
        theta_estimate: f64::NAN,
        iterations,
        status,
        start_index,
        seed: cfg.seed,
        truncate: cfg.truncate,
        monotone,
        max_psi_relative: max_psi,
        constants_provenance: None,
        warnings: Vec::new(),
        u,
    }))
}

/// Both branches with truncation, plus distinctness and sign checks.
#[derive(Debug, Clone, Serialize)]
pub struct Experiment {
    pub report_plus: Option<SolutionReport>,
    pub report_minus: Option<SolutionReport>,
    pub certificate_plus: Option<Certificate>,
    pub certificate_minus: Option<Certificate>,
    pub runs_plus: Vec<RunSummary>,
    pub runs_minus: Vec<RunSummary>,
    pub distinct: bool,
    pub separation: f64,
    /// Both branches found and converged.
    pub conclusive: bool,
    /// Conclusive, `J(u+) < 0 < J(u-)`, certificates pass and distinct.
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl Experiment {
    pub fn status(&self) -> &'static str {
        match (self.conclusive, self.pass) {
            (false, _) => "inconclusive",
            (true, true) => "pass",
            (true, false) => "fail",
        }
    }
}

fn node_norm(v: &[f64], w: &[f64]) -> f64 {
    pairwise_sum_by(v.len(), |i| w[i] * v[i] * v[i]).sqrt()
}

pub fn two_solution_experiment(
    pb: &ProblemInstance,
    cfg: &SolverConfig,
    thresholds: Option<&Thresholds>,
) -> Result<Experiment> {
    let mut warnings = Vec::new();
    if let Some(th) = thresholds {
        if !(pb.lambda < th.lambda_bar) {
            warnings.push(format!(
                "lambda = {} is not below lambda_bar = {} (lambda* = {}, lambda** = {})",
                pb.lambda, th.lambda_bar, th.lambda_star, th.lambda_star_star
            ));
        }
    }
    let provenance = thresholds.map(|t| t.constants.provenance.clone());
    let mut branch = |target: NehariClass| -> Result<(Option<SolutionReport>, Vec<RunSummary>, bool)> {
        let c = SolverConfig {
            target,
            truncate: true,
            ..cfg.clone()
        };
        match minimize_on_branch(pb, &c) {
            Ok(mut b) => {
                b.best.constants_provenance = provenance.clone();
                Ok((Some(b.best), b.runs, b.converged))
            }
            Err(Error::BranchEmpty(msg)) => {
                warnings.push(format!("{target} branch empty: {msg}"));
                Ok((None, Vec::new(), false))
            }
            Err(e) => Err(e),
        }
    };
    let (rp, runs_plus, cp) = branch(NehariClass::Plus)?;
    let (rm, runs_minus, cm) = branch(NehariClass::Minus)?;
    let cert = |r: &Option<SolutionReport>| -> Result<Option<Certificate>> {
        r.as_ref().map(|r| nonnegativity_certificate(pb, &r.u)).transpose()
    };
    let certificate_plus = cert(&rp)?;
    let certificate_minus = cert(&rm)?;
    let w = pb.metric.node_weights();
    let (separation, distinct) = match (&rp, &rm) {
        (Some(a), Some(b)) => {
            let diff: Vec<f64> = a.u.values().iter().zip(b.u.values()).map(|(x, y)| x - y).collect();
            let sep = node_norm(&diff, w);
            let scale = node_norm(a.u.values(), w) + node_norm(b.u.values(), w);
            (sep / scale, sep > 1e-6 * scale)
        }
        _ => (f64::NAN, false),
    };
    let conclusive = cp && cm;
    let pass = conclusive
        && distinct
        && rp.as_ref().is_some_and(|r| r.j_value < 0.0)
        && rm.as_ref().is_some_and(|r| r.j_value > 0.0)
        && certificate_plus.as_ref().is_some_and(|c| c.pass)
        && certificate_minus.as_ref().is_some_and(|c| c.pass);
    if !cp && rp.is_some() {
        warnings.push("plus branch: no start converged".into());
    }
    if !cm && rm.is_some() {
        warnings.push("minus branch: no start converged".into());
    }
    Ok(Experiment {
        report_plus: rp,
        report_minus: rm,
        certificate_plus,
        certificate_minus,
        runs_plus,
        runs_minus,
        distinct,
        separation,
        conclusive,
        pass,
        warnings,
    })
}
