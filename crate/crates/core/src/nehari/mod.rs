//! The Nehari constraint `ψ(u) = <J'(u), u>`, fibering maps along rays,
//! projection onto the Nehari set and the `N+ / N- / N0` split.
//!
//! Along the ray `t ↦ t u` every term is a power of `t` with nodewise
//! exponent, so `φ_u(t) = ψ(t u)` and its derivative are evaluated exactly
//! from per-node coefficients computed once per `u`.

mod thresholds;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use thresholds::{lambda_star, lambda_star_star, thresholds, Thresholds};

use crate::doublephase::{densities, energy_with, Form, Kind, ProblemInstance};
use crate::error::{Error, Result};
use crate::manifold::ScalarField;
use crate::rng::{substream, Stream};
use crate::spectral::Spectral;
use crate::sum::pairwise_sum_by;

pub const BRACKET: (f64, f64) = (1e-6, 1e6);
pub const PROBES: usize = 256;
/// Roots are refined until `|φ| <= ROOT_TOL * scale`.
pub const ROOT_TOL: f64 = 1e-10;
/// `classify` requires `|ψ| <= ON_MANIFOLD_TOL * scale`.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;
/// Half-width of the `N0` band for `<ψ'(u), u>`, relative to scale.
pub const CLASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NehariClass {
    Plus,
    Minus,
    Zero,
}

impl std::fmt::Display for NehariClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NehariClass::Plus => "plus",
            NehariClass::Minus => "minus",
            NehariClass::Zero => "zero",
        })
    }
}

/// Value, derivative and tolerance scale of a fibering map at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint {
    pub t: f64,
    pub phi: f64,
    pub phi_prime: f64,
    /// `|A| + |μB| + λ|C| + |D| + |E|` at `t u`.
    pub scale: f64,
}

impl FiberPoint {
    /// `<ψ'(tu), tu> = t φ'(t)`.
    pub fn curvature(&self) -> f64 {
        self.t * self.phi_prime
    }

    pub fn class(&self) -> NehariClass {
        let s = self.curvature();
        let tol = CLASS_TOL * self.scale;
        if s > tol {
            NehariClass::Plus
        } else if s < -tol {
            NehariClass::Minus
        } else {
            NehariClass::Zero
        }
    }
}

enum Source {
    /// Constant exponents and power source: `E t^β`.
    Aggregated { e: f64 },
    Power { coef: Vec<f64> },
    Nodal { u: Vec<f64>, w: Vec<f64> },
}

/// Precomputed ray `t ↦ t u` for one field.
pub struct Fiber<'a> {
    pb: &'a ProblemInstance,
    /// Per-node `t^p` coefficients (`|∇u|^p + |u|^p`, weighted).
    cp: Vec<f64>,
    /// Per-node `t^q` coefficients (`μ|∇u|^q - λ|u|^q`, weighted).
    cq: Vec<f64>,
    /// Per-node absolute coefficients for the scale.
    abs_p: Vec<f64>,
    abs_q: Vec<f64>,
    /// `Σ cp`, `Σ cq`, `Σ abs` when exponents are constant.
    constant: Option<(f64, f64, f64, f64, f64, f64)>,
    source: Source,
}

impl<'a> Fiber<'a> {
    pub fn new(pb: &'a ProblemInstance, u: &ScalarField, kind: Kind) -> Result<Self> {
        let d = densities(pb, u, kind)?;
        let n = u.len();
        let lambda = pb.lambda;
        let cp: Vec<f64> = (0..n).map(|i| d.grad_p[i] + d.u_p[i]).collect();
        let cq: Vec<f64> = (0..n).map(|i| d.grad_q[i] - lambda * d.u_q[i]).collect();
        let abs_p = cp.clone();
        let abs_q: Vec<f64> = (0..n).map(|i| d.grad_q[i] + lambda * d.u_q[i]).collect();
        let w = pb.metric.node_weights();
        let uv = u.values();
        let beta = pb.nonlinearity.beta;
        let power_coef = |a: &ScalarField| -> Vec<f64> {
            (0..n)
                .map(|i| w[i] * d.mask[i] * a.values()[i] * uv[i].abs().powf(beta))
                .collect()
        };
        let exps = &pb.exps;
        let source = match &pb.nonlinearity.form {
            Form::Power { a } if exps.is_constant() => Source::Aggregated {
                e: crate::sum::pairwise_sum(&power_coef(a)),
            },
            Form::Power { a } => Source::Power { coef: power_coef(a) },
            Form::Tabulated { .. } => Source::Nodal {
                u: uv.to_vec(),
                w: (0..n).map(|i| w[i] * d.mask[i]).collect(),
            },
        };
        let constant = exps.is_constant().then(|| {
            (
                exps.p_minus,
                exps.q_minus,
                crate::sum::pairwise_sum(&cp),
                crate::sum::pairwise_sum(&cq),
                crate::sum::pairwise_sum(&abs_p),
                crate::sum::pairwise_sum(&abs_q),
            )
        });
        Ok(Fiber {
            pb,
            cp,
            cq,
            abs_p,
            abs_q,
            constant,
            source,
        })
    }

    /// True when the field is identically zero along the ray.
    pub fn is_trivial(&self) -> bool {
        let src_zero = match &self.source {
            Source::Aggregated { e } => *e == 0.0,
            Source::Power { coef } => coef.iter().all(|&c| c == 0.0),
            Source::Nodal { u, .. } => u.iter().all(|&v| v == 0.0),
        };
        src_zero && self.abs_p.iter().all(|&c| c == 0.0) && self.abs_q.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> FiberPoint {
        let (mut phi, mut dphi, mut scale);
        if let Some((p, q, ap, aq, bp, bq)) = self.constant {
            let (tp, tq) = (t.powf(p), t.powf(q));
            phi = tp * ap + tq * aq;
            dphi = p * tp / t * ap + q * tq / t * aq;
            scale = tp * bp + tq * bq;
        } else {
            let p = self.pb.exps.p.values();
            let q = self.pb.exps.q.values();
            let n = self.cp.len();
            let lt = t.ln();
            let tp = |i: usize| (p[i] * lt).exp();
            let tq = |i: usize| (q[i] * lt).exp();
            phi = pairwise_sum_by(n, |i| tp(i) * self.cp[i] + tq(i) * self.cq[i]);
            dphi = pairwise_sum_by(n, |i| p[i] * tp(i) * self.cp[i] + q[i] * tq(i) * self.cq[i]) / t;
            scale = pairwise_sum_by(n, |i| tp(i) * self.abs_p[i] + tq(i) * self.abs_q[i]);
        }
        let beta = self.pb.nonlinearity.beta;
        let (src, dsrc) = match &self.source {
            Source::Aggregated { e } => {
                let tb = t.powf(beta);
                (tb * e, beta * tb / t * e)
            }
            Source::Power { coef } => {
                let tb = t.powf(beta);
                let e = crate::sum::pairwise_sum(coef);
                (tb * e, beta * tb / t * e)
            }
            Source::Nodal { u, w } => {
                let nl = &self.pb.nonlinearity;
                let s = pairwise_sum_by(u.len(), |i| w[i] * nl.f_scalar(i, t * u[i]) * t * u[i]);
                let ds = pairwise_sum_by(u.len(), |i| {
                    let x = t * u[i];
                    w[i] * u[i] * (nl.df_scalar(i, x) * x + nl.f_scalar(i, x))
                });
                (s, ds)
            }
        };
        phi -= src;
        dphi -= dsrc;
        scale += src.abs();
        FiberPoint {
            t,
            phi,
            phi_prime: dphi,
            scale,
        }
    }

    /// Bisection on `log t` between a sign change at `lo` and `hi`.
    fn refine(&self, mut lo: f64, mut hi: f64) -> FiberPoint {
        let mut flo = self.eval(lo);
        let fhi = self.eval(hi);
        if flo.phi.abs() <= ROOT_TOL * flo.scale {
            return flo;
        }
        if fhi.phi.abs() <= ROOT_TOL * fhi.scale {
            return fhi;
        }
        let mut best = if flo.phi.abs() / flo.scale <= fhi.phi.abs() / fhi.scale { flo } else { fhi };
        for _ in 0..400 {
            let mid = (0.5 * (lo.ln() + hi.ln())).exp();
            let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
            if !(mid > lo && mid < hi) {
                break;
            }
            let fm = self.eval(mid);
            if fm.phi.abs() / fm.scale < best.phi.abs() / best.scale {
                best = fm;
            }
            if fm.phi.abs() <= ROOT_TOL * fm.scale {
                return fm;
            }
            if (fm.phi > 0.0) == (flo.phi > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        best
    }

    /// All sign changes on `points` log-spaced probes of `[lo, hi]`, refined.
    pub fn roots_in(&self, lo: f64, hi: f64, points: usize) -> Vec<FiberPoint> {
        let (llo, lhi) = (lo.ln(), hi.ln());
        let ts: Vec<f64> = (0..points)
            .map(|k| (llo + (lhi - llo) * k as f64 / (points - 1) as f64).exp())
            .collect();
        let vals: Vec<FiberPoint> = ts.iter().map(|&t| self.eval(t)).collect();
        let mut roots = Vec::new();
        for k in 0..points - 1 {
            let (a, b) = (vals[k], vals[k + 1]);
            if a.phi == 0.0 {
                roots.push(a);
            } else if a.phi * b.phi < 0.0 {
                roots.push(self.refine(a.t, b.t));
            }
        }
        if vals[points - 1].phi == 0.0 {
            roots.push(vals[points - 1]);
        }
        roots
    }
}

/// `ψ(u) = <J'(u), u>`.
pub fn psi(pb: &ProblemInstance, u: &ScalarField) -> Result<f64> {
    psi_with(pb, u, Kind::Full)
}

pub fn psi_with(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<f64> {
    Ok(Fiber::new(pb, u, kind)?.eval(1.0).phi)
}

/// Sampled fibering map.
#[derive(Debug, Clone, Serialize)]
pub struct FiberingSample {
    pub t_values: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
}

pub fn fibering(pb: &ProblemInstance, u: &ScalarField, t_grid: &[f64]) -> Result<FiberingSample> {
    fibering_with(pb, u, t_grid, Kind::Full)
}

pub fn fibering_with(pb: &ProblemInstance, u: &ScalarField, t_grid: &[f64], kind: Kind) -> Result<FiberingSample> {
    if t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem("t grid must be positive and strictly increasing".into()));
    }
    let fiber = Fiber::new(pb, u, kind)?;
    let pts: Vec<FiberPoint> = t_grid.iter().map(|&t| fiber.eval(t)).collect();
    Ok(FiberingSample {
        t_values: t_grid.to_vec(),
        phi: pts.iter().map(|p| p.phi).collect(),
        phi_prime: pts.iter().map(|p| p.phi_prime).collect(),
    })
}

/// One root of the fibering map with its class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NehariRoot {
    pub t: f64,
    pub class: NehariClass,
    pub phi: f64,
    pub curvature: f64,
    pub scale: f64,
}

impl From<FiberPoint> for NehariRoot {
    fn from(p: FiberPoint) -> Self {
        NehariRoot {
            t: p.t,
            class: p.class(),
            phi: p.phi,
            curvature: p.curvature(),
            scale: p.scale,
        }
    }
}

/// All Nehari points `t u` on the ray through `u`, in increasing `t`.
pub fn project(pb: &ProblemInstance, u: &ScalarField) -> Result<Vec<NehariRoot>> {
    project_with(pb, u, Kind::Full)
}

pub fn project_with(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<Vec<NehariRoot>> {
    let fiber = Fiber::new(pb, u, kind)?;
    let (lo, hi) = BRACKET;
    if fiber.is_trivial() {
        return Err(Error::NoRoot {
            lo,
            hi,
            reason: "zero field".into(),
        });
    }
    let roots = fiber.roots_in(lo, hi, PROBES);
    if roots.is_empty() {
        let a = fiber.eval(lo);
        let b = fiber.eval(hi);
        return Err(Error::NoRoot {
            lo,
            hi,
            reason: format!("phi keeps one sign: phi({lo:e}) = {:e}, phi({hi:e}) = {:e}", a.phi, b.phi),
        });
    }
    Ok(roots.into_iter().map(NehariRoot::from).collect())
}

/// Class of a field already on the Nehari set.
pub fn classify(pb: &ProblemInstance, u: &ScalarField) -> Result<NehariClass> {
    classify_with(pb, u, Kind::Full)
}

pub fn classify_with(pb: &ProblemInstance, u: &ScalarField, kind: Kind) -> Result<NehariClass> {
    let p = Fiber::new(pb, u, kind)?.eval(1.0);
    let tolerance = ON_MANIFOLD_TOL * p.scale;
    if !(p.phi.abs() <= tolerance) {
        return Err(Error::NotOnNehari { psi: p.phi, tolerance });
    }
    Ok(p.class())
}

/// A projected random field.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectedSample {
    pub index: usize,
    pub t: f64,
    pub class: NehariClass,
    pub energy: f64,
    pub curvature: f64,
    pub scale: f64,
}

/// Projects `count` seeded fields `m + a z` and reports every root found.
/// `z` is band-limited (modes up to a quarter of the grid) with unit max-norm,
/// `m` is uniform on `[-1, 1]` and `a` log-uniform on `[1e-2, 1]`.
pub fn sample_projections(pb: &ProblemInstance, count: usize, seed: u64, kind: Kind) -> Result<Vec<ProjectedSample>> {
    let spectral = Spectral::new(pb.chart().clone(), pb.metric.mean_inverse_diagonal());
    let band = spectral.quarter_band();
    let mut out = Vec::new();
    for index in 0..count {
        let mut rng = substream(seed, Stream::Property, index as u64);
        let mean: f64 = rng.random_range(-1.0..1.0);
        let amplitude = 10f64.powf(rng.random_range(-2.0..0.0));
        let u = spectral.band_limited(&mut rng, &band, None).map(|v| mean + amplitude * v);
        let roots = match project_with(pb, &u, kind) {
            Ok(r) => r,
            Err(Error::NoRoot { .. }) => continue,
            Err(e) => return Err(e),
        };
        for r in roots {
            let v = u.scaled(r.t);
            out.push(ProjectedSample {
                index,
                t: r.t,
                class: r.class,
                energy: energy_with(pb, &v, kind)?.total,
                curvature: r.curvature,
                scale: r.scale,
            });
        }
    }
    Ok(out)
}
