//! TOML run configuration.
//!
//! ```toml
//! seed = 42
//!
//! [instance]
//! sizes = [64]
//! metric = "identity"              # or { constant = [[1.0]] } or { file = "g.field" }
//! p = 3.0                          # number | { affine = [c0, a1, ...] }
//! q = { fourier = { mean = 1.7, modes = [{ k = [1], cos = 0.1 }] } }
//! mu = 1.0
//! beta = 4.0
//! a = 1.0
//! lambda = { relative = 0.125 }    # multiple of lambda_star_star
//!
//! [lambda_grid]
//! lo = { relative = 0.125 }
//! hi = { relative = 2.0 }
//! points = 8
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::doublephase::{Nonlinearity, ProblemInstance};
use crate::error::{Error, Result};
use crate::manifold::io::read_metric;
use crate::manifold::{build_torus_with_lengths, Chart, MetricSpec, ScalarField};
use crate::nehari::{thresholds, Thresholds};
use crate::orlicz::{estimate_constants, ConstantsEstimate, ExponentField, WeightField};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub instance: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<LambdaGrid>,
    #[serde(default)]
    pub constants: ConstantsSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub project: ProjectSpec,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    #[serde(default)]
    pub metric: MetricInput,
    pub p: FieldSpec,
    pub q: FieldSpec,
    #[serde(default = "unit_field")]
    pub mu: FieldSpec,
    pub beta: f64,
    #[serde(default = "unit_field")]
    pub a: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated: Option<TabulatedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
}

fn unit_field() -> FieldSpec {
    FieldSpec::Constant(1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSpec {
    #[serde(default)]
    pub a_threshold: f64,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricInput {
    /// Only `"identity"` is accepted.
    Named(String),
    Constant { constant: Vec<Vec<f64>> },
    File { file: PathBuf },
}

impl Default for MetricInput {
    fn default() -> Self {
        MetricInput::Named("identity".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    /// `c0 + Σ a_d x_d`.
    Affine { affine: Vec<f64> },
    Fourier { fourier: FourierSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSpec {
    pub mean: f64,
    #[serde(default)]
    pub modes: Vec<FourierMode>,
}

/// `cos * cos(2π k·x/L) + sin * sin(2π k·x/L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierMode {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl FieldSpec {
    pub fn build(&self, chart: &std::sync::Arc<Chart>, name: &str) -> Result<ScalarField> {
        let dim = chart.dim();
        let lengths = chart.lengths().to_vec();
        match self {
            FieldSpec::Constant(c) => Ok(ScalarField::constant(chart.clone(), *c)),
            FieldSpec::Affine { affine } => {
                if affine.len() != dim + 1 {
                    return Err(Error::InvalidConfig(format!(
                        "{name}: affine needs {} coefficients (c0 and one slope per axis), got {}",
                        dim + 1,
                        affine.len()
                    )));
                }
                Ok(ScalarField::from_fn(chart.clone(), |x| {
                    affine[0] + (0..dim).map(|d| affine[d + 1] * x[d]).sum::<f64>()
                }))
            }
            FieldSpec::Fourier { fourier } => {
                for m in &fourier.modes {
                    if m.k.len() != dim {
                        return Err(Error::InvalidConfig(format!(
                            "{name}: Fourier mode k = {:?} must have {dim} entries",
                            m.k
                        )));
                    }
                }
                Ok(ScalarField::from_fn(chart.clone(), |x| {
                    fourier.mean
                        + fourier
                            .modes
                            .iter()
                            .map(|m| {
                                let phase: f64 =
                                    (0..dim).map(|d| 2.0 * PI * m.k[d] as f64 * x[d] / lengths[d]).sum();
                                m.cos * phase.cos() + m.sin * phase.sin()
                            })
                            .sum::<f64>()
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    /// Multiple of `lambda_star_star`.
    Relative { relative: f64 },
}

impl LambdaSpec {
    pub fn is_relative(&self) -> bool {
        matches!(self, LambdaSpec::Relative { .. })
    }

    pub fn resolve(&self, th: Option<&Thresholds>) -> Result<f64> {
        match *self {
            LambdaSpec::Value(v) => Ok(v),
            LambdaSpec::Relative { relative } => {
                let th = th.ok_or_else(|| Error::InvalidConfig("relative lambda needs thresholds".into()))?;
                if th.lambda_star_star_degenerate {
                    return Err(Error::InvalidConfig(
                        "relative lambda requested but lambda_star_star is degenerate (0)".into(),
                    ));
                }
                Ok(relative * th.lambda_star_star)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub lo: LambdaSpec,
    pub hi: LambdaSpec,
    pub points: usize,
}

impl LambdaGrid {
    /// Log-spaced values from `lo` to `hi` inclusive.
    pub fn values(&self, th: Option<&Thresholds>) -> Result<Vec<f64>> {
        let lo = self.lo.resolve(th)?;
        let hi = self.hi.resolve(th)?;
        if self.points == 0 {
            return Err(Error::InvalidConfig("lambda_grid.points must be >= 1".into()));
        }
        if self.points == 1 {
            return Ok(vec![lo]);
        }
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidConfig(format!(
                "lambda grid must be strictly increasing and positive, got lo = {lo}, hi = {hi}"
            )));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let n = self.points - 1;
        Ok((0..=n)
            .map(|k| match k {
                0 => lo,
                k if k == n => hi,
                k => (a + (b - a) * k as f64 / n as f64).exp(),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<FixedConstants>,
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        ConstantsSpec { trials: 200, fixed: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedConstants {
    pub c_poincare: f64,
    pub d_embed: f64,
    pub c1_embed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub trials: usize,
    /// Trials that also run the derivative checks.
    pub derivative_trials: usize,
    pub log_holder_bound: f64,
    pub said_inflation: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            trials: 1000,
            derivative_trials: 100,
            log_holder_bound: 3.0,
            said_inflation: 1.01,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectSpec {
    pub field: Option<PathBuf>,
    pub truncate: bool,
}

/// Pieces of an instance that do not depend on `λ`.
pub struct Ingredients {
    pub metric: crate::manifold::MetricField,
    pub exps: ExponentField,
    pub weight: WeightField,
    pub nonlinearity: Nonlinearity,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.message().to_string(),
            }
        })?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let MetricInput::File { file } = &mut self.instance.metric {
            fix(file);
        }
        if let Some(f) = &mut self.project.field {
            fix(f);
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Chart, metric, exponents, weight and source.
    pub fn ingredients(&self) -> Result<Ingredients> {
        let inst = &self.instance;
        let lengths = inst.lengths.clone().unwrap_or_else(|| vec![1.0; inst.sizes.len()]);
        let spec = match &inst.metric {
            MetricInput::Named(name) if name == "identity" => MetricSpec::Identity,
            MetricInput::Named(name) => {
                return Err(Error::InvalidConfig(format!("unknown metric {name:?}; use \"identity\"")))
            }
            MetricInput::Constant { constant } => MetricSpec::constant(constant),
            MetricInput::File { file } => {
                let (sizes, spec) = read_metric(file)?;
                if sizes != inst.sizes {
                    return Err(Error::ShapeMismatch(format!(
                        "metric file {} has sizes {sizes:?}, instance has {:?}",
                        file.display(),
                        inst.sizes
                    )));
                }
                spec
            }
        };
        let (chart, metric) = build_torus_with_lengths(&inst.sizes, &lengths, &spec)?;
        let exps = ExponentField::new(inst.p.build(&chart, "p")?, inst.q.build(&chart, "q")?)?;
        let weight = WeightField::new(inst.mu.build(&chart, "mu")?)?;
        let nonlinearity = match &inst.tabulated {
            Some(t) => Nonlinearity::tabulated(inst.beta, t.a_threshold, t.knots.clone(), t.values.clone())?,
            None => Nonlinearity::power(inst.beta, inst.a.build(&chart, "a")?)?,
        };
        Ok(Ingredients {
            metric,
            exps,
            weight,
            nonlinearity,
        })
    }

    pub fn constants(&self, ing: &Ingredients) -> Result<ConstantsEstimate> {
        match &self.constants.fixed {
            Some(f) => Ok(ConstantsEstimate::fixed(
                f.c_poincare,
                f.d_embed,
                f.c1_embed,
                ing.exps.q_minus,
                ing.exps.q_plus,
            )),
            None => estimate_constants(&ing.exps, &ing.weight, &ing.metric, self.constants.trials, self.seed),
        }
    }
}

impl Ingredients {
    pub fn instance(&self, lambda: f64) -> Result<ProblemInstance> {
        ProblemInstance::new(
            self.metric.clone(),
            self.exps.clone(),
            self.weight.clone(),
            lambda,
            self.nonlinearity.clone(),
        )
    }

    /// Thresholds do not depend on `λ`; a placeholder `λ = 1` is used.
    pub fn thresholds(&self, consts: &ConstantsEstimate) -> Result<Thresholds> {
        Ok(thresholds(&self.instance(1.0)?, consts))
    }
}
