use std::sync::Arc;

use super::{Chart, MAX_DIM};
use crate::error::{Error, Result};

/// Real values sampled at every node of a chart.
#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps node values, rejecting length mismatches and non-finite entries.
    pub fn new(chart: Arc<Chart>, values: Vec<f64>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a chart with {} nodes",
                values.len(),
                chart.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(ScalarField { chart, values })
    }

    pub fn constant(chart: Arc<Chart>, c: f64) -> Self {
        let n = chart.len();
        ScalarField {
            chart,
            values: vec![c; n],
        }
    }

    pub fn zeros(chart: Arc<Chart>) -> Self {
        Self::constant(chart, 0.0)
    }

    /// Samples `f` at the chart coordinates of every node.
    pub fn from_fn<F: Fn(&[f64; MAX_DIM]) -> f64>(chart: Arc<Chart>, f: F) -> Self {
        let values = (0..chart.len()).map(|i| f(&chart.coords(i))).collect();
        ScalarField { chart, values }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        self.map(|v| s * v)
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        debug_assert_eq!(self.len(), other.len());
        ScalarField {
            chart: self.chart.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Cyclic shift by `offset` nodes along `axis`: `out(x) = self(x - offset)`.
    pub fn shifted(&self, axis: usize, offset: isize) -> ScalarField {
        let mut values = vec![0.0; self.len()];
        for (node, v) in self.values.iter().enumerate() {
            values[self.chart.shifted(node, axis, offset)] = *v;
        }
        ScalarField {
            chart: self.chart.clone(),
            values,
        }
    }
}

/// Chart-coordinate covector per node (`∂_i u`); unused components are zero.
#[derive(Debug, Clone)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<[f64; MAX_DIM]>,
}

impl VectorField {
    pub(crate) fn from_components(chart: Arc<Chart>, comps: Vec<[f64; MAX_DIM]>) -> Self {
        debug_assert_eq!(chart.len(), comps.len());
        VectorField { chart, comps }
    }

    pub fn new(chart: Arc<Chart>, comps: Vec<[f64; MAX_DIM]>) -> Result<Self> {
        if comps.len() != chart.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} covectors for a chart with {} nodes",
                comps.len(),
                chart.len()
            )));
        }
        if let Some(node) = comps
            .iter()
            .position(|c| c.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite { node });
        }
        Ok(VectorField { chart, comps })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[[f64; MAX_DIM]] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Cyclic shift by `offset` nodes along `axis`.
    pub fn shifted(&self, axis: usize, offset: isize) -> VectorField {
        let mut comps = vec![[0.0; MAX_DIM]; self.len()];
        for (node, c) in self.comps.iter().enumerate() {
            comps[self.chart.shifted(node, axis, offset)] = *c;
        }
        VectorField {
            chart: self.chart.clone(),
            comps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let chart = Arc::new(Chart::unit(&[4]).unwrap());
        assert!(ScalarField::new(chart.clone(), vec![0.0; 3]).is_err());
        let err = ScalarField::new(chart, vec![0.0, f64::NAN, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { node: 1 }));
    }

    #[test]
    fn shift_moves_values_forward() {
        let chart = Arc::new(Chart::unit(&[4]).unwrap());
        let u = ScalarField::new(chart, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(u.shifted(0, 1).values(), &[4.0, 1.0, 2.0, 3.0]);
    }
}
