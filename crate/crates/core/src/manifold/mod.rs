//! Periodic chart grids with a Riemannian metric.
//!
//! A compact manifold without boundary is modelled as a flat torus chart
//! `[0, L_1) x ... x [0, L_n)` sampled on a uniform grid, carrying a
//! symmetric positive-definite metric tensor `g_ij` per node. Integrals use
//! the rectangle rule against `dv_g = sqrt(det g) dx`, gradients are
//! second-order central differences with periodic wrap.

mod field;
mod holder;
pub mod io;
mod metric;

use std::sync::Arc;

pub use field::{ScalarField, VectorField};
pub use holder::{log_holder_check, LogHolderReport, DISTANCE_SURROGATE};
pub use metric::{Mat3, MetricField, MetricSpec};

use crate::error::{Error, Result};
use crate::sum::pairwise_sum_by;

pub const MAX_DIM: usize = 3;
pub const MIN_NODES_PER_AXIS: usize = 4;

/// Uniform periodic grid on a chart of the n-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    sizes: Vec<usize>,
    lengths: Vec<f64>,
    spacings: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
}

impl Chart {
    /// Chart with the given node counts per axis and side lengths.
    pub fn new(sizes: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = sizes.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidChart(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if lengths.len() != dim {
            return Err(Error::InvalidChart(format!(
                "{} lengths given for a {dim}-dimensional chart",
                lengths.len()
            )));
        }
        if let Some(&s) = sizes.iter().find(|&&s| s < MIN_NODES_PER_AXIS) {
            return Err(Error::InvalidChart(format!(
                "every axis needs at least {MIN_NODES_PER_AXIS} nodes, got {s}"
            )));
        }
        if let Some(&l) = lengths.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidChart(format!("side length must be > 0, got {l}")));
        }
        let mut strides = vec![1; dim];
        for d in (0..dim.saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * sizes[d + 1];
        }
        let spacings = sizes
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| l / n as f64)
            .collect();
        Ok(Chart {
            sizes: sizes.to_vec(),
            lengths: lengths.to_vec(),
            spacings,
            strides,
            len: sizes.iter().product(),
        })
    }

    /// Unit torus `[0,1)^n`.
    pub fn unit(sizes: &[usize]) -> Result<Self> {
        Chart::new(sizes, &vec![1.0; sizes.len()])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coordinate volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacings.iter().product()
    }

    /// Coordinate (flat) volume of the chart.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Row-major multi-index of a node; unused axes are zero.
    pub fn multi_index(&self, node: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        let mut rest = node;
        for d in 0..self.dim() {
            idx[d] = rest / self.strides[d];
            rest %= self.strides[d];
        }
        idx
    }

    pub fn node(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.strides)
            .map(|(&i, &s)| i * s)
            .sum()
    }

    /// Chart coordinates of a node; unused axes are zero.
    pub fn coords(&self, node: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(node);
        let mut x = [0.0; MAX_DIM];
        for d in 0..self.dim() {
            x[d] = idx[d] as f64 * self.spacings[d];
        }
        x
    }

    /// Node one step forward (`+1`) or backward (`-1`) along `axis`, wrapping.
    pub fn neighbor(&self, node: usize, axis: usize, forward: bool) -> usize {
        let n = self.sizes[axis];
        let stride = self.strides[axis];
        let i = (node / stride) % n;
        let j = if forward { (i + 1) % n } else { (i + n - 1) % n };
        node - i * stride + j * stride
    }

    /// Node shifted by `offset` grid steps along `axis`, wrapping.
    pub fn shifted(&self, node: usize, axis: usize, offset: isize) -> usize {
        let n = self.sizes[axis] as isize;
        let stride = self.strides[axis];
        let i = ((node / stride) % self.sizes[axis]) as isize;
        let j = (i + offset).rem_euclid(n) as usize;
        node - i as usize * stride + j * stride
    }

    /// Periodic Euclidean chart distance between two nodes.
    pub fn periodic_distance(&self, a: usize, b: usize) -> f64 {
        let ia = self.multi_index(a);
        let ib = self.multi_index(b);
        let mut acc = 0.0;
        for d in 0..self.dim() {
            let n = self.sizes[d];
            let di = ia[d].abs_diff(ib[d]);
            let steps = di.min(n - di) as f64;
            let dx = steps * self.spacings[d];
            acc += dx * dx;
        }
        acc.sqrt()
    }
}

/// Builds a torus chart with unit side lengths and the requested metric.
pub fn build_torus(sizes: &[usize], metric: &MetricSpec) -> Result<(Arc<Chart>, MetricField)> {
    build_torus_with_lengths(sizes, &vec![1.0; sizes.len()], metric)
}

pub fn build_torus_with_lengths(
    sizes: &[usize],
    lengths: &[f64],
    metric: &MetricSpec,
) -> Result<(Arc<Chart>, MetricField)> {
    let chart = Arc::new(Chart::new(sizes, lengths)?);
    let metric = MetricField::new(chart.clone(), metric)?;
    Ok((chart, metric))
}

/// Central-difference chart gradient `∂_i u` with periodic wrap.
pub fn gradient(u: &ScalarField) -> VectorField {
    let chart = u.chart();
    let vals = u.values();
    let dim = chart.dim();
    let mut comps = vec![[0.0; MAX_DIM]; chart.len()];
    for (node, c) in comps.iter_mut().enumerate() {
        for (d, cd) in c.iter_mut().enumerate().take(dim) {
            let fwd = chart.neighbor(node, d, true);
            let bwd = chart.neighbor(node, d, false);
            *cd = (vals[fwd] - vals[bwd]) / (2.0 * chart.spacings[d]);
        }
    }
    VectorField::from_components(chart.clone(), comps)
}

/// Riemannian length `sqrt(g^{ij} v_i v_j)` of a covector field, per node.
pub fn grad_norm_g(v: &VectorField, g: &MetricField) -> Result<ScalarField> {
    check_same_chart(v.chart(), g.chart())?;
    let values = (0..v.len())
        .map(|i| g.covector_norm(i, &v.components()[i]))
        .collect();
    ScalarField::new(v.chart().clone(), values)
}

/// Rectangle-rule integral `∫ w dv_g` with pairwise reduction.
pub fn integrate(w: &ScalarField, g: &MetricField) -> Result<f64> {
    check_same_chart(w.chart(), g.chart())?;
    let vals = w.values();
    let weights = g.node_weights();
    Ok(pairwise_sum_by(vals.len(), |i| vals[i] * weights[i]))
}

pub(crate) fn check_same_chart(a: &Chart, b: &Chart) -> Result<()> {
    if a.sizes() != b.sizes() || a.lengths() != b.lengths() {
        return Err(Error::ShapeMismatch(format!(
            "chart {:?}/{:?} vs {:?}/{:?}",
            a.sizes(),
            a.lengths(),
            b.sizes(),
            b.lengths()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_1d(n: usize) -> (Arc<Chart>, MetricField) {
        build_torus(&[n], &MetricSpec::Identity).unwrap()
    }

    #[test]
    fn chart_rejects_small_or_bad_grids() {
        assert!(Chart::unit(&[3]).is_err());
        assert!(Chart::unit(&[]).is_err());
        assert!(Chart::unit(&[4, 4, 4, 4]).is_err());
        assert!(Chart::new(&[8], &[0.0]).is_err());
        assert!(Chart::new(&[8], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn index_roundtrip_and_neighbors() {
        let chart = Chart::unit(&[4, 5, 6]).unwrap();
        for node in 0..chart.len() {
            let idx = chart.multi_index(node);
            assert_eq!(chart.node(&idx), node);
            for d in 0..3 {
                let f = chart.neighbor(node, d, true);
                assert_eq!(chart.neighbor(f, d, false), node);
                assert_eq!(chart.shifted(node, d, 1), f);
            }
        }
        assert_eq!(chart.neighbor(3 * 30, 0, true), 0);
    }

    #[test]
    fn periodic_distance_wraps() {
        let chart = Chart::unit(&[10]).unwrap();
        assert!((chart.periodic_distance(0, 9) - 0.1).abs() < 1e-15);
        assert!((chart.periodic_distance(2, 7) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_metric_has_unit_volume_density() {
        let (_, g) = unit_1d(64);
        assert!(g.sqrt_det().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn scalar_metric_four_doubles_volume() {
        let (chart, g) = build_torus(&[64], &MetricSpec::constant(&[vec![4.0]])).unwrap();
        assert!(g.sqrt_det().iter().all(|&s| (s - 2.0).abs() < 1e-15));
        let one = ScalarField::constant(chart, 1.0);
        assert!((integrate(&one, &g).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn non_spd_metric_is_rejected_with_node() {
        let mut table = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]; 16];
        table[5] = [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let err = build_torus(&[4, 4], &MetricSpec::Table(table)).unwrap_err();
        match err {
            Error::NotSpd { node, .. } => assert_eq!(node, 5),
            other => panic!("unexpected {other:?}"),
        }
        let asym = MetricSpec::constant(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(build_torus(&[4, 4], &asym).is_err());
    }

    #[test]
    fn integrate_unit_and_sine() {
        let (chart, g) = unit_1d(64);
        let one = ScalarField::constant(chart.clone(), 1.0);
        assert!((integrate(&one, &g).unwrap() - 1.0).abs() < 1e-15);
        let s = ScalarField::from_fn(chart, |x| (2.0 * PI * x[0]).sin());
        assert!(integrate(&s, &g).unwrap().abs() < 1e-14);
    }

    #[test]
    fn gradient_of_constant_is_exactly_zero() {
        let (chart, _) = build_torus(&[8, 6], &MetricSpec::Identity).unwrap();
        let c = ScalarField::constant(chart, 3.25);
        let v = gradient(&c);
        assert!(v.components().iter().all(|c| c.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn gradient_of_sine_within_truncation_bound() {
        let n = 64;
        let (chart, _) = unit_1d(n);
        let h = 1.0 / n as f64;
        let u = ScalarField::from_fn(chart, |x| (2.0 * PI * x[0]).sin());
        let v = gradient(&u);
        let bound = (2.0 * PI).powi(3) * h * h / 6.0;
        for (i, c) in v.components().iter().enumerate() {
            let x = i as f64 * h;
            let exact = 2.0 * PI * (2.0 * PI * x).cos();
            assert!((c[0] - exact).abs() <= bound, "node {i}");
        }
    }

    #[test]
    fn gradient_2d_product_of_sines() {
        let n = 32;
        let (chart, _) = build_torus(&[n, n], &MetricSpec::Identity).unwrap();
        let u = ScalarField::from_fn(chart.clone(), |x| {
            (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
        });
        let v = gradient(&u);
        let h = 1.0 / n as f64;
        let bound = (2.0 * PI).powi(3) * h * h / 6.0;
        for node in 0..chart.len() {
            let x = chart.coords(node);
            let ex = 2.0 * PI * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin();
            let ey = 2.0 * PI * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos();
            let c = v.components()[node];
            assert!((c[0] - ex).abs() <= bound);
            assert!((c[1] - ey).abs() <= bound);
        }
    }

    #[test]
    fn grad_norm_examples() {
        let (chart, g) = build_torus(&[4, 4], &MetricSpec::Identity).unwrap();
        let v = VectorField::from_components(chart, vec![[3.0, 4.0, 0.0]; 16]);
        let n = grad_norm_g(&v, &g).unwrap();
        assert!(n.values().iter().all(|&x| (x - 5.0).abs() < 1e-15));

        let (chart, g) = build_torus(&[4], &MetricSpec::constant(&[vec![4.0]])).unwrap();
        let v = VectorField::from_components(chart, vec![[2.0, 0.0, 0.0]; 4]);
        let n = grad_norm_g(&v, &g).unwrap();
        assert!(n.values().iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn shapes_must_agree() {
        let (c1, _) = unit_1d(8);
        let (_, g2) = unit_1d(16);
        let w = ScalarField::constant(c1, 1.0);
        assert!(integrate(&w, &g2).is_err());
    }
}
