use std::sync::Arc;

use super::{Chart, MAX_DIM};
use crate::error::{Error, Result};

/// Dense 3x3 matrix; only the leading `dim x dim` block is meaningful.
pub type Mat3 = [[f64; MAX_DIM]; MAX_DIM];

const SYMMETRY_TOL: f64 = 1e-12;

/// How the metric tensor is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    Identity,
    /// Same SPD matrix at every node.
    Constant(Mat3),
    /// One SPD matrix per node, row-major node order.
    Table(Vec<Mat3>),
}

impl MetricSpec {
    /// Constant metric from nested rows; missing entries are zero.
    pub fn constant(rows: &[Vec<f64>]) -> Self {
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in rows.iter().enumerate().take(MAX_DIM) {
            for (j, &v) in row.iter().enumerate().take(MAX_DIM) {
                m[i][j] = v;
            }
        }
        MetricSpec::Constant(m)
    }

    /// Per-node table from upper-triangle rows (`n(n+1)/2` values per node).
    pub fn from_upper_triangles(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let per_node = dim * (dim + 1) / 2;
        let mut table = Vec::with_capacity(rows.len());
        for (node, row) in rows.iter().enumerate() {
            if row.len() != per_node {
                return Err(Error::ShapeMismatch(format!(
                    "metric node {node} has {} entries, expected {per_node}",
                    row.len()
                )));
            }
            let mut m = [[0.0; MAX_DIM]; MAX_DIM];
            let mut k = 0;
            for i in 0..dim {
                for j in i..dim {
                    m[i][j] = row[k];
                    m[j][i] = row[k];
                    k += 1;
                }
            }
            table.push(m);
        }
        Ok(MetricSpec::Table(table))
    }
}

/// Metric tensor per node with cached `sqrt(det g)`, `g^{ij}` and quadrature weights.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Arc<Chart>,
    g: Vec<Mat3>,
    inv: Vec<Mat3>,
    sqrt_det: Vec<f64>,
    weights: Vec<f64>,
}

impl MetricField {
    pub fn new(chart: Arc<Chart>, spec: &MetricSpec) -> Result<Self> {
        let dim = chart.dim();
        let n = chart.len();
        let g: Vec<Mat3> = match spec {
            MetricSpec::Identity => {
                let mut m = [[0.0; MAX_DIM]; MAX_DIM];
                for (d, row) in m.iter_mut().enumerate().take(dim) {
                    row[d] = 1.0;
                }
                vec![m; n]
            }
            MetricSpec::Constant(m) => vec![*m; n],
            MetricSpec::Table(t) => {
                if t.len() != n {
                    return Err(Error::ShapeMismatch(format!(
                        "metric table has {} nodes, chart has {n}",
                        t.len()
                    )));
                }
                t.clone()
            }
        };
        let mut inv = Vec::with_capacity(n);
        let mut sqrt_det = Vec::with_capacity(n);
        for (node, m) in g.iter().enumerate() {
            let (i, s) = invert_spd(m, dim).map_err(|reason| Error::NotSpd { node, reason })?;
            inv.push(i);
            sqrt_det.push(s);
        }
        let cell = chart.cell_volume();
        let weights = sqrt_det.iter().map(|s| s * cell).collect();
        Ok(MetricField {
            chart,
            g,
            inv,
            sqrt_det,
            weights,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self) -> &[Mat3] {
        &self.g
    }

    pub fn inverse(&self) -> &[Mat3] {
        &self.inv
    }

    pub fn sqrt_det(&self) -> &[f64] {
        &self.sqrt_det
    }

    /// Rectangle-rule weights `sqrt(det g) * cell volume` per node.
    pub fn node_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Riemannian volume of the chart.
    pub fn volume(&self) -> f64 {
        crate::sum::pairwise_sum(&self.weights)
    }

    /// `g^{ij} v_i w_j` at a node.
    #[inline]
    pub fn cometric(&self, node: usize, v: &[f64; MAX_DIM], w: &[f64; MAX_DIM]) -> f64 {
        let inv = &self.inv[node];
        let dim = self.dim();
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += inv[i][j] * v[i] * w[j];
            }
        }
        acc
    }

    /// `sqrt(g^{ij} v_i v_j)` at a node, clamped at zero against rounding.
    #[inline]
    pub fn covector_norm(&self, node: usize, v: &[f64; MAX_DIM]) -> f64 {
        self.cometric(node, v, v).max(0.0).sqrt()
    }

    /// `g^{ij} v_j` at a node.
    #[inline]
    pub fn raise(&self, node: usize, v: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
        let inv = &self.inv[node];
        let dim = self.dim();
        let mut out = [0.0; MAX_DIM];
        for i in 0..dim {
            for j in 0..dim {
                out[i] += inv[i][j] * v[j];
            }
        }
        out
    }

    /// Average of the diagonal cometric entries per axis.
    pub fn mean_inverse_diagonal(&self) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        let n = self.inv.len() as f64;
        for (d, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = crate::sum::pairwise_sum_by(self.inv.len(), |i| self.inv[i][d][d]) / n;
        }
        out
    }

    /// True when every node carries the identity matrix.
    pub fn is_identity(&self) -> bool {
        let dim = self.dim();
        self.g.iter().all(|m| {
            (0..dim).all(|i| (0..dim).all(|j| m[i][j] == if i == j { 1.0 } else { 0.0 }))
        })
    }
}

/// Cholesky-based SPD inverse; returns `(g^{-1}, sqrt(det g))`.
fn invert_spd(m: &Mat3, dim: usize) -> std::result::Result<(Mat3, f64), String> {
    let scale = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| m[i][j].abs())
        .fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err("non-finite entry".into());
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOL * scale.max(1.0) {
                return Err(format!("not symmetric in entry ({i},{j})"));
            }
        }
    }
    let mut l = [[0.0; MAX_DIM]; MAX_DIM];
    for j in 0..dim {
        let mut diag = m[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if !(diag > 0.0) {
            return Err(format!("non-positive pivot {diag:e} in column {j}"));
        }
        l[j][j] = diag.sqrt();
        for i in (j + 1)..dim {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    let sqrt_det: f64 = (0..dim).map(|i| l[i][i]).product();

    // Solve L L^T x = e_c column by column.
    let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
    for c in 0..dim {
        let mut y = [0.0; MAX_DIM];
        for i in 0..dim {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [0.0; MAX_DIM];
        for i in (0..dim).rev() {
            let mut s = y[i];
            for k in (i + 1)..dim {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        for i in 0..dim {
            inv[i][c] = x[i];
        }
    }
    // Symmetrize to remove rounding asymmetry.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let s = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    Ok((inv, sqrt_det))
}
