//! FFT helpers on periodic charts: band-limited random fields, band
//! projection and the Sobolev-type smoother `(s I + L)^{-1}` used for
//! preconditioning and power iteration.
//!
//! `L` is the exact symbol of the central-difference operator `D^T D`,
//! `Σ_d (sin(2π k_d / N_d) / h_d)^2`, so it agrees with the discrete gradient
//! used everywhere else. Its kernel contains the checkerboard modes
//! `k_d = N_d / 2`; band-limited fields stay below `N_d / 4` and never touch it.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::manifold::{Chart, ScalarField, MAX_DIM};

/// Cached per-axis FFT plans for one chart shape.
pub struct Spectral {
    chart: Arc<Chart>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    /// `Σ_d w_d (sin(2π k_d / N_d) / h_d)^2` per node of the spectrum.
    symbol: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("sizes", &self.chart.sizes())
            .finish()
    }
}

/// Signed wave number of FFT index `i` on an axis of `n` nodes.
pub fn wave_number(i: usize, n: usize) -> isize {
    if i <= n / 2 {
        i as isize
    } else {
        i as isize - n as isize
    }
}

impl Spectral {
    /// Plans for `chart`; `axis_weights` scale each axis term of the symbol
    /// (use the mean cometric diagonal for curved metrics, ones otherwise).
    pub fn new(chart: Arc<Chart>, axis_weights: [f64; MAX_DIM]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = chart
            .sizes()
            .iter()
            .map(|&n| planner.plan_fft_forward(n))
            .collect();
        let inverse = chart
            .sizes()
            .iter()
            .map(|&n| planner.plan_fft_inverse(n))
            .collect();
        let symbol = (0..chart.len())
            .map(|node| {
                let idx = chart.multi_index(node);
                (0..chart.dim())
                    .map(|d| {
                        let n = chart.sizes()[d];
                        let s = (2.0 * PI * idx[d] as f64 / n as f64).sin() / chart.spacings()[d];
                        axis_weights[d] * s * s
                    })
                    .sum()
            })
            .collect();
        Spectral {
            chart,
            forward,
            inverse,
            symbol,
        }
    }

    pub fn identity(chart: Arc<Chart>) -> Self {
        Spectral::new(chart, [1.0; MAX_DIM])
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let chart = &self.chart;
        let sizes = chart.sizes();
        let plans = if inverse { &self.inverse } else { &self.forward };
        let len = chart.len();
        for (d, plan) in plans.iter().enumerate() {
            let n = sizes[d];
            let stride: usize = sizes[d + 1..].iter().product();
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            for start in 0..len {
                // Line starts have index 0 along axis d.
                if (start / stride) % n != 0 {
                    continue;
                }
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
        if inverse {
            let scale = 1.0 / len as f64;
            for v in data.iter_mut() {
                *v *= scale;
            }
        }
    }

    /// Unnormalized forward transform of real node values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        data
    }

    /// Inverse transform (with `1/N` scaling), keeping the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, true);
        spectrum.into_iter().map(|c| c.re).collect()
    }

    /// True when every axis wave number is at most `band[d]` in magnitude.
    pub fn in_band(&self, node: usize, band: &[usize]) -> bool {
        let idx = self.chart.multi_index(node);
        (0..self.chart.dim())
            .all(|d| wave_number(idx[d], self.chart.sizes()[d]).unsigned_abs() <= band[d])
    }

    /// Applies the multiplier `m(k)` (indexed by spectrum node) to `values`.
    pub fn apply_multiplier(&self, values: &[f64], m: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (i, c) in spec.iter_mut().enumerate() {
            *c *= m(i);
        }
        self.inverse_real(spec)
    }

    /// `(shift I + scale L)^{-1} r`.
    pub fn smooth(&self, r: &[f64], shift: f64, scale: f64) -> Vec<f64> {
        self.apply_multiplier(r, |i| 1.0 / (shift + scale * self.symbol[i]))
    }

    /// Drops every Fourier mode outside `band`.
    pub fn project_band(&self, values: &[f64], band: &[usize]) -> Vec<f64> {
        self.apply_multiplier(values, |i| if self.in_band(i, band) { 1.0 } else { 0.0 })
    }

    /// `(shift I + L)^{-1}` restricted to `band`; with `zero_mean` the mean
    /// mode is removed (inverse Laplacian on zero-mean fields when `shift = 0`).
    pub fn band_inverse(&self, values: &[f64], band: &[usize], shift: f64, zero_mean: bool) -> Vec<f64> {
        self.apply_multiplier(values, |i| {
            if (zero_mean && i == 0) || !self.in_band(i, band) {
                return 0.0;
            }
            let s = shift + self.symbol[i];
            if s > 0.0 {
                1.0 / s
            } else {
                0.0
            }
        })
    }

    /// Random real field whose modes satisfy `|k_d| <= band[d]`.
    ///
    /// Coefficients are independent standard normals; the result is rescaled
    /// to unit max-norm and then shifted by `mean` (or made exactly zero-mean
    /// when `mean` is `None`).
    pub fn band_limited<R: Rng + ?Sized>(&self, rng: &mut R, band: &[usize], mean: Option<f64>) -> ScalarField {
        let len = self.chart.len();
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        for (i, c) in spec.iter_mut().enumerate() {
            // Draw for every node so the stream position does not depend on the band.
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if i != 0 && self.in_band(i, band) {
                *c = Complex64::new(re, im);
            }
        }
        let mut vals = self.inverse_real(spec);
        let max = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max > 0.0 {
            for v in vals.iter_mut() {
                *v /= max;
            }
        }
        let m = crate::sum::pairwise_sum(&vals) / len as f64;
        let target = mean.unwrap_or(0.0);
        for v in vals.iter_mut() {
            *v += target - m;
        }
        ScalarField::new(self.chart.clone(), vals).expect("finite band-limited field")
    }

    /// Default band: a quarter of the nodes per axis.
    pub fn quarter_band(&self) -> Vec<usize> {
        self.chart.sizes().iter().map(|&n| (n / 4).max(1)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{gradient, Chart};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_2d() {
        let chart = Arc::new(Chart::unit(&[8, 6]).unwrap());
        let sp = Spectral::identity(chart);
        let vals: Vec<f64> = (0..48).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let back = sp.inverse_real(sp.forward(&vals));
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_matches_central_difference_energy() {
        // ||D u||^2 = (1/N) Σ_k L(k) |û_k|^2 (Parseval).
        let chart = Arc::new(Chart::unit(&[16, 8]).unwrap());
        let sp = Spectral::identity(chart.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = sp.band_limited(&mut rng, &[8, 4], Some(0.3));
        let du = gradient(&u);
        let direct: f64 = du
            .components()
            .iter()
            .map(|c| c[0] * c[0] + c[1] * c[1])
            .sum();
        let spec = sp.forward(u.values());
        let parseval: f64 = spec
            .iter()
            .zip(sp.symbol())
            .map(|(c, s)| c.norm_sqr() * s)
            .sum::<f64>()
            / chart.len() as f64;
        assert!((direct - parseval).abs() < 1e-9 * direct);
    }

    #[test]
    fn band_limited_respects_band_and_mean() {
        let chart = Arc::new(Chart::unit(&[32]).unwrap());
        let sp = Spectral::identity(chart);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = sp.band_limited(&mut rng, &[8], None);
        let spec = sp.forward(u.values());
        for (i, c) in spec.iter().enumerate() {
            if !sp.in_band(i, &[8]) || i == 0 {
                assert!(c.norm() < 1e-10, "mode {i} leaked");
            }
        }
        let w = sp.band_limited(&mut rng, &[8], Some(1.0));
        let mean: f64 = w.values().iter().sum::<f64>() / 32.0;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_inverts_shifted_operator() {
        let chart = Arc::new(Chart::unit(&[16]).unwrap());
        let sp = Spectral::identity(chart);
        let r: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).cos()).collect();
        let x = sp.smooth(&r, 2.0, 0.5);
        let back = sp.apply_multiplier(&x, |i| 2.0 + 0.5 * sp.symbol()[i]);
        for (a, b) in r.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
