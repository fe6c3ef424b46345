use super::ScalarField;

/// Distance surrogate recorded with every log-Hölder report.
pub const DISTANCE_SURROGATE: &str = "periodic euclidean chart distance";

/// Pair scans above this node count run on a deterministic subsample.
const MAX_SCAN_NODES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LogHolderReport {
    /// Least `c` with `|s(x) - s(y)| <= c / log(e + 1/d(x, y))` over scanned pairs.
    pub constant: f64,
    /// Node pair attaining `constant`.
    pub worst_pair: (usize, usize),
    pub pass: bool,
    pub nodes_scanned: usize,
    pub distance: &'static str,
}

/// Scans node pairs for the log-Hölder modulus of `s`; passes when the
/// estimated constant is at most `bound`.
pub fn log_holder_check(s: &ScalarField, bound: f64) -> LogHolderReport {
    let chart = s.chart();
    let vals = s.values();
    let n = vals.len();
    let stride = n.div_ceil(MAX_SCAN_NODES).max(1);
    let nodes: Vec<usize> = (0..n).step_by(stride).collect();

    let mut constant = 0.0;
    let mut worst_pair = (0, 0);
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let diff = (vals[i] - vals[j]).abs();
            if diff == 0.0 {
                continue;
            }
            let d = chart.periodic_distance(i, j);
            let c = diff * (std::f64::consts::E + 1.0 / d).ln();
            if c > constant {
                constant = c;
                worst_pair = (i, j);
            }
        }
    }
    LogHolderReport {
        constant,
        worst_pair,
        pass: constant <= bound,
        nodes_scanned: nodes.len(),
        distance: DISTANCE_SURROGATE,
    }
}
