//! Plain-text field files.
//!
//! ```text
//! nehari-field v1            (or: nehari-field v1 metric)
//! <dim> <sizes...>
//! <one node per line, row-major, last axis fastest>
//! ```
//!
//! Values are written with 17 significant digits so a write/read round trip
//! is bit-identical. Metric files carry the `n(n+1)/2` upper-triangle entries
//! of `g_ij` per node line.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::{Chart, MetricField, MetricSpec, ScalarField};
use crate::error::{Error, Result};

pub const FIELD_HEADER: &str = "nehari-field v1";
pub const METRIC_HEADER: &str = "nehari-field v1 metric";

pub fn format_field(u: &ScalarField) -> String {
    let chart = u.chart();
    let mut out = String::with_capacity(24 * u.len() + 64);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    push_shape(&mut out, chart.sizes());
    for v in u.values() {
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}

pub fn format_metric(g: &MetricField) -> String {
    let chart = g.chart();
    let dim = chart.dim();
    let mut out = String::new();
    out.push_str(METRIC_HEADER);
    out.push('\n');
    push_shape(&mut out, chart.sizes());
    for m in g.g() {
        let mut first = true;
        for i in 0..dim {
            for j in i..dim {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{:.16e}", m[i][j]).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn push_shape(out: &mut String, sizes: &[usize]) {
    write!(out, "{}", sizes.len()).unwrap();
    for s in sizes {
        write!(out, " {s}").unwrap();
    }
    out.push('\n');
}

pub fn write_field(path: &Path, u: &ScalarField) -> Result<()> {
    std::fs::write(path, format_field(u)).map_err(|e| Error::io(path, e))
}

pub fn write_metric(path: &Path, g: &MetricField) -> Result<()> {
    std::fs::write(path, format_metric(g)).map_err(|e| Error::io(path, e))
}

/// Reads a scalar field onto a unit-length chart of the stored shape.
pub fn read_field(path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(&text, path)
}

/// Reads a metric table; returns the chart sizes and a per-node spec.
pub fn read_metric(path: &Path) -> Result<(Vec<usize>, MetricSpec)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_metric(&text, path)
}

pub fn parse_field(text: &str, path: &Path) -> Result<ScalarField> {
    let (sizes, rows) = parse_body(text, path, FIELD_HEADER, |_| 1)?;
    let chart = Arc::new(
        Chart::unit(&sizes).map_err(|e| parse_err(path, 2, e.to_string()))?,
    );
    let values = rows.into_iter().map(|r| r[0]).collect();
    ScalarField::new(chart, values)
}

pub fn parse_metric(text: &str, path: &Path) -> Result<(Vec<usize>, MetricSpec)> {
    let (sizes, rows) = parse_body(text, path, METRIC_HEADER, |dim| dim * (dim + 1) / 2)?;
    Chart::unit(&sizes).map_err(|e| parse_err(path, 2, e.to_string()))?;
    let spec = MetricSpec::from_upper_triangles(sizes.len(), &rows)?;
    Ok((sizes, spec))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_body(
    text: &str,
    path: &Path,
    header: &str,
    per_node: impl Fn(usize) -> usize,
) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((n, h)) => {
            return Err(parse_err(path, n, format!("expected header `{header}`, found `{h}`")))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let (shape_line, shape) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing `dim sizes...` line"))?;
    let nums: Vec<usize> = shape
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, shape_line, format!("bad shape line: {e}")))?;
    let dim = *nums
        .first()
        .ok_or_else(|| parse_err(path, shape_line, "empty shape line"))?;
    if nums.len() != dim + 1 {
        return Err(parse_err(
            path,
            shape_line,
            format!("dimension {dim} needs {dim} sizes, found {}", nums.len() - 1),
        ));
    }
    let sizes = nums[1..].to_vec();
    let expected: usize = sizes.iter().product();
    let width = per_node(dim);

    let mut rows = Vec::with_capacity(expected);
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        if rows.len() == expected {
            return Err(parse_err(path, n, format!("more than {expected} node lines")));
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(path, n, format!("bad number: {e}")))?;
        if row.len() != width {
            return Err(parse_err(
                path,
                n,
                format!("expected {width} values, found {}", row.len()),
            ));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(path, n, "non-finite value"));
        }
        rows.push(row);
    }
    if rows.len() != expected {
        return Err(parse_err(
            path,
            text.lines().count(),
            format!("expected {expected} node lines, found {}", rows.len()),
        ));
    }
    Ok((sizes, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_torus;

    #[test]
    fn field_roundtrip_is_bit_identical() {
        let chart = Arc::new(Chart::unit(&[8, 4]).unwrap());
        let u = ScalarField::from_fn(chart, |x| (x[0] * 7.3).sin() / 3.0 + x[1].exp() * 1e-7);
        let text = format_field(&u);
        let back = parse_field(&text, Path::new("mem")).unwrap();
        assert_eq!(back.chart().sizes(), &[8, 4]);
        for (a, b) in u.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn metric_roundtrip() {
        let spec = MetricSpec::constant(&[vec![2.0, 0.25], vec![0.25, 1.5]]);
        let (_, g) = build_torus(&[4, 4], &spec).unwrap();
        let text = format_metric(&g);
        let (sizes, back) = parse_metric(&text, Path::new("mem")).unwrap();
        assert_eq!(sizes, vec![4, 4]);
        match back {
            MetricSpec::Table(t) => assert!(t.iter().all(|m| m[0][1] == 0.25 && m[1][1] == 1.5)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn errors_are_line_anchored() {
        let p = Path::new("f.field");
        let err = parse_field("nehari-field v1\n1 4\n0\n1\nx\n3\n", p).unwrap_err();
        assert_eq!(err.to_string().split(':').nth(1), Some("5"));
        let err = parse_field("nehari-field v2\n", p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_field("nehari-field v1\n1 4\n0\n1\n", p).unwrap_err();
        assert!(err.to_string().contains("expected 4 node lines"));
        let err = parse_field("nehari-field v1\n2 4\n", p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
