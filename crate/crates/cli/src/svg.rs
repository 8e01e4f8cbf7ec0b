//! Minimal deterministic SVG plots: fixed viewbox, no timestamps, one path
//! per series with a stable style class. Good enough for profile and curve
//! figures that diff cleanly between runs.

use std::fmt;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Close the path back to the first point (plane curves).
    pub closed: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, closed: false }
    }

    pub fn closed_curve(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, closed: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SvgError {
    EmptySeries,
}

impl fmt::Display for SvgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvgError::EmptySeries => write!(f, "nothing to plot"),
        }
    }
}

impl std::error::Error for SvgError {}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    (0..=4).map(|k| lo + span * k as f64 / 4.0).collect()
}

/// Renders labeled series into a fixed-viewbox SVG document.
pub fn export_svg(series: &[Series]) -> Result<String, SvgError> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(SvgError::EmptySeries);
    }
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if x_hi == x_lo {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi == y_lo {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad_y = 0.05 * (y_hi - y_lo);
    y_lo -= pad_y;
    y_hi += pad_y;

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    out.push_str("<style>\n");
    out.push_str(".axis { stroke: #333333; stroke-width: 1; }\n");
    out.push_str(".tick { font: 12px monospace; fill: #333333; }\n");
    out.push_str(".label { font: 13px monospace; fill: #000000; }\n");
    for (i, color) in PALETTE.iter().enumerate() {
        let _ = writeln!(out, ".s{i} {{ stroke: {color}; stroke-width: 1.5; fill: none; }}");
    }
    out.push_str("</style>\n");
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");

    // axes
    let (ax0, ay0) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{}\" y2=\"{ay0}\"/>",
        WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax0}\" y2=\"{MARGIN}\"/>"
    );
    for t in nice_ticks(x_lo, x_hi) {
        let (px, _) = to_px(t, y_lo);
        let _ = writeln!(
            out,
            "<line class=\"axis\" x1=\"{px:.2}\" y1=\"{ay0}\" x2=\"{px:.2}\" y2=\"{:.2}\"/>",
            ay0 + 5.0
        );
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{t:.3}</text>",
            ay0 + 20.0
        );
    }
    for t in nice_ticks(y_lo, y_hi) {
        let (_, py) = to_px(x_lo, t);
        let _ = writeln!(
            out,
            "<line class=\"axis\" x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{ax0}\" y2=\"{py:.2}\"/>",
            ax0 - 5.0
        );
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{:.2}\" y=\"{py:.2}\" text-anchor=\"end\">{t:.3}</text>",
            ax0 - 10.0
        );
    }

    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let class = i % PALETTE.len();
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = to_px(x, y);
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{px:.8} {py:.8} ");
        }
        if s.closed {
            d.push('Z');
        }
        let _ = writeln!(out, "<path class=\"s{class}\" d=\"{}\"/>", d.trim_end());
        let _ = writeln!(
            out,
            "<text class=\"label\" x=\"{:.2}\" y=\"{:.2}\" fill=\"{}\">{}</text>",
            WIDTH - MARGIN - 150.0,
            MARGIN + 18.0 * (i as f64 + 1.0),
            PALETTE[class],
            s.label
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_draws_a_horizontal_path() {
        let pts: Vec<(f64, f64)> = (0..50).map(|j| (j as f64 * 0.1, 2.5)).collect();
        let svg = export_svg(&[Series::line("const", pts)]).unwrap();
        assert!(svg.contains("<path class=\"s0\""));
        // all path y-coordinates identical
        let path_line = svg.lines().find(|l| l.contains("class=\"s0\"")).unwrap();
        let ys: Vec<&str> = path_line
            .split_whitespace()
            .filter(|tok| !tok.contains('M') && !tok.contains('L') && tok.chars().next().is_some_and(|c| c.is_ascii_digit()))
            .collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]), "path not horizontal: {path_line}");
    }

    #[test]
    fn unit_circle_round_trips_through_pixel_space() {
        let n = 256;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let svg = export_svg(&[Series::closed_curve("circle", pts.clone())]).unwrap();
        assert!(svg.contains('Z'));
        // parse the plotted points back through the inverse of the affine
        // pixel map and check radial deviation against the nominal radius
        let path_line = svg.lines().find(|l| l.contains("class=\"s0\"")).unwrap();
        let d_start = path_line.find("d=\"").unwrap() + 3;
        let d_end = path_line[d_start..].find('"').unwrap() + d_start;
        let d = &path_line[d_start..d_end];
        let tokens: Vec<f64> = d
            .replace(['M', 'L', 'Z'], " ")
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        // data ranges: x in [-1, 1], y in [-1.05, 1.05] after the 5% pad
        let max_dev = tokens
            .chunks(2)
            .map(|px| {
                let x = (px[0] - MARGIN) / (WIDTH - 2.0 * MARGIN) * 2.0 - 1.0;
                let y = (HEIGHT - MARGIN - px[1]) / (HEIGHT - 2.0 * MARGIN) * 2.1 - 1.05;
                ((x * x + y * y).sqrt() - 1.0).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(max_dev < 1e-9, "radial deviation {max_dev}");
    }

    #[test]
    fn two_series_get_distinct_classes() {
        let a = Series::line("a", vec![(0.0, 0.0), (1.0, 1.0)]);
        let b = Series::line("b", vec![(0.0, 1.0), (1.0, 0.0)]);
        let svg = export_svg(&[a, b]).unwrap();
        assert!(svg.contains("class=\"s0\""));
        assert!(svg.contains("class=\"s1\""));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(export_svg(&[]), Err(SvgError::EmptySeries));
        assert_eq!(export_svg(&[Series::line("e", vec![])]), Err(SvgError::EmptySeries));
    }

    #[test]
    fn output_is_deterministic() {
        let pts: Vec<(f64, f64)> = (0..20).map(|j| (j as f64, (j as f64).sin())).collect();
        let a = export_svg(&[Series::line("s", pts.clone())]).unwrap();
        let b = export_svg(&[Series::line("s", pts)]).unwrap();
        assert_eq!(a, b);
    }
}
