//! Minimal standalone SVG line charts: no fonts embedded, no external
//! references, log or linear axes, one polyline per series. Output depends
//! only on the data, so identical inputs render identical files.

use crate::error::CliError;
use std::fmt::Write as _;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 90.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 64.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

struct AxisScale {
    min: f64,
    max: f64,
    log: bool,
}

impl AxisScale {
    fn project(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.log {
            (v.log10(), self.min.log10(), self.max.log10())
        } else {
            (v, self.min, self.max)
        };
        if hi == lo {
            0.5
        } else {
            (v - lo) / (hi - lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let lo = self.min.log10().ceil() as i64;
            let hi = self.max.log10().floor() as i64;
            if hi < lo {
                return vec![self.min, self.max];
            }
            let span = (hi - lo).max(1);
            let step = (span as f64 / 10.0).ceil() as i64;
            (lo..=hi)
                .step_by(step.max(1) as usize)
                .map(|d| 10f64.powi(d as i32))
                .collect()
        } else {
            (0..=5)
                .map(|i| self.min + (self.max - self.min) * i as f64 / 5.0)
                .collect()
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs();
    if (1e-3..1e4).contains(&mag) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn usable(v: f64, log: bool) -> bool {
    v.is_finite() && (!log || v > 0.0)
}

/// Renders the chart, or fails if no point survives the axis filters
/// (non-finite everywhere, or nothing positive on a log axis).
pub fn render(chart: &Chart) -> Result<String, CliError> {
    // Log y only makes sense if something positive will be drawn; fall back
    // to linear rather than render an empty panel.
    let any_pos_y = chart
        .series
        .iter()
        .flat_map(|s| &s.points)
        .any(|&(_, y)| y > 0.0);
    let log_y = chart.log_y && any_pos_y;
    let log_x = chart.log_x;

    let kept: Vec<Vec<(f64, f64)>> = chart
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .copied()
                .filter(|&(x, y)| usable(x, log_x) && usable(y, log_y))
                .collect()
        })
        .collect();
    let all: Vec<(f64, f64)> = kept.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err(CliError::EmptyPlot);
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_min == x_max {
        let pad = if x_min == 0.0 { 1.0 } else { x_min.abs() * 0.5 };
        x_min -= pad;
        x_max += pad;
        if log_x {
            x_min = x_min.max(x_max * 1e-3);
        }
    }
    if y_min == y_max {
        let pad = if y_min == 0.0 { 1.0 } else { y_min.abs() * 0.5 };
        y_min -= pad;
        y_max += pad;
        if log_y {
            y_min = y_min.max(y_max * 1e-3);
        }
    }
    let xs = AxisScale { min: x_min, max: x_max, log: log_x };
    let ys = AxisScale { min: y_min, max: y_max, log: log_y };

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + xs.project(x) * plot_w;
    let py = |y: f64| MARGIN_T + (1.0 - ys.project(y)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg version="1.1" width="{WIDTH}" height="{HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="monospace" font-size="16">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        escape(&chart.title)
    );

    // frame
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333333" stroke-width="1"/>"##
    );

    // ticks and grid lines
    for t in xs.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="monospace" font-size="11">{}</text>"#,
            MARGIN_T + plot_h + 18.0,
            tick_label(t)
        );
    }
    for t in ys.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="monospace" font-size="11">{}</text>"#,
            MARGIN_L - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="monospace" font-size="13">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 16.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" text-anchor="middle" font-family="monospace" font-size="13" transform="rotate(-90 20 {:.1})">{}</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(&chart.y_label)
    );

    // series polylines and legend
    for (i, (series, points)) in chart.series.iter().zip(&kept).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut path = String::new();
        for (j, &(x, y)) in points.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2} {:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<path class="series" d="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            path.trim_end()
        );
        let ly = MARGIN_T + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
            MARGIN_L + plot_w - 170.0,
            MARGIN_L + plot_w - 146.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12">{}</text>"#,
            MARGIN_L + plot_w - 140.0,
            ly + 4.0,
            escape(&series.label)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
