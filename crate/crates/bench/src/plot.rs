//! Gradient-norm plots as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use riemann_inexact::solver::IterRecord;

use crate::trace_io::{write_bytes, TraceIoError};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(k, ‖grad f(x_k)‖)`
    pub points: Vec<(usize, f64)>,
}

impl Series {
    pub fn from_records(label: impl Into<String>, records: &[IterRecord]) -> Self {
        Series {
            label: label.into(),
            points: records.iter().map(|r| (r.k, r.grad_norm)).collect(),
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// Renders the series on log-scaled y axes. Non-positive and non-finite
/// values are left out of the paths.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let usable = |p: &&(usize, f64)| p.1 > 0.0 && p.1.is_finite();
    let logs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().filter(usable).map(|p| p.1.log10()))
        .collect();
    let (mut lo, mut hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if logs.is_empty() {
        (lo, hi) = (0.0, 1.0);
    }
    lo = lo.floor();
    hi = hi.ceil();
    if hi - lo < 1.0 {
        lo -= 0.5;
        hi += 0.5;
    }
    let kmax = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(0)
        .max(1) as f64;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |k: f64| LEFT + pw * k / kmax;
    let sy = |v: f64| TOP + ph * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="18" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let first = lo.ceil() as i32;
    let last = hi.floor() as i32;
    for e in first..=last {
        let y = sy(e as f64);
        let _ = writeln!(
            svg,
            r##"<line class="grid" x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for i in 0..=4 {
        let k = kmax * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(k),
            TOP + ph + 18.0,
            k.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">gradient norm</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (j, p) in s.points.iter().filter(usable).enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if j == 0 { "M" } else { " L" },
                sx(p.0 as f64),
                sy(p.1.log10())
            );
        }
        let _ = writeln!(
            svg,
            r#"<path class="series" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = LEFT + pw - 170.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            lx + 26.0,
            ly,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_plot(path: &Path, title: &str, series: &[Series]) -> Result<(), TraceIoError> {
    write_bytes(path, render_svg(title, series).as_bytes())
}
