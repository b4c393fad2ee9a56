//! Standalone SVG plots of proportion trajectories.
//!
//! The layout mirrors the usual presentation of these experiments: step index
//! on the x axis, the amber proportion on the y axis over `[0, 1]`, one
//! polyline per trajectory and a horizontal red reference line at each
//! theoretical limit point. Absorbed trajectories are truncated at their last
//! in-range proportion. The output references no external resources.

use std::io::{self, Write};

use crate::urn::Trajectory;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 45.0;

const SERIES_COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];

/// In-range proportions of one trajectory: all of them for a survivor, the
/// first `tau` points for an absorbed run.
fn plotted_points(trajectory: &Trajectory) -> &[f64] {
    let p = trajectory.p_sequence();
    match trajectory.tau() {
        Some(tau) => &p[..tau as usize],
        None => p,
    }
}

/// Writes an SVG 1.1 document with one polyline per trajectory and a
/// reference line per limit point.
pub fn emit_trajectory_svg<W: Write>(
    trajectories: &[Trajectory],
    limit_points: &[f64],
    mut out: W,
) -> io::Result<()> {
    assert!(!trajectories.is_empty(), "need at least one trajectory");
    let max_len = trajectories
        .iter()
        .map(|t| plotted_points(t).len())
        .max()
        .unwrap()
        .max(2);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |i: usize| MARGIN_LEFT + plot_w * i as f64 / (max_len - 1) as f64;
    let y_of = |p: f64| MARGIN_TOP + plot_h * (1.0 - p);

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;

    // Axes and y gridlines at 0, 0.25, ..., 1.
    writeln!(
        out,
        r##"<g stroke="#333" stroke-width="1" fill="none"><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/></g>"##,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w,
    )?;
    for i in 0..=4 {
        let p = i as f64 / 4.0;
        let y = y_of(p);
        writeln!(
            out,
            r##"<line x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="#ddd" stroke-width="0.5"/>"##,
            l = MARGIN_LEFT,
            r = MARGIN_LEFT + plot_w,
        )?;
        writeln!(
            out,
            r##"<text x="{x}" y="{ty}" font-size="12" text-anchor="end" fill="#333">{p}</text>"##,
            x = MARGIN_LEFT - 8.0,
            ty = y + 4.0,
        )?;
    }
    writeln!(
        out,
        r##"<text x="{x}" y="{y}" font-size="13" text-anchor="middle" fill="#333">step</text>"##,
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 10.0,
    )?;
    writeln!(
        out,
        r##"<text x="15" y="{y}" font-size="13" text-anchor="middle" fill="#333" transform="rotate(-90 15 {y})">proportion</text>"##,
        y = MARGIN_TOP + plot_h / 2.0,
    )?;

    for (k, trajectory) in trajectories.iter().enumerate() {
        let color = SERIES_COLORS[k % SERIES_COLORS.len()];
        let mut points = String::new();
        for (i, &p) in plotted_points(trajectory).iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            points.push_str(&format!("{:.2},{:.2}", x_of(i), y_of(p)));
        }
        writeln!(
            out,
            r#"<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1"/>"#
        )?;
    }

    for &limit in limit_points {
        let y = y_of(limit);
        writeln!(
            out,
            r#"<line x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="red" stroke-width="1.5" stroke-dasharray="6 3"/>"#,
            l = MARGIN_LEFT,
            r = MARGIN_LEFT + plot_w,
        )?;
    }

    writeln!(out, "</svg>")
}

pub fn trajectory_svg_string(trajectories: &[Trajectory], limit_points: &[f64]) -> String {
    let mut buf = Vec::new();
    emit_trajectory_svg(trajectories, limit_points, &mut buf).expect("writing to Vec");
    String::from_utf8(buf).expect("SVG is UTF-8")
}
