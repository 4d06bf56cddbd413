//! Minimal SVG rendering for decision surfaces and learning curves.

use std::fmt::Write;

use crate::explainer::GlobalExplanation;
use crate::synthdata::{Dataset, Point2};

use super::SurfaceRaster;

const SIZE: f64 = 500.0;
const MARGIN: f64 = 20.0;

const RED: &str = "#d62728";
const BLUE: &str = "#1f77b4";

/// Everything drawn on one surface snapshot.
pub struct SurfacePlot<'a> {
    pub title: String,
    pub dataset: &'a Dataset,
    pub pool: &'a [usize],
    pub labeled: &'a [usize],
    /// Instances selected by the strategy so far (circled).
    pub queried: &'a [usize],
    pub raster: &'a SurfaceRaster,
    pub explanation: Option<&'a GlobalExplanation>,
}

fn to_px(p: Point2) -> (f64, f64) {
    (MARGIN + p.x1 * SIZE, MARGIN + (1.0 - p.x2) * SIZE)
}

/// Quantized fill for a decision value: five tints per side of the boundary.
fn surface_fill(v: f64) -> &'static str {
    const REDS: [&str; 5] = ["#fde0dd", "#fcc5c0", "#fa9fb5", "#f768a1", "#dd3497"];
    const BLUES: [&str; 5] = ["#e0ecf4", "#bfd3e6", "#9ebcda", "#8c96c6", "#8c6bb1"];
    let level = ((v.abs() / 0.5).floor() as usize).min(4);
    if v >= 0.0 {
        REDS[level]
    } else {
        BLUES[level]
    }
}

pub fn render_surface(plot: &SurfacePlot<'_>) -> String {
    let total = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{h}" viewBox="0 0 {total} {h}">"#,
        h = total + 24.0
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, plot.title);

    // Raster cells are centred on grid nodes; runs of equal colour are merged.
    let r = plot.raster.resolution;
    let cell = SIZE / (r - 1) as f64;
    for row in 0..r {
        let y = MARGIN + (1.0 - plot.raster.coordinate(row)) * SIZE - cell / 2.0;
        let mut col = 0;
        while col < r {
            let fill = surface_fill(plot.raster.value(row, col));
            let start = col;
            while col < r && surface_fill(plot.raster.value(row, col)) == fill {
                col += 1;
            }
            let x = MARGIN + plot.raster.coordinate(start) * SIZE - cell / 2.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                (col - start) as f64 * cell,
                cell
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );

    for &i in plot.pool {
        let (x, y) = to_px(plot.dataset.point(i));
        let color = if plot.dataset.label(i).is_red() { RED } else { BLUE };
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
    }
    for &i in plot.labeled {
        let (x, y) = to_px(plot.dataset.point(i));
        let color = if plot.dataset.label(i).is_red() { RED } else { BLUE };
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4.5" fill="{color}" stroke="black" stroke-width="1.2"/>"#
        );
    }
    for &i in plot.queried {
        let (x, y) = to_px(plot.dataset.point(i));
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="7" fill="none" stroke="#ffd700" stroke-width="2"/>"##
        );
    }
    if let Some(expl) = plot.explanation {
        for c in &expl.clusters {
            let (x, y) = to_px(c.medoid);
            let _ = writeln!(
                s,
                r#"<path d="M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}" stroke="black" stroke-width="2.5"><title>{}</title></path>"#,
                x - 7.0,
                y - 7.0,
                x + 7.0,
                y + 7.0,
                x - 7.0,
                y + 7.0,
                x + 7.0,
                y - 7.0,
                c.description
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.0}" font-family="sans-serif" font-size="14">{}</text>"#,
        total + 14.0,
        plot.title
    );
    s.push_str("</svg>\n");
    s
}

pub struct CurveSeries {
    pub name: String,
    pub mean: Vec<f64>,
    /// Iteration marked with an arrow (XGL switch point).
    pub marker: Option<usize>,
    /// Constant reference line (passive baseline).
    pub constant: bool,
}

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub fn render_curves(title: &str, series: &[CurveSeries]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (50.0, 160.0, 30.0, 40.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let max_t = series
        .iter()
        .filter(|s| !s.constant)
        .map(|s| s.mean.len().saturating_sub(1))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let px = |t: f64| left + t / max_t * pw;
    let py = |f: f64| top + (1.0 - f) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="18" font-family="sans-serif" font-size="14">{title}</text>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for tick in 0..=5 {
        let f = tick as f64 / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.0}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{f:.1}</text>"##,
            left + pw,
            left - 4.0,
            py(f) + 3.0,
            y = py(f)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="11" text-anchor="middle">iteration (0..{max_t})</text>"#,
        left + pw / 2.0,
        h - 10.0
    );

    for (k, series) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if series.constant { r#" stroke-dasharray="6 4""# } else { "" };
        let points: Vec<String> = if series.constant {
            let f = series.mean.first().copied().unwrap_or(0.0);
            vec![format!("{:.2},{:.2}", px(0.0), py(f)), format!("{:.2},{:.2}", px(max_t), py(f))]
        } else {
            series
                .mean
                .iter()
                .enumerate()
                .map(|(t, f)| format!("{:.2},{:.2}", px(t as f64), py(*f)))
                .collect()
        };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
            points.join(" ")
        );
        if let Some(t) = series.marker.filter(|&t| t < series.mean.len()) {
            let (x, y) = (px(t as f64), py(series.mean[t]));
            let _ = writeln!(
                s,
                r#"<path d="M{x:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2} Z" fill="{color}"/>"#,
                y + 4.0,
                x - 5.0,
                y + 14.0,
                x + 5.0,
                y + 14.0
            );
        }
        let ly = top + 14.0 + k as f64 * 18.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.0}" y1="{ly:.0}" x2="{:.0}" y2="{ly:.0}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="11">{}</text>"#,
            left + pw + 10.0,
            left + pw + 30.0,
            left + pw + 35.0,
            ly + 4.0,
            series.name
        );
    }
    s.push_str("</svg>\n");
    s
}
