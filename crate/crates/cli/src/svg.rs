//! SVG figures. Output depends only on the inputs, apart from the version
//! comment on the second line.

use std::fmt::Write;

use stclust_core::analysis::SummaryReport;
use stclust_core::{GridMode, ZoneMap};

use crate::meta::{TOOL, VERSION};

/// Categorical colours by label id, cycling after 16.
pub const PALETTE: [&str; 16] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#1f3a93",
    "#8cd17d", "#b6992d", "#499894", "#d37295", "#86bcb6", "#79706e",
];

pub const UNLABELED: &str = "#ffffff";
pub const DEFAULT_CELL_PX: usize = 12;

pub fn color(label: u32) -> &'static str {
    PALETTE[label as usize % PALETTE.len()]
}

fn open(out: &mut String, width: usize, height: usize) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<!-- {TOOL} {VERSION} -->");
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const TITLE_H: usize = 24;
const LEGEND_W: usize = 110;
const SWATCH_H: usize = 18;

/// Label map: one rectangle per run of equal labels along a row, plus a legend.
///
/// Geographic grids are drawn north-up; planar grids keep row 0 at the top.
pub fn zone_map(map: &ZoneMap, title: &str, cell_px: usize) -> String {
    let g = map.geometry();
    let px = cell_px.max(1);
    let labels = map.label_set();
    let grid_w = g.ncols * px;
    let grid_h = g.nrows * px;
    let width = grid_w + LEGEND_W + 20;
    let height = TITLE_H + grid_h.max(labels.len() * SWATCH_H) + 10;

    let mut out = String::new();
    open(&mut out, width, height);
    let _ = writeln!(out, r#"<text x="4" y="16">{}</text>"#, escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="0" y="{TITLE_H}" width="{grid_w}" height="{grid_h}" fill="{UNLABELED}" stroke="#999999"/>"##
    );
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for row in 0..g.nrows {
        let y = TITLE_H
            + match g.mode {
                GridMode::Geographic => (g.nrows - 1 - row) * px,
                GridMode::Planar => row * px,
            };
        let mut col = 0;
        while col < g.ncols {
            let label = map.labels()[row * g.ncols + col];
            let start = col;
            while col < g.ncols && map.labels()[row * g.ncols + col] == label {
                col += 1;
            }
            if let Some(l) = label {
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{y}" width="{}" height="{px}" fill="{}"/>"#,
                    start * px,
                    (col - start) * px,
                    color(l)
                );
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let lx = grid_w + 12;
    for (i, l) in labels.iter().enumerate() {
        let y = TITLE_H + i * SWATCH_H;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{y}" width="12" height="12" fill="{}"/>"#,
            color(*l)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{l}</text>"#, lx + 18, y + 11);
    }
    out.push_str("</svg>\n");
    out
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        let pad = if hi > lo {
            (hi - lo) * 0.05
        } else {
            lo.abs().max(1.0) * 0.1
        };
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn scale(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=4).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
    }
}

/// Mean elevation against mean slope, one point per cluster.
///
/// Each series gets its own marker shape; colour follows the label.
pub fn elev_slope(series: &[(&str, &SummaryReport)]) -> String {
    const W: f64 = 560.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 130.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 50.0;

    let points: Vec<(usize, u32, f64, f64)> = series
        .iter()
        .enumerate()
        .flat_map(|(s, (_, report))| {
            report
                .clusters
                .iter()
                .filter_map(move |c| Some((s, c.label, c.mean_elevation_m?, c.mean_slope_deg?)))
        })
        .collect();
    let xa = Axis::new(points.iter().map(|p| p.2));
    let ya = Axis::new(points.iter().map(|p| p.3));
    let (x0, x1) = (LEFT, W - RIGHT);
    let (y0, y1) = (H - BOTTOM, TOP);

    let mut out = String::new();
    open(&mut out, W as usize, H as usize);
    let _ = writeln!(
        out,
        r#"<text x="{LEFT}" y="18">Average elevation vs slope per cluster</text>"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#333333"/>"##,
        x1 - x0,
        y0 - y1
    );
    for t in xa.ticks() {
        let x = xa.scale(t, x0, x1);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="#333333"/><text x="{x:.2}" y="{}" text-anchor="middle">{t:.0}</text>"##,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    for t in ya.ticks() {
        let y = ya.scale(t, y0, y1);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="#333333"/><text x="{}" y="{:.2}" text-anchor="end">{t:.2}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">mean elevation (m)</text>"#,
        (x0 + x1) / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">mean slope (degrees)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    if points.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no clusters with terrain data</text>"#,
            (x0 + x1) / 2.0,
            (y0 + y1) / 2.0
        );
    }
    for &(s, label, e, sl) in &points {
        let x = xa.scale(e, x0, x1);
        let y = ya.scale(sl, y0, y1);
        let _ = writeln!(out, "{}", marker(s, x, y, color(label)));
    }
    let lx = x1 + 16.0;
    for (s, (name, _)) in series.iter().enumerate() {
        let y = TOP + 10.0 + s as f64 * 20.0;
        let _ = writeln!(out, "{}", marker(s, lx, y, "#777777"));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 12.0,
            y + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn marker(series: usize, x: f64, y: f64, fill: &str) -> String {
    if series.is_multiple_of(2) {
        format!(r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}" stroke="#222222"/>"##)
    } else {
        format!(
            r##"<rect x="{:.2}" y="{:.2}" width="9" height="9" fill="{fill}" stroke="#222222"/>"##,
            x - 4.5,
            y - 4.5
        )
    }
}
