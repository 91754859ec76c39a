//! Deterministic SVG 1.1 output for arrangements and crease patterns.

use std::fmt::Write as _;

use crate::arrangement::Arrangement;
use crate::geom::{to_f64, Point, Segment};
use crate::pattern::{CreasePattern, EdgeKind, Label};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a Point>) -> Frame {
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in points {
            let (x, y) = (to_f64(&p.x), to_f64(&p.y));
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        if min_x > max_x {
            (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        let scale = SIZE / span;
        Frame {
            min_x,
            max_y,
            scale,
            width: (max_x - min_x) * scale + 2.0 * MARGIN,
            height: (max_y - min_y) * scale + 2.0 * MARGIN,
        }
    }

    fn xy(&self, p: &Point) -> (f64, f64) {
        (MARGIN + (to_f64(&p.x) - self.min_x) * self.scale, MARGIN + (self.max_y - to_f64(&p.y)) * self.scale)
    }

    fn header(&self, out: &mut String, legend_room: f64) {
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            num(self.width),
            num(self.height + legend_room),
            num(self.width),
            num(self.height + legend_room)
        );
    }

    fn line(&self, out: &mut String, s: &Segment, attrs: &str) {
        let (x1, y1) = self.xy(&s.a);
        let (x2, y2) = self.xy(&s.b);
        let _ = writeln!(
            out,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }

    fn polygon(&self, out: &mut String, ring: &[Point], attrs: &str) {
        let pts: Vec<String> = ring
            .iter()
            .map(|p| {
                let (x, y) = self.xy(p);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(out, "  <polygon points=\"{}\" {attrs}/>", pts.join(" "));
    }
}

/// Fixed three-decimal formatting with `-0` normalized.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn label_style(label: Label) -> &'static str {
    match label {
        Label::Mountain => "stroke=\"#c0392b\" stroke-width=\"1.5\"",
        Label::Valley => "stroke=\"#2c6fbb\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"",
        Label::Unassigned => "stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"2,2\"",
    }
}

/// Bounded cells shaded by ply relative to the maximum, with crease images
/// drawn on top and a ply legend underneath.
pub fn render_arrangement(arr: &Arrangement) -> String {
    let frame = Frame::fit(arr.cells.iter().flat_map(|c| c.boundary.iter().flatten()));
    let max_ply = arr.ply();
    let mut out = String::new();
    frame.header(&mut out, 24.0);
    out.push_str("  <g id=\"cells\">\n");
    for cell in &arr.cells {
        let Some(ring) = &cell.boundary else { continue };
        let opacity = if max_ply == 0 { 0.0 } else { cell.ply() as f64 / max_ply as f64 };
        let attrs = format!(
            "fill=\"#1f3a5f\" fill-opacity=\"{}\" stroke=\"#999999\" stroke-width=\"0.5\" data-cell=\"{}\" data-ply=\"{}\"",
            num(opacity),
            cell.id,
            cell.ply()
        );
        frame.polygon(&mut out, ring, &attrs);
    }
    out.push_str("  </g>\n  <g id=\"creases\">\n");
    for (_, seg, label) in &arr.crease_images {
        frame.line(&mut out, seg, label_style(*label));
    }
    out.push_str("  </g>\n");
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\">max ply: {max_ply}</text>",
        num(MARGIN),
        num(frame.height + 14.0)
    );
    out.push_str("</svg>\n");
    out
}

/// The unfolded crease pattern: paper outline, creases styled by label.
pub fn render_pattern(cp: &CreasePattern) -> String {
    let frame = Frame::fit(cp.paper.iter());
    let mut out = String::new();
    frame.header(&mut out, 0.0);
    frame.polygon(&mut out, &cp.paper, "fill=\"#fdfaf2\" stroke=\"#000000\" stroke-width=\"2\"");
    for e in &cp.edges {
        if let EdgeKind::Crease(id) = e.kind {
            frame.line(&mut out, &e.segment, label_style(cp.creases[id].label));
        }
    }
    out.push_str("</svg>\n");
    out
}
