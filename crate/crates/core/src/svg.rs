//! Deterministic SVG pictures of a subdivision, two curves and a matching.

use std::fmt::Write;

use crate::geometry::{Point2, PolygonalCurve};
use crate::matching::MatchingResult;
use crate::subdivision::WeightedSubdivision;

const PLANE: f64 = 480.0;
const MARGIN: f64 = 20.0;
const INSET: f64 = 200.0;
const LEASHES: usize = 9;

/// Fixed-precision number with negative zero folded away, so output is byte-stable.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Gray level of a triangle: lightest at the minimum weight, darkest at the maximum.
pub fn gray_level(w: f64, w_min: f64, w_max: f64) -> u8 {
    let f = if w_max > w_min { (w - w_min) / (w_max - w_min) } else { 0.0 };
    (235.0 - 180.0 * f.clamp(0.0, 1.0)).round() as u8
}

struct View {
    min: Point2,
    scale: f64,
    height: f64,
}

impl View {
    fn new(points: impl Iterator<Item = Point2>) -> Self {
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.x.is_finite() {
            lo = Point2::new(0.0, 0.0);
            hi = Point2::new(1.0, 1.0);
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let scale = if span > 0.0 { PLANE / span } else { 1.0 };
        View { min: lo, scale, height: (hi.y - lo.y) * scale }
    }

    /// Screen coordinates with y pointing down.
    fn xy(&self, p: Point2) -> (String, String) {
        let x = MARGIN + (p.x - self.min.x) * self.scale;
        let y = MARGIN + self.height - (p.y - self.min.y) * self.scale;
        (num(x), num(y))
    }

    fn at(&self, p: Point2) -> String {
        let (x, y) = self.xy(p);
        format!("{x},{y}")
    }
}

fn polyline(out: &mut String, pts: &[String], attrs: &str) {
    writeln!(out, r#"  <polyline points="{}" fill="none" {attrs}/>"#, pts.join(" ")).unwrap();
}

/// Point at fraction `f` of the Euclidean length of a parameter-space path.
fn along(path: &[(f64, f64)], f: f64) -> (f64, f64) {
    let len = |a: (f64, f64), b: (f64, f64)| (b.0 - a.0).hypot(b.1 - a.1);
    let total: f64 = path.windows(2).map(|w| len(w[0], w[1])).sum();
    let mut left = f * total;
    for w in path.windows(2) {
        let l = len(w[0], w[1]);
        if l > 0.0 && left <= l {
            let u = left / l;
            return (w[0].0 + (w[1].0 - w[0].0) * u, w[0].1 + (w[1].1 - w[0].1) * u);
        }
        left -= l;
    }
    *path.last().unwrap_or(&(1.0, 1.0))
}

/// Renders the weighted triangles, both curves and, when given, sampled leashes
/// of the matching plus its path in a parameter-space inset.
pub fn render_svg(
    subdiv: &WeightedSubdivision,
    p: &PolygonalCurve,
    q: &PolygonalCurve,
    result: Option<&MatchingResult>,
) -> String {
    let view = View::new(subdiv.vertices().iter().chain(&p.vertices).chain(&q.vertices).copied());
    let width = MARGIN * 2.0 + PLANE + if result.is_some() { INSET + MARGIN } else { 0.0 };
    let height = MARGIN * 2.0 + PLANE;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(width),
        h = num(height)
    )
    .unwrap();
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();

    let (w_min, w_max) = (subdiv.min_weight(), subdiv.max_weight());
    writeln!(out, r##"  <g stroke="#777777" stroke-width="0.5">"##).unwrap();
    for (t, w) in subdiv.weights().iter().enumerate() {
        let pts: Vec<String> = subdiv.triangle_points(t).iter().map(|&v| view.at(v)).collect();
        let g = gray_level(*w, w_min, w_max);
        writeln!(out, r#"    <polygon points="{}" fill="rgb({g},{g},{g})"><title>weight {w}</title></polygon>"#, pts.join(" "))
            .unwrap();
    }
    writeln!(out, "  </g>").unwrap();

    if let Some(r) = result {
        writeln!(out, r##"  <g stroke="#2e8b57" stroke-width="1" stroke-dasharray="4 3">"##).unwrap();
        for k in 0..LEASHES {
            let (s, t) = along(&r.path, k as f64 / (LEASHES - 1) as f64);
            let (a, b) = (p.point_at(s.clamp(0.0, 1.0)), q.point_at(t.clamp(0.0, 1.0)));
            if let (Ok(a), Ok(b)) = (a, b) {
                let ((x1, y1), (x2, y2)) = (view.xy(a), view.xy(b));
                writeln!(out, r#"    <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#).unwrap();
            }
        }
        writeln!(out, "  </g>").unwrap();
    }

    for (c, colour) in [(p, "#1f5fbf"), (q, "#c0392b")] {
        let pts: Vec<String> = c.vertices.iter().map(|&v| view.at(v)).collect();
        polyline(&mut out, &pts, &format!(r#"stroke="{colour}" stroke-width="2.5""#));
        for &v in &c.vertices {
            let (x, y) = view.xy(v);
            writeln!(out, r#"  <circle cx="{x}" cy="{y}" r="3" fill="{colour}"/>"#).unwrap();
        }
    }

    if let Some(r) = result {
        let x0 = MARGIN * 2.0 + PLANE;
        writeln!(
            out,
            r#"  <rect x="{}" y="{}" width="{s}" height="{s}" fill="white" stroke="black"/>"#,
            num(x0),
            num(MARGIN),
            s = num(INSET)
        )
        .unwrap();
        let pts: Vec<String> =
            r.path.iter().map(|&(s, t)| format!("{},{}", num(x0 + s * INSET), num(MARGIN + (1.0 - t) * INSET))).collect();
        polyline(&mut out, &pts, r##"stroke="#2e8b57" stroke-width="2""##);
        writeln!(
            out,
            r#"  <text x="{}" y="{}" font-family="monospace" font-size="12">value {:.6}</text>"#,
            num(x0),
            num(MARGIN + INSET + 16.0),
            r.value
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
