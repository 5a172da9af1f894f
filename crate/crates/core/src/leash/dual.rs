//! Dual curves: the parameter pairs (s, t) whose leash P(s)Q(t) passes through a point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2, TOLERANCE};

const ZERO: f64 = 1e-12;

/// The bilinear curve a·st + b·s + c·t + d = 0 in the parameter cell of two segments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualCurve {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Host cell: (edge of P, edge of Q).
    pub cell: (usize, usize),
    /// Id of the point the curve was built from, when it comes from a discretization.
    pub source: Option<usize>,
}

/// Shape of one monotone fragment of a dual curve inside the unit cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PieceKind {
    /// τ = −(bσ + d)/(aσ + c).
    Bilinear { a: f64, b: f64, c: f64, d: f64 },
    /// τ = const.
    Horizontal(f64),
    /// σ = const.
    Vertical(f64),
}

/// A connected fragment of a dual curve restricted to [0,1]² and to leashes
/// that actually contain the point.
///
/// For non-vertical pieces `s0 < s1` is the σ-range; for vertical pieces
/// `s0 == s1` and `t0 < t1` is the τ-range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePiece {
    pub kind: PieceKind,
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
    pub source: u32,
}

impl CurvePiece {
    pub fn horizontal(t: f64, s0: f64, s1: f64, source: u32) -> Self {
        CurvePiece { kind: PieceKind::Horizontal(t), s0, s1, t0: t, t1: t, source }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self.kind, PieceKind::Vertical(_))
    }

    /// τ on the piece at σ (not meaningful for vertical pieces).
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self.kind {
            PieceKind::Bilinear { a, b, c, d } => -(b * s + d) / (a * s + c),
            PieceKind::Horizontal(t) => t,
            PieceKind::Vertical(_) => f64::NAN,
        }
    }

    /// σ at which the piece reaches τ (strictly monotone pieces only).
    #[inline]
    pub fn inverse(&self, t: f64) -> f64 {
        match self.kind {
            PieceKind::Bilinear { a, b, c, d } => -(c * t + d) / (a * t + b),
            PieceKind::Horizontal(_) => f64::NAN,
            PieceKind::Vertical(s) => s,
        }
    }

    /// `Some(true)` if increasing, `Some(false)` if decreasing, `None` if constant or vertical.
    pub fn increasing(&self) -> Option<bool> {
        match self.kind {
            PieceKind::Bilinear { a, b, c, d } => Some(b * c - a * d < 0.0),
            _ => None,
        }
    }
}

fn coefficients(v: Point2, seg_p: &Segment2, seg_q: &Segment2) -> [f64; 4] {
    let (dp, dq) = (seg_p.direction(), seg_q.direction());
    let (a0, b0) = (seg_p.a - v, seg_q.a - v);
    // cross(A + s·dP, B + t·dQ) = 0 expanded.
    [dp.cross(dq), dp.cross(b0), a0.cross(dq), a0.cross(b0)]
}

/// Dual curve of `v` for the cell spanned by `seg_p` and `seg_q`.
///
/// `v` may not coincide with an endpoint of either segment.
pub fn dual_curve(v: Point2, seg_p: &Segment2, seg_q: &Segment2) -> Result<DualCurve> {
    for (name, p) in [("P start", seg_p.a), ("P end", seg_p.b), ("Q start", seg_q.a), ("Q end", seg_q.b)] {
        if v.dist(p) <= TOLERANCE {
            return Err(Error::Degenerate(format!("point ({}, {}) coincides with the {name} endpoint", v.x, v.y)));
        }
    }
    let [a, b, c, d] = coefficients(v, seg_p, seg_q);
    Ok(DualCurve { a, b, c, d, cell: (0, 0), source: None })
}

impl DualCurve {
    /// Value of the bilinear form at (s, t).
    pub fn residual(&self, s: f64, t: f64) -> f64 {
        self.a * s * t + self.b * s + self.c * t + self.d
    }

    /// Fragments of the curve inside [0,1]² whose leashes contain the point.
    pub fn pieces(&self, v: Point2, seg_p: &Segment2, seg_q: &Segment2) -> Vec<CurvePiece> {
        dual_pieces(v, seg_p, seg_q, self.source.unwrap_or(0) as u32)
    }
}

/// Whether `v` lies between P(s) and Q(t) on their leash (given collinearity).
#[inline]
fn between(v: Point2, seg_p: &Segment2, seg_q: &Segment2, s: f64, t: f64) -> bool {
    (seg_p.at(s) - v).dot(seg_q.at(t) - v) <= ZERO
}

/// Interval of `x ∈ [0,1]` with α + βx ≤ 0, if it has positive length.
fn linear_le_zero(alpha: f64, beta: f64) -> Option<(f64, f64)> {
    let (lo, hi) = if beta.abs() <= 1e-15 {
        if alpha <= ZERO {
            (0.0, 1.0)
        } else {
            return None;
        }
    } else {
        let root = -alpha / beta;
        if beta > 0.0 {
            (0.0, root.min(1.0))
        } else {
            (root.max(0.0), 1.0)
        }
    };
    (hi - lo > ZERO).then_some((lo, hi))
}

/// Builds the clipped fragments of the dual curve of `v`.
pub(crate) fn dual_pieces(v: Point2, seg_p: &Segment2, seg_q: &Segment2, source: u32) -> Vec<CurvePiece> {
    let raw = coefficients(v, seg_p, seg_q);
    let m = raw.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if m < 1e-300 {
        return Vec::new();
    }
    let [a, b, c, d] = raw.map(|x| x / m);
    let det = b * c - a * d;
    let mut out = Vec::new();
    let (dp, dq) = (seg_p.direction(), seg_q.direction());

    let vertical = |k: f64, out: &mut Vec<CurvePiece>| {
        if !(-ZERO..=1.0 + ZERO).contains(&k) {
            return;
        }
        let k = k.clamp(0.0, 1.0);
        let pv = seg_p.at(k) - v;
        if let Some((t0, t1)) = linear_le_zero(pv.dot(seg_q.a - v), pv.dot(dq)) {
            out.push(CurvePiece { kind: PieceKind::Vertical(k), s0: k, s1: k, t0, t1, source });
        }
    };
    let horizontal = |k: f64, out: &mut Vec<CurvePiece>| {
        if !(-ZERO..=1.0 + ZERO).contains(&k) {
            return;
        }
        let k = k.clamp(0.0, 1.0);
        let qv = seg_q.at(k) - v;
        if let Some((s0, s1)) = linear_le_zero(qv.dot(seg_p.a - v), qv.dot(dp)) {
            out.push(CurvePiece::horizontal(k, s0, s1, source));
        }
    };

    if det.abs() <= ZERO {
        // The form factors into axis-parallel lines.
        if a.abs() > ZERO {
            vertical(-c / a, &mut out);
            horizontal(-b / a, &mut out);
        } else if b.abs() > ZERO {
            vertical(-d / b, &mut out);
        } else if c.abs() > ZERO {
            horizontal(-d / c, &mut out);
        }
        return out;
    }

    let kind = PieceKind::Bilinear { a, b, c, d };
    let probe = CurvePiece { kind, s0: 0.0, s1: 1.0, t0: 0.0, t1: 0.0, source };
    let asym = if a.abs() > 1e-300 { Some(-c / a) } else { None };
    let mut cuts = vec![0.0, 1.0];
    let mut push = |x: f64| {
        if x > 0.0 && x < 1.0 {
            cuts.push(x)
        }
    };
    if let Some(x) = asym {
        push(x);
    }
    if b.abs() > 1e-300 {
        push(-d / b);
    }
    if (a + b).abs() > 1e-300 {
        push(-(c + d) / (a + b));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut current: Option<CurvePiece> = None;
    for w in cuts.windows(2) {
        let (x, y) = (w[0], w[1]);
        let mid = 0.5 * (x + y);
        let tm = probe.eval(mid);
        let keep = y - x > 1e-15 && (0.0..=1.0).contains(&tm) && between(v, seg_p, seg_q, mid, tm);
        let crosses_asym = asym.is_some_and(|s| s == x);
        match (&mut current, keep) {
            (Some(cur), true) if !crosses_asym && cur.s1 == x => {
                cur.s1 = y;
            }
            (_, true) => {
                if let Some(done) = current.take() {
                    out.push(done);
                }
                current = Some(CurvePiece { kind, s0: x, s1: y, t0: 0.0, t1: 0.0, source });
            }
            (_, false) => {
                if let Some(done) = current.take() {
                    out.push(done);
                }
            }
        }
    }
    out.extend(current);
    for p in &mut out {
        p.t0 = p.eval(p.s0).clamp(0.0, 1.0);
        p.t1 = p.eval(p.s1).clamp(0.0, 1.0);
    }
    out
}
