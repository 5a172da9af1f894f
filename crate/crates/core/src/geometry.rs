//! Planar primitives shared by the rest of the crate.
//!
//! Curves use a uniform-per-edge parametrization: for a curve with `m`
//! vertices, edge `i` covers the parameter interval `[i/(m-1), (i+1)/(m-1)]`.
//! Fréchet distances do not depend on the parametrization, and this choice
//! keeps parameter-space cell borders at vertex parameters.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global tolerance for incidence predicates.
pub const TOLERANCE: f64 = 1e-9;

/// Absolute-plus-relative comparison used by every incidence predicate.
#[inline]
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment2 { a, b }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    #[inline]
    pub fn direction(&self) -> Point2 {
        self.b - self.a
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Parameter of the point of the segment closest to `p`, clamped to `[0, 1]`.
    pub fn project(&self, p: Point2) -> f64 {
        let d = self.direction();
        let len2 = d.dot(d);
        if len2 == 0.0 {
            0.0
        } else {
            ((p - self.a).dot(d) / len2).clamp(0.0, 1.0)
        }
    }
}

/// Result of intersecting two closed segments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentIntersection {
    Empty,
    Point(Point2),
    Overlap(Segment2),
}

/// Euclidean distance from `p` to the closest point of `s`.
pub fn point_segment_distance(p: Point2, s: &Segment2) -> f64 {
    p.dist(s.at(s.project(p)))
}

/// Intersection of two closed segments, in terms of parameters along `s1`.
///
/// Returns `None` for no intersection, `Some((t, t))` for a single point and
/// `Some((t0, t1))` with `t0 < t1` for a collinear overlap.
pub(crate) fn intersection_params(s1: &Segment2, s2: &Segment2) -> Option<(f64, f64)> {
    let r = s1.direction();
    let s = s2.direction();
    let rl = r.norm();
    let sl = s.norm();
    let scale = rl.max(sl).max(s1.a.norm().max(s2.a.norm())).max(1.0);
    let tol = TOLERANCE * scale;

    if rl == 0.0 {
        return (point_segment_distance(s1.a, s2) <= tol).then_some((0.0, 0.0));
    }
    if sl == 0.0 {
        return (point_segment_distance(s2.a, s1) <= tol).then_some({
            let t = s1.project(s2.a);
            (t, t)
        });
    }

    let qp = s2.a - s1.a;
    let denom = r.cross(s);
    if denom.abs() <= TOLERANCE * rl * sl {
        // Parallel; collinear only if s2.a is on the line of s1.
        if (qp.cross(r) / rl).abs() > tol {
            return None;
        }
        let r2 = r.dot(r);
        let t0 = qp.dot(r) / r2;
        let t1 = (s2.b - s1.a).dot(r) / r2;
        let lo = t0.min(t1).max(0.0);
        let hi = t0.max(t1).min(1.0);
        let ptol = tol / rl;
        if lo > hi + ptol {
            return None;
        }
        if hi - lo <= ptol {
            let m = (0.5 * (lo + hi)).clamp(0.0, 1.0);
            return Some((m, m));
        }
        return Some((lo, hi));
    }

    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let ttol = tol / rl;
    let utol = tol / sl;
    if t < -ttol || t > 1.0 + ttol || u < -utol || u > 1.0 + utol {
        return None;
    }
    let t = t.clamp(0.0, 1.0);
    Some((t, t))
}

/// Classifies the intersection of two closed segments.
pub fn seg_seg_intersection(s1: &Segment2, s2: &Segment2) -> SegmentIntersection {
    match intersection_params(s1, s2) {
        None => SegmentIntersection::Empty,
        Some((t0, t1)) if t0 == t1 => SegmentIntersection::Point(s1.at(t0)),
        Some((t0, t1)) => SegmentIntersection::Overlap(Segment2::new(s1.at(t0), s1.at(t1))),
    }
}

/// An ordered chain of vertices, parametrized uniformly per edge over `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonalCurve {
    pub vertices: Vec<Point2>,
}

impl PolygonalCurve {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Input("curve has no vertices".into()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::Input(format!("curve vertex {i} is not finite")));
        }
        Ok(PolygonalCurve { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of edges; a point-curve has none.
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn edge(&self, i: usize) -> Segment2 {
        Segment2::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment2> + '_ {
        self.vertices.windows(2).map(|w| Segment2::new(w[0], w[1]))
    }

    /// Parameter of vertex `i`.
    pub fn vertex_param(&self, i: usize) -> f64 {
        match self.edge_count() {
            0 => 0.0,
            m => i as f64 / m as f64,
        }
    }

    /// Point at parameter `u` in `[0, 1]`.
    pub fn point_at(&self, u: f64) -> Result<Point2> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Input(format!("curve parameter {u} outside [0, 1]")));
        }
        let m = self.edge_count();
        if m == 0 {
            return Ok(self.vertices[0]);
        }
        let x = u * m as f64;
        let i = (x.floor() as usize).min(m - 1);
        Ok(self.edge(i).at(x - i as f64))
    }

    /// Length of the longest edge.
    pub fn max_edge_length(&self) -> f64 {
        self.edges().map(|e| e.length()).fold(0.0, f64::max)
    }
}

/// Free function form of [`PolygonalCurve::point_at`].
pub fn curve_point(curve: &PolygonalCurve, u: f64) -> Result<Point2> {
    curve.point_at(u)
}

/// Twice the signed area of triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment2 {
        Segment2::new(p(ax, ay), p(bx, by))
    }

    #[test]
    fn curve_point_examples() {
        let c = PolygonalCurve::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(c.point_at(0.0).unwrap(), p(0.0, 0.0));
        assert_eq!(c.point_at(1.0).unwrap(), p(1.0, 1.0));
        assert_eq!(c.point_at(0.25).unwrap(), p(0.5, 0.0));
        assert!(c.point_at(1.5).is_err());
        assert!(c.point_at(-0.1).is_err());
    }

    #[test]
    fn point_curve() {
        let c = PolygonalCurve::new(vec![p(2.0, 3.0)]).unwrap();
        assert_eq!(c.point_at(0.7).unwrap(), p(2.0, 3.0));
        assert!(PolygonalCurve::new(vec![]).is_err());
        assert!(PolygonalCurve::new(vec![p(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(
            seg_seg_intersection(&seg(0.0, 0.0, 1.0, 1.0), &seg(0.0, 1.0, 1.0, 0.0)),
            SegmentIntersection::Point(p(0.5, 0.5))
        );
        assert_eq!(
            seg_seg_intersection(&seg(0.0, 0.0, 1.0, 0.0), &seg(0.0, 1.0, 1.0, 1.0)),
            SegmentIntersection::Empty
        );
        assert_eq!(
            seg_seg_intersection(&seg(0.0, 0.0, 2.0, 0.0), &seg(1.0, 0.0, 3.0, 0.0)),
            SegmentIntersection::Overlap(seg(1.0, 0.0, 2.0, 0.0))
        );
    }

    #[test]
    fn intersection_shared_endpoint_and_degenerate() {
        assert_eq!(
            seg_seg_intersection(&seg(0.0, 0.0, 1.0, 0.0), &seg(1.0, 0.0, 1.0, 1.0)),
            SegmentIntersection::Point(p(1.0, 0.0))
        );
        // Collinear, touching at one point.
        assert_eq!(
            seg_seg_intersection(&seg(0.0, 0.0, 1.0, 0.0), &seg(1.0, 0.0, 2.0, 0.0)),
            SegmentIntersection::Point(p(1.0, 0.0))
        );
        let dot = seg(0.5, 0.0, 0.5, 0.0);
        assert_eq!(
            seg_seg_intersection(&dot, &seg(0.0, 0.0, 1.0, 0.0)),
            SegmentIntersection::Point(p(0.5, 0.0))
        );
        assert_eq!(
            seg_seg_intersection(&dot, &seg(0.0, 1.0, 1.0, 1.0)),
            SegmentIntersection::Empty
        );
    }

    #[test]
    fn distance_examples() {
        let s = seg(0.0, 0.0, 1.0, 0.0);
        assert_eq!(point_segment_distance(p(0.5, 1.0), &s), 1.0);
        assert_eq!(point_segment_distance(p(2.0, 0.0), &s), 1.0);
        assert_eq!(point_segment_distance(p(0.5, 0.5), &seg(0.0, 0.0, 1.0, 1.0)), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pt() -> impl Strategy<Value = Point2> {
            (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
        }

        proptest! {
            #[test]
            fn intersection_is_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
                let s1 = Segment2::new(a, b);
                let s2 = Segment2::new(c, d);
                match (seg_seg_intersection(&s1, &s2), seg_seg_intersection(&s2, &s1)) {
                    (SegmentIntersection::Empty, SegmentIntersection::Empty) => {}
                    (SegmentIntersection::Point(x), SegmentIntersection::Point(y)) => {
                        prop_assert!(x.dist(y) < 1e-9);
                    }
                    (SegmentIntersection::Overlap(x), SegmentIntersection::Overlap(y)) => {
                        let same = x.a.dist(y.a) < 1e-9 && x.b.dist(y.b) < 1e-9;
                        let flipped = x.a.dist(y.b) < 1e-9 && x.b.dist(y.a) < 1e-9;
                        prop_assert!(same || flipped);
                    }
                    (x, y) => prop_assert!(false, "asymmetric: {x:?} vs {y:?}"),
                }
            }

            #[test]
            fn curve_point_is_lipschitz(
                verts in proptest::collection::vec(pt(), 2..6),
                u in 0.0..1.0f64,
                du in 0.0..0.01f64,
            ) {
                let c = PolygonalCurve::new(verts).unwrap();
                let v = (u + du).min(1.0);
                let lip = c.edge_count() as f64 * c.max_edge_length();
                let gap = c.point_at(u).unwrap().dist(c.point_at(v).unwrap());
                prop_assert!(gap <= lip * (v - u) + 1e-12);
            }

            #[test]
            fn distance_zero_iff_on_segment(a in pt(), b in pt(), t in 0.0..1.0f64, off in 1e-6..1.0f64) {
                let s = Segment2::new(a, b);
                prop_assume!(s.length() > 1e-3);
                let on = s.at(t);
                prop_assert!(point_segment_distance(on, &s) <= 1e-12 * (1.0 + on.norm()));
                let n = Point2::new(-(b - a).y, (b - a).x) * (1.0 / s.length());
                prop_assert!(point_segment_distance(on + n * off, &s) > 1e-12);
            }
        }
    }
}
