//! Steiner points on mesh edges and refinement of curves lying on mesh edges.
//!
//! Points are placed from each edge endpoint outwards: the first at the
//! vertex radius, every next one a step of ε·d(x) further, where d(x) is the
//! distance from x to the nearest mesh edge not containing x. Both sequences
//! stop before the point of the edge that maximizes d, which is added once.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Point2, PolygonalCurve, Segment2};
use crate::subdivision::{CurveOnMesh, EdgeId, VertexId, WeightedSubdivision};

/// Largest accepted ε.
pub const MAX_EPSILON: f64 = 1.0 / 3.0;

const MAX_STEPS: usize = 50_000_000;

/// Distance from `v` to the nearest mesh edge that does not contain `v`.
pub fn clearance_d(subdiv: &WeightedSubdivision, v: Point2) -> Result<f64> {
    let tol = subdiv.tolerance();
    let segs = edge_segments(subdiv);
    if !segs.iter().any(|s| point_segment_distance(v, s) <= tol) {
        return Err(Error::Input(format!("point ({}, {}) is not on a mesh edge", v.x, v.y)));
    }
    Ok(clearance(&segs, v, tol))
}

fn edge_segments(subdiv: &WeightedSubdivision) -> Vec<Segment2> {
    (0..subdiv.edges().len()).map(|e| subdiv.edge_segment(e)).collect()
}

fn clearance(segs: &[Segment2], v: Point2, tol: f64) -> f64 {
    segs.iter()
        .map(|s| point_segment_distance(v, s))
        .filter(|&d| d > tol)
        .fold(f64::INFINITY, f64::min)
}

/// Vertex radius εB/(n·w_max).
pub fn vertex_radius(epsilon: f64, b: f64, n: usize, w_max_v: f64) -> Result<f64> {
    if b <= 0.0 {
        return Err(Error::Degenerate("lower bound B is zero; the distance is 0".into()));
    }
    if !(epsilon > 0.0) || n == 0 || !(w_max_v > 0.0) {
        return Err(Error::Config(format!("invalid radius arguments ε={epsilon}, n={n}, w_max={w_max_v}")));
    }
    Ok(epsilon * b / (n as f64 * w_max_v))
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= MAX_EPSILON) {
        return Err(Error::Config(format!("epsilon {epsilon} must lie in (0, 1/3]")));
    }
    Ok(())
}

/// Maximizer of `f` on [0, 1]: a 1e-3 grid over the interior, then ternary refinement.
fn argmax_on_unit(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut best_k, mut best) = (1usize, f64::NEG_INFINITY);
    for k in 1..1000 {
        let v = f(k as f64 / 1000.0);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let (mut lo, mut hi) = ((best_k - 1) as f64 / 1000.0, (best_k + 1) as f64 / 1000.0);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = f(t);
    if v >= best {
        (t, v)
    } else {
        (best_k as f64 / 1000.0, best)
    }
}

/// Distances from `start` along `dir` (unit) of the progression r, r+εd, ...
/// strictly before `stop`.
fn progression(
    start: Point2,
    dir: Point2,
    r: f64,
    stop: f64,
    epsilon: f64,
    d: &impl Fn(Point2) -> f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut x = r;
    while x < stop {
        out.push(x);
        if out.len() > MAX_STEPS {
            return Err(Error::Numeric("Steiner progression does not terminate".into()));
        }
        let step = epsilon * d(start + dir * x);
        if !(step > 0.0) {
            return Err(Error::Numeric(format!("zero clearance at distance {x} along an edge")));
        }
        x += step;
    }
    Ok(out)
}

/// Drops the two innermost points when they crowd each other around the meeting point.
fn dedup_meeting(
    from_a: &mut Vec<f64>,
    from_b: &mut Vec<f64>,
    length: f64,
    epsilon: f64,
    point: impl Fn(f64) -> Point2,
    d: &impl Fn(Point2) -> f64,
) {
    if from_a.len() < 2 || from_b.len() < 2 {
        return;
    }
    let la = *from_a.last().unwrap();
    let lb = length - *from_b.last().unwrap();
    let gap = lb - la;
    if gap < epsilon * d(point(la)).min(d(point(lb))) {
        from_a.pop();
        from_b.pop();
    }
}

/// Steiner points of one mesh edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeSteiner {
    pub edge: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
    /// Distances from `a` of the progression that starts at `a`, increasing.
    pub from_a: Vec<f64>,
    /// Distances from `b` of the progression that starts at `b`, increasing.
    pub from_b: Vec<f64>,
    /// Distance from `a` of the clearance maximizer v_e.
    pub meeting: f64,
    /// Clearance at v_e.
    pub d_e: f64,
}

impl EdgeSteiner {
    /// Steiner points as distances from `a`, in order from `a` to `b`, v_e included.
    pub fn distances(&self) -> Vec<f64> {
        let mut out = self.from_a.clone();
        out.push(self.meeting);
        out.extend(self.from_b.iter().rev().map(|x| self.length - x));
        out
    }

    pub fn count(&self) -> usize {
        self.from_a.len() + self.from_b.len() + 1
    }
}

/// Steiner points of every mesh edge together with the vertex radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinerDiscretization {
    pub epsilon: f64,
    pub b: f64,
    /// Radius of each mesh vertex's vicinity.
    pub radii: Vec<f64>,
    pub edges: Vec<EdgeSteiner>,
}

impl SteinerDiscretization {
    pub fn steiner_count(&self) -> usize {
        self.edges.iter().map(EdgeSteiner::count).sum()
    }

    /// Steiner points plus mesh vertices.
    pub fn total_points(&self) -> usize {
        self.steiner_count() + self.radii.len()
    }

    /// Steiner points of edge `e`, ordered from its first to its second endpoint.
    pub fn edge_points(&self, subdiv: &WeightedSubdivision, e: EdgeId) -> Vec<Point2> {
        let es = &self.edges[e];
        let seg = subdiv.edge_segment(e);
        es.distances().into_iter().map(|x| seg.at(x / es.length)).collect()
    }

    /// Per edge |e|·ln|e|·w_max(e)/(d(e)·B), reported as a raw diagnostic.
    pub fn c_statistics(&self, subdiv: &WeightedSubdivision) -> Vec<f64> {
        self.edges
            .iter()
            .map(|es| {
                let w = subdiv.edges()[es.edge].triangles.iter().map(|&t| subdiv.weights()[t]).fold(0.0, f64::max);
                es.length * es.length.ln() * w / (es.d_e * self.b)
            })
            .collect()
    }
}

/// Places Steiner points on every mesh edge.
pub fn place_steiner(subdiv: &WeightedSubdivision, epsilon: f64, b: f64) -> Result<SteinerDiscretization> {
    place_steiner_threads(subdiv, epsilon, b, 1)
}

/// [`place_steiner`] spreading the edges over `threads` workers.
pub fn place_steiner_threads(
    subdiv: &WeightedSubdivision,
    epsilon: f64,
    b: f64,
    threads: usize,
) -> Result<SteinerDiscretization> {
    place_steiner_unweighted(subdiv, epsilon, b / subdiv.min_weight(), threads)
}

/// [`place_steiner_threads`] taking B/w_min (the unweighted Fréchet distance) instead of B.
///
/// Radii are computed through weight ratios, so uniformly scaled weights give
/// bit-identical placements.
pub(crate) fn place_steiner_unweighted(
    subdiv: &WeightedSubdivision,
    epsilon: f64,
    unweighted: f64,
    threads: usize,
) -> Result<SteinerDiscretization> {
    check_epsilon(epsilon)?;
    if !(unweighted > 0.0) {
        return Err(Error::Degenerate("lower bound B is zero; the distance is 0".into()));
    }
    let n = subdiv.vertex_count();
    let w_min = subdiv.min_weight();
    let b = unweighted * w_min;
    let base = epsilon * unweighted / n as f64;
    let radii: Vec<f64> = (0..n)
        .map(|v| match subdiv.vertex_max_weight(v) {
            w if w > 0.0 => base * (w_min / w),
            _ => 0.0,
        })
        .collect();
    let segs = edge_segments(subdiv);
    let m = segs.len();
    let threads = threads.clamp(1, m.max(1));
    let edges: Vec<Result<EdgeSteiner>> = if threads == 1 {
        (0..m).map(|e| place_on_edge(subdiv, &segs, &radii, epsilon, e)).collect()
    } else {
        let chunk = m.div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|k| {
                    let (segs, radii) = (&segs, &radii);
                    s.spawn(move || {
                        (k * chunk..((k + 1) * chunk).min(m))
                            .map(|e| place_on_edge(subdiv, segs, radii, epsilon, e))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("placement worker panicked")).collect()
        })
    };
    Ok(SteinerDiscretization { epsilon, b, radii, edges: edges.into_iter().collect::<Result<_>>()? })
}

fn place_on_edge(
    subdiv: &WeightedSubdivision,
    segs: &[Segment2],
    radii: &[f64],
    epsilon: f64,
    e: EdgeId,
) -> Result<EdgeSteiner> {
    let me = &subdiv.edges()[e];
    let seg = segs[e];
    let length = seg.length();
    let (ra, rb) = (radii[me.a], radii[me.b]);
    if ra >= length / 2.0 || rb >= length / 2.0 {
        return Err(Error::Config(format!(
            "vertex vicinities swallow edge {e} ({}, {}): radius {} vs length {length}",
            me.a,
            me.b,
            ra.max(rb)
        )));
    }
    let tol = subdiv.tolerance();
    let d = |x: Point2| clearance(segs, x, tol);
    let (t_e, d_e) = argmax_on_unit(|t| d(seg.at(t)));
    let meeting = t_e * length;
    let dir = seg.direction() * (1.0 / length);
    let mut from_a = progression(seg.a, dir, ra, meeting, epsilon, &d)?;
    let mut from_b = progression(seg.b, -dir, rb, length - meeting, epsilon, &d)?;
    dedup_meeting(&mut from_a, &mut from_b, length, epsilon, |x| seg.a + dir * x, &d);
    Ok(EdgeSteiner { edge: e, a: me.a, b: me.b, length, from_a, from_b, meeting, d_e })
}

/// A curve on mesh edges with extra vertices inserted along its edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinedCurve {
    pub curve: PolygonalCurve,
    /// Index in `curve` of each vertex of the unrefined curve.
    pub original_index: Vec<usize>,
    /// Vicinity radius εB/w_max(v) of each unrefined vertex.
    pub radii: Vec<f64>,
    /// Parameter of each refined vertex along the caller's curve.
    pub params: Vec<f64>,
    /// Supporting mesh edge of each refined segment.
    pub edge_support: Vec<EdgeId>,
}

impl RefinedCurve {
    pub fn inserted_count(&self) -> usize {
        self.curve.len() - self.original_index.len()
    }
}

/// Inserts progression points on every edge of `curve`.
///
/// Edges whose length does not exceed twice an endpoint radius are left as they are.
pub fn refine_curve(subdiv: &WeightedSubdivision, curve: &CurveOnMesh, epsilon: f64, b: f64) -> Result<RefinedCurve> {
    refine_curve_unweighted(subdiv, curve, epsilon, b / subdiv.min_weight())
}

/// [`refine_curve`] taking B/w_min instead of B.
pub(crate) fn refine_curve_unweighted(
    subdiv: &WeightedSubdivision,
    curve: &CurveOnMesh,
    epsilon: f64,
    unweighted: f64,
) -> Result<RefinedCurve> {
    check_epsilon(epsilon)?;
    if !(unweighted > 0.0) {
        return Err(Error::Degenerate("lower bound B is zero; the distance is 0".into()));
    }
    let w_min = subdiv.min_weight();
    let radii = curve
        .vertices()
        .iter()
        .map(|&v| {
            let w = subdiv
                .point_max_weight(v)
                .ok_or_else(|| Error::Input(format!("curve vertex ({}, {}) is outside the domain", v.x, v.y)))?;
            Ok(epsilon * unweighted * (w_min / w))
        })
        .collect::<Result<Vec<f64>>>()?;
    let segs = edge_segments(subdiv);
    let tol = subdiv.tolerance();
    let d = |x: Point2| clearance(&segs, x, tol);

    let verts = curve.vertices();
    let mut out = vec![verts[0]];
    let mut params = vec![curve.params[0]];
    let mut support = Vec::new();
    let mut original_index = vec![0];
    for (i, seg) in curve.curve.edges().enumerate() {
        let length = seg.length();
        let (ru, rw) = (radii[i], radii[i + 1]);
        let (pu, pw) = (curve.params[i], curve.params[i + 1]);
        let mut inner = Vec::new();
        if length > 0.0 && ru < length / 2.0 && rw < length / 2.0 {
            let (t_m, _) = argmax_on_unit(|t| d(seg.at(t)));
            let meeting = t_m * length;
            let dir = seg.direction() * (1.0 / length);
            let mut from_u = progression(seg.a, dir, ru, meeting, epsilon, &d)?;
            let mut from_w = progression(seg.b, -dir, rw, length - meeting, epsilon, &d)?;
            dedup_meeting(&mut from_u, &mut from_w, length, epsilon, |x| seg.a + dir * x, &d);
            inner.extend(from_u);
            inner.push(meeting);
            inner.extend(from_w.iter().rev().map(|x| length - x));
        }
        for x in inner {
            let f = x / length;
            out.push(seg.at(f));
            params.push(pu + (pw - pu) * f);
            support.push(curve.edge_support[i]);
        }
        out.push(seg.b);
        params.push(pw);
        support.push(curve.edge_support[i]);
        original_index.push(out.len() - 1);
    }
    Ok(RefinedCurve { curve: PolygonalCurve::new(out)?, original_index, radii, params, edge_support: support })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn square() -> WeightedSubdivision {
        WeightedSubdivision::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    fn strips() -> WeightedSubdivision {
        let t = 1.0 / 3.0;
        WeightedSubdivision::new(
            vec![p(0.0, 0.0), p(t, 0.0), p(2.0 * t, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(t, 1.0), p(2.0 * t, 1.0), p(1.0, 1.0)],
            vec![[0, 1, 5], [0, 5, 4], [1, 2, 6], [1, 6, 5], [2, 3, 7], [2, 7, 6]],
            vec![1.0, 1.0, 10.0, 10.0, 1.0, 1.0],
        )
        .unwrap()
    }

    /// Independent clearance: brute force over every mesh edge not through `x`.
    fn oracle_d(s: &WeightedSubdivision, x: Point2) -> f64 {
        let mut best = f64::INFINITY;
        for e in s.edges() {
            let (a, b) = (s.vertices()[e.a], s.vertices()[e.b]);
            let ab = b - a;
            let t = ((x - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            let dist = (a + ab * t - x).norm();
            if dist > 1e-9 {
                best = best.min(dist);
            }
        }
        best
    }

    /// Independent progression: fine-grid maximizer, then plain iteration from both ends.
    fn oracle_sequence(s: &WeightedSubdivision, a: Point2, b: Point2, ra: f64, rb: f64, eps: f64) -> Vec<f64> {
        let len = a.dist(b);
        let at = |x: f64| a + (b - a) * (x / len);
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 1..200_000 {
            let x = len * k as f64 / 200_000.0;
            let v = oracle_d(s, at(x));
            if v > best.1 {
                best = (x, v);
            }
        }
        let m = best.0;
        let mut fa = vec![];
        let mut x = ra;
        while x < m {
            fa.push(x);
            x += eps * oracle_d(s, at(x));
        }
        let mut fb = vec![];
        let mut y = rb;
        while y < len - m {
            fb.push(len - y);
            y += eps * oracle_d(s, at(len - y));
        }
        fa.push(m);
        fa.extend(fb.into_iter().rev());
        fa
    }

    #[test]
    fn clearance_examples() {
        let s = square();
        let d = clearance_d(&s, p(0.5, 0.0)).unwrap();
        assert!((d - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        let h = 3f64.sqrt() / 2.0;
        let tri = WeightedSubdivision::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.5, h)], vec![[0, 1, 2]], vec![1.0]).unwrap();
        assert!((clearance_d(&tri, p(0.5, 0.0)).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-12);
        // At a vertex only the opposite edge counts.
        assert!((clearance_d(&tri, p(0.0, 0.0)).unwrap() - h).abs() < 1e-12);
        assert!((clearance_d(&s, p(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(clearance_d(&s, p(0.25, 0.5)).is_err());
    }

    #[test]
    fn radius_examples() {
        assert!((vertex_radius(0.1, 1.0, 10, 2.0).unwrap() - 0.005).abs() < 1e-15);
        assert_eq!(vertex_radius(0.2, 5.0, 1, 1.0).unwrap(), 1.0);
        let r = vertex_radius(0.1, 3.0, 7, 2.5).unwrap();
        assert!((vertex_radius(0.1, 6.0, 7, 2.5).unwrap() - 2.0 * r).abs() < 1e-15);
        assert!(matches!(vertex_radius(0.1, 0.0, 1, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn square_sequences_match_reference_iteration() {
        let s = square();
        let (eps, b) = (0.25, 1.0);
        let sd = place_steiner(&s, eps, b).unwrap();
        let r = eps * b / 4.0;
        for es in &sd.edges {
            let (a, bb) = (s.vertices()[es.a], s.vertices()[es.b]);
            assert!((es.from_a[0] - r).abs() <= 1e-12 * r);
            let oracle = oracle_sequence(&s, a, bb, r, r, eps);
            let got = es.distances();
            assert_eq!(got.len(), oracle.len(), "edge {}: {got:?} vs {oracle:?}", es.edge);
            for (g, o) in got.iter().zip(&oracle) {
                assert!((g - o).abs() < 1e-5, "edge {}: {g} vs {o}", es.edge);
            }
        }
        // Bottom edge: the maximizer balances x/√2 against 1 - x.
        let bottom = &sd.edges[s.edge_between(0, 1).unwrap()];
        assert!((bottom.meeting - 2f64.sqrt() / (1.0 + 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn gap_rule_and_vicinities() {
        let s = strips();
        let sd = place_steiner(&s, 0.1, 1.0).unwrap();
        let segs = edge_segments(&s);
        for es in &sd.edges {
            let seg = s.edge_segment(es.edge);
            let (ra, rb) = (sd.radii[es.a], sd.radii[es.b]);
            for seq in [&es.from_a, &es.from_b] {
                for w in seq.windows(2) {
                    let start = if std::ptr::eq(seq, &es.from_a) { seg.a } else { seg.b };
                    let dir = if std::ptr::eq(seq, &es.from_a) { seg.direction() } else { -seg.direction() };
                    let x = start + dir * (w[0] / es.length);
                    let want = 0.1 * clearance(&segs, x, s.tolerance());
                    assert!(((w[1] - w[0]) - want).abs() <= 1e-9 * want);
                }
            }
            for x in es.distances() {
                assert!(x >= ra * (1.0 - 1e-12) && es.length - x >= rb * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn monotone_in_epsilon_and_errors() {
        let s = strips();
        let coarse = place_steiner(&s, 0.2, 1.0).unwrap().steiner_count();
        let fine = place_steiner(&s, 0.1, 1.0).unwrap().steiner_count();
        assert!(fine >= coarse);
        assert!(matches!(place_steiner(&s, 0.5, 1.0), Err(Error::Config(_))));
        assert!(matches!(place_steiner(&s, 0.1, 0.0), Err(Error::Degenerate(_))));
        // A huge B makes the vicinities cover whole edges.
        assert!(matches!(place_steiner(&s, 0.3, 1e3), Err(Error::Config(m)) if m.contains("edge")));
    }

    #[test]
    fn determinism_threads_and_weight_scaling() {
        let s = strips();
        let one = place_steiner(&s, 0.1, 1.0).unwrap();
        assert_eq!(one, place_steiner(&s, 0.1, 1.0).unwrap());
        assert_eq!(one, place_steiner_threads(&s, 0.1, 1.0, 3).unwrap());
        for c in [2.0, 3.0, 7.0] {
            let scaled = place_steiner(&s.with_scaled_weights(c), 0.1, c).unwrap();
            for (x, y) in one.edges.iter().zip(&scaled.edges) {
                assert_eq!(x.distances(), y.distances());
            }
        }
    }

    #[test]
    fn strip_refinement_matches_reference_iteration() {
        let s = strips();
        let (eps, b) = (0.25, 1.0);
        let left = CurveOnMesh::new(&s, PolygonalCurve::new(vec![p(0.0, 0.0), p(0.0, 1.0)]).unwrap()).unwrap();
        let rc = refine_curve(&s, &left, eps, b).unwrap();
        // Both endpoints touch only weight-1 regions.
        assert_eq!(rc.radii, vec![0.25, 0.25]);
        let oracle = oracle_sequence(&s, p(0.0, 0.0), p(0.0, 1.0), 0.25, 0.25, eps);
        let got: Vec<f64> = rc.curve.vertices[1..rc.curve.len() - 1].iter().map(|v| v.y).collect();
        assert_eq!(got.len(), oracle.len());
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-5, "{got:?} vs {oracle:?}");
        }
        assert_eq!(rc.original_index, vec![0, rc.curve.len() - 1]);
        assert!(rc.params.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refinement_unchanged_when_nothing_fits_and_monotone() {
        let s = strips();
        let c = CurveOnMesh::new(&s, PolygonalCurve::new(vec![p(0.0, 0.0), p(0.0, 1.0)]).unwrap()).unwrap();
        let rc = refine_curve(&s, &c, 0.3, 2.0).unwrap();
        assert_eq!(rc.curve, c.curve);
        let mut last = 0;
        for eps in [0.3, 0.2, 0.1, 0.05] {
            let n = refine_curve(&s, &c, eps, 1.0).unwrap().inserted_count();
            assert!(n >= last);
            last = n;
        }
    }
}
