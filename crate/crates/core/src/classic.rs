//! Unweighted Fréchet machinery: the free-space decision procedure, its
//! optimization by critical values, and the discrete Fréchet DP.

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Point2, PolygonalCurve, Segment2};
use crate::subdivision::WeightedSubdivision;

/// Default relative tolerance for [`euclidean_frechet`].
pub const DEFAULT_REL_TOL: f64 = 1e-6;

const WITNESS_TIE: f64 = 1e-12;

/// Order-preserving pairing of vertex indices (0-based) of two curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    pub pairs: Vec<(usize, usize)>,
}

impl Coupling {
    /// Checks the endpoint and single-step conditions against curve sizes.
    pub fn is_valid(&self, p: usize, q: usize) -> bool {
        let Some(&first) = self.pairs.first() else { return false };
        let last = *self.pairs.last().unwrap();
        first == (0, 0)
            && last == (p - 1, q - 1)
            && self.pairs.windows(2).all(|w| {
                let (da, db) = (w[1].0 as isize - w[0].0 as isize, w[1].1 as isize - w[0].1 as isize);
                matches!((da, db), (1, 0) | (0, 1) | (1, 1))
            })
    }
}

/// Free intervals on the four sides of one free-space cell, as parameters in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeSpaceCell {
    pub left: Option<(f64, f64)>,
    pub right: Option<(f64, f64)>,
    pub bottom: Option<(f64, f64)>,
    pub top: Option<(f64, f64)>,
}

/// Parameters of the points of `seg` within distance `delta` of `c`.
pub fn free_interval(seg: &Segment2, c: Point2, delta: f64) -> Option<(f64, f64)> {
    let d = seg.direction();
    let len2 = d.dot(d);
    let slack = 1e-12 * (1.0 + delta + seg.length());
    if len2 == 0.0 {
        return (seg.a.dist(c) <= delta + slack).then_some((0.0, 1.0));
    }
    let foot = (c - seg.a).dot(d) / len2;
    let line_dist = ((c - seg.a).cross(d)).abs() / len2.sqrt();
    if line_dist > delta + slack {
        return None;
    }
    let half = (delta * delta - line_dist * line_dist).max(0.0).sqrt() / len2.sqrt();
    let ptol = slack / len2.sqrt();
    let (lo, hi) = (foot - half, foot + half);
    if hi < -ptol || lo > 1.0 + ptol {
        return None;
    }
    Some((lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0)))
}

/// Free space of cell (i, j): P's segment i against Q's segment j.
pub fn free_space_cell(p: &PolygonalCurve, q: &PolygonalCurve, i: usize, j: usize, delta: f64) -> FreeSpaceCell {
    let (ps, qs) = (p.edge(i), q.edge(j));
    FreeSpaceCell {
        left: free_interval(&qs, ps.a, delta),
        right: free_interval(&qs, ps.b, delta),
        bottom: free_interval(&ps, qs.a, delta),
        top: free_interval(&ps, qs.b, delta),
    }
}

fn max_dist_to_point(curve: &PolygonalCurve, c: Point2) -> f64 {
    curve.vertices.iter().map(|v| v.dist(c)).fold(0.0, f64::max)
}

/// Whether the Fréchet distance of `p` and `q` is at most `delta`.
pub fn euclidean_decision(p: &PolygonalCurve, q: &PolygonalCurve, delta: f64) -> bool {
    let slack = 1e-12 * (1.0 + delta);
    if p.len() == 1 || q.len() == 1 {
        let (point, other) = if p.len() == 1 { (p.vertices[0], q) } else { (q.vertices[0], p) };
        return max_dist_to_point(other, point) <= delta + slack;
    }
    let (np, nq) = (p.len() - 1, q.len() - 1);
    if p.vertices[0].dist(q.vertices[0]) > delta + slack
        || p.vertices[np].dist(q.vertices[nq]) > delta + slack
    {
        return false;
    }
    // reach_left[j]: reachable part of the vertical side at the current P vertex over Q segment j.
    let mut reach_left: Vec<Option<(f64, f64)>> = vec![None; nq];
    let mut open = true;
    for j in 0..nq {
        let f = free_interval(&q.edge(j), p.vertices[0], delta);
        reach_left[j] = match f {
            Some((lo, hi)) if open && lo <= 1e-12 => Some((lo, hi)),
            _ => None,
        };
        open = matches!(reach_left[j], Some((_, hi)) if hi >= 1.0 - 1e-12);
    }
    let mut open_bottom = true;
    for i in 0..np {
        let ps = p.edge(i);
        // Bottom side of cell (i, 0) lies on the diagram boundary.
        let f = free_interval(&ps, q.vertices[0], delta);
        let mut reach_bottom = match f {
            Some((lo, hi)) if open_bottom && lo <= 1e-12 => Some((lo, hi)),
            _ => None,
        };
        open_bottom = matches!(reach_bottom, Some((_, hi)) if hi >= 1.0 - 1e-12);
        for j in 0..nq {
            let qs = q.edge(j);
            let left = reach_left[j];
            let right_free = free_interval(&qs, p.vertices[i + 1], delta);
            let top_free = free_interval(&ps, q.vertices[j + 1], delta);
            let right = match (right_free, reach_bottom, left) {
                (Some(f), Some(_), _) => Some(f),
                (Some((lo, hi)), None, Some((l, _))) if hi >= l - 1e-12 => Some((lo.max(l), hi)),
                _ => None,
            };
            let top = match (top_free, left, reach_bottom) {
                (Some(f), Some(_), _) => Some(f),
                (Some((lo, hi)), None, Some((b, _))) if hi >= b - 1e-12 => Some((lo.max(b), hi)),
                _ => None,
            };
            reach_left[j] = right;
            reach_bottom = top;
        }
    }
    matches!(reach_left[nq - 1], Some((_, hi)) if hi >= 1.0 - 1e-12)
}

/// Critical values at which the decision answer can change.
fn critical_values(p: &PolygonalCurve, q: &PolygonalCurve) -> Vec<f64> {
    let mut out = vec![
        p.vertices[0].dist(q.vertices[0]),
        p.vertices[p.len() - 1].dist(q.vertices[q.len() - 1]),
    ];
    for (a, b) in [(p, q), (q, p)] {
        for v in &a.vertices {
            for e in b.edges() {
                out.push(point_segment_distance(*v, &e));
            }
        }
        if b.len() == 1 {
            out.push(max_dist_to_point(a, b.vertices[0]));
        }
    }
    // Monotonicity events: a point of one segment equidistant from two vertices of the other curve.
    if p.len() * p.len() * q.len() + q.len() * q.len() * p.len() <= 4_000_000 {
        for (a, b) in [(p, q), (q, p)] {
            for e in b.edges() {
                let d = e.direction();
                if d.dot(d) == 0.0 {
                    continue;
                }
                for k in 0..a.len() {
                    for l in k + 1..a.len() {
                        let (u, v) = (a.vertices[k], a.vertices[l]);
                        let n = v - u;
                        let den = n.dot(d);
                        if den.abs() < 1e-300 {
                            continue;
                        }
                        let mid = (u + v) * 0.5;
                        let t = (mid - e.a).dot(n) / den;
                        if (0.0..=1.0).contains(&t) {
                            out.push(e.at(t).dist(u));
                        }
                    }
                }
            }
        }
    }
    out.retain(|x| x.is_finite());
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Continuous Fréchet distance under the Euclidean metric, within `rel_tol`
/// relative error (the returned value is always a feasible one).
pub fn euclidean_frechet(p: &PolygonalCurve, q: &PolygonalCurve, rel_tol: f64) -> f64 {
    let cands = critical_values(p, q);
    let (mut lo_i, mut hi_i) = (0usize, cands.len() - 1);
    if euclidean_decision(p, q, cands[0]) {
        return cands[0];
    }
    let top = cands[hi_i];
    if !euclidean_decision(p, q, top) {
        // Only reachable through rounding; widen until feasible.
        let mut hi = top.max(1e-300) * 2.0;
        while !euclidean_decision(p, q, hi) {
            hi *= 2.0;
        }
        return bisect(p, q, top, hi, rel_tol);
    }
    while hi_i - lo_i > 1 {
        let mid = (lo_i + hi_i) / 2;
        if euclidean_decision(p, q, cands[mid]) {
            hi_i = mid;
        } else {
            lo_i = mid;
        }
    }
    bisect(p, q, cands[lo_i], cands[hi_i], rel_tol)
}

fn bisect(p: &PolygonalCurve, q: &PolygonalCurve, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if euclidean_decision(p, q, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Discrete Fréchet distance over a `p × q` table of pairwise costs.
///
/// The witness prefers advancing both indices, then the first curve's index,
/// among predecessors tied with the cheapest one.
pub fn discrete_frechet_table(p: usize, q: usize, cost: impl Fn(usize, usize) -> f64) -> Result<(f64, Coupling)> {
    if p == 0 || q == 0 {
        return Err(Error::Input("discrete Fréchet needs non-empty curves".into()));
    }
    let mut dp = vec![f64::INFINITY; p * q];
    let at = |i: usize, j: usize| i * q + j;
    for i in 0..p {
        for j in 0..q {
            let prev = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => dp[at(0, j - 1)],
                (_, 0) => dp[at(i - 1, 0)],
                _ => dp[at(i - 1, j - 1)].min(dp[at(i - 1, j)]).min(dp[at(i, j - 1)]),
            };
            dp[at(i, j)] = prev.max(cost(i, j));
        }
    }
    let (mut i, mut j) = (p - 1, q - 1);
    let mut pairs = vec![(i, j)];
    while (i, j) != (0, 0) {
        let cands = [(i.wrapping_sub(1), j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1))];
        let valid = |&(a, b): &(usize, usize)| a < p && b < q;
        let floor = cands.iter().filter(|c| valid(c)).map(|&(a, b)| dp[at(a, b)]).fold(f64::INFINITY, f64::min);
        // Values within rounding of the minimum count as ties, so that scaling the
        // costs cannot flip the witness.
        let slack = floor + WITNESS_TIE * floor.abs();
        (i, j) = cands
            .into_iter()
            .find(|c| valid(c) && dp[at(c.0, c.1)] <= slack)
            .expect("a predecessor exists off the origin");
        pairs.push((i, j));
    }
    pairs.reverse();
    Ok((dp[at(p - 1, q - 1)], Coupling { pairs }))
}

/// Discrete Fréchet distance of the vertex sequences under `metric`.
pub fn discrete_frechet(
    p: &PolygonalCurve,
    q: &PolygonalCurve,
    metric: impl Fn(Point2, Point2) -> f64,
) -> Result<(f64, Coupling)> {
    discrete_frechet_table(p.len(), q.len(), |i, j| metric(p.vertices[i], q.vertices[j]))
}

/// Lower bound B = w_min · (Euclidean Fréchet distance) for either weighted leash model.
pub fn lower_bound_b(subdiv: &WeightedSubdivision, p: &PolygonalCurve, q: &PolygonalCurve) -> f64 {
    subdiv.min_weight() * euclidean_frechet(p, q, DEFAULT_REL_TOL)
}
