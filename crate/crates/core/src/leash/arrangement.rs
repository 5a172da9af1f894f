//! Arrangement of dual curves inside one parameter cell, built by a plane
//! sweep over σ. The sweep cuts the cell into trapezoids (regions between two
//! consecutive curve pieces over a σ-interval without vertices); faces of the
//! arrangement are unions of trapezoids glued along shared vertical sides.

use serde::Serialize;

use super::dual::{dual_pieces, CurvePiece, PieceKind};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2};

/// Index of the cell's bottom border (τ = 0) in [`CellArrangement::pieces`].
pub const BOTTOM: u32 = 0;
/// Index of the cell's top border (τ = 1).
pub const TOP: u32 = 1;

/// Events closer than this in σ are merged.
pub(crate) const EV_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trapezoid {
    pub s0: f64,
    pub s1: f64,
    pub lower: u32,
    pub upper: u32,
    pub face: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    /// Parameter point whose leash defines the weight.
    pub representative: (f64, f64),
    pub weight: f64,
    pub trapezoids: Vec<u32>,
}

/// Faces of the dual-curve arrangement of one (P edge, Q edge) cell.
#[derive(Clone, Debug, Serialize)]
pub struct CellArrangement {
    pub cell: (usize, usize),
    /// Non-vertical pieces; the first two are the bottom and top borders.
    pub pieces: Vec<CurvePiece>,
    pub verticals: Vec<CurvePiece>,
    pub trapezoids: Vec<Trapezoid>,
    pub faces: Vec<Face>,
    /// Number of pairwise piece intersections found.
    pub crossings: usize,
    #[serde(skip)]
    pub(crate) right_next: Vec<Vec<u32>>,
    #[serde(skip)]
    pub(crate) above: Vec<Vec<u32>>,
    #[serde(skip)]
    pub(crate) below: Vec<Vec<u32>>,
    /// Trapezoids touching σ = 0, bottom to top.
    #[serde(skip)]
    pub(crate) starts: Vec<u32>,
    /// Trapezoids touching σ = 1, bottom to top.
    #[serde(skip)]
    pub(crate) ends: Vec<u32>,
}

impl CellArrangement {
    #[inline]
    pub fn lower_at(&self, t: &Trapezoid, s: f64) -> f64 {
        self.pieces[t.lower as usize].eval(s).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn upper_at(&self, t: &Trapezoid, s: f64) -> f64 {
        self.pieces[t.upper as usize].eval(s).clamp(0.0, 1.0)
    }

    /// Face whose interior (or lower/left boundary) contains (σ, τ).
    pub fn face_at(&self, s: f64, t: f64) -> Option<usize> {
        let mut best = None;
        for tr in &self.trapezoids {
            if s < tr.s0 - EV_TOL || s > tr.s1 + EV_TOL {
                continue;
            }
            let (lo, hi) = (self.lower_at(tr, s), self.upper_at(tr, s));
            if t >= lo - EV_TOL && t <= hi + EV_TOL {
                let strict = s > tr.s0 && s < tr.s1 && t > lo && t < hi;
                if strict {
                    return Some(tr.face as usize);
                }
                best.get_or_insert(tr.face as usize);
            }
        }
        best
    }

    /// Vertical-side neighbours: trapezoids starting where `t` ends.
    pub fn right_neighbours(&self, t: usize) -> &[u32] {
        &self.right_next[t]
    }

    /// Trapezoids directly above piece `p` (those using it as lower boundary), by σ.
    pub fn above(&self, p: usize) -> &[u32] {
        &self.above[p]
    }

    /// Trapezoids directly below piece `p`, by σ.
    pub fn below(&self, p: usize) -> &[u32] {
        &self.below[p]
    }

    pub fn starts(&self) -> &[u32] {
        &self.starts
    }

    pub fn ends(&self) -> &[u32] {
        &self.ends
    }

    /// Area of a trapezoid (Simpson's rule; exact for the degree of the pieces up to curvature).
    pub fn area(&self, t: &Trapezoid) -> f64 {
        let (a, b) = (t.s0, t.s1);
        let m = 0.5 * (a + b);
        let h = |s: f64| (self.upper_at(t, s) - self.lower_at(t, s)).max(0.0);
        (b - a) / 6.0 * (h(a) + 4.0 * h(m) + h(b))
    }

    /// Point strictly inside trapezoid `t` at fractions (fs, ft) of its extent.
    pub fn point_in(&self, t: &Trapezoid, fs: f64, ft: f64) -> (f64, f64) {
        let s = t.s0 + (t.s1 - t.s0) * fs;
        let (lo, hi) = (self.lower_at(t, s), self.upper_at(t, s));
        (s, lo + (hi - lo) * ft)
    }
}

/// Real roots of A·x² + B·x + C = 0 (tangencies reported once).
fn quadratic_roots(a: f64, b: f64, c: f64) -> ([f64; 2], usize) {
    let m = a.abs().max(b.abs()).max(c.abs());
    if m == 0.0 {
        return ([0.0; 2], 0);
    }
    let (a, b, c) = (a / m, b / m, c / m);
    if a.abs() <= 1e-14 {
        if b.abs() <= 1e-300 {
            return ([0.0; 2], 0);
        }
        return ([-c / b, 0.0], 1);
    }
    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    if disc < -1e-12 * scale {
        return ([0.0; 2], 0);
    }
    if disc.abs() <= 1e-12 * scale {
        return ([-b / (2.0 * a), 0.0], 1);
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    ([q / a, c / q], 2)
}

/// σ-coordinates where two non-vertical pieces meet inside their common range.
pub(crate) fn piece_crossings(p: &CurvePiece, q: &CurvePiece, out: &mut Vec<f64>) {
    use super::dual::PieceKind::*;
    let (lo, hi) = (p.s0.max(q.s0), p.s1.min(q.s1));
    if lo > hi + EV_TOL {
        return;
    }
    let mut check = |s: f64| {
        if s >= lo - EV_TOL && s <= hi + EV_TOL {
            let s = s.clamp(lo, hi);
            let (u, v) = (p.eval(s), q.eval(s));
            if (u - v).abs() <= 1e-7 * (1.0 + u.abs()) {
                out.push(s);
            }
        }
    };
    match (p.kind, q.kind) {
        (Bilinear { a: a1, b: b1, c: c1, d: d1 }, Bilinear { a: a2, b: b2, c: c2, d: d2 }) => {
            let (r, n) = quadratic_roots(
                b2 * a1 - a2 * b1,
                b2 * c1 + d2 * a1 - a2 * d1 - c2 * b1,
                d2 * c1 - c2 * d1,
            );
            for &s in &r[..n] {
                check(s);
            }
        }
        (Bilinear { .. }, Horizontal(k)) => check(p.inverse(k)),
        (Horizontal(k), Bilinear { .. }) => check(q.inverse(k)),
        _ => {}
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn add(&mut self) -> u32 {
        self.0.push(self.0.len() as u32);
        self.0.len() as u32 - 1
    }
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let up = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = up;
            x = up;
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi as usize] = lo;
        }
    }
}

/// Sweeps the given pieces (borders are added here) into trapezoids and faces.
/// Face weights are left at zero.
pub fn sweep(cell: (usize, usize), input: Vec<CurvePiece>) -> CellArrangement {
    let mut pieces = vec![CurvePiece::horizontal(0.0, 0.0, 1.0, u32::MAX), CurvePiece::horizontal(1.0, 0.0, 1.0, u32::MAX)];
    let mut verticals = Vec::new();
    for p in input {
        if p.is_vertical() {
            if p.s0 > EV_TOL && p.s0 < 1.0 - EV_TOL {
                verticals.push(p);
            }
        } else if p.s1 - p.s0 > EV_TOL {
            // A horizontal piece on a border or on another horizontal only adds a
            // zero-height face that every crossing path would have to pay for.
            if let PieceKind::Horizontal(t) = p.kind {
                let covered = |q: &CurvePiece| {
                    matches!(q.kind, PieceKind::Horizontal(u) if (u - t).abs() <= EV_TOL && q.s0 <= p.s0 + EV_TOL && q.s1 >= p.s1 - EV_TOL)
                };
                if pieces.iter().any(covered) {
                    continue;
                }
            }
            pieces.push(p);
        }
    }

    let mut xs = vec![0.0, 1.0];
    for p in &pieces[2..] {
        xs.push(p.s0);
        xs.push(p.s1);
    }
    xs.extend(verticals.iter().map(|v| v.s0));
    let n = pieces.len();
    // Bounding boxes in τ speed up the pairwise tests.
    let tb: Vec<(f64, f64)> = pieces.iter().map(|p| (p.t0.min(p.t1), p.t0.max(p.t1))).collect();
    let before = xs.len();
    for i in 2..n {
        for j in i + 1..n {
            let (p, q) = (&pieces[i], &pieces[j]);
            if p.s0.max(q.s0) > p.s1.min(q.s1) + EV_TOL
                || tb[i].0 > tb[j].1 + 1e-9
                || tb[j].0 > tb[i].1 + 1e-9
            {
                continue;
            }
            piece_crossings(p, q, &mut xs);
        }
    }
    let crossings = xs.len() - before;
    xs.retain(|x| (0.0..=1.0).contains(x));
    xs.sort_by(f64::total_cmp);
    let mut events: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match events.last() {
            Some(&l) if x - l <= EV_TOL => {}
            _ => events.push(x),
        }
    }
    if *events.last().unwrap() < 1.0 {
        let last = events.len() - 1;
        if 1.0 - events[last] <= EV_TOL && last > 0 {
            events[last] = 1.0;
        } else {
            events.push(1.0);
        }
    }
    let index_of = |x: f64| events.partition_point(|&e| e < x - EV_TOL).min(events.len() - 1);
    let start_ev: Vec<usize> = pieces.iter().map(|p| index_of(p.s0)).collect();
    let end_ev: Vec<usize> = pieces.iter().map(|p| index_of(p.s1)).collect();
    let mut starting: Vec<Vec<u32>> = vec![Vec::new(); events.len()];
    for i in 0..n {
        if end_ev[i] > start_ev[i] {
            starting[start_ev[i]].push(i as u32);
        }
    }
    let mut vert_at: Vec<Vec<(f64, f64)>> = vec![Vec::new(); events.len()];
    for v in &verticals {
        vert_at[index_of(v.s0)].push((v.t0, v.t1));
    }

    let mut traps: Vec<Trapezoid> = Vec::new();
    let mut right_next: Vec<Vec<u32>> = Vec::new();
    let mut uf = UnionFind(Vec::new());
    let mut active: Vec<u32> = Vec::new();
    let mut open: Vec<u32> = Vec::new();
    // Neighbour maps: upper neighbour of a piece in the old/new active lists, tagged by event.
    let mut old_up = vec![(usize::MAX, 0u32); n];
    let mut new_up = vec![(usize::MAX, 0u32); n];
    let mut gap_of_lower = vec![u32::MAX; n];
    let mut keyed: Vec<(f64, u32)> = Vec::new();
    let mut starts = Vec::new();

    for k in 0..events.len() - 1 {
        let (se, mid) = (events[k], 0.5 * (events[k] + events[k + 1]));
        keyed.clear();
        for &p in active.iter().chain(&starting[k]) {
            if end_ev[p as usize] > k {
                let key = match p {
                    BOTTOM => f64::NEG_INFINITY,
                    TOP => f64::INFINITY,
                    _ => pieces[p as usize].eval(mid),
                };
                keyed.push((key, p));
            }
        }
        keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let new_active: Vec<u32> = keyed.iter().map(|x| x.1).collect();
        for w in new_active.windows(2) {
            new_up[w[0] as usize] = (k, w[1]);
        }
        let reset = !vert_at[k].is_empty() || k == 0;
        let mut new_open = vec![u32::MAX; new_active.len().saturating_sub(1)];
        let mut closed: Vec<u32> = Vec::new();
        if !reset {
            for (g, w) in active.windows(2).enumerate() {
                if new_up[w[0] as usize] != (k, w[1]) {
                    traps[open[g] as usize].s1 = se;
                    closed.push(open[g]);
                }
            }
        } else {
            for (g, _) in active.windows(2).enumerate() {
                traps[open[g] as usize].s1 = se;
                closed.push(open[g]);
            }
        }
        let mut opened: Vec<u32> = Vec::new();
        let mut cont: Vec<(usize, u32)> = Vec::new();
        for (h, w) in new_active.windows(2).enumerate() {
            let continuing = !reset && old_up[w[0] as usize] == (k.wrapping_sub(1), w[1]);
            if continuing {
                cont.push((h, w[1]));
            } else {
                let id = traps.len() as u32;
                traps.push(Trapezoid { s0: se, s1: f64::NAN, lower: w[0], upper: w[1], face: 0 });
                right_next.push(Vec::new());
                uf.add();
                new_open[h] = id;
                opened.push(id);
            }
        }
        // Continuing gaps keep the trapezoid they had under the same lower piece.
        for &(h, _) in &cont {
            new_open[h] = gap_of_lower[new_active[h] as usize];
        }
        if k == 0 {
            starts = opened.clone();
        }

        // Link closed trapezoids to the ones opened at this event.
        let blocked = &vert_at[k];
        let interval = |t: &Trapezoid| {
            let (l, u) = (pieces[t.lower as usize].eval(se), pieces[t.upper as usize].eval(se));
            (l.clamp(0.0, 1.0), u.clamp(0.0, 1.0))
        };
        let oi: Vec<(f64, f64)> = opened.iter().map(|&o| interval(&traps[o as usize])).collect();
        let mut j0 = 0;
        for &c in &closed {
            let (clo, chi) = interval(&traps[c as usize]);
            while j0 < opened.len() && oi[j0].1 < clo - EV_TOL {
                j0 += 1;
            }
            let mut j = j0;
            while j < opened.len() && oi[j].0 <= chi + EV_TOL {
                if oi[j].1 >= clo - EV_TOL {
                    right_next[c as usize].push(opened[j]);
                    let (x, y) = (clo.max(oi[j].0), chi.min(oi[j].1));
                    if y - x > EV_TOL && free_length(x, y, blocked) > EV_TOL {
                        uf.union(c, opened[j]);
                    }
                }
                j += 1;
            }
        }

        for (h, w) in new_active.windows(2).enumerate() {
            old_up[w[0] as usize] = (k, w[1]);
            gap_of_lower[w[0] as usize] = new_open[h];
        }
        active = new_active;
        open = new_open;
    }
    let mut ends = Vec::new();
    for &o in &open {
        traps[o as usize].s1 = 1.0;
        ends.push(o);
    }

    let mut face_of_root = std::collections::HashMap::new();
    let mut faces: Vec<Face> = Vec::new();
    for i in 0..traps.len() {
        let r = uf.find(i as u32);
        let f = *face_of_root.entry(r).or_insert_with(|| {
            faces.push(Face { representative: (0.0, 0.0), weight: 0.0, trapezoids: Vec::new() });
            faces.len() as u32 - 1
        });
        traps[i].face = f;
        faces[f as usize].trapezoids.push(i as u32);
    }
    let mut above = vec![Vec::new(); n];
    let mut below = vec![Vec::new(); n];
    for (i, t) in traps.iter().enumerate() {
        above[t.lower as usize].push(i as u32);
        below[t.upper as usize].push(i as u32);
    }
    let mut arr = CellArrangement {
        cell,
        pieces,
        verticals,
        trapezoids: traps,
        faces,
        crossings,
        right_next,
        above,
        below,
        starts,
        ends,
    };
    for f in 0..arr.faces.len() {
        arr.faces[f].representative = representative(&arr, f);
    }
    arr
}

/// Length of [x, y] not covered by the given intervals.
fn free_length(x: f64, y: f64, blocked: &[(f64, f64)]) -> f64 {
    if blocked.is_empty() {
        return y - x;
    }
    let mut iv: Vec<(f64, f64)> = blocked.iter().map(|&(a, b)| (a.max(x), b.min(y))).filter(|(a, b)| b > a).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut covered = 0.0;
    let mut reach = x;
    for (a, b) in iv {
        let a = a.max(reach);
        if b > a {
            covered += b - a;
            reach = b;
        }
    }
    (y - x) - covered
}

/// Area-weighted centroid of the face when it lies inside, else the middle of its largest trapezoid.
fn representative(arr: &CellArrangement, f: usize) -> (f64, f64) {
    let face = &arr.faces[f];
    let (mut area, mut ms, mut mt) = (0.0, 0.0, 0.0);
    let mut largest = (f64::NEG_INFINITY, face.trapezoids[0]);
    for &ti in &face.trapezoids {
        let t = &arr.trapezoids[ti as usize];
        let (a, b) = (t.s0, t.s1);
        let m = 0.5 * (a + b);
        let w = (b - a) / 6.0;
        let h = |s: f64| (arr.upper_at(t, s) - arr.lower_at(t, s)).max(0.0);
        let c = |s: f64| 0.5 * (arr.upper_at(t, s) + arr.lower_at(t, s));
        let ar = w * (h(a) + 4.0 * h(m) + h(b));
        area += ar;
        ms += w * (a * h(a) + 4.0 * m * h(m) + b * h(b));
        mt += w * (c(a) * h(a) + 4.0 * c(m) * h(m) + c(b) * h(b));
        if ar > largest.0 {
            largest = (ar, ti);
        }
    }
    if area > 0.0 {
        let (s, t) = (ms / area, mt / area);
        let inside = face.trapezoids.iter().any(|&ti| {
            let tr = &arr.trapezoids[ti as usize];
            s > tr.s0 && s < tr.s1 && t > arr.lower_at(tr, s) && t < arr.upper_at(tr, s)
        });
        if inside {
            return (s, t);
        }
    }
    arr.point_in(&arr.trapezoids[largest.1 as usize], 0.5, 0.5)
}

impl CellArrangement {
    /// Evaluates every face weight with `cost(σ, τ)` at its representative.
    pub fn assign_weights(&mut self, cost: impl Fn(f64, f64) -> Result<f64>) -> Result<()> {
        for (i, f) in self.faces.iter_mut().enumerate() {
            let (s, t) = f.representative;
            f.weight = cost(s, t).map_err(|e| {
                Error::Numeric(format!("face {i} of cell {:?} at ({s}, {t}): {e}", self.cell))
            })?;
        }
        Ok(())
    }
}

/// Points whose dual curve can meet the cell: those in the convex hull of the two segments.
pub(crate) fn may_touch_cell(v: Point2, seg_p: &Segment2, seg_q: &Segment2, tol: f64) -> bool {
    let pts = [seg_p.a, seg_p.b, seg_q.a, seg_q.b];
    let (xmin, xmax) = pts.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.x), h.max(p.x)));
    let (ymin, ymax) = pts.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.y), h.max(p.y)));
    v.x >= xmin - tol && v.x <= xmax + tol && v.y >= ymin - tol && v.y <= ymax + tol
}

/// Dual-curve pieces of `points` in the cell of `seg_p` × `seg_q`.
pub fn cell_pieces(seg_p: &Segment2, seg_q: &Segment2, points: &[Point2], tol: f64) -> Vec<CurvePiece> {
    let mut out = Vec::new();
    for (i, &v) in points.iter().enumerate() {
        if may_touch_cell(v, seg_p, seg_q, tol) {
            out.extend(dual_pieces(v, seg_p, seg_q, i as u32));
        }
    }
    out
}

/// Arrangement of the dual curves of `points` in one cell, with face weights from `cost`.
pub fn build_cell_arrangement(
    cell: (usize, usize),
    seg_p: &Segment2,
    seg_q: &Segment2,
    points: &[Point2],
    tol: f64,
    cost: impl Fn(f64, f64) -> Result<f64>,
) -> Result<CellArrangement> {
    let mut arr = sweep(cell, cell_pieces(seg_p, seg_q, points, tol));
    arr.assign_weights(cost)?;
    Ok(arr)
}
