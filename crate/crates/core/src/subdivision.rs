//! Weighted triangulated subdivisions and the weighted length of straight segments.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{
    intersection_params, orient2d, point_segment_distance, Point2, PolygonalCurve, Segment2,
    TOLERANCE,
};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type RegionId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct MeshEdge {
    pub a: VertexId,
    pub b: VertexId,
    /// Incident triangles (one for boundary edges, two for interior edges).
    pub triangles: Vec<RegionId>,
}

/// Where a point sits relative to the subdivision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Vertex(VertexId),
    Edge(EdgeId),
    Triangle(RegionId),
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceInterval {
    pub region: RegionId,
    pub t_in: f64,
    pub t_out: f64,
}

/// Regions crossed by a straight segment, with parameters along the segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentTrace {
    pub intervals: Vec<TraceInterval>,
    /// Euclidean length of the traced segment.
    pub length: f64,
}

/// A triangulated planar domain with a positive weight per triangle.
#[derive(Clone, Debug)]
pub struct WeightedSubdivision {
    vertices: Vec<Point2>,
    triangles: Vec<[VertexId; 3]>,
    weights: Vec<f64>,
    edges: Vec<MeshEdge>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    triangle_edges: Vec<[EdgeId; 3]>,
    vertex_edges: Vec<Vec<EdgeId>>,
    vertex_triangles: Vec<Vec<RegionId>>,
    tol: f64,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

impl WeightedSubdivision {
    /// Builds and validates a subdivision.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[VertexId; 3]>, weights: Vec<f64>) -> Result<Self> {
        let s = Self::build(vertices, triangles, weights)?;
        s.validate().map_err(Error::InvalidSubdivision)?;
        Ok(s)
    }

    /// Builds the derived tables without checking geometric invariants.
    ///
    /// Only structurally unusable input (indices out of range, mismatched
    /// lengths) is rejected; everything else is reported by [`Self::validate`].
    pub fn build(vertices: Vec<Point2>, triangles: Vec<[VertexId; 3]>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != triangles.len() {
            return Err(Error::InvalidSubdivision(vec![format!(
                "weights length {} ≠ triangles length {}",
                weights.len(),
                triangles.len()
            )]));
        }
        let bad: Vec<String> = triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.iter().any(|&v| v >= vertices.len()))
            .map(|(i, _)| format!("triangle {i} references a missing vertex"))
            .collect();
        if !bad.is_empty() {
            return Err(Error::InvalidSubdivision(bad));
        }

        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut edge_index = HashMap::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut vertex_edges = vec![Vec::new(); vertices.len()];
        let mut vertex_triangles = vec![Vec::new(); vertices.len()];
        for (ti, t) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for k in 0..3 {
                let (a, b) = key(t[k], t[(k + 1) % 3]);
                let id = *edge_index.entry((a, b)).or_insert_with(|| {
                    edges.push(MeshEdge { a, b, triangles: Vec::new() });
                    vertex_edges[a].push(edges.len() - 1);
                    if b != a {
                        vertex_edges[b].push(edges.len() - 1);
                    }
                    edges.len() - 1
                });
                if !edges[id].triangles.contains(&ti) {
                    edges[id].triangles.push(ti);
                }
                te[k] = id;
                if !vertex_triangles[t[k]].contains(&ti) {
                    vertex_triangles[t[k]].push(ti);
                }
            }
            triangle_edges.push(te);
        }

        let (mut lo, mut hi) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for v in &vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        let scale = if vertices.is_empty() { 1.0 } else { (hi - lo).norm().max(1.0) };

        Ok(WeightedSubdivision {
            vertices,
            triangles,
            weights,
            edges,
            edge_index,
            triangle_edges,
            vertex_edges,
            vertex_triangles,
            tol: TOLERANCE * scale,
        })
    }

    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut out = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_finite() {
                out.push(format!("vertex {i} is not finite"));
            }
        }
        for (i, w) in self.weights.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                out.push(format!("non-positive weight {i}"));
            }
        }
        let tol2 = self.tol * self.tol;
        for (i, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = self.triangle_points(i);
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || orient2d(a, b, c).abs() <= tol2 {
                out.push(format!("degenerate triangle {i}"));
            }
        }
        let mut seen: HashMap<[VertexId; 3], usize> = HashMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            let mut k = *t;
            k.sort_unstable();
            if let Some(j) = seen.insert(k, i) {
                out.push(format!("duplicate triangle {i} (same as {j})"));
            }
        }
        for i in 0..self.triangles.len() {
            for j in i + 1..self.triangles.len() {
                if self.triangle_interiors_overlap(i, j) {
                    out.push(format!("triangles {i} and {j} overlap"));
                }
            }
        }
        for e in &self.edges {
            if e.triangles.len() > 2 {
                out.push(format!(
                    "edge ({}, {}) shared by {} triangles",
                    e.a,
                    e.b,
                    e.triangles.len()
                ));
            }
        }
        let comps = self.component_count();
        if comps > 1 {
            out.push(format!("domain is not connected ({comps} components)"));
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    fn component_count(&self) -> usize {
        let n = self.triangles.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(t) = stack.pop() {
                for &e in &self.triangle_edges[t] {
                    for &u in &self.edges[e].triangles {
                        if comp[u] == usize::MAX {
                            comp[u] = count;
                            stack.push(u);
                        }
                    }
                }
            }
            count += 1;
        }
        count
    }

    fn triangle_interiors_overlap(&self, i: usize, j: usize) -> bool {
        let ti = self.triangle_points(i);
        let tj = self.triangle_points(j);
        let bbox = |t: &[Point2; 3]| {
            let xs = t.iter().map(|p| p.x);
            let ys = t.iter().map(|p| p.y);
            (
                xs.clone().fold(f64::MAX, f64::min),
                xs.fold(f64::MIN, f64::max),
                ys.clone().fold(f64::MAX, f64::min),
                ys.fold(f64::MIN, f64::max),
            )
        };
        let (a0, a1, b0, b1) = bbox(&ti);
        let (c0, c1, d0, d1) = bbox(&tj);
        if a1 <= c0 + self.tol || c1 <= a0 + self.tol || b1 <= d0 + self.tol || d1 <= b0 + self.tol {
            return false;
        }
        for tri in [&ti, &tj] {
            for k in 0..3 {
                let e = tri[(k + 1) % 3] - tri[k];
                let n = Point2::new(-e.y, e.x);
                let proj = |t: &[Point2; 3]| {
                    let v = t.iter().map(|p| p.dot(n));
                    (v.clone().fold(f64::MAX, f64::min), v.fold(f64::MIN, f64::max))
                };
                let (lo1, hi1) = proj(&ti);
                let (lo2, hi2) = proj(&tj);
                let t = self.tol * n.norm();
                if hi1 <= lo2 + t || hi2 <= lo1 + t {
                    return false;
                }
            }
        }
        true
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[VertexId; 3]] {
        &self.triangles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Incidence tolerance scaled to the extent of the mesh.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn triangle_points(&self, t: RegionId) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_edges(&self, t: RegionId) -> [EdgeId; 3] {
        self.triangle_edges[t]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn edge_segment(&self, e: EdgeId) -> Segment2 {
        let me = &self.edges[e];
        Segment2::new(self.vertices[me.a], self.vertices[me.b])
    }

    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v]
    }

    pub fn vertex_triangles(&self, v: VertexId) -> &[RegionId] {
        &self.vertex_triangles[v]
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Largest weight among the triangles incident to mesh vertex `v`.
    pub fn vertex_max_weight(&self, v: VertexId) -> f64 {
        self.vertex_triangles[v].iter().map(|&t| self.weights[t]).fold(0.0, f64::max)
    }

    /// Smallest weight among the triangles incident to edge `e`.
    pub fn edge_min_weight(&self, e: EdgeId) -> f64 {
        self.edges[e].triangles.iter().map(|&t| self.weights[t]).fold(f64::INFINITY, f64::min)
    }

    /// Largest weight among the regions whose closure contains `p`.
    pub fn point_max_weight(&self, p: Point2) -> Option<f64> {
        match self.locate(p) {
            Location::Vertex(v) => Some(self.vertex_max_weight(v)),
            Location::Edge(e) => Some(
                self.edges[e].triangles.iter().map(|&t| self.weights[t]).fold(0.0, f64::max),
            ),
            Location::Triangle(t) => Some(self.weights[t]),
            Location::Outside => None,
        }
    }

    /// Copy of the subdivision with every weight multiplied by `factor`.
    pub fn with_scaled_weights(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for w in &mut s.weights {
            *w *= factor;
        }
        s
    }

    /// Mesh edges whose closed segment contains `p` (within tolerance).
    pub fn edges_containing(&self, p: Point2) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| point_segment_distance(p, &self.edge_segment(e)) <= self.tol)
            .collect()
    }

    /// Identifies the mesh vertex, edge or triangle containing `p`.
    pub fn locate(&self, p: Point2) -> Location {
        if let Some(v) = self.vertices.iter().position(|v| v.dist(p) <= self.tol) {
            return Location::Vertex(v);
        }
        if let Some(e) =
            (0..self.edges.len()).find(|&e| point_segment_distance(p, &self.edge_segment(e)) <= self.tol)
        {
            return Location::Edge(e);
        }
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            let s = orient2d(a, b, c).signum();
            if orient2d(a, b, p) * s > 0.0 && orient2d(b, c, p) * s > 0.0 && orient2d(c, a, p) * s > 0.0 {
                return Location::Triangle(t);
            }
        }
        Location::Outside
    }

    fn min_weight_of(&self, tris: &[RegionId]) -> RegionId {
        let mut best = tris[0];
        for &t in tris {
            if self.weights[t] < self.weights[best] || (self.weights[t] == self.weights[best] && t < best) {
                best = t;
            }
        }
        best
    }

    /// Region charged for a point at the given location (minimum weight on shared boundaries).
    fn charged_region(&self, loc: Location) -> Option<RegionId> {
        match loc {
            Location::Triangle(t) => Some(t),
            Location::Edge(e) => Some(self.min_weight_of(&self.edges[e].triangles)),
            Location::Vertex(v) => Some(self.min_weight_of(&self.vertex_triangles[v])),
            Location::Outside => None,
        }
    }

    /// Ordered regions crossed by segment `ab`.
    ///
    /// Pieces running along a shared edge are charged to the lighter
    /// neighbour (smaller id on ties); pieces shorter than the tolerance are
    /// merged into a neighbour.
    pub fn trace_segment(&self, a: Point2, b: Point2) -> Result<SegmentTrace> {
        for (name, p) in [("start", a), ("end", b)] {
            if !p.is_finite() || self.locate(p) == Location::Outside {
                return Err(Error::Input(format!("segment {name} ({}, {}) is outside the domain", p.x, p.y)));
            }
        }
        let seg = Segment2::new(a, b);
        let length = seg.length();
        if length <= self.tol {
            let region = self.charged_region(self.locate(a)).expect("located above");
            return Ok(SegmentTrace { intervals: vec![TraceInterval { region, t_in: 0.0, t_out: 1.0 }], length });
        }

        let (xmin, xmax) = (a.x.min(b.x) - self.tol, a.x.max(b.x) + self.tol);
        let (ymin, ymax) = (a.y.min(b.y) - self.tol, a.y.max(b.y) + self.tol);
        let mut cuts = vec![0.0, 1.0];
        for e in 0..self.edges.len() {
            let es = self.edge_segment(e);
            if es.a.x.max(es.b.x) < xmin
                || es.a.x.min(es.b.x) > xmax
                || es.a.y.max(es.b.y) < ymin
                || es.a.y.min(es.b.y) > ymax
            {
                continue;
            }
            if let Some((t0, t1)) = intersection_params(&seg, &es) {
                cuts.push(t0);
                if t1 != t0 {
                    cuts.push(t1);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let ptol = self.tol / length;
        cuts.dedup_by(|x, y| (*x - *y).abs() <= ptol);
        if let Some(last) = cuts.last_mut() {
            *last = 1.0;
        }
        if cuts.len() < 2 {
            cuts = vec![0.0, 1.0];
        }

        let mut raw: Vec<TraceInterval> = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            let mid = seg.at(0.5 * (w[0] + w[1]));
            let region = self
                .charged_region(self.locate(mid))
                .ok_or_else(|| Error::Input("segment leaves the domain".into()))?;
            raw.push(TraceInterval { region, t_in: w[0], t_out: w[1] });
        }

        // Canonicalize: absorb sub-tolerance pieces, then merge equal neighbours.
        let mut merged: Vec<TraceInterval> = Vec::with_capacity(raw.len());
        for iv in raw {
            let short = (iv.t_out - iv.t_in) * length < self.tol;
            match merged.last_mut() {
                Some(last) if short || last.region == iv.region => last.t_out = iv.t_out,
                _ => merged.push(iv),
            }
        }
        if merged.len() > 1 && (merged[0].t_out - merged[0].t_in) * length < self.tol {
            let first = merged.remove(0);
            merged[0].t_in = first.t_in;
        }
        Ok(SegmentTrace { intervals: merged, length })
    }

    /// Weighted length of segment `ab`: Σ weight × Euclidean length over the trace.
    pub fn segment_cost(&self, a: Point2, b: Point2) -> Result<f64> {
        let trace = self.trace_segment(a, b)?;
        Ok(trace
            .intervals
            .iter()
            .map(|iv| self.weights[iv.region] * (iv.t_out - iv.t_in) * trace.length)
            .sum())
    }
}

/// A polygonal curve whose segments each lie on a single mesh edge.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveOnMesh {
    pub curve: PolygonalCurve,
    /// Supporting mesh edge of each curve segment.
    pub edge_support: Vec<EdgeId>,
    /// Parameter of each vertex along the curve as given by the caller.
    pub params: Vec<f64>,
}

impl CurveOnMesh {
    /// Resolves the supporting edge of every segment, splitting segments that
    /// run across several collinear mesh edges at the mesh vertices they pass.
    pub fn new(subdiv: &WeightedSubdivision, curve: PolygonalCurve) -> Result<Self> {
        for (i, &p) in curve.vertices.iter().enumerate() {
            if subdiv.edges_containing(p).is_empty() {
                return Err(Error::Input(format!(
                    "curve vertex {i} ({}, {}) is not on a mesh edge",
                    p.x, p.y
                )));
            }
        }
        let tol = subdiv.tolerance();
        let mut vertices = vec![curve.vertices[0]];
        let mut params = vec![0.0];
        let mut support = Vec::new();
        let m = curve.edge_count() as f64;
        for (i, seg) in curve.edges().enumerate() {
            let mut stops: Vec<(f64, Point2)> = subdiv
                .vertices()
                .iter()
                .filter(|&&v| v.dist(seg.a) > tol && v.dist(seg.b) > tol && point_segment_distance(v, &seg) <= tol)
                .map(|&v| (seg.project(v), v))
                .collect();
            stops.sort_by(|x, y| x.0.total_cmp(&y.0));
            stops.push((1.0, seg.b));
            let mut from = seg.a;
            for (t, to) in stops {
                let e = supporting_edge(subdiv, from, to).ok_or_else(|| {
                    Error::Input(format!("curve segment {i} is not supported by a mesh edge"))
                })?;
                support.push(e);
                vertices.push(to);
                params.push(if t == 1.0 { (i + 1) as f64 / m } else { (i as f64 + t) / m });
                from = to;
            }
        }
        Ok(CurveOnMesh { curve: PolygonalCurve::new(vertices)?, edge_support: support, params })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.curve.vertices
    }
}

fn supporting_edge(subdiv: &WeightedSubdivision, a: Point2, b: Point2) -> Option<EdgeId> {
    let tol = subdiv.tolerance();
    let on = |e: EdgeId| {
        let s = subdiv.edge_segment(e);
        point_segment_distance(a, &s) <= tol && point_segment_distance(b, &s) <= tol
    };
    let mut cands = subdiv.edges_containing(a);
    cands.retain(|&e| on(e));
    cands.into_iter().min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn square(w: [f64; 2]) -> WeightedSubdivision {
        WeightedSubdivision::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![[0, 1, 2], [0, 2, 3]],
            w.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(square([1.0, 1.0]).validate().is_ok());
        let flat = WeightedSubdivision::build(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)],
            vec![[0, 1, 2]],
            vec![1.0],
        )
        .unwrap();
        let v = flat.validate().unwrap_err();
        assert!(v.iter().any(|m| m == "degenerate triangle 0"), "{v:?}");
        let zero = WeightedSubdivision::build(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![0.0],
        )
        .unwrap();
        assert_eq!(zero.validate().unwrap_err(), vec!["non-positive weight 0".to_string()]);
    }

    #[test]
    fn overlap_duplicate_and_disconnected() {
        let dup = WeightedSubdivision::build(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)],
            vec![[0, 1, 2], [2, 1, 0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let v = dup.validate().unwrap_err();
        assert!(v.iter().any(|m| m.starts_with("duplicate triangle 1")));
        assert!(v.iter().any(|m| m.contains("overlap")));

        let apart = WeightedSubdivision::build(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(5.0, 5.0), p(6.0, 5.0), p(5.0, 6.0)],
            vec![[0, 1, 2], [3, 4, 5]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(apart.validate().unwrap_err()[0].contains("not connected"));
        assert!(WeightedSubdivision::build(vec![p(0.0, 0.0)], vec![[0, 1, 2]], vec![1.0]).is_err());
        assert!(WeightedSubdivision::build(vec![p(0.0, 0.0)], vec![], vec![1.0]).is_err());
    }

    #[test]
    fn locate_examples() {
        let s = square([1.0, 1.0]);
        // Lower triangle is (0,1,2): below the diagonal.
        assert_eq!(s.locate(p(0.75, 0.25)), Location::Triangle(0));
        assert_eq!(s.locate(p(0.5, 0.5)), Location::Edge(s.edge_between(0, 2).unwrap()));
        assert_eq!(s.locate(p(2.0, 2.0)), Location::Outside);
        assert_eq!(s.locate(p(1.0, 1.0)), Location::Vertex(2));
    }

    /// Square split at x = 0.5, each half cut by its own rising diagonal.
    fn halves() -> WeightedSubdivision {
        WeightedSubdivision::new(
            vec![p(0.0, 0.0), p(0.5, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.5, 1.0), p(1.0, 1.0)],
            vec![[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]],
            vec![1.0, 1.0, 10.0, 10.0],
        )
        .unwrap()
    }

    #[test]
    fn trace_across_halves() {
        let s = halves();
        let tr = s.trace_segment(p(0.0, 0.25), p(1.0, 0.25)).unwrap();
        // Brute-force crossings: left diagonal y = 2x at x = 0.125, the
        // split line at x = 0.5, the right diagonal y = 2(x - 0.5) at x = 0.625.
        let expect = [(1, 0.0, 0.125), (0, 0.125, 0.5), (3, 0.5, 0.625), (2, 0.625, 1.0)];
        assert_eq!(tr.intervals.len(), expect.len());
        for (iv, &(r, a, b)) in tr.intervals.iter().zip(&expect) {
            assert_eq!(iv.region, r);
            assert!((iv.t_in - a).abs() < 1e-12 && (iv.t_out - b).abs() < 1e-12, "{iv:?}");
        }
        let c = s.segment_cost(p(0.0, 0.25), p(1.0, 0.25)).unwrap();
        assert!((c - 5.5).abs() < 1e-12);
    }

    #[test]
    fn trace_degenerate_and_along_edge() {
        let s = square([1.0, 3.0]);
        let tr = s.trace_segment(p(0.25, 0.5), p(0.25, 0.5)).unwrap();
        assert_eq!(tr.intervals, vec![TraceInterval { region: 1, t_in: 0.0, t_out: 1.0 }]);
        assert_eq!(tr.length, 0.0);
        assert_eq!(s.segment_cost(p(0.25, 0.5), p(0.25, 0.5)).unwrap(), 0.0);

        let s = square([3.0, 1.0]);
        let tr = s.trace_segment(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        assert_eq!(tr.intervals.len(), 1);
        assert_eq!(tr.intervals[0].region, 1);
        let c = s.segment_cost(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-12);
        assert!(s.trace_segment(p(0.0, 0.0), p(2.0, 0.0)).is_err());
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

    #[test]
    fn strip_cost() {
        let s = strips();
        let c = s.segment_cost(p(0.0, 0.5), p(1.0, 0.5)).unwrap();
        assert!((c - 4.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn curve_support() {
        let s = square([1.0, 1.0]);
        let c = CurveOnMesh::new(&s, PolygonalCurve::new(vec![p(0.0, 0.0), p(0.0, 1.0)]).unwrap()).unwrap();
        assert_eq!(c.edge_support, vec![s.edge_between(0, 3).unwrap()]);

        let no_diag = WeightedSubdivision::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![[0, 1, 3], [1, 2, 3]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let off = CurveOnMesh::new(&no_diag, PolygonalCurve::new(vec![p(0.0, 0.0), p(0.25, 0.25)]).unwrap());
        assert!(matches!(off, Err(Error::Input(m)) if m.contains("vertex 1")));

        // Bottom boundary of the strips runs over three collinear mesh edges.
        let st = strips();
        let c = CurveOnMesh::new(&st, PolygonalCurve::new(vec![p(0.0, 0.0), p(1.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(c.curve.len(), 4);
        assert_eq!(c.edge_support.len(), 3);
        assert_eq!(c.edge_support[1], st.edge_between(1, 2).unwrap());
        assert!((c.params[2] - 2.0 / 3.0).abs() < 1e-12 && c.params[3] == 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn inside() -> impl Strategy<Value = Point2> {
            (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(x, y)| Point2::new(x, y))
        }

        proptest! {
            #[test]
            fn cost_symmetry_additivity_bounds(a in inside(), b in inside(), m in 0.0..1.0f64, c in 0.1..20.0f64) {
                let s = strips();
                let ab = s.segment_cost(a, b).unwrap();
                let ba = s.segment_cost(b, a).unwrap();
                prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1e-300) + 1e-15);
                let mid = a.lerp(b, m);
                let split = s.segment_cost(a, mid).unwrap() + s.segment_cost(mid, b).unwrap();
                prop_assert!((ab - split).abs() <= 1e-9 * ab.max(1e-12));
                let len = a.dist(b);
                prop_assert!(ab >= s.min_weight() * len * (1.0 - 1e-12));
                prop_assert!(ab <= s.max_weight() * len * (1.0 + 1e-12));
                let scaled = s.with_scaled_weights(c).segment_cost(a, b).unwrap();
                prop_assert!((scaled - c * ab).abs() <= 1e-12 * scaled.max(1e-300));
            }

            #[test]
            fn unit_weights_give_euclidean_length(a in inside(), b in inside()) {
                let s = square([1.0, 1.0]);
                prop_assert!((s.segment_cost(a, b).unwrap() - a.dist(b)).abs() < 1e-12);
            }
        }
    }
}
