//! Extension of a cell arrangement by horizontal and vertical lines through
//! all of its vertices, and the reachability graph over the resulting edges.
//!
//! Every refined cell is bounded by two σ-lines, two τ-lines and two dual
//! curve pieces that do not cross inside it, so its lower and upper
//! boundaries are monotone and dominance between two boundary points implies
//! a monotone path inside the cell. Edges become graph nodes; edges that
//! share a point are joined through zero-cost hub nodes.

use std::collections::HashMap;

use serde::Serialize;

use super::arrangement::{piece_crossings, CellArrangement, EV_TOL};
use super::bottleneck::{bottleneck_path, BottleneckGraph};
use super::dual::{CurvePiece, PieceKind};
use super::search::ArrangementGrid;
use crate::error::{Error, Result};
use crate::matching::FaceVisit;

/// Points closer than this (in global parameter units) are the same graph hub.
const HUB_TOL: f64 = 1e-9;
/// Slack in dominance tests.
const TOL: f64 = 1e-12;
/// Refuse to build more edges than this over a whole grid.
pub const MAX_EDGES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EdgeGeom {
    Vertical { s: f64, t0: f64, t1: f64 },
    Horizontal { t: f64, s0: f64, s1: f64 },
    /// Part of a curve piece; `t0`, `t1` are its values at `s0`, `s1`.
    Chord { piece: u32, s0: f64, s1: f64, t0: f64, t1: f64 },
}

impl EdgeGeom {
    pub fn start(&self) -> (f64, f64) {
        match *self {
            EdgeGeom::Vertical { s, t0, .. } => (s, t0),
            EdgeGeom::Horizontal { t, s0, .. } => (s0, t),
            EdgeGeom::Chord { s0, t0, .. } => (s0, t0),
        }
    }

    pub fn end(&self) -> (f64, f64) {
        match *self {
            EdgeGeom::Vertical { s, t1, .. } => (s, t1),
            EdgeGeom::Horizontal { t, s1, .. } => (s1, t),
            EdgeGeom::Chord { s1, t1, .. } => (s1, t1),
        }
    }

    fn decreasing(&self) -> bool {
        matches!(*self, EdgeGeom::Chord { t0, t1, .. } if t1 < t0)
    }
}

/// One cell of the refined decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DCell {
    pub slab: usize,
    pub band: usize,
    /// Curve pieces below and above (indices into the arrangement's pieces).
    pub lower: u32,
    pub upper: u32,
    /// σ-range over which the cell has points.
    pub s0: f64,
    pub s1: f64,
    pub face: usize,
    pub weight: f64,
    pub edges: Vec<u32>,
}

/// The refined decomposition of one arrangement cell.
#[derive(Clone, Debug, Serialize)]
pub struct ParamDecomposition {
    pub cell: (usize, usize),
    pub sigmas: Vec<f64>,
    pub taus: Vec<f64>,
    /// Vertices of the arrangement the extension lines pass through.
    pub vertices: Vec<(f64, f64)>,
    pub cells: Vec<DCell>,
    pub edges: Vec<EdgeGeom>,
    pub pieces: Vec<CurvePiece>,
}

impl ParamDecomposition {
    fn value(&self, piece: u32, s: f64) -> f64 {
        self.pieces[piece as usize].eval(s)
    }

    fn chord_at(&self, e: &EdgeGeom, s: f64) -> f64 {
        match *e {
            EdgeGeom::Chord { piece, t0, t1, .. } => self.value(piece, s).clamp(t0.min(t1), t0.max(t1)),
            EdgeGeom::Horizontal { t, .. } => t,
            EdgeGeom::Vertical { .. } => f64::NAN,
        }
    }

    /// Lowest τ a point at σ needs to dominate some point of `a` (infinite left of `a`).
    fn threshold(&self, a: &EdgeGeom, s: f64) -> f64 {
        let (x, e) = (a.start(), a.end());
        if s < x.0 - TOL {
            f64::INFINITY
        } else if a.decreasing() {
            self.chord_at(a, s.clamp(x.0, e.0))
        } else {
            x.1
        }
    }

    /// Whether a point in the relative interior of `b` dominates some point of `a`.
    ///
    /// A path that only touches the endpoint of an edge has not reached the
    /// edge: its other points may lie behind faces the path never crossed.
    pub fn reaches(&self, a: &EdgeGeom, b: &EdgeGeom) -> bool {
        let (b0, b1) = (b.start(), b.end());
        match *b {
            EdgeGeom::Vertical { s, t1, .. } => self.threshold(a, s) < t1 - TOL,
            EdgeGeom::Horizontal { t, s0, s1 } => {
                // The threshold does not increase with σ: test just left of the end.
                let x = a.start();
                let first = if a.decreasing() {
                    let e = a.end();
                    if x.1 <= t {
                        x.0
                    } else if e.1 <= t {
                        match *a {
                            EdgeGeom::Chord { piece, .. } => self.pieces[piece as usize].inverse(t).clamp(x.0, e.0),
                            _ => unreachable!(),
                        }
                    } else {
                        f64::INFINITY
                    }
                } else if x.1 <= t + TOL {
                    x.0
                } else {
                    f64::INFINITY
                };
                first.max(s0) < s1 - TOL
            }
            EdgeGeom::Chord { .. } if !b.decreasing() => {
                // Chord minus threshold increases with σ: the best point is the end.
                a.start().0 < b1.0 - TOL && self.threshold(a, b1.0) < b1.1 - TOL
            }
            EdgeGeom::Chord { .. } => {
                let lo = b0.0.max(a.start().0);
                if lo >= b1.0 - TOL {
                    return false;
                }
                if !a.decreasing() {
                    return self.chord_at(b, lo) > a.start().1 + TOL;
                }
                (0..=64).any(|k| {
                    let s = lo + (b1.0 - lo) * k as f64 / 64.0;
                    s < b1.0 - TOL && self.chord_at(b, s) > self.threshold(a, s) + TOL
                })
            }
        }
    }
}

/// σ-range inside [a, b] where the monotone piece `p` is ≤ `level` (or ≥ when `above`).
fn level_range(p: &CurvePiece, a: f64, b: f64, level: f64, above: bool) -> Option<(f64, f64)> {
    let ok = |s: f64| if above { p.eval(s) >= level } else { p.eval(s) <= level };
    match (ok(a), ok(b)) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (oa, _) => {
            let x = p.inverse(level);
            let x = if x.is_finite() { x.clamp(a, b) } else { 0.5 * (a + b) };
            Some(if oa { (a, x) } else { (x, b) })
        }
    }
}

/// Vertices of the arrangement: piece endpoints, crossings, vertical-line ends and hits.
fn arrangement_vertices(arr: &CellArrangement) -> Vec<(f64, f64)> {
    let mut v = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let n = arr.pieces.len();
    for p in &arr.pieces[2..] {
        v.push((p.s0, p.eval(p.s0)));
        v.push((p.s1, p.eval(p.s1)));
    }
    let mut xs = Vec::new();
    for i in 2..n {
        for j in i + 1..n {
            xs.clear();
            piece_crossings(&arr.pieces[i], &arr.pieces[j], &mut xs);
            v.extend(xs.iter().map(|&s| (s, arr.pieces[i].eval(s))));
        }
    }
    for vert in &arr.verticals {
        let s = vert.s0;
        v.push((s, vert.t0.min(vert.t1)));
        v.push((s, vert.t0.max(vert.t1)));
        for p in &arr.pieces {
            if s >= p.s0 - EV_TOL && s <= p.s1 + EV_TOL {
                let t = p.eval(s);
                if t >= vert.t0.min(vert.t1) - EV_TOL && t <= vert.t0.max(vert.t1) + EV_TOL {
                    v.push((s, t));
                }
            }
        }
    }
    for p in v.iter_mut() {
        *p = (p.0.clamp(0.0, 1.0), p.1.clamp(0.0, 1.0));
    }
    v
}

fn lines(mut xs: Vec<f64>) -> Vec<f64> {
    xs.push(0.0);
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last() {
            Some(&l) if x - l <= EV_TOL => {}
            _ => out.push(x),
        }
    }
    if *out.last().unwrap() != 1.0 {
        *out.last_mut().unwrap() = 1.0;
    }
    out
}

/// Edges of the graph of max(p, c) (bottom) or min(p, d) (top) over [a, b].
fn boundary_edges(p: &CurvePiece, pi: u32, a: f64, b: f64, clamp: f64, bottom: bool, out: &mut Vec<EdgeGeom>) {
    let len_ok = |e: &EdgeGeom| {
        let (x, y) = (e.start(), e.end());
        (y.0 - x.0).abs().max((y.1 - x.1).abs()) > EV_TOL
    };
    if let PieceKind::Horizontal(k) = p.kind {
        let t = if bottom { k.max(clamp) } else { k.min(clamp) };
        let e = EdgeGeom::Horizontal { t, s0: a, s1: b };
        if len_ok(&e) {
            out.push(e);
        }
        return;
    }
    let inside = |s: f64| if bottom { p.eval(s) >= clamp } else { p.eval(s) <= clamp };
    let mut cuts = vec![a];
    let x = p.inverse(clamp);
    if x.is_finite() && x > a + EV_TOL && x < b - EV_TOL {
        cuts.push(x);
    }
    cuts.push(b);
    for w in cuts.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let e = if inside(0.5 * (s0 + s1)) {
            let at = |s: f64| if s == x { clamp } else { p.eval(s) };
            let (t0, t1) = (at(s0), at(s1));
            let (t0, t1) = if bottom { (t0.max(clamp), t1.max(clamp)) } else { (t0.min(clamp), t1.min(clamp)) };
            EdgeGeom::Chord { piece: pi, s0, s1, t0, t1 }
        } else {
            EdgeGeom::Horizontal { t: clamp, s0, s1 }
        };
        if len_ok(&e) {
            out.push(e);
        }
    }
}

/// Refines an arrangement by horizontal and vertical lines through its vertices.
pub fn decompose(arr: &CellArrangement) -> ParamDecomposition {
    let vertices = arrangement_vertices(arr);
    let sigmas = lines(vertices.iter().map(|v| v.0).collect());
    let taus = lines(vertices.iter().map(|v| v.1).collect());
    decompose_on(arr, vertices, sigmas, taus)
}

fn decompose_on(arr: &CellArrangement, vertices: Vec<(f64, f64)>, sigmas: Vec<f64>, taus: Vec<f64>) -> ParamDecomposition {
    let mut cells = Vec::new();
    let mut edges: Vec<EdgeGeom> = Vec::new();
    let mut tmp = Vec::new();
    for k in 0..sigmas.len() - 1 {
        let (a, b) = (sigmas[k], sigmas[k + 1]);
        let mid = 0.5 * (a + b);
        let mut active: Vec<(f64, u32)> = arr
            .pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.s0 <= a + EV_TOL && p.s1 >= b - EV_TOL)
            .map(|(i, p)| (p.eval(mid), i as u32))
            .collect();
        active.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for w in active.windows(2) {
            let (li, ui) = (w[0].1, w[1].1);
            let (lp, up) = (&arr.pieces[li as usize], &arr.pieces[ui as usize]);
            let lo_min = lp.eval(a).min(lp.eval(b));
            let up_max = up.eval(a).max(up.eval(b));
            let m0 = taus.partition_point(|&t| t <= lo_min).saturating_sub(1);
            for m in m0..taus.len() - 1 {
                let (c, d) = (taus[m], taus[m + 1]);
                if c >= up_max {
                    break;
                }
                let Some((x0, x1)) = level_range(lp, a, b, d, false) else { continue };
                let Some((y0, y1)) = level_range(up, a, b, c, true) else { continue };
                let (s0, s1) = (x0.max(y0), x1.min(y1));
                if s1 - s0 <= EV_TOL {
                    continue;
                }
                let lo = |s: f64| lp.eval(s).max(c);
                let hi = |s: f64| up.eval(s).min(d);
                let (mut best, mut at) = (f64::NEG_INFINITY, s0);
                for q in 0..=8 {
                    let s = s0 + (s1 - s0) * q as f64 / 8.0;
                    let s = if q == 0 || q == 8 { s0 + (s1 - s0) * (0.01 + 0.98 * q as f64 / 8.0) } else { s };
                    if hi(s) - lo(s) > best {
                        best = hi(s) - lo(s);
                        at = s;
                    }
                }
                if best <= EV_TOL {
                    continue;
                }
                let face = arr.face_at(at, 0.5 * (lo(at) + hi(at))).unwrap_or(0);
                tmp.clear();
                if s0 <= a + EV_TOL && hi(a) - lo(a) > EV_TOL {
                    tmp.push(EdgeGeom::Vertical { s: a, t0: lo(a), t1: hi(a) });
                }
                if s1 >= b - EV_TOL && hi(b) - lo(b) > EV_TOL {
                    tmp.push(EdgeGeom::Vertical { s: b, t0: lo(b), t1: hi(b) });
                }
                boundary_edges(lp, li, s0, s1, c, true, &mut tmp);
                boundary_edges(up, ui, s0, s1, d, false, &mut tmp);
                let first = edges.len() as u32;
                edges.extend_from_slice(&tmp);
                cells.push(DCell {
                    slab: k,
                    band: m,
                    lower: li,
                    upper: ui,
                    s0,
                    s1,
                    face,
                    weight: arr.faces[face].weight,
                    edges: (first..edges.len() as u32).collect(),
                });
            }
        }
    }
    ParamDecomposition { cell: arr.cell, sigmas, taus, vertices, cells, edges, pieces: arr.pieces.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeRef {
    Hub(f64, f64),
    Edge { dec: usize, edge: usize },
}

/// Graph whose nodes are decomposition edges plus hub points.
pub struct ReachabilityGraph {
    pub graph: BottleneckGraph,
    pub nodes: Vec<NodeRef>,
    pub source: usize,
    pub sink: usize,
    /// (decomposition, refined cell) an arc passes through; zero-cost joins are absent.
    pub arc_cell: HashMap<(usize, usize), (usize, usize)>,
}

fn global(d: &ParamDecomposition, p: (f64, f64)) -> (f64, f64) {
    (d.cell.0 as f64 + p.0, d.cell.1 as f64 + p.1)
}

/// Builds the reachability graph of a grid of decompositions (`np` × `nq` cells, row-major).
///
/// Edge nodes stand for the whole edge once any interior point is reached.
/// Vertices are hub nodes: an edge reaches its endpoints for free, and a hub
/// reaches the edges of each refined cell around it at that cell's weight.
pub fn reachability_graph(decs: &[ParamDecomposition], np: usize, nq: usize) -> Result<ReachabilityGraph> {
    let mut nodes = Vec::new();
    let mut offset = Vec::with_capacity(decs.len());
    for (di, d) in decs.iter().enumerate() {
        offset.push(nodes.len());
        nodes.extend((0..d.edges.len()).map(|e| NodeRef::Edge { dec: di, edge: e }));
    }
    let n_edges = nodes.len();
    let mut g = BottleneckGraph::new(n_edges);

    // Hubs: endpoints clustered by global position and cell. A path may pass
    // from the hub of one cell to the hub of the same point in a cell further
    // along both curves, never back.
    const SOURCE: usize = usize::MAX;
    const SINK: usize = usize::MAX - 1;
    let mut ends: Vec<((f64, f64), usize, usize)> = Vec::with_capacity(2 * n_edges + 2);
    for (di, d) in decs.iter().enumerate() {
        for (e, geom) in d.edges.iter().enumerate() {
            ends.push((global(d, geom.start()), offset[di] + e, di));
            ends.push((global(d, geom.end()), offset[di] + e, di));
        }
    }
    ends.push(((0.0, 0.0), SOURCE, 0));
    ends.push(((np as f64, nq as f64), SINK, decs.len().saturating_sub(1)));
    ends.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
    let mut group = vec![usize::MAX; ends.len()];
    let mut n_groups = 0;
    for i in 0..ends.len() {
        if group[i] == usize::MAX {
            group[i] = n_groups;
            n_groups += 1;
        }
        let mut j = i + 1;
        while j < ends.len() && ends[j].0 .0 - ends[i].0 .0 <= HUB_TOL {
            if group[j] == usize::MAX && (ends[j].0 .1 - ends[i].0 .1).abs() <= HUB_TOL {
                group[j] = group[i];
            }
            j += 1;
        }
    }
    let mut hub_at: HashMap<(usize, usize), usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_groups];
    let (mut source, mut sink) = (usize::MAX, usize::MAX);
    let mut end_hubs = vec![(usize::MAX, usize::MAX); n_edges];
    for (i, &(pt, what, di)) in ends.iter().enumerate() {
        let h = *hub_at.entry((group[i], di)).or_insert_with(|| {
            nodes.push(NodeRef::Hub(pt.0, pt.1));
            members[group[i]].push(di);
            g.add_node()
        });
        match what {
            SOURCE => source = h,
            SINK => sink = h,
            e => {
                g.add_arc(e, h, 0.0);
                let slot = &mut end_hubs[e];
                if slot.0 == usize::MAX {
                    slot.0 = h;
                } else {
                    slot.1 = h;
                }
            }
        }
    }
    for (gi, cells) in members.iter().enumerate() {
        for &c1 in cells {
            for &c2 in cells {
                let forward = c2 / nq >= c1 / nq && c2 % nq >= c1 % nq;
                if c1 != c2 && forward {
                    g.add_arc(hub_at[&(gi, c1)], hub_at[&(gi, c2)], 0.0);
                }
            }
        }
    }

    // Copies of one geometric edge in the refined cells on either side are the same place.
    let mut by_ends: HashMap<(usize, usize, std::mem::Discriminant<EdgeGeom>), Vec<usize>> = HashMap::new();
    for (e, &(a, b)) in end_hubs.iter().enumerate() {
        let NodeRef::Edge { dec, edge } = nodes[e] else { unreachable!() };
        by_ends.entry((a.min(b), a.max(b), std::mem::discriminant(&decs[dec].edges[edge]))).or_default().push(e);
    }
    let mut groups: Vec<&Vec<usize>> = by_ends.values().filter(|v| v.len() > 1).collect();
    groups.sort();
    for group in groups {
        for &x in group {
            for &y in group {
                if x != y {
                    g.add_arc(x, y, 0.0);
                }
            }
        }
    }

    // Edges on the shared border of neighbouring cells that overlap in more than a point, forwards only.
    let join = |g: &mut BottleneckGraph, a: &[(f64, f64, usize)], b: &[(f64, f64, usize)]| {
        for &(a0, a1, x) in a {
            for &(b0, b1, y) in b {
                if a1.min(b1) - a0.max(b0) > HUB_TOL {
                    g.add_arc(x, y, 0.0);
                }
            }
        }
    };
    let on_border = |di: usize, vertical: bool, at: f64| -> Vec<(f64, f64, usize)> {
        decs[di]
            .edges
            .iter()
            .enumerate()
            .filter_map(|(e, geom)| match *geom {
                EdgeGeom::Vertical { s, t0, t1 } if vertical && s == at => Some((t0, t1, offset[di] + e)),
                EdgeGeom::Horizontal { t, s0, s1 } if !vertical && t == at => Some((s0, s1, offset[di] + e)),
                _ => None,
            })
            .collect()
    };
    for i in 0..np {
        for j in 0..nq {
            let here = i * nq + j;
            if i + 1 < np {
                join(&mut g, &on_border(here, true, 1.0), &on_border(here + nq, true, 0.0));
            }
            if j + 1 < nq {
                join(&mut g, &on_border(here, false, 1.0), &on_border(here + 1, false, 0.0));
            }
        }
    }

    let mut arc_cell = HashMap::new();
    let note = |arc_cell: &mut HashMap<(usize, usize), (usize, usize)>, key, di: usize, ci: usize| {
        let slot = arc_cell.entry(key).or_insert((di, ci));
        if decs[slot.0].cells[slot.1].weight > decs[di].cells[ci].weight {
            *slot = (di, ci);
        }
    };
    let mut hubs = Vec::new();
    for (di, d) in decs.iter().enumerate() {
        for (ci, c) in d.cells.iter().enumerate() {
            for &x in &c.edges {
                for &y in &c.edges {
                    if x != y && d.reaches(&d.edges[x as usize], &d.edges[y as usize]) {
                        let (u, v) = (offset[di] + x as usize, offset[di] + y as usize);
                        g.add_arc(u, v, c.weight);
                        note(&mut arc_cell, (u, v), di, ci);
                    }
                }
            }
            hubs.clear();
            for &x in &c.edges {
                let (h0, h1) = end_hubs[offset[di] + x as usize];
                hubs.push((h0, d.edges[x as usize].start()));
                hubs.push((h1, d.edges[x as usize].end()));
            }
            hubs.sort_by_key(|h| h.0);
            hubs.dedup_by_key(|h| h.0);
            for &(h, at) in &hubs {
                let point = EdgeGeom::Vertical { s: at.0, t0: at.1, t1: at.1 };
                for &y in &c.edges {
                    if d.reaches(&point, &d.edges[y as usize]) {
                        let v = offset[di] + y as usize;
                        g.add_arc(h, v, c.weight);
                        note(&mut arc_cell, (h, v), di, ci);
                    }
                }
            }
        }
    }
    if source == usize::MAX || sink == usize::MAX {
        return Err(Error::Internal("decomposition has no source or sink".into()));
    }
    Ok(ReachabilityGraph { graph: g, nodes, source, sink, arc_cell })
}

/// Lowest point of `e` dominating `x`, or the closest candidate when none does.
fn point_after(d: &ParamDecomposition, e: &EdgeGeom, x: (f64, f64)) -> (f64, f64) {
    match *e {
        EdgeGeom::Vertical { s, t0, t1 } => (s, x.1.clamp(t0, t1)),
        EdgeGeom::Horizontal { t, s0, s1 } => (x.0.clamp(s0, s1), t),
        EdgeGeom::Chord { piece, s0, s1, t0, t1 } => {
            let mut s = x.0.clamp(s0, s1);
            if t1 > t0 && d.chord_at(e, s) < x.1 {
                let inv = d.pieces[piece as usize].inverse(x.1);
                if inv.is_finite() {
                    s = inv.clamp(s, s1);
                }
            }
            (s, d.chord_at(e, s))
        }
    }
}

/// Decomposes every cell of `grid` with lines running through the whole parameter space.
///
/// σ-lines are shared by a column of cells and τ-lines by a row; with lines
/// stopping at cell borders a path could reach a border edge at one point and
/// claim the rest of it from the other side.
pub fn decompose_grid(grid: &ArrangementGrid) -> Vec<ParamDecomposition> {
    let verts: Vec<Vec<(f64, f64)>> = grid.cells.iter().map(arrangement_vertices).collect();
    let (np, nq) = (grid.np, grid.nq);
    let cols: Vec<Vec<f64>> =
        (0..np).map(|i| lines((0..nq).flat_map(|j| verts[i * nq + j].iter().map(|v| v.0)).collect())).collect();
    let rows: Vec<Vec<f64>> =
        (0..nq).map(|j| lines((0..np).flat_map(|i| verts[i * nq + j].iter().map(|v| v.1)).collect())).collect();
    grid.cells
        .iter()
        .zip(verts)
        .enumerate()
        .map(|(k, (arr, v))| decompose_on(arr, v, cols[k / nq].clone(), rows[k % nq].clone()))
        .collect()
}

/// Minimax path through the refined decompositions of all cells of `grid`.
///
/// Returns the value, path points in global edge-index coordinates and the faces crossed.
pub fn solve(grid: &ArrangementGrid) -> Result<(f64, Vec<(f64, f64)>, Vec<FaceVisit>)> {
    let decs = decompose_grid(grid);
    let total: usize = decs.iter().map(|d| d.edges.len()).sum();
    if total > MAX_EDGES {
        return Err(Error::Config(format!(
            "extension-graph solver needs {total} edges (limit {MAX_EDGES}); use the sweep solver"
        )));
    }
    let rg = reachability_graph(&decs, grid.np, grid.nq)?;
    let (value, path) = bottleneck_path(&rg.graph, rg.source, rg.sink)?;
    let mut points = Vec::new();
    let mut at = (0.0, 0.0);
    for &n in &path {
        let p = match rg.nodes[n] {
            NodeRef::Hub(s, t) => (s, t),
            NodeRef::Edge { dec, edge } => {
                let d = &decs[dec];
                let (oi, oj) = (d.cell.0 as f64, d.cell.1 as f64);
                let local = point_after(d, &d.edges[edge], (at.0 - oi, at.1 - oj));
                (oi + local.0, oj + local.1)
            }
        };
        at = (p.0.max(at.0), p.1.max(at.1));
        points.push(at);
    }
    let mut faces: Vec<FaceVisit> = Vec::new();
    for w in path.windows(2) {
        if let Some(&(di, ci)) = rg.arc_cell.get(&(w[0], w[1])) {
            let c = &decs[di].cells[ci];
            let visit = FaceVisit { cell: decs[di].cell, face: c.face, weight: c.weight };
            if faces.last() != Some(&visit) {
                faces.push(visit);
            }
        }
    }
    Ok((value, points, faces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Segment2};
    use crate::leash::arrangement::{cell_pieces, sweep};
    use super::tests_support::{random_grid, raster_value};
    use crate::leash::search::search;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn unit_cell() -> (Segment2, Segment2) {
        (Segment2::new(p(0.0, 0.0), p(1.0, 0.0)), Segment2::new(p(0.0, 1.0), p(1.0, 1.0)))
    }

    fn arrangement(points: &[Point2]) -> CellArrangement {
        let (sp, sq) = unit_cell();
        let mut arr = sweep((0, 0), cell_pieces(&sp, &sq, points, 1e-9));
        arr.assign_weights(|s, t| Ok(sp.at(s).dist(sq.at(t)))).unwrap();
        arr
    }

    fn random_points(rng: &mut ChaCha8Rng, k: usize) -> Vec<Point2> {
        (0..k).map(|_| p(rng.gen_range(-0.2..1.2), rng.gen_range(0.05..0.95))).collect()
    }

    #[test]
    fn vertex_free_arrangement_is_unchanged() {
        let arr = arrangement(&[]);
        let dec = decompose(&arr);
        assert_eq!(dec.cells.len(), 1);
        assert_eq!(dec.sigmas, vec![0.0, 1.0]);
        assert_eq!(dec.taus, vec![0.0, 1.0]);
        assert_eq!(dec.edges.len(), 4);
        let grid = ArrangementGrid { np: 1, nq: 1, cells: vec![arr.clone()] };
        let (value, _, faces) = solve(&grid).unwrap();
        assert_eq!(value, arr.faces[0].weight);
        assert_eq!(faces.len(), 1);
    }

    #[test]
    fn one_vertex_adds_one_line_each_way() {
        // Dual of the midpoint is the anti-diagonal; a point on Q gives the line τ = 1/2.
        let arr = arrangement(&[p(0.5, 0.5), p(0.5, 1.0)]);
        assert_eq!(arr.faces.len(), 4);
        let dec = decompose(&arr);
        assert_eq!(dec.sigmas, vec![0.0, 0.5, 1.0]);
        assert_eq!(dec.taus, vec![0.0, 0.5, 1.0]);
        assert_eq!(dec.cells.len(), 6);
    }

    /// Strictly inside the region of refined cell `c`.
    fn strictly_inside(d: &ParamDecomposition, c: &DCell, v: (f64, f64)) -> bool {
        let m = 1e-9;
        let (c0, c1) = (d.taus[c.band], d.taus[c.band + 1]);
        v.0 > c.s0 + m
            && v.0 < c.s1 - m
            && v.1 > c0 + m
            && v.1 < c1 - m
            && v.1 > d.value(c.lower, v.0) + m
            && v.1 < d.value(c.upper, v.0) - m
    }

    #[test]
    fn refined_cells_contain_no_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pts = random_points(&mut rng, 6);
            let dec = decompose(&arrangement(&pts));
            for c in &dec.cells {
                for &v in &dec.vertices {
                    assert!(!strictly_inside(&dec, c, v), "vertex {v:?} inside {c:?}");
                }
            }
        }
    }

    #[test]
    fn refined_cells_cover_the_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let dec = decompose(&arrangement(&random_points(&mut rng, 5)));
            let mut area = 0.0;
            for c in &dec.cells {
                let (b0, b1) = (dec.taus[c.band], dec.taus[c.band + 1]);
                let h = |s: f64| (dec.value(c.upper, s).min(b1) - dec.value(c.lower, s).max(b0)).max(0.0);
                let n = 200;
                area += (0..n).map(|k| h(c.s0 + (c.s1 - c.s0) * (k as f64 + 0.5) / n as f64)).sum::<f64>()
                    * (c.s1 - c.s0)
                    / n as f64;
            }
            assert!((area - 1.0).abs() < 1e-3, "area {area}");
        }
    }

    fn samples(d: &ParamDecomposition, e: &EdgeGeom, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|k| {
                let f = k as f64 / n as f64;
                match *e {
                    EdgeGeom::Vertical { s, t0, t1 } => (s, t0 + (t1 - t0) * f),
                    EdgeGeom::Horizontal { t, s0, s1 } => (s0 + (s1 - s0) * f, t),
                    EdgeGeom::Chord { s0, s1, .. } => {
                        let s = s0 + (s1 - s0) * f;
                        (s, d.chord_at(e, s))
                    }
                }
            })
            .collect()
    }

    #[test]
    fn arcs_match_sampled_dominance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        for _ in 0..15 {
            let dec = decompose(&arrangement(&random_points(&mut rng, 5)));
            for c in &dec.cells {
                for &x in &c.edges {
                    for &y in &c.edges {
                        let (a, b) = (&dec.edges[x as usize], &dec.edges[y as usize]);
                        let (sa, sb) = (samples(&dec, a, 300), samples(&dec, b, 300));
                        let with = |m: f64| sa.iter().any(|u| sb.iter().any(|v| v.0 >= u.0 + m && v.1 >= u.1 + m));
                        let got = dec.reaches(a, b);
                        if with(1e-6) {
                            assert!(got, "{a:?} -> {b:?} should reach");
                        }
                        if !with(-1e-3) {
                            assert!(!got, "{a:?} -> {b:?} should not reach");
                        }
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn no_arc_back_between_adjacent_rectangles() {
        // A point on P at σ = 1/2 splits the cell by a vertical line into two rectangles.
        let arr = arrangement(&[p(0.5, 0.0)]);
        let dec = decompose(&arr);
        assert_eq!(dec.cells.len(), 2);
        let left = EdgeGeom::Vertical { s: 0.0, t0: 0.0, t1: 1.0 };
        let right = EdgeGeom::Vertical { s: 0.5, t0: 0.0, t1: 1.0 };
        assert!(dec.reaches(&left, &right));
        assert!(!dec.reaches(&EdgeGeom::Vertical { s: 1.0, t0: 0.0, t1: 1.0 }, &left));
    }

    #[test]
    fn sweep_matches_the_raster_oracle() {
        // A monotone staircase on a fine pixel grid, using interior face weights only.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..12 {
            let (np, nq) = (1 + round % 2, 1 + (round / 2) % 2);
            let grid = random_grid(&mut rng, np, nq, 4);
            assert_eq!(search(&grid).unwrap().value, raster_value(&grid, 200), "round {round}");
        }
    }

    #[test]
    fn agrees_with_the_sweep_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for round in 0..80 {
            let (np, nq) = (1 + round % 2, 1 + (round / 2) % 2);
            let grid = random_grid(&mut rng, np, nq, 4);
            let sweep_value = search(&grid).unwrap().value;
            let (value, path, _) = solve(&grid).unwrap();
            assert_eq!(value, sweep_value, "round {round}");
            assert!(path.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1));
        }
    }
}
