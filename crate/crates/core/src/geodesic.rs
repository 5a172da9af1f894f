//! Fréchet distance with weighted shortest-path leashes.
//!
//! Both curves are refined with vertex-vicinity progressions, every refined
//! vertex is spliced into a fixed Steiner graph over the subdivision, and the
//! discrete Fréchet distance is taken over the table of graph distances.

use std::collections::BinaryHeap;
use std::time::Instant;

use serde::Serialize;

use crate::classic::{discrete_frechet_table, euclidean_frechet, DEFAULT_REL_TOL};
use crate::discretization::{check_epsilon, place_steiner_unweighted, refine_curve_unweighted, RefinedCurve, SteinerDiscretization};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::leash::bottleneck::MinKey;
use crate::matching::{MatchingResult, Stats};
use crate::subdivision::{CurveOnMesh, Location, WeightedSubdivision};

/// Undirected graph on mesh vertices, Steiner points and query sites.
///
/// Nodes on different sides of a triangle are joined by a straight arc costing the
/// triangle's weight times its length; consecutive nodes on a mesh edge are joined
/// by an arc costing the cheaper adjacent weight.
#[derive(Clone, Debug)]
pub struct GeodesicGraph {
    pub nodes: Vec<Point2>,
    /// Node of each site passed to [`build_geodesic_graph`].
    pub sites: Vec<usize>,
    adj: Vec<Vec<(u32, f64)>>,
    arcs: usize,
}

impl GeodesicGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Undirected arc count.
    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[u].iter().map(|&(v, c)| (v as usize, c))
    }

    /// Shortest-path cost from `src` to every node.
    pub fn distances_from(&self, src: usize) -> Vec<f64> {
        self.dijkstra(src, None)
    }

    fn dijkstra(&self, src: usize, stop: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut done = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(MinKey(0.0, src));
        while let Some(MinKey(c, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if Some(u) == stop {
                break;
            }
            for &(v, w) in &self.adj[u] {
                let nc = c + w;
                if nc < dist[v as usize] {
                    dist[v as usize] = nc;
                    heap.push(MinKey(nc, v as usize));
                }
            }
        }
        dist
    }
}

/// Builds the Steiner graph and splices `sites` (points on mesh edges) into it.
pub fn build_geodesic_graph(
    subdiv: &WeightedSubdivision,
    steiner: &SteinerDiscretization,
    sites: &[Point2],
) -> Result<GeodesicGraph> {
    if steiner.edges.len() != subdiv.edges().len() {
        return Err(Error::Input("Steiner discretization does not match the subdivision".into()));
    }
    let tol = subdiv.tolerance();
    let mut nodes: Vec<Point2> = subdiv.vertices().to_vec();
    // Interior nodes of every edge as (distance from the first endpoint, node).
    let mut on_edge: Vec<Vec<(f64, usize)>> = Vec::with_capacity(subdiv.edges().len());
    for (e, es) in steiner.edges.iter().enumerate() {
        let seg = subdiv.edge_segment(e);
        let mut list = Vec::new();
        for x in es.distances() {
            list.push((x, nodes.len()));
            nodes.push(seg.at(x / es.length));
        }
        on_edge.push(list);
    }

    let mut site_nodes = Vec::with_capacity(sites.len());
    for (k, &s) in sites.iter().enumerate() {
        let node = match subdiv.locate(s) {
            Location::Vertex(v) => v,
            Location::Edge(e) => {
                let seg = subdiv.edge_segment(e);
                let x = seg.a.dist(s);
                let list = &mut on_edge[e];
                match list.iter().find(|&&(_, n)| nodes[n].dist(s) <= tol) {
                    Some(&(_, n)) => n,
                    None => {
                        let n = nodes.len();
                        nodes.push(s);
                        let at = list.partition_point(|&(y, _)| y < x);
                        list.insert(at, (x, n));
                        n
                    }
                }
            }
            _ => return Err(Error::Input(format!("site {k} ({}, {}) is not on a mesh edge", s.x, s.y))),
        };
        site_nodes.push(node);
    }

    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nodes.len()];
    let mut arcs = 0;
    let mut join = |u: usize, v: usize, w: f64, adj: &mut Vec<Vec<(u32, f64)>>| {
        let c = w * nodes[u].dist(nodes[v]);
        adj[u].push((v as u32, c));
        adj[v].push((u as u32, c));
        arcs += 1;
    };
    for (e, me) in subdiv.edges().iter().enumerate() {
        let w = subdiv.edge_min_weight(e);
        let chain: Vec<usize> = std::iter::once(me.a).chain(on_edge[e].iter().map(|&(_, n)| n)).chain([me.b]).collect();
        for pair in chain.windows(2) {
            join(pair[0], pair[1], w, &mut adj);
        }
    }
    for t in 0..subdiv.triangle_count() {
        let w = subdiv.weights()[t];
        // Boundary nodes tagged with the sides they lie on; nodes sharing a side are
        // already joined along it.
        let mut tagged: Vec<(usize, u8)> = Vec::new();
        let tri_edges = subdiv.triangle_edges(t);
        for (k, &e) in tri_edges.iter().enumerate() {
            tagged.extend(on_edge[e].iter().map(|&(_, n)| (n, 1u8 << k)));
        }
        for &v in &subdiv.triangles()[t] {
            let mask = tri_edges
                .iter()
                .enumerate()
                .filter(|(_, &e)| subdiv.edges()[e].a == v || subdiv.edges()[e].b == v)
                .fold(0u8, |m, (k, _)| m | 1 << k);
            tagged.push((v, mask));
        }
        for x in 0..tagged.len() {
            for y in x + 1..tagged.len() {
                if tagged[x].1 & tagged[y].1 == 0 {
                    join(tagged[x].0, tagged[y].0, w, &mut adj);
                }
            }
        }
    }
    Ok(GeodesicGraph { nodes, sites: site_nodes, adj, arcs })
}

/// Shortest-path cost between two nodes of `graph`.
pub fn geodesic_distance(graph: &GeodesicGraph, src: usize, dst: usize) -> Result<f64> {
    let n = graph.node_count();
    if src >= n || dst >= n {
        return Err(Error::Input(format!("node out of range (graph has {n} nodes)")));
    }
    let d = graph.dijkstra(src, Some(dst))[dst];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Internal(format!("nodes {src} and {dst} are disconnected")))
    }
}

/// Approximate geodesic distances between the refined vertices of P and Q.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceTable {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows × cols`.
    pub values: Vec<f64>,
}

impl DistanceTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }
}

/// Fills the table with one single-source search per vertex of the shorter side.
pub fn distance_table(graph: &GeodesicGraph, rows: &[usize], cols: &[usize], threads: usize) -> Result<DistanceTable> {
    let transpose = cols.len() < rows.len();
    let (from, to) = if transpose { (cols, rows) } else { (rows, cols) };
    let row = |&s: &usize| -> Vec<f64> {
        let d = graph.distances_from(s);
        to.iter().map(|&t| d[t]).collect()
    };
    let threads = threads.clamp(1, from.len().max(1));
    let lines: Vec<Vec<f64>> = if threads == 1 {
        from.iter().map(row).collect()
    } else {
        let chunk = from.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = from.chunks(chunk).map(|c| s.spawn(move || c.iter().map(row).collect::<Vec<_>>())).collect();
            handles.into_iter().flat_map(|h| h.join().expect("distance worker panicked")).collect()
        })
    };
    if lines.iter().flatten().any(|d| !d.is_finite()) {
        return Err(Error::Internal("a curve vertex is disconnected from the other curve".into()));
    }
    let mut values = vec![0.0; rows.len() * cols.len()];
    for (a, line) in lines.iter().enumerate() {
        for (b, &d) in line.iter().enumerate() {
            let (i, j) = if transpose { (b, a) } else { (a, b) };
            values[i * cols.len() + j] = d;
        }
    }
    Ok(DistanceTable { rows: rows.len(), cols: cols.len(), values })
}

/// Everything the geodesic pipeline built, for inspection and dumps.
pub struct GeodesicRun {
    pub result: MatchingResult,
    /// `None` when the curves are at distance zero.
    pub steiner: Option<SteinerDiscretization>,
    pub p: Option<RefinedCurve>,
    pub q: Option<RefinedCurve>,
    pub table: Option<DistanceTable>,
}

/// Approximate Fréchet distance between `p` and `q` under the geodesic leash.
pub fn geodesic_frechet(
    subdiv: &WeightedSubdivision,
    p: &CurveOnMesh,
    q: &CurveOnMesh,
    epsilon: f64,
) -> Result<MatchingResult> {
    Ok(geodesic_run(subdiv, p, q, epsilon, 1)?.result)
}

/// [`geodesic_frechet`] spreading the distance searches over `threads` workers.
pub fn geodesic_run(
    subdiv: &WeightedSubdivision,
    p: &CurveOnMesh,
    q: &CurveOnMesh,
    epsilon: f64,
    threads: usize,
) -> Result<GeodesicRun> {
    let started = Instant::now();
    check_epsilon(epsilon)?;
    let unweighted = euclidean_frechet(&p.curve, &q.curve, DEFAULT_REL_TOL);
    if unweighted <= 0.0 {
        let result = MatchingResult::zero(p.curve.len(), q.curve.len());
        return Ok(GeodesicRun { result, steiner: None, p: None, q: None, table: None });
    }
    let steiner = place_steiner_unweighted(subdiv, epsilon, unweighted, threads)?;
    let rp = refine_curve_unweighted(subdiv, p, epsilon, unweighted)?;
    let rq = refine_curve_unweighted(subdiv, q, epsilon, unweighted)?;
    let sites: Vec<Point2> = rp.curve.vertices.iter().chain(&rq.curve.vertices).copied().collect();
    let graph = build_geodesic_graph(subdiv, &steiner, &sites)?;
    let (np, nq) = (rp.curve.len(), rq.curve.len());
    log::info!("geodesic: {} nodes, {} arcs, table {np}×{nq}", graph.node_count(), graph.arc_count());
    let table = distance_table(&graph, &graph.sites[..np], &graph.sites[np..], threads)?;
    let (value, coupling) = discrete_frechet_table(np, nq, |i, j| table.get(i, j))?;

    let mut path = vec![(0.0, 0.0)];
    for &(i, j) in &coupling.pairs {
        let pt = (rp.params[i], rq.params[j]);
        if path.last() != Some(&pt) {
            path.push(pt);
        }
    }
    if path.last() != Some(&(1.0, 1.0)) {
        path.push((1.0, 1.0));
    }
    let stats = Stats {
        lower_bound: unweighted * subdiv.min_weight(),
        steiner_points: steiner.total_points(),
        p_vertices: np,
        q_vertices: nq,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        ..Stats::default()
    };
    let result = MatchingResult { value, path, faces: Vec::new(), coupling: coupling.pairs, stats };
    Ok(GeodesicRun { result, steiner: Some(steiner), p: Some(rp), q: Some(rq), table: Some(table) })
}
