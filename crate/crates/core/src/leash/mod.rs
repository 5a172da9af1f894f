//! Fréchet distance with straight-segment leashes whose cost is the weighted length.
//!
//! Pipeline: lower bound B, Steiner points, per-cell arrangements of the dual
//! curves of all Steiner points and mesh vertices (each face is a family of
//! leashes crossing the same Steiner edges, weighted by one representative
//! leash), then a bottleneck search for a monotone path from (0,0) to (1,1).

pub mod arrangement;
pub mod bottleneck;
pub mod decomposition;
pub mod dual;
pub mod search;

use std::time::Instant;

pub use arrangement::{build_cell_arrangement, CellArrangement, Face, Trapezoid};
pub use bottleneck::{bottleneck_path, BottleneckGraph};
pub use decomposition::{decompose, reachability_graph, ParamDecomposition, ReachabilityGraph};
pub use dual::{dual_curve, CurvePiece, DualCurve, PieceKind};
pub use search::ArrangementGrid;

use crate::classic::{euclidean_frechet, DEFAULT_REL_TOL};
use crate::discretization::{check_epsilon, place_steiner_unweighted, SteinerDiscretization};
use crate::error::Result;
use crate::geometry::{Point2, PolygonalCurve};
use crate::matching::{MatchingResult, Stats};
use crate::subdivision::{CurveOnMesh, WeightedSubdivision};

/// How the minimax path is found once the arrangements are built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    /// Search directly over the sweep trapezoids.
    #[default]
    Sweep,
    /// Extend every arrangement vertex by axis-parallel lines, build the
    /// reachability graph on the resulting edges and run a bottleneck
    /// Dijkstra on it. Quadratic in the arrangement size; meant for small inputs.
    ExtensionGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeashOptions {
    pub solver: Solver,
    pub threads: usize,
}

impl Default for LeashOptions {
    fn default() -> Self {
        LeashOptions { solver: Solver::Sweep, threads: 1 }
    }
}

/// Everything the pipeline built, for inspection and dumps.
pub struct LeashRun {
    pub result: MatchingResult,
    /// `None` when the curves are at distance zero.
    pub steiner: Option<SteinerDiscretization>,
    pub grid: Option<ArrangementGrid>,
    /// Curves the cells were built on (point curves are doubled into a zero-length edge).
    pub p: CurveOnMesh,
    pub q: CurveOnMesh,
}

/// Approximate Fréchet distance between `p` and `q` under the segment leash.
pub fn segment_leash_frechet(
    subdiv: &WeightedSubdivision,
    p: &CurveOnMesh,
    q: &CurveOnMesh,
    epsilon: f64,
) -> Result<MatchingResult> {
    Ok(segment_leash_run(subdiv, p, q, epsilon, LeashOptions::default())?.result)
}

/// [`segment_leash_frechet`] with explicit options, returning intermediate structures.
pub fn segment_leash_run(
    subdiv: &WeightedSubdivision,
    p: &CurveOnMesh,
    q: &CurveOnMesh,
    epsilon: f64,
    opts: LeashOptions,
) -> Result<LeashRun> {
    let started = Instant::now();
    check_epsilon(epsilon)?;
    let (p, q) = (as_edges(p), as_edges(q));
    let unweighted = euclidean_frechet(&p.curve, &q.curve, DEFAULT_REL_TOL);
    if unweighted <= 0.0 {
        let result = MatchingResult::zero(p.curve.len(), q.curve.len());
        return Ok(LeashRun { result, steiner: None, grid: None, p, q });
    }
    let steiner = place_steiner_unweighted(subdiv, epsilon, unweighted, opts.threads)?;
    let mut points: Vec<Point2> = subdiv.vertices().to_vec();
    for e in 0..subdiv.edges().len() {
        points.extend(steiner.edge_points(subdiv, e));
    }
    log::info!("segment leash: {} points, {} cells", points.len(), p.curve.edge_count() * q.curve.edge_count());
    let grid = build_grid(subdiv, &p.curve, &q.curve, &points, opts.threads)?;

    let (value, raw_path, faces) = match opts.solver {
        Solver::Sweep => {
            let out = search::search(&grid)?;
            (out.value, out.points.into_iter().map(|(_, s, t)| (s, t)).collect(), out.faces)
        }
        Solver::ExtensionGraph => {
            let (value, pts, faces) = decomposition::solve(&grid)?;
            (value, pts, faces)
        }
    };
    let path = to_caller_params(&raw_path, &p.params, &q.params);
    let stats = Stats {
        lower_bound: unweighted * subdiv.min_weight(),
        steiner_points: points.len(),
        p_vertices: p.curve.len(),
        q_vertices: q.curve.len(),
        faces: grid.cells.iter().map(|c| c.faces.len()).sum(),
        trapezoids: grid.cells.iter().map(|c| c.trapezoids.len()).sum(),
        crossings: grid.cells.iter().map(|c| c.crossings).sum(),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let result = MatchingResult { value, path, faces, coupling: Vec::new(), stats };
    Ok(LeashRun { result, steiner: Some(steiner), grid: Some(grid), p, q })
}

/// Doubles the vertex of a point curve so that it has one (zero-length) edge.
fn as_edges(c: &CurveOnMesh) -> CurveOnMesh {
    if c.curve.len() > 1 {
        return c.clone();
    }
    let v = c.curve.vertices[0];
    CurveOnMesh {
        curve: PolygonalCurve { vertices: vec![v, v] },
        edge_support: c.edge_support.first().copied().into_iter().collect(),
        params: vec![0.0, 1.0],
    }
}

/// Builds the arrangement of every cell, spreading cells over `threads` workers.
pub fn build_grid(
    subdiv: &WeightedSubdivision,
    p: &PolygonalCurve,
    q: &PolygonalCurve,
    points: &[Point2],
    threads: usize,
) -> Result<ArrangementGrid> {
    let (np, nq) = (p.edge_count(), q.edge_count());
    let tol = subdiv.tolerance();
    let build = |k: usize| {
        let (i, j) = (k / nq, k % nq);
        let (sp, sq) = (p.edge(i), q.edge(j));
        build_cell_arrangement((i, j), &sp, &sq, points, tol, |s, t| subdiv.segment_cost(sp.at(s), sq.at(t)))
    };
    let total = np * nq;
    let threads = threads.clamp(1, total.max(1));
    let cells: Vec<Result<CellArrangement>> = if threads == 1 {
        (0..total).map(build).collect()
    } else {
        let chunk = total.div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let build = &build;
                    s.spawn(move || (w * chunk..((w + 1) * chunk).min(total)).map(build).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("arrangement worker panicked")).collect()
        })
    };
    Ok(ArrangementGrid { np, nq, cells: cells.into_iter().collect::<Result<_>>()? })
}

/// Maps a position `x` in edge-index units (edge i covers [i, i+1]) to the caller's parameter.
fn map_param(params: &[f64], x: f64) -> f64 {
    let m = params.len() - 1;
    let i = (x.floor().max(0.0) as usize).min(m - 1);
    let f = (x - i as f64).clamp(0.0, 1.0);
    params[i] + (params[i + 1] - params[i]) * f
}

/// Turns edge-index coordinates into a clean monotone path in the caller's parameters.
pub(crate) fn to_caller_params(raw: &[(f64, f64)], pp: &[f64], qp: &[f64]) -> Vec<(f64, f64)> {
    let mut path = vec![(0.0, 0.0)];
    for &(s, t) in raw {
        let (a, b) = path.last().copied().unwrap();
        let pt = (map_param(pp, s).clamp(a, 1.0), map_param(qp, t).clamp(b, 1.0));
        if pt != (a, b) {
            path.push(pt);
        }
    }
    if path.last() != Some(&(1.0, 1.0)) {
        path.push((1.0, 1.0));
    }
    path
}

#[cfg(test)]
mod tests;
