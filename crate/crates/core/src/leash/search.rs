//! Bottleneck search over the trapezoids of all cells.
//!
//! A search state is a trapezoid together with an entry point v; everything
//! in the trapezoid that dominates v is reachable by a monotone path. From a
//! state the path can leave through the right side, through the upper piece,
//! or downwards through an increasing lower piece, and it crosses cell borders
//! at σ = 1, τ = 1 or through the cell corner.

use std::collections::BinaryHeap;

use super::arrangement::{CellArrangement, Trapezoid, BOTTOM, TOP};
use super::bottleneck::MinKey;
use crate::error::{Error, Result};
use crate::matching::FaceVisit;

const TOL: f64 = 1e-12;

/// Arrangements of all (P edge, Q edge) cells, row-major in the P edge index.
#[derive(serde::Serialize)]
pub struct ArrangementGrid {
    pub np: usize,
    pub nq: usize,
    pub cells: Vec<CellArrangement>,
}

impl ArrangementGrid {
    pub fn cell(&self, i: usize, j: usize) -> &CellArrangement {
        &self.cells[i * self.nq + j]
    }
}

/// Entry point of a state; `arc` is set when the entry is the corner of a
/// decreasing arc [y0, y1] on the given piece rather than a real point.
#[derive(Clone, Copy, Debug)]
struct Entry {
    s: f64,
    t: f64,
    arc: Option<(u32, f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
struct State {
    cell: u32,
    trap: u32,
    entry: Entry,
    cost: f64,
    pred: u32,
}

const SINK: u32 = u32::MAX;

/// Result of the search: bottleneck value, real path points in cell-local
/// coordinates, and the faces crossed.
pub struct SearchOutcome {
    pub value: f64,
    pub points: Vec<((usize, usize), f64, f64)>,
    pub faces: Vec<FaceVisit>,
}

struct Search<'a> {
    grid: &'a ArrangementGrid,
    states: Vec<State>,
    heap: BinaryHeap<MinKey>,
    settled: Vec<Vec<Vec<(f64, f64)>>>,
}

impl<'a> Search<'a> {
    fn dominated(&self, cell: u32, trap: u32, s: f64, t: f64) -> bool {
        self.settled[cell as usize][trap as usize].iter().any(|&(a, b)| a <= s + TOL && b <= t + TOL)
    }

    fn push(&mut self, cost: f64, cell: u32, trap: u32, entry: Entry, pred: u32) {
        let c = if trap == SINK {
            cost
        } else {
            if self.dominated(cell, trap, entry.s, entry.t) {
                return;
            }
            let arr = &self.grid.cells[cell as usize];
            cost.max(arr.faces[arr.trapezoids[trap as usize].face as usize].weight)
        };
        self.states.push(State { cell, trap, entry, cost: c, pred });
        self.heap.push(MinKey(c, self.states.len() - 1));
    }

    fn expand(&mut self, idx: u32) {
        let st = self.states[idx as usize];
        let grid = self.grid;
        let (np, nq) = (grid.np, grid.nq);
        let (i, j) = (st.cell as usize / nq, st.cell as usize % nq);
        let arr = &grid.cells[st.cell as usize];
        let tr: Trapezoid = arr.trapezoids[st.trap as usize];
        let (vs, vt) = (st.entry.s, st.entry.t);
        let cost = st.cost;

        // Right side.
        let lo_r = vt.max(arr.lower_at(&tr, tr.s1));
        let hi_r = arr.upper_at(&tr, tr.s1);
        if hi_r >= lo_r - TOL {
            if tr.s1 < 1.0 {
                for &n in arr.right_neighbours(st.trap as usize) {
                    let nt = &arr.trapezoids[n as usize];
                    let (l, u) = (arr.lower_at(nt, tr.s1), arr.upper_at(nt, tr.s1));
                    if l <= hi_r + TOL && u >= lo_r - TOL {
                        let e = Entry { s: tr.s1, t: lo_r.max(l), arc: None };
                        self.push(cost, st.cell, n, e, idx);
                    }
                }
            } else {
                if i + 1 < np {
                    let c2 = ((i + 1) * nq + j) as u32;
                    let next = &grid.cells[c2 as usize];
                    for &n in next.starts() {
                        let nt = &next.trapezoids[n as usize];
                        let (l, u) = (next.lower_at(nt, 0.0), next.upper_at(nt, 0.0));
                        if l <= hi_r + TOL && u >= lo_r - TOL {
                            self.push(cost, c2, n, Entry { s: 0.0, t: lo_r.max(l), arc: None }, idx);
                        }
                    }
                }
                if hi_r >= 1.0 - TOL {
                    if i + 1 == np && j + 1 == nq {
                        self.push(cost, st.cell, SINK, Entry { s: 1.0, t: 1.0, arc: None }, idx);
                    } else if i + 1 < np && j + 1 < nq {
                        let c2 = ((i + 1) * nq + j + 1) as u32;
                        self.enter_at_origin(cost, c2, idx);
                    }
                }
            }
        }

        // Upper piece.
        let s_lo = vs.max(tr.s0);
        if tr.upper == TOP {
            if j + 1 < nq {
                let c2 = (i * nq + j + 1) as u32;
                let next = &grid.cells[c2 as usize];
                for &n in overlapping(next, next.above(BOTTOM as usize), s_lo, tr.s1) {
                    let x = s_lo.max(next.trapezoids[n as usize].s0);
                    self.push(cost, c2, n, Entry { s: x, t: 0.0, arc: None }, idx);
                }
            }
        } else {
            let up = &arr.pieces[tr.upper as usize];
            match up.increasing() {
                None => {
                    let k = up.eval(s_lo);
                    if k >= vt - TOL {
                        for &n in overlapping(arr, arr.above(tr.upper as usize), s_lo, tr.s1) {
                            let x = s_lo.max(arr.trapezoids[n as usize].s0);
                            self.push(cost, st.cell, n, Entry { s: x, t: k, arc: None }, idx);
                        }
                    }
                }
                Some(true) => {
                    let s_star = if up.eval(s_lo) >= vt { s_lo } else { up.inverse(vt).max(s_lo) };
                    if s_star <= tr.s1 + TOL {
                        for &n in overlapping(arr, arr.above(tr.upper as usize), s_star, tr.s1) {
                            let x = s_star.max(arr.trapezoids[n as usize].s0).min(tr.s1);
                            self.push(cost, st.cell, n, Entry { s: x, t: up.eval(x).max(vt), arc: None }, idx);
                        }
                    }
                }
                Some(false) => {
                    if up.eval(s_lo) >= vt - TOL {
                        let x1 = if up.eval(tr.s1) >= vt { tr.s1 } else { up.inverse(vt).clamp(s_lo, tr.s1) };
                        for &n in overlapping(arr, arr.above(tr.upper as usize), s_lo, x1) {
                            let nt = &arr.trapezoids[n as usize];
                            let (y0, y1) = (s_lo.max(nt.s0), x1.min(nt.s1));
                            let e = Entry { s: y0, t: up.eval(y1).max(vt), arc: Some((tr.upper, y0, y1)) };
                            self.push(cost, st.cell, n, e, idx);
                        }
                    }
                }
            }
        }

        // Lower piece, only when it rises past the path.
        if tr.lower != BOTTOM {
            let low = &arr.pieces[tr.lower as usize];
            if low.increasing() == Some(true) {
                let s_star = if low.eval(s_lo) >= vt { s_lo } else { low.inverse(vt).max(s_lo) };
                if s_star <= tr.s1 + TOL {
                    for &n in overlapping(arr, arr.below(tr.lower as usize), s_star, tr.s1) {
                        let x = s_star.max(arr.trapezoids[n as usize].s0).min(tr.s1);
                        self.push(cost, st.cell, n, Entry { s: x, t: low.eval(x).max(vt), arc: None }, idx);
                    }
                }
            }
        }
    }

    fn enter_at_origin(&mut self, cost: f64, cell: u32, pred: u32) {
        let arr = &self.grid.cells[cell as usize];
        for &n in arr.starts() {
            if arr.lower_at(&arr.trapezoids[n as usize], 0.0) <= TOL {
                self.push(cost, cell, n, Entry { s: 0.0, t: 0.0, arc: None }, pred);
            }
        }
    }
}

/// Trapezoids of `list` (sorted by σ) overlapping [a, b].
fn overlapping<'a>(arr: &CellArrangement, list: &'a [u32], a: f64, b: f64) -> &'a [u32] {
    let start = list.partition_point(|&n| arr.trapezoids[n as usize].s1 < a - TOL);
    let end = start + list[start..].partition_point(|&n| arr.trapezoids[n as usize].s0 <= b + TOL);
    &list[start..end]
}

/// Minimizes the largest face weight over monotone paths from (0,0) to (1,1).
pub fn search(grid: &ArrangementGrid) -> Result<SearchOutcome> {
    let mut s = Search {
        grid,
        states: Vec::new(),
        heap: BinaryHeap::new(),
        settled: grid.cells.iter().map(|c| vec![Vec::new(); c.trapezoids.len()]).collect(),
    };
    s.enter_at_origin(0.0, 0, u32::MAX);
    while let Some(MinKey(_, idx)) = s.heap.pop() {
        let st = s.states[idx];
        if st.trap == SINK {
            return Ok(reconstruct(grid, &s.states, idx as u32));
        }
        if s.dominated(st.cell, st.trap, st.entry.s, st.entry.t) {
            continue;
        }
        s.settled[st.cell as usize][st.trap as usize].push((st.entry.s, st.entry.t));
        s.expand(idx as u32);
    }
    Err(Error::Internal("no monotone path reaches (1, 1)".into()))
}

fn reconstruct(grid: &ArrangementGrid, states: &[State], sink: u32) -> SearchOutcome {
    let value = states[sink as usize].cost;
    let mut chain = Vec::new();
    let mut k = states[sink as usize].pred;
    while k != u32::MAX {
        chain.push(k);
        k = states[k as usize].pred;
    }
    // Walk backwards choosing real points dominated by their successor.
    let nq = grid.nq;
    let global = |cell: u32, s: f64, t: f64| {
        let (i, j) = (cell as usize / nq, cell as usize % nq);
        (i as f64 + s, j as f64 + t)
    };
    let mut next = (grid.np as f64, grid.nq as f64);
    let mut points = Vec::new();
    let mut faces = Vec::new();
    for &k in &chain {
        let st = &states[k as usize];
        let arr = &grid.cells[st.cell as usize];
        let (mut s, mut t) = (st.entry.s, st.entry.t);
        if let Some((piece, y0, y1)) = st.entry.arc {
            let p = &arr.pieces[piece as usize];
            let (gs, gt) = global(st.cell, 0.0, 0.0);
            let lim_s = (next.0 - gs).min(y1);
            let want = p.inverse((next.1 - gt).min(1.0));
            let x = if want.is_finite() { want.max(y0).min(lim_s) } else { y0 };
            s = x.max(y0);
            t = p.eval(s).clamp(0.0, 1.0);
        }
        let g = global(st.cell, s, t);
        let g = (g.0.min(next.0), g.1.min(next.1));
        next = g;
        points.push(((st.cell as usize / nq, st.cell as usize % nq), g.0, g.1));
        let face = arr.trapezoids[st.trap as usize].face as usize;
        let visit = FaceVisit { cell: arr.cell, face, weight: arr.faces[face].weight };
        if faces.last() != Some(&visit) {
            faces.push(visit);
        }
    }
    points.reverse();
    faces.reverse();
    faces.dedup();
    SearchOutcome { value, points, faces }
}
