//! Minimax (bottleneck) shortest paths: Dijkstra where a path's label is its largest arc cost.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Directed graph with non-negative arc costs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BottleneckGraph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl BottleneckGraph {
    pub fn new(nodes: usize) -> Self {
        BottleneckGraph { adj: vec![Vec::new(); nodes] }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cost: f64) {
        self.adj[from].push((to, cost));
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self, node: usize) -> &[(usize, f64)] {
        &self.adj[node]
    }
}

#[derive(PartialEq)]
pub(crate) struct MinKey(pub f64, pub usize);

impl Eq for MinKey {}

impl Ord for MinKey {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for MinKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Path from `source` to `sink` minimizing its maximum arc cost.
///
/// Ties are broken towards smaller node ids, so results are deterministic.
pub fn bottleneck_path(g: &BottleneckGraph, source: usize, sink: usize) -> Result<(f64, Vec<usize>)> {
    let n = g.node_count();
    let mut label = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    label[source] = 0.0;
    heap.push(MinKey(0.0, source));
    while let Some(MinKey(c, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == sink {
            let mut path = vec![sink];
            while *path.last().unwrap() != source {
                path.push(pred[*path.last().unwrap()]);
            }
            path.reverse();
            return Ok((c, path));
        }
        for &(v, w) in &g.adj[u] {
            let nc = c.max(w);
            if !done[v] && (nc < label[v] || (nc == label[v] && u < pred[v])) {
                label[v] = nc;
                pred[v] = u;
                heap.push(MinKey(nc, v));
            }
        }
    }
    Err(Error::Internal(format!("sink {sink} unreachable from source {source}")))
}
