use serde::{Deserialize, Serialize};

/// A face of a cell arrangement crossed by the matching path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceVisit {
    pub cell: (usize, usize),
    pub face: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    /// Lower bound B used to size the discretization.
    pub lower_bound: f64,
    /// Steiner points plus mesh vertices.
    pub steiner_points: usize,
    /// Vertex counts of the (refined) curves.
    pub p_vertices: usize,
    pub q_vertices: usize,
    pub faces: usize,
    pub trapezoids: usize,
    pub crossings: usize,
    pub wall_time_ms: f64,
}

/// Approximate Fréchet distance with its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingResult {
    pub value: f64,
    /// Monotone path from (0,0) to (1,1) in the parameter square of the input curves.
    pub path: Vec<(f64, f64)>,
    /// Faces traversed by the path (segment leash only).
    #[serde(default)]
    pub faces: Vec<FaceVisit>,
    /// Vertex coupling of the refined curves (discrete pipelines only).
    #[serde(default)]
    pub coupling: Vec<(usize, usize)>,
    pub stats: Stats,
}

impl MatchingResult {
    /// Result for curves at distance zero.
    pub fn zero(p_vertices: usize, q_vertices: usize) -> Self {
        MatchingResult {
            value: 0.0,
            path: vec![(0.0, 0.0), (1.0, 1.0)],
            faces: Vec::new(),
            coupling: Vec::new(),
            stats: Stats { p_vertices, q_vertices, ..Stats::default() },
        }
    }

    /// Both coordinates non-decreasing with exact endpoints.
    pub fn path_is_monotone(&self) -> bool {
        self.path.first() == Some(&(0.0, 0.0))
            && self.path.last() == Some(&(1.0, 1.0))
            && self.path.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1)
    }
}
