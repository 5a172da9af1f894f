//! Small hand-authored inputs shared by tests, benchmarks and the CLI examples.

use rand::Rng;

use crate::geometry::{Point2, PolygonalCurve};
use crate::subdivision::{CurveOnMesh, WeightedSubdivision};

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Unit square cut into three vertical strips of weights 1, 10, 1.
pub fn strip() -> WeightedSubdivision {
    strip_weighted([1.0, 10.0, 1.0])
}

pub fn strip_weighted(w: [f64; 3]) -> WeightedSubdivision {
    let t = 1.0 / 3.0;
    WeightedSubdivision::new(
        vec![p(0.0, 0.0), p(t, 0.0), p(2.0 * t, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(t, 1.0), p(2.0 * t, 1.0), p(1.0, 1.0)],
        vec![[0, 1, 5], [0, 5, 4], [1, 2, 6], [1, 6, 5], [2, 3, 7], [2, 7, 6]],
        vec![w[0], w[0], w[1], w[1], w[2], w[2]],
    )
    .expect("strip fixture is valid")
}

/// The left and right sides of the strip, both traversed upwards. Their distance is 4.
pub fn strip_curves() -> (PolygonalCurve, PolygonalCurve) {
    (
        PolygonalCurve { vertices: vec![p(0.0, 0.0), p(0.0, 1.0)] },
        PolygonalCurve { vertices: vec![p(1.0, 0.0), p(1.0, 1.0)] },
    )
}

/// Equilateral triangle of side 1 with weight `w`.
pub fn triangle(w: f64) -> WeightedSubdivision {
    WeightedSubdivision::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.75f64.sqrt())], vec![[0, 1, 2]], vec![w])
        .expect("triangle fixture is valid")
}

/// Random curve with `k` vertices walking counter-clockwise along the boundary of a
/// single-triangle mesh; every segment stays on one side of the triangle.
pub fn boundary_curve<R: Rng>(mesh: &WeightedSubdivision, k: usize, rng: &mut R) -> PolygonalCurve {
    let corners = mesh.triangle_points(0);
    let mut side = rng.gen_range(0..3);
    let mut f: f64 = rng.gen_range(0.05..0.95);
    let at = |side: usize, f: f64| corners[side].lerp(corners[(side + 1) % 3], f);
    let mut vertices = vec![at(side, f)];
    while vertices.len() < k {
        if f >= 1.0 {
            side = (side + 1) % 3;
            f = rng.gen_range(0.05..0.95);
        } else if rng.gen_bool(0.5) {
            f = 1.0;
        } else {
            f = rng.gen_range(f + 0.05 * (1.0 - f)..1.0);
        }
        vertices.push(at(side, f));
    }
    PolygonalCurve { vertices }
}

/// A (P, Q) pair of random boundary curves with 2–4 vertices each.
pub fn boundary_pair<R: Rng>(mesh: &WeightedSubdivision, rng: &mut R) -> (CurveOnMesh, CurveOnMesh) {
    let kp = rng.gen_range(2..=4);
    let kq = rng.gen_range(2..=4);
    let a = boundary_curve(mesh, kp, rng);
    let b = boundary_curve(mesh, kq, rng);
    (
        CurveOnMesh::new(mesh, a).expect("boundary curve lies on mesh edges"),
        CurveOnMesh::new(mesh, b).expect("boundary curve lies on mesh edges"),
    )
}
