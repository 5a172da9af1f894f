//! Inputs shared by the pipeline benchmarks.

use wfrechet_core::{fixtures, CurveOnMesh, Point2, PolygonalCurve, WeightedSubdivision};

/// The three-strip square with its left and right sides as P and Q.
pub fn strip_inputs() -> (WeightedSubdivision, CurveOnMesh, CurveOnMesh) {
    let mesh = fixtures::strip();
    let (a, b) = fixtures::strip_curves();
    let p = CurveOnMesh::new(&mesh, a).expect("left side lies on the mesh");
    let q = CurveOnMesh::new(&mesh, b).expect("right side lies on the mesh");
    (mesh, p, q)
}

/// Deterministic wavy curve with `n` vertices, shifted vertically by `dy`.
pub fn wave(n: usize, phase: f64, dy: f64) -> PolygonalCurve {
    let vertices = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1).max(1) as f64;
            Point2::new(x, dy + 0.2 * (7.0 * x + phase).sin())
        })
        .collect();
    PolygonalCurve { vertices }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_well_formed() {
        let (mesh, p, q) = strip_inputs();
        assert!(mesh.validate().is_ok());
        assert_eq!((p.curve.len(), q.curve.len()), (2, 2));
        let w = wave(50, 0.3, 0.1);
        assert_eq!(w.len(), 50);
        assert_eq!(w.vertices[49].x, 1.0);
    }
}
