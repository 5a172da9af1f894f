//! JSON documents for meshes, curves and results.
//!
//! Mesh: `{"vertices":[[x,y],…],"triangles":[[i,j,k],…],"weights":[w,…]}`.
//! Curve: `{"vertices":[[x,y],…]}`. Floats are written in shortest round-trip form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, PolygonalCurve};
use crate::matching::{FaceVisit, MatchingResult, Stats};
use crate::subdivision::{CurveOnMesh, WeightedSubdivision};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDocument {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub weights: Vec<f64>,
}

impl MeshDocument {
    pub fn from_subdivision(s: &WeightedSubdivision) -> Self {
        MeshDocument {
            vertices: s.vertices().iter().map(|v| [v.x, v.y]).collect(),
            triangles: s.triangles().to_vec(),
            weights: s.weights().to_vec(),
        }
    }

    /// Builds the subdivision without validating it.
    pub fn build(self) -> Result<WeightedSubdivision> {
        WeightedSubdivision::build(points(&self.vertices), self.triangles, self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub vertices: Vec<[f64; 2]>,
}

impl CurveDocument {
    pub fn from_curve(c: &PolygonalCurve) -> Self {
        CurveDocument { vertices: c.vertices.iter().map(|v| [v.x, v.y]).collect() }
    }
}

fn points(v: &[[f64; 2]]) -> Vec<Point2> {
    v.iter().map(|&[x, y]| Point2::new(x, y)).collect()
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    // serde_json reports "… at line L column C" itself.
    Error::Input(format!("{what}: {e}"))
}

/// Parses a mesh document without validating the geometry.
pub fn parse_mesh_unchecked(bytes: &[u8]) -> Result<WeightedSubdivision> {
    let doc: MeshDocument = serde_json::from_slice(bytes).map_err(|e| json_error("mesh", e))?;
    doc.build()
}

/// Parses and validates a mesh document.
pub fn parse_mesh(bytes: &[u8]) -> Result<WeightedSubdivision> {
    let s = parse_mesh_unchecked(bytes)?;
    s.validate().map_err(Error::InvalidSubdivision)?;
    Ok(s)
}

pub fn mesh_to_json(s: &WeightedSubdivision) -> String {
    serde_json::to_string_pretty(&MeshDocument::from_subdivision(s)).expect("mesh documents always serialize")
}

/// Parses a curve document and resolves the mesh edge under every segment.
pub fn parse_curve(bytes: &[u8], subdiv: &WeightedSubdivision) -> Result<CurveOnMesh> {
    let doc: CurveDocument = serde_json::from_slice(bytes).map_err(|e| json_error("curve", e))?;
    let curve = PolygonalCurve::new(points(&doc.vertices))?;
    CurveOnMesh::new(subdiv, curve)
}

/// Parses a curve document without reference to a mesh.
pub fn parse_free_curve(bytes: &[u8]) -> Result<PolygonalCurve> {
    let doc: CurveDocument = serde_json::from_slice(bytes).map_err(|e| json_error("curve", e))?;
    PolygonalCurve::new(points(&doc.vertices))
}

pub fn curve_to_json(c: &PolygonalCurve) -> String {
    serde_json::to_string_pretty(&CurveDocument::from_curve(c)).expect("curve documents always serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SegmentLeash,
    Geodesic,
    Discrete,
    Euclidean,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SegmentLeash => "segment-leash",
            Mode::Geodesic => "geodesic",
            Mode::Discrete => "discrete",
            Mode::Euclidean => "euclidean",
        }
    }
}

/// Serialized outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub mode: Mode,
    /// Absent for the exact modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub value: f64,
    pub path: Vec<(f64, f64)>,
    #[serde(default)]
    pub faces: Vec<FaceVisit>,
    #[serde(default)]
    pub coupling: Vec<(usize, usize)>,
    pub stats: Stats,
    pub version: String,
}

impl ResultDocument {
    pub fn new(mode: Mode, epsilon: Option<f64>, r: MatchingResult) -> Self {
        ResultDocument {
            mode,
            epsilon,
            value: r.value,
            path: r.path,
            faces: r.faces,
            coupling: r.coupling,
            stats: r.stats,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: ResultDocument = serde_json::from_slice(bytes).map_err(|e| json_error("result", e))?;
        if !(doc.value >= 0.0) {
            return Err(Error::Input(format!("result value {} is negative", doc.value)));
        }
        Ok(doc)
    }

    pub fn matching(&self) -> MatchingResult {
        MatchingResult {
            value: self.value,
            path: self.path.clone(),
            faces: self.faces.clone(),
            coupling: self.coupling.clone(),
            stats: self.stats.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    const SQUARE: &str = r#"{"vertices":[[0,0],[1,0],[1,1],[0,1]],"triangles":[[0,1,2],[0,2,3]],"weights":[1,3]}"#;

    #[test]
    fn minimal_square() {
        let s = parse_mesh(SQUARE.as_bytes()).unwrap();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.triangle_count(), 2);
        assert_eq!(s.weights(), &[1.0, 3.0]);
    }

    #[test]
    fn missing_weight_is_reported() {
        let doc = r#"{"vertices":[[0,0],[1,0],[1,1],[0,1]],"triangles":[[0,1,2],[0,2,3]],"weights":[1]}"#;
        let err = parse_mesh(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("weights length 1 ≠ triangles length 2"), "{err}");
    }

    #[test]
    fn duplicate_triangle_is_a_violation() {
        let doc = r#"{"vertices":[[0,0],[1,0],[1,1]],"triangles":[[0,1,2],[2,0,1]],"weights":[1,1]}"#;
        match parse_mesh(doc.as_bytes()) {
            Err(Error::InvalidSubdivision(v)) => assert!(v.iter().any(|m| m.contains("duplicate triangle 1")), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let err = parse_mesh(b"{\n\"vertices\": [[0,0],\n oops]}").unwrap_err();
        assert!(err.is_input_error());
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn curve_on_the_left_edge() {
        let s = parse_mesh(SQUARE.as_bytes()).unwrap();
        let c = parse_curve(br#"{"vertices":[[0,0],[0,1]]}"#, &s).unwrap();
        let e = c.edge_support[0];
        assert_eq!((s.edges()[e].a.min(s.edges()[e].b), s.edges()[e].a.max(s.edges()[e].b)), (0, 3));
    }

    #[test]
    fn off_mesh_vertex_is_named() {
        let s = fixtures::strip();
        let err = parse_curve(br#"{"vertices":[[0,0],[0.5,0.25]]}"#, &s).unwrap_err().to_string();
        assert!(err.contains("vertex 1"), "{err}");
        assert!(parse_curve(br#"{"vertices":[]}"#, &s).is_err());
    }

    #[test]
    fn curve_over_collinear_edges_is_split() {
        let s = fixtures::strip();
        let c = parse_curve(br#"{"vertices":[[0,0],[1,0]]}"#, &s).unwrap();
        assert_eq!(c.curve.len(), 4);
        assert_eq!(c.edge_support.len(), 3);
        assert_eq!(c.params, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn mesh_round_trip() {
        let s = fixtures::strip_weighted([0.1, 1.0 / 3.0, std::f64::consts::PI]);
        let back = parse_mesh(mesh_to_json(&s).as_bytes()).unwrap();
        assert_eq!(MeshDocument::from_subdivision(&back), MeshDocument::from_subdivision(&s));
    }

    #[test]
    fn result_round_trip() {
        let mut r = MatchingResult::zero(2, 3);
        r.value = 0.1 + 0.2;
        r.path = vec![(0.0, 0.0), (1.0 / 3.0, 0.7), (1.0, 1.0)];
        r.coupling = vec![(0, 0), (1, 2)];
        r.faces = vec![FaceVisit { cell: (0, 1), face: 4, weight: 2.0f64.sqrt() }];
        r.stats.wall_time_ms = 12.345678901234567;
        let doc = ResultDocument::new(Mode::SegmentLeash, Some(0.1), r);
        let back = ResultDocument::from_json(doc.to_json().as_bytes()).unwrap();
        assert_eq!(back, doc);
        let exact = ResultDocument::new(Mode::Euclidean, None, MatchingResult::zero(1, 1));
        assert!(!exact.to_json().contains("epsilon"));
        assert_eq!(ResultDocument::from_json(exact.to_json().as_bytes()).unwrap(), exact);
    }

    proptest! {
        #[test]
        fn curves_round_trip(pts in prop::collection::vec((-1e6f64..1e6, -1e-6f64..1e-6), 1..8)) {
            let c = PolygonalCurve::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap();
            let back = parse_free_curve(curve_to_json(&c).as_bytes()).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn values_round_trip(v in any::<f64>().prop_filter("finite, non-negative", |v| v.is_finite() && *v >= 0.0)) {
            let mut r = MatchingResult::zero(1, 1);
            r.value = v;
            let doc = ResultDocument::new(Mode::Geodesic, Some(0.25), r);
            prop_assert_eq!(ResultDocument::from_json(doc.to_json().as_bytes()).unwrap(), doc);
        }
    }
}
