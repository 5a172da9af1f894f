//! Fréchet distance between polygonal curves in weighted triangulated regions.

pub mod classic;
pub mod discretization;
pub mod error;
pub mod fixtures;
pub mod geodesic;
pub mod geometry;
pub mod io;
pub mod leash;
pub mod matching;
pub mod subdivision;
pub mod svg;

pub use classic::{discrete_frechet, euclidean_decision, euclidean_frechet, lower_bound_b, Coupling, FreeSpaceCell};
pub use discretization::{clearance_d, place_steiner, refine_curve, vertex_radius, RefinedCurve, SteinerDiscretization};
pub use error::{Error, Result};
pub use geodesic::{build_geodesic_graph, geodesic_distance, geodesic_frechet, geodesic_run, DistanceTable, GeodesicGraph, GeodesicRun};
pub use geometry::{curve_point, Point2, PolygonalCurve, Segment2, SegmentIntersection};
pub use leash::{segment_leash_frechet, segment_leash_run, LeashOptions, LeashRun, Solver};
pub use matching::{FaceVisit, MatchingResult, Stats};
pub use subdivision::{CurveOnMesh, Location, SegmentTrace, TraceInterval, WeightedSubdivision};
