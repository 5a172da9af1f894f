use super::*;
use crate::fixtures;
use crate::geometry::Point2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn on_mesh(m: &WeightedSubdivision, c: PolygonalCurve) -> CurveOnMesh {
    CurveOnMesh::new(m, c).unwrap()
}

fn run(m: &WeightedSubdivision, p: &CurveOnMesh, q: &CurveOnMesh, eps: f64, solver: Solver) -> MatchingResult {
    segment_leash_run(m, p, q, eps, LeashOptions { solver, threads: 1 }).unwrap().result
}

#[test]
fn strip_is_bracketed() {
    let m = fixtures::strip();
    let (a, b) = fixtures::strip_curves();
    let (p, q) = (on_mesh(&m, a), on_mesh(&m, b));
    let r = segment_leash_frechet(&m, &p, &q, 0.1).unwrap();
    assert!(r.value >= 2.4 - 1e-6 && r.value <= 5.6 + 1e-6, "value {}", r.value);
    assert!(r.path_is_monotone());
    assert_eq!(r.faces.iter().map(|f| f.weight).fold(0.0, f64::max), r.value);
    assert_eq!(r.stats.lower_bound, 1.0);
}

#[test]
fn identical_curves_are_at_distance_zero() {
    let m = fixtures::strip();
    let (a, _) = fixtures::strip_curves();
    let p = on_mesh(&m, a);
    let r = segment_leash_frechet(&m, &p, &p, 0.1).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.path, vec![(0.0, 0.0), (1.0, 1.0)]);
}

#[test]
fn point_curve_against_edge() {
    let m = fixtures::triangle(2.0);
    let p = on_mesh(&m, PolygonalCurve { vertices: vec![Point2::new(0.0, 0.0)] });
    let q = on_mesh(&m, PolygonalCurve { vertices: vec![Point2::new(1.0, 0.0), Point2::new(0.5, 0.75f64.sqrt())] });
    let r = segment_leash_frechet(&m, &p, &q, 0.2).unwrap();
    // Every leash runs inside the triangle; the farthest point of Q is at distance 1.
    assert!(r.value >= 2.0 * (1.0 - 0.8) && r.value <= 2.0 * 1.8, "value {}", r.value);
    assert!(r.path_is_monotone());
}

#[test]
fn epsilon_out_of_range_is_a_config_error() {
    let m = fixtures::strip();
    let (a, b) = fixtures::strip_curves();
    let (p, q) = (on_mesh(&m, a), on_mesh(&m, b));
    for eps in [0.0, 0.5, f64::NAN] {
        assert!(matches!(segment_leash_frechet(&m, &p, &q, eps), Err(crate::Error::Config(_))));
    }
}

#[test]
fn weight_scaling_is_exact() {
    let m = fixtures::strip();
    let m7 = m.with_scaled_weights(7.0);
    let (a, b) = fixtures::strip_curves();
    let (p, q) = (on_mesh(&m, a), on_mesh(&m, b));
    let r1 = run(&m, &p, &q, 0.25, Solver::Sweep);
    let r7 = run(&m7, &p, &q, 0.25, Solver::Sweep);
    assert!((r7.value - 7.0 * r1.value).abs() <= 1e-12 * r7.value);
    assert_eq!(r1.path, r7.path);
}

#[test]
fn threads_do_not_change_the_result() {
    let m = fixtures::strip();
    let (a, b) = fixtures::strip_curves();
    let (p, q) = (on_mesh(&m, a), on_mesh(&m, b));
    let one = run(&m, &p, &q, 0.25, Solver::Sweep);
    let four = segment_leash_run(&m, &p, &q, 0.25, LeashOptions { solver: Solver::Sweep, threads: 4 }).unwrap().result;
    assert_eq!(one.value, four.value);
    assert_eq!(one.path, four.path);
}

#[test]
fn solvers_agree_on_small_instances() {
    let m = fixtures::triangle(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let (p, q) = fixtures::boundary_pair(&m, &mut rng);
        let a = run(&m, &p, &q, 1.0 / 3.0, Solver::Sweep);
        let b = run(&m, &p, &q, 1.0 / 3.0, Solver::ExtensionGraph);
        assert_eq!(a.value, b.value);
        assert!(b.path_is_monotone());
    }
}

#[test]
fn unweighted_values_bracket_the_euclidean_distance() {
    let m = fixtures::triangle(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let (p, q) = fixtures::boundary_pair(&m, &mut rng);
        let f = euclidean_frechet(&p.curve, &q.curve, 1e-6);
        let r = segment_leash_frechet(&m, &p, &q, 0.1).unwrap();
        assert!(r.value >= 0.6 * f - 1e-9 && r.value <= 1.4 * f + 1e-9, "{} vs {f}", r.value);
        assert!(r.path_is_monotone());
    }
}

#[test]
fn caller_params_are_monotone_and_mapped() {
    let path = to_caller_params(&[(0.5, 0.0), (1.0, 1.5), (1.0, 1.4), (2.0, 2.0)], &[0.0, 0.25, 1.0], &[0.0, 0.5, 1.0]);
    assert_eq!(path, vec![(0.0, 0.0), (0.125, 0.0), (0.25, 0.75), (1.0, 1.0)]);
}

#[test]
fn pipeline_grids_match_the_raster_oracle() {
    let m = fixtures::triangle(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let (p, q) = fixtures::boundary_pair(&m, &mut rng);
        let run = segment_leash_run(&m, &p, &q, 1.0 / 3.0, LeashOptions::default()).unwrap();
        let Some(grid) = run.grid.as_ref() else { continue };
        let raster = decomposition::tests_support::raster_value(grid, 200);
        // Pixels only see open faces, so the raster can never beat the exact search.
        assert!(raster >= run.result.value - 1e-9, "raster {raster} < sweep {}", run.result.value);
        assert!(raster <= run.result.value + 0.05, "raster {raster} far above sweep {}", run.result.value);
    }
}
