//! Randomized invariants of analysis, filling and distance queries.

use holefill::analysis::{
    classify_hole, detect_fracture_points, normal_angle_cos, segment_hole, Hole, HoleClass, RingVertex,
};
use holefill::fill::front::{advance_ring, diameter, FrontParams, FrontRing};
use holefill::fill::smooth::smooth_patch_heights;
use holefill::fill::{fill_all_holes, FillConfig};
use holefill::geom2d::{self, Vec2};
use holefill::harness::{punch, PunchSpec, SyntheticShape};
use holefill::metrics::{brute_force_distance, Bvh};
use holefill::{LocalFrame, Point, TriangleMesh, Vector};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn ring_hole(points: Vec<Point>, normals: Vec<Vector>) -> Hole {
    let ring = (0..points.len()).map(RingVertex::Mesh).collect();
    Hole::from_ring(ring, points, normals)
}

/// Star-shaped ring around the origin with the given radii and heights.
fn star(radii: &[f64], heights: &[f64]) -> Vec<Point> {
    let n = radii.len();
    (0..n)
        .map(|i| {
            let a = i as f64 * TAU / n as f64;
            Point::new(radii[i] * a.cos(), radii[i] * a.sin(), heights[i])
        })
        .collect()
}

fn ring_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (5usize..30).prop_flat_map(|n| (prop::collection::vec(0.6..1.4f64, n), prop::collection::vec(-0.3..0.3f64, n)))
}

fn unit_vector() -> impl Strategy<Value = Vector> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-6)
        .prop_map(|(x, y, z)| Vector::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_scale_invariant((radii, heights) in ring_strategy(), k in -20i32..20) {
        let pts = star(&radii, &heights);
        let normals = vec![Vector::z(); pts.len()];
        let s = 2f64.powi(k);
        let scaled: Vec<Point> = pts.iter().map(|p| Point::from(p.coords * s)).collect();
        let a = ring_hole(pts, normals.clone());
        let b = ring_hole(scaled, normals);
        prop_assert_eq!(classify_hole(&a, 1.5, 2.5), classify_hole(&b, 1.5, 2.5));
    }

    #[test]
    fn classification_is_total(d in 0.0..10.0f64, ds in 1e-3..1e3f64) {
        let c = holefill::analysis::classify_ratio(d * ds, ds, 1.5, 2.5);
        let expect = if d * ds < 1.5 * ds {
            HoleClass::Small
        } else if d * ds <= 2.5 * ds {
            HoleClass::Medium
        } else {
            HoleClass::Large
        };
        prop_assert_eq!(c, expect);
    }

    #[test]
    fn normal_cosine_is_symmetric_and_scale_free(a in unit_vector(), b in unit_vector(), s in 1e-3..1e3f64, t in 1e-3..1e3f64) {
        let ab = normal_angle_cos(&a, &b).unwrap();
        prop_assert_eq!(ab, normal_angle_cos(&b, &a).unwrap());
        prop_assert!((-1.0..=1.0).contains(&ab));
        let scaled = normal_angle_cos(&(a * s), &(b * t)).unwrap();
        prop_assert!((scaled - ab).abs() < 1e-12);
    }

    #[test]
    fn nearly_parallel_normals_give_no_fracture(
        (radii, heights) in ring_strategy(),
        tilt in prop::collection::vec((0.0..0.5f64, 0.0..TAU), 30),
        threshold in -1.0..0.9998f64,
    ) {
        let pts = star(&radii, &heights);
        // each normal within half a degree of z, so any two within one degree
        let normals: Vec<Vector> = (0..pts.len())
            .map(|i| {
                let (deg, az) = tilt[i];
                let th = deg.to_radians();
                Vector::new(th.sin() * az.cos(), th.sin() * az.sin(), th.cos())
            })
            .collect();
        let hole = ring_hole(pts, normals);
        prop_assert!(detect_fracture_points(&hole, threshold).is_empty());
    }

    #[test]
    fn segmentation_points_are_collinear_and_edges_conserved(
        (_, heights) in ring_strategy(),
        spacing in 0.05..0.4f64,
    ) {
        // convex ring so every chord stays inside
        let n = heights.len();
        let r = vec![1.0; n];
        let mut hole = ring_hole(star(&r, &heights), vec![Vector::z(); n]);
        hole.ds = spacing;
        let (i, j) = (0, n / 2);
        let (subs, lines) = segment_hole(&hole, &[(i, j)]).unwrap();
        prop_assert_eq!(subs.len(), 2);
        let frame = &hole.frame;
        let (a, b) = (frame.project(&hole.points[i]), frame.project(&hole.points[j]));
        let len = (b - a).norm();
        for p in &lines[0].inserted_points {
            let q = frame.project(p);
            let off = geom2d::orient(a, b, q) / len;
            prop_assert!(off.abs() < 1e-9, "off-line by {}", off);
        }
        let mut original: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        let mut kept = Vec::new();
        for s in &subs {
            let m = s.ring.len();
            for k in 0..m {
                if let (RingVertex::Mesh(x), RingVertex::Mesh(y)) = (s.ring[k], s.ring[(k + 1) % m]) {
                    if !(lines[0].inserted_points.is_empty() && ((x, y) == (i, j) || (x, y) == (j, i))) {
                        kept.push((x, y));
                    }
                }
            }
        }
        original.sort_unstable();
        kept.sort_unstable();
        prop_assert_eq!(original, kept);
    }

    #[test]
    fn bvh_matches_brute_force(seed in 0u64..1000, queries in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64), 20)) {
        let faces = 100 + (seed as usize % 5) * 200;
        let m = SyntheticShape::named(["sphere", "torus", "saddle"][seed as usize % 3], faces).unwrap().generate();
        let bvh = Bvh::new(&m);
        for (x, y, z) in queries {
            let p = Point::new(x, y, z);
            prop_assert_eq!(bvh.nearest_distance(&p), brute_force_distance(&m, &p));
        }
    }

    #[test]
    fn fronts_shrink_and_stay_simple(noise in prop::collection::vec(-0.08..0.08f64, 40), ds in 0.05..0.2f64) {
        let n = 40;
        let r: Vec<f64> = noise.iter().map(|e| 1.0 + e).collect();
        let mut front = FrontRing { points: star(&r, &vec![0.0; n]), generation: 0 };
        let frame = LocalFrame::new(Point::origin(), Vector::z(), Vector::x());
        let params = FrontParams { ds, merge_radius_factor: 0.5, medium_factor: 2.5, small_factor: 1.5 };
        for _ in 0..3 {
            let step = advance_ring(&front, &frame, &params, None).unwrap();
            let xy: Vec<Vec2> = step.next.points.iter().map(|p| Vec2::new(p.x, p.y)).collect();
            prop_assert!(geom2d::polygon_is_simple(&xy));
            prop_assert!(diameter(&step.next.points) < diameter(&front.points));
            front = step.next;
        }
    }

    #[test]
    fn smoothing_flat_patches_is_a_fixed_point(x in -0.4..0.4f64, y in -0.4..0.4f64, radius in 0.1..0.3f64, iterations in 1usize..6) {
        let m = SyntheticShape::named("plane", 2000).unwrap().generate();
        let (mut p, _) = punch(&m, &PunchSpec::single(Point::new(x, y, 0.0), radius)).unwrap();
        let kept = p.vertex_count();
        let config = FillConfig { open_surface: true, ..FillConfig::default() };
        prop_assert!(fill_all_holes(&mut p, &config).unwrap().all_filled());
        prop_assert!(p.vertices().iter().all(|q| q.z == 0.0));
        let before = p.vertices().to_vec();
        let new: Vec<usize> = (kept..p.vertex_count()).collect();
        let frame = LocalFrame::new(Point::new(x, y, 0.0), Vector::z(), Vector::x());
        smooth_patch_heights(&mut p, &new, &frame, iterations, None).unwrap();
        prop_assert_eq!(p.vertices(), &before[..]);
    }

    #[test]
    fn smoothing_never_moves_unlisted_vertices(seed in 0u64..500, iterations in 1usize..6) {
        let m = SyntheticShape::named("saddle", 800).unwrap().generate();
        let mut p: TriangleMesh = m.clone();
        let listed: Vec<usize> = (0..p.vertex_count()).filter(|v| (v * 7 + seed as usize) % 5 == 0).collect();
        let frame = LocalFrame::new(Point::origin(), Vector::new(0.1, 0.2, 1.0).normalize(), Vector::x());
        smooth_patch_heights(&mut p, &listed, &frame, iterations, None).unwrap();
        for v in 0..p.vertex_count() {
            if !listed.contains(&v) {
                prop_assert_eq!(p.vertex(v), m.vertex(v));
            }
        }
    }
}
