//! Hole analysis: size scalars, classification, fracture margins and segmentation.
//!
//! Each hole gets its own local frame from the least-squares plane of its
//! boundary, so "height" always means the component along that plane's
//! normal, wherever the hole faces on the object.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom2d::{self, Vec2};
use crate::mesh::{BoundaryLoop, Point, TriangleMesh, Vector};

pub const DEFAULT_SMALL_FACTOR: f64 = 1.5;
pub const DEFAULT_MEDIUM_FACTOR: f64 = 2.5;
pub const DEFAULT_FRACTURE_COS: f64 = 0.7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("zero-length vector in angle computation")]
    ZeroVector,
    #[error("segmentation chord between ring positions {0} and {1} leaves the hole")]
    InvalidChord(usize, usize),
}

/// Orthonormal frame `(u, v, n)` anchored at a hole's centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub origin: Point,
    pub u: Vector,
    pub v: Vector,
    pub n: Vector,
}

impl LocalFrame {
    /// Frame with the given normal; `u` follows `toward` projected onto the plane.
    pub fn new(origin: Point, normal: Vector, toward: Vector) -> Self {
        let n = normal.normalize();
        let mut u = toward - n * n.dot(&toward);
        if u.norm() < 1e-12 * toward.norm().max(1.0) {
            // any direction perpendicular to n
            let axis = if n.x.abs() < 0.9 { Vector::x() } else { Vector::y() };
            u = axis - n * n.dot(&axis);
        }
        let u = u.normalize();
        let v = n.cross(&u).normalize();
        let u = v.cross(&n).normalize();
        LocalFrame { origin, u, v, n }
    }

    pub fn to_local(&self, p: &Point) -> (Vec2, f64) {
        let d = p - self.origin;
        (Vec2::new(d.dot(&self.u), d.dot(&self.v)), d.dot(&self.n))
    }

    pub fn project(&self, p: &Point) -> Vec2 {
        self.to_local(p).0
    }

    pub fn height(&self, p: &Point) -> f64 {
        (p - self.origin).dot(&self.n)
    }

    pub fn to_world(&self, xy: Vec2, h: f64) -> Point {
        self.origin + self.u * xy.x + self.v * xy.y + self.n * h
    }
}

/// Where a ring point lives: an existing mesh vertex or a point inserted on
/// a segmentation line (not yet part of the mesh).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingVertex {
    Mesh(usize),
    Segment { line: usize, index: usize },
}

/// A hole (or sub-hole) ready for filling.
#[derive(Debug, Clone)]
pub struct Hole {
    /// Cyclic ring, oriented like [`BoundaryLoop`].
    pub ring: Vec<RingVertex>,
    pub points: Vec<Point>,
    /// Mean boundary edge length.
    pub ds: f64,
    /// Largest distance between two ring points.
    pub diameter: f64,
    pub boundary_normals: Vec<Vector>,
    pub frame: LocalFrame,
}

impl Hole {
    /// Derives the scalars and frame from a ring and its per-point normals.
    pub fn from_ring(ring: Vec<RingVertex>, points: Vec<Point>, boundary_normals: Vec<Vector>) -> Self {
        let n = points.len();
        let ds = (0..n).map(|i| (points[(i + 1) % n] - points[i]).norm()).sum::<f64>() / n as f64;
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                diameter = diameter.max((points[i] - points[j]).norm());
            }
        }
        let frame = fit_frame(&points, &boundary_normals);
        Hole {
            ring,
            points,
            ds,
            diameter,
            boundary_normals,
            frame,
        }
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// Ring projected into the frame plane.
    pub fn projected(&self) -> Vec<Vec2> {
        self.points.iter().map(|p| self.frame.project(p)).collect()
    }

    /// RMS distance of the ring points from their least-squares plane.
    pub fn plane_residual(&self) -> f64 {
        let ss: f64 = self.points.iter().map(|p| self.frame.height(p).powi(2)).sum();
        (ss / self.points.len() as f64).sqrt()
    }

    /// Mesh vertex ids of the ring, when every entry is a mesh vertex.
    pub fn mesh_vertices(&self) -> Option<Vec<usize>> {
        self.ring
            .iter()
            .map(|r| match r {
                RingVertex::Mesh(v) => Some(*v),
                RingVertex::Segment { .. } => None,
            })
            .collect()
    }
}

/// Centroid, least-squares plane normal oriented along the mean of `normals`,
/// and `u` toward the first point.
pub fn fit_frame(points: &[Point], normals: &[Vector]) -> LocalFrame {
    let n = points.len() as f64;
    let centroid = Point::from(points.iter().map(|p| p.coords).sum::<Vector>() / n);
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut k = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[k] {
            k = i;
        }
    }
    let mut normal: Vector = eig.eigenvectors.column(k).into_owned();
    let mean: Vector = normals.iter().sum();
    let reference = if mean.norm() > 1e-12 {
        mean
    } else {
        newell_normal(points)
    };
    if normal.dot(&reference) < 0.0 {
        normal = -normal;
    }
    LocalFrame::new(centroid, normal, points[0] - centroid)
}

/// Vector area of a closed polygon in 3D.
pub fn newell_normal(points: &[Point]) -> Vector {
    let n = points.len();
    let mut s = Vector::zeros();
    for i in 0..n {
        s += points[i].coords.cross(&points[(i + 1) % n].coords);
    }
    s * 0.5
}

/// Builds the hole record for a mesh boundary loop.
pub fn analyze_hole(mesh: &TriangleMesh, boundary: &BoundaryLoop) -> Hole {
    let points: Vec<Point> = boundary.vertices().iter().map(|&v| mesh.vertex(v)).collect();
    let fallback = {
        let nn = newell_normal(&points);
        if nn.norm() > 0.0 {
            nn.normalize()
        } else {
            Vector::z()
        }
    };
    let normals = boundary
        .vertices()
        .iter()
        .map(|&v| mesh.vertex_normal(v).unwrap_or(fallback))
        .collect();
    let ring = boundary.vertices().iter().map(|&v| RingVertex::Mesh(v)).collect();
    Hole::from_ring(ring, points, normals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoleClass {
    Small,
    Medium,
    Large,
}

impl std::fmt::Display for HoleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HoleClass::Small => "small",
            HoleClass::Medium => "medium",
            HoleClass::Large => "large",
        })
    }
}

/// `d_H < small*ds` is Small, `small*ds <= d_H <= medium*ds` is Medium, else Large.
pub fn classify_ratio(diameter: f64, ds: f64, small_factor: f64, medium_factor: f64) -> HoleClass {
    if diameter < small_factor * ds {
        HoleClass::Small
    } else if diameter <= medium_factor * ds {
        HoleClass::Medium
    } else {
        HoleClass::Large
    }
}

pub fn classify_hole(hole: &Hole, small_factor: f64, medium_factor: f64) -> HoleClass {
    classify_ratio(hole.diameter, hole.ds, small_factor, medium_factor)
}

/// Cosine of the angle between two vectors, clamped to [-1, 1].
pub fn normal_angle_cos(a: &Vector, b: &Vector) -> Result<f64, AnalysisError> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Sharpness of the normal field at ring position `i`: the smallest cosine
/// among the normals of `i` and its two ring neighbours, including the pair
/// that straddles `i`.
fn fracture_score(hole: &Hole, i: usize) -> f64 {
    let n = hole.len();
    let cos = |a: usize, b: usize| {
        normal_angle_cos(&hole.boundary_normals[a], &hole.boundary_normals[b]).unwrap_or(1.0)
    };
    let prev = (i + n - 1) % n;
    let next = (i + 1) % n;
    cos(i, prev).min(cos(i, next)).min(cos(prev, next))
}

/// Ring positions where the boundary normals turn sharply.
///
/// Consecutive flagged positions collapse to the sharpest one of the run.
pub fn detect_fracture_points(hole: &Hole, cos_threshold: f64) -> Vec<usize> {
    let n = hole.len();
    if n < 3 {
        return Vec::new();
    }
    let scores: Vec<f64> = (0..n).map(|i| fracture_score(hole, i)).collect();
    let flagged: Vec<bool> = scores.iter().map(|&s| s < cos_threshold).collect();
    if !flagged.iter().any(|&f| f) {
        return Vec::new();
    }
    let best_of = |run: &[usize]| {
        *run.iter()
            .min_by(|&&a, &&b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)))
            .expect("non-empty run")
    };
    if flagged.iter().all(|&f| f) {
        let all: Vec<usize> = (0..n).collect();
        return vec![best_of(&all)];
    }
    // start right after an unflagged position so no run wraps
    let start = (0..n).find(|&i| !flagged[i]).expect("some unflagged") + 1;
    let mut out = Vec::new();
    let mut run = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        if flagged[i] {
            run.push(i);
        } else if !run.is_empty() {
            out.push(best_of(&run));
            run.clear();
        }
    }
    if !run.is_empty() {
        out.push(best_of(&run));
    }
    out.sort_unstable();
    out
}

/// Whether the chord between ring positions `i` and `j` stays inside the
/// projected ring polygon.
pub fn chord_inside(poly: &[Vec2], i: usize, j: usize) -> bool {
    let n = poly.len();
    if i == j || (i + 1) % n == j || (j + 1) % n == i {
        return false;
    }
    let (a, b) = (poly[i], poly[j]);
    for k in 0..n {
        let l = (k + 1) % n;
        if k == i || k == j || l == i || l == j {
            continue;
        }
        if geom2d::segments_intersect(a, b, poly[k], poly[l]) {
            return false;
        }
    }
    // the chord must not pass through the endpoints' neighbouring edges either
    for &end in &[i, j] {
        let other = if end == i { b } else { a };
        for nb in [(end + n - 1) % n, (end + 1) % n] {
            let o = geom2d::orient(poly[end], other, poly[nb]);
            let t = (poly[nb] - poly[end]).dot(&(other - poly[end]));
            if o == 0.0 && t > 0.0 {
                return false;
            }
        }
    }
    geom2d::point_in_polygon((a + b) * 0.5, poly)
}

fn chords_cross(poly: &[Vec2], p: (usize, usize), q: (usize, usize)) -> bool {
    geom2d::segments_intersect(poly[p.0], poly[p.1], poly[q.0], poly[q.1])
}

/// Greedy nearest pairing of fracture points with inside, non-crossing chords.
///
/// Returns ring-position pairs `(i, j)` with `i < j`. Leftovers are dropped.
pub fn pair_fracture_points(hole: &Hole, fracture_points: &[usize]) -> Vec<(usize, usize)> {
    if fracture_points.len() < 2 {
        return Vec::new();
    }
    let poly = hole.projected();
    let mut candidates = Vec::new();
    for (a, &i) in fracture_points.iter().enumerate() {
        for &j in &fracture_points[a + 1..] {
            let (i, j) = (i.min(j), i.max(j));
            if chord_inside(&poly, i, j) {
                let d = (hole.points[i] - hole.points[j]).norm();
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used = vec![false; hole.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (_, i, j) in candidates {
        if used[i] || used[j] {
            continue;
        }
        if pairs.iter().any(|&p| chords_cross(&poly, p, (i, j))) {
            continue;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((i, j));
    }
    pairs.sort_unstable();
    pairs
}

/// Points inserted along one segmentation chord.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationLine {
    pub endpoints: (RingVertex, RingVertex),
    pub inserted_points: Vec<Point>,
}

/// Number of points inserted on a chord of length `len` at spacing `ds`.
pub fn insertion_count(len: f64, ds: f64) -> usize {
    ((len / ds).ceil() as usize).saturating_sub(1)
}

struct SubRing {
    ring: Vec<RingVertex>,
    points: Vec<Point>,
    normals: Vec<Vector>,
}

/// Splits a hole along the chords of `pairs` (ring positions of `hole`).
///
/// Inserted points take the mean endpoint height in the hole frame and are
/// spread uniformly in the frame plane.
pub fn segment_hole(
    hole: &Hole,
    pairs: &[(usize, usize)],
) -> Result<(Vec<Hole>, Vec<SegmentationLine>), AnalysisError> {
    if pairs.is_empty() {
        return Ok((vec![hole.clone()], Vec::new()));
    }
    let frame = &hole.frame;
    let mut subs = vec![SubRing {
        ring: hole.ring.clone(),
        points: hole.points.clone(),
        normals: hole.boundary_normals.clone(),
    }];
    let mut lines = Vec::new();
    for (line_id, &(pi, pj)) in pairs.iter().enumerate() {
        let (a, b) = (hole.ring[pi], hole.ring[pj]);
        let found = subs.iter().position(|s| s.ring.contains(&a) && s.ring.contains(&b));
        let Some(si) = found else {
            return Err(AnalysisError::InvalidChord(pi, pj));
        };
        let sub = subs.swap_remove(si);
        let ia = sub.ring.iter().position(|r| *r == a).expect("present");
        let ib = sub.ring.iter().position(|r| *r == b).expect("present");
        let (ia, ib) = (ia.min(ib), ia.max(ib));
        let poly: Vec<Vec2> = sub.points.iter().map(|p| frame.project(p)).collect();
        if !chord_inside(&poly, ia, ib) {
            return Err(AnalysisError::InvalidChord(pi, pj));
        }
        let (pa, pb) = (sub.points[ia], sub.points[ib]);
        let (xa, ha) = frame.to_local(&pa);
        let (xb, hb) = frame.to_local(&pb);
        let count = insertion_count((pb - pa).norm(), hole.ds);
        let height = 0.5 * (ha + hb);
        let inserted: Vec<Point> = (1..=count)
            .map(|s| {
                let t = s as f64 / (count + 1) as f64;
                frame.to_world(xa + (xb - xa) * t, height)
            })
            .collect();
        let seg_normal = {
            let s = sub.normals[ia] + sub.normals[ib];
            if s.norm() > 1e-12 {
                s.normalize()
            } else {
                frame.n
            }
        };
        let seg_id = |k: usize| RingVertex::Segment { line: line_id, index: k };

        // arc ia..=ib, then back along the chord
        let mut first = SubRing {
            ring: sub.ring[ia..=ib].to_vec(),
            points: sub.points[ia..=ib].to_vec(),
            normals: sub.normals[ia..=ib].to_vec(),
        };
        for k in (0..count).rev() {
            first.ring.push(seg_id(k));
            first.points.push(inserted[k]);
            first.normals.push(seg_normal);
        }
        // arc ib..=ia (wrapping), then forward along the chord
        let mut second = SubRing {
            ring: Vec::new(),
            points: Vec::new(),
            normals: Vec::new(),
        };
        let m = sub.ring.len();
        let mut k = ib;
        loop {
            second.ring.push(sub.ring[k]);
            second.points.push(sub.points[k]);
            second.normals.push(sub.normals[k]);
            if k == ia {
                break;
            }
            k = (k + 1) % m;
        }
        for k in 0..count {
            second.ring.push(seg_id(k));
            second.points.push(inserted[k]);
            second.normals.push(seg_normal);
        }
        subs.push(first);
        subs.push(second);
        lines.push(SegmentationLine {
            endpoints: (a, b),
            inserted_points: inserted,
        });
    }
    // deterministic order: by smallest ring vertex
    subs.sort_by_key(|s| s.ring.iter().min().copied());
    let holes = subs
        .into_iter()
        .map(|s| Hole::from_ring(s.ring, s.points, s.normals))
        .collect();
    Ok((holes, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar_ring(points2: &[(f64, f64)]) -> Hole {
        let points: Vec<Point> = points2.iter().map(|&(x, y)| Point::new(x, y, 0.0)).collect();
        let ring = (0..points.len()).map(RingVertex::Mesh).collect();
        let normals = vec![Vector::z(); points.len()];
        Hole::from_ring(ring, points, normals)
    }

    fn regular(n: usize, side: f64) -> Hole {
        let r = side / (2.0 * (std::f64::consts::PI / n as f64).sin());
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        planar_ring(&pts)
    }

    #[test]
    fn scalars_of_simple_rings() {
        let tri = regular(3, 1.0);
        assert!((tri.ds - 1.0).abs() < 1e-12);
        assert!((tri.diameter - 1.0).abs() < 1e-12);
        let sq = planar_ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!((sq.ds - 1.0).abs() < 1e-15);
        assert!((sq.diameter - 1.414_213_56).abs() < 1e-8);
        let hex = regular(6, 1.0);
        assert!((hex.ds - 1.0).abs() < 1e-12);
        assert!((hex.diameter - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frame_is_orthonormal_and_oriented() {
        let hex = regular(6, 1.0);
        let f = hex.frame;
        assert!((f.u.norm() - 1.0).abs() < 1e-12);
        assert!((f.v.norm() - 1.0).abs() < 1e-12);
        assert!((f.n.norm() - 1.0).abs() < 1e-12);
        assert!(f.u.dot(&f.v).abs() < 1e-12);
        assert!(f.u.dot(&f.n).abs() < 1e-12);
        assert!(f.v.dot(&f.n).abs() < 1e-12);
        assert!((f.n - Vector::z()).norm() < 1e-12);
        assert!(geom2d::signed_area(&hex.projected()) > 0.0);
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(classify_ratio(1.4, 1.0, 1.5, 2.5), HoleClass::Small);
        assert_eq!(classify_ratio(1.5, 1.0, 1.5, 2.5), HoleClass::Medium);
        assert_eq!(classify_ratio(2.5, 1.0, 1.5, 2.5), HoleClass::Medium);
        assert_eq!(classify_ratio(3.0, 1.0, 1.5, 2.5), HoleClass::Large);
    }

    #[test]
    fn angle_cosines() {
        let z = Vector::z();
        assert_eq!(normal_angle_cos(&z, &z).unwrap(), 1.0);
        assert_eq!(normal_angle_cos(&Vector::x(), &Vector::y()).unwrap(), 0.0);
        assert_eq!(normal_angle_cos(&Vector::x(), &-Vector::x()).unwrap(), -1.0);
        assert_eq!(
            normal_angle_cos(&Vector::zeros(), &z),
            Err(AnalysisError::ZeroVector)
        );
    }

    #[test]
    fn flat_hole_has_no_fracture_points() {
        let h = regular(24, 0.1);
        assert!(detect_fracture_points(&h, 0.7).is_empty());
        assert!(detect_fracture_points(&h, -1.0).is_empty());
    }

    #[test]
    fn fracture_runs_collapse_to_sharpest() {
        // normals: left sheet, crossing vertex bisecting, right sheet
        let mut h = regular(12, 1.0);
        let left = Vector::new(-1.0, 0.0, 1.0).normalize();
        let right = Vector::new(1.0, 0.0, 1.0).normalize();
        for i in 0..12 {
            h.boundary_normals[i] = if (1..6).contains(&i) { left } else { right };
        }
        h.boundary_normals[0] = Vector::z();
        h.boundary_normals[6] = Vector::z();
        assert_eq!(detect_fracture_points(&h, 0.7), vec![0, 6]);
    }

    #[test]
    fn pairing_small_cases() {
        let h = regular(12, 1.0);
        assert!(pair_fracture_points(&h, &[]).is_empty());
        assert!(pair_fracture_points(&h, &[3]).is_empty());
        assert_eq!(pair_fracture_points(&h, &[9, 3]), vec![(3, 9)]);
    }

    #[test]
    fn segmenting_without_pairs_is_identity() {
        let h = regular(8, 1.0);
        let (subs, lines) = segment_hole(&h, &[]).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(lines.is_empty());
        assert_eq!(subs[0].ring, h.ring);
    }

    #[test]
    fn insertion_count_matches_rule() {
        assert_eq!(insertion_count(3.2, 1.0), 3);
        assert_eq!(insertion_count(3.0, 1.0), 2);
        assert_eq!(insertion_count(0.5, 1.0), 0);
    }

    #[test]
    fn chord_spacing_and_conservation() {
        // strip 3.2 wide with vertices every 0.4 along both long sides
        let mut pts = Vec::new();
        let steps = 8;
        for k in 0..steps {
            pts.push((0.4 * k as f64, 0.0));
        }
        for k in 0..=steps {
            pts.push((3.2 - 0.4 * k as f64, 1.0));
        }
        let mut h = planar_ring(&pts);
        h.ds = 1.0;
        let n = pts.len();
        // ring neighbours never form a chord
        assert!(!chord_inside(&h.projected(), 0, n - 1));
        let (subs, lines) = segment_hole(&h, &[(0, 8)]).unwrap();
        assert_eq!(lines.len(), 1);
        let seg = &lines[0];
        let len = (h.points[8] - h.points[0]).norm();
        assert_eq!(seg.inserted_points.len(), insertion_count(len, 1.0));
        let mut chain = vec![h.points[0]];
        chain.extend(seg.inserted_points.iter().copied());
        chain.push(h.points[8]);
        for w in chain.windows(2) {
            let d = (w[1] - w[0]).norm();
            assert!((0.5..=1.5).contains(&d), "spacing {d}");
        }
        assert_eq!(subs.len(), 2);
        let mut edges: Vec<(RingVertex, RingVertex)> = Vec::new();
        for s in &subs {
            let m = s.ring.len();
            for k in 0..m {
                let (a, b) = (s.ring[k], s.ring[(k + 1) % m]);
                if matches!(a, RingVertex::Mesh(_)) && matches!(b, RingVertex::Mesh(_)) {
                    edges.push((a, b));
                }
            }
        }
        let mut orig: Vec<_> = (0..n).map(|k| (h.ring[k], h.ring[(k + 1) % n])).collect();
        edges.sort();
        orig.sort();
        assert_eq!(edges, orig);
    }
}
