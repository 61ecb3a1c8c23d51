//! Ear clipping of a hole ring in its frame projection.

use super::FillError;
use crate::analysis::LocalFrame;
use crate::geom2d::{self, Vec2};
use crate::mesh::{Point, TriangleMesh, Vector};

/// Which valid ear to clip next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarRule {
    /// Smallest maximum dihedral angle against the faces already on the
    /// ear's two ring edges.
    MinMaxDihedral,
    /// Best triangle shape (radius-ratio style quality), blind to the
    /// surrounding surface.
    BestShape,
}

fn unit_normal(a: &Point, b: &Point, c: &Point) -> Option<Vector> {
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    (len > 0.0).then(|| n / len)
}

/// `4 sqrt(3) area / sum of squared edge lengths`; 1 for equilateral.
pub fn triangle_quality(a: &Point, b: &Point, c: &Point) -> f64 {
    let area2 = (b - a).cross(&(c - a)).norm();
    let sq = (b - a).norm_squared() + (c - b).norm_squared() + (a - c).norm_squared();
    if sq == 0.0 {
        return 0.0;
    }
    2.0 * 3f64.sqrt() * area2 / sq
}

fn dihedral_score(mesh: &TriangleMesh, a: usize, b: usize, c: usize) -> f64 {
    let (pa, pb, pc) = (mesh.vertex(a), mesh.vertex(b), mesh.vertex(c));
    let Some(n) = unit_normal(&pa, &pb, &pc) else {
        return std::f64::consts::PI;
    };
    let mut worst: f64 = 0.0;
    for (p, q) in [(a, b), (b, c)] {
        for &f in mesh.incident_faces(p, q) {
            if let Ok(nf) = mesh.face_normal(f) {
                worst = worst.max(n.dot(&nf).clamp(-1.0, 1.0).acos());
            }
        }
    }
    worst
}

/// Triangulates the ring without new vertices, appending `n - 2` faces.
///
/// Faces follow the ring direction, so a ring oriented like a boundary loop
/// yields faces consistent with the surrounding surface.
pub fn ear_clip(
    mesh: &mut TriangleMesh,
    ring: &[usize],
    frame: &LocalFrame,
    rule: EarRule,
) -> Result<usize, FillError> {
    let n = ring.len();
    if n < 3 {
        return Err(FillError::RingTooShort);
    }
    let pts: Vec<Vec2> = ring.iter().map(|&v| frame.project(&mesh.vertex(v))).collect();
    let area = geom2d::signed_area(&pts);
    if area == 0.0 || !area.is_finite() {
        return Err(FillError::EarClipFailure { remaining: n });
    }
    let sign = area.signum();
    let eps = 1e-14 * area.abs();
    let touch = 1e-10 * area.abs();
    let mut rem: Vec<usize> = (0..n).collect();
    let mut added = 0;
    while rem.len() > 3 {
        let m = rem.len();
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for k in 0..m {
            let (ia, ib, ic) = (rem[(k + m - 1) % m], rem[k], rem[(k + 1) % m]);
            let (pa, pb, pc) = (pts[ia], pts[ib], pts[ic]);
            if sign * geom2d::orient(pa, pb, pc) <= eps {
                continue;
            }
            let blocked = rem.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = pts[j];
                if p == pa || p == pb || p == pc {
                    return false;
                }
                // points on the diagonal block too, even when rounding puts
                // them a hair outside
                let (a, b, c) = if sign > 0.0 { (pa, pb, pc) } else { (pa, pc, pb) };
                geom2d::orient(a, b, p) >= -touch && geom2d::orient(b, c, p) >= -touch && geom2d::orient(c, a, p) >= -touch
            });
            if blocked {
                continue;
            }
            let (va, vb, vc) = (ring[ia], ring[ib], ring[ic]);
            if !mesh.incident_faces(va, vc).is_empty() {
                continue;
            }
            let score = match rule {
                EarRule::MinMaxDihedral => dihedral_score(mesh, va, vb, vc),
                EarRule::BestShape => {
                    -triangle_quality(&mesh.vertex(va), &mesh.vertex(vb), &mesh.vertex(vc))
                }
            };
            candidates.push((score, vb, k));
        }
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        // an ear whose removal leaves a zero-area remainder (say, an apex
        // over a straight run of points) is a dead end
        let min_area = 1e-12 * area.abs();
        let keeps_area = |k: usize| {
            let rest: Vec<Vec2> = rem.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &j)| pts[j]).collect();
            sign * geom2d::signed_area(&rest) > min_area
        };
        let Some(&(_, _, k)) = candidates.iter().find(|c| m == 3 || keeps_area(c.2)) else {
            return Err(FillError::EarClipFailure { remaining: m });
        };
        let (ia, ib, ic) = (rem[(k + m - 1) % m], rem[k], rem[(k + 1) % m]);
        mesh.add_face([ring[ia], ring[ib], ring[ic]])?;
        added += 1;
        rem.remove(k);
    }
    mesh.add_face([ring[rem[0]], ring[rem[1]], ring[rem[2]]])?;
    Ok(added + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fit_frame;

    /// Mesh with a ring of `outline` vertices surrounded by one fan of faces
    /// per edge, leaving the polygon itself open.
    fn open_polygon(outline: &[(f64, f64, f64)]) -> (TriangleMesh, Vec<usize>) {
        let n = outline.len();
        let mut v: Vec<Point> = outline.iter().map(|&(x, y, z)| Point::new(x, y, z)).collect();
        let mut faces = Vec::new();
        let c = Point::from(v.iter().map(|p| p.coords).sum::<Vector>() / n as f64);
        for i in 0..n {
            // outer vertex pushed away from the centroid
            let mid = Point::from((v[i].coords + v[(i + 1) % n].coords) * 0.5);
            let out = mid + (mid - c) * 0.5;
            v.push(out);
            faces.push([(i + 1) % n, i, n + i]);
        }
        let mesh = TriangleMesh::new(v, faces).unwrap();
        (mesh, (0..n).collect())
    }

    #[test]
    fn small_rings_triangulate_to_n_minus_2() {
        for outline in [
            vec![(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)],
            vec![(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.0, 1.0, 0.0)],
        ] {
            let (mut mesh, ring) = open_polygon(&outline);
            let pts: Vec<Point> = ring.iter().map(|&i| mesh.vertex(i)).collect();
            let frame = fit_frame(&pts, &vec![Vector::z(); pts.len()]);
            let before = mesh.vertex_count();
            let added = ear_clip(&mut mesh, &ring, &frame, EarRule::MinMaxDihedral).unwrap();
            assert_eq!(added, outline.len() - 2);
            assert_eq!(mesh.vertex_count(), before);
            assert!(mesh.is_consistently_oriented());
        }
    }

    #[test]
    fn convex_pentagon_conserves_area() {
        let outline: Vec<(f64, f64, f64)> = (0..5)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 5.0;
                (a.cos(), a.sin(), 0.0)
            })
            .collect();
        let (mut mesh, ring) = open_polygon(&outline);
        let pts: Vec<Point> = ring.iter().map(|&i| mesh.vertex(i)).collect();
        let frame = fit_frame(&pts, &vec![Vector::z(); 5]);
        let faces_before = mesh.face_count();
        assert_eq!(ear_clip(&mut mesh, &ring, &frame, EarRule::MinMaxDihedral).unwrap(), 3);
        let filled: f64 = (faces_before..mesh.face_count()).map(|f| mesh.face_area(f)).sum();
        let poly: Vec<Vec2> = pts.iter().map(|p| Vec2::new(p.x, p.y)).collect();
        assert!((filled - geom2d::signed_area(&poly)).abs() < 1e-12);
        assert!(mesh.is_consistently_oriented());
    }

    #[test]
    fn vertex_rounding_off_a_diagonal_still_blocks_it() {
        // the dent sits on the chord from the second to the last vertex,
        // nudged just outside the ear at the first vertex
        let (b, e) = ((-0.624, -0.416), (0.624, 0.416));
        let off = 1e-16;
        let outline = vec![
            (-0.416, 0.624, 0.0),
            (b.0, b.1, 0.0),
            (0.832 * off, -1.248 * off, 0.0),
            (0.555, -0.832, 0.0),
            (e.0, e.1, 0.0),
        ];
        let (mut mesh, ring) = open_polygon(&outline);
        let pts: Vec<Point> = ring.iter().map(|&i| mesh.vertex(i)).collect();
        let frame = LocalFrame::new(Point::origin(), Vector::z(), Vector::x());
        let faces_before = mesh.face_count();
        assert_eq!(ear_clip(&mut mesh, &ring, &frame, EarRule::MinMaxDihedral).unwrap(), 3);
        let filled: f64 = (faces_before..mesh.face_count()).map(|f| mesh.face_area(f)).sum();
        let poly: Vec<Vec2> = pts.iter().map(|p| Vec2::new(p.x, p.y)).collect();
        assert!((filled - geom2d::signed_area(&poly)).abs() < 1e-12);
    }

    #[test]
    fn quality_of_equilateral_is_one() {
        let q = triangle_quality(
            &Point::new(0.0, 0.0, 0.0),
            &Point::new(1.0, 0.0, 0.0),
            &Point::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        );
        assert!((q - 1.0).abs() < 1e-12);
    }
}
